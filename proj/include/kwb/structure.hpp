#pragma once

// Stroke correspondence (Hausdorff cost + optimal one-to-one assignment) and
// the stroke match / valid / exist ratios.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "kwb/error.hpp"
#include "kwb/ink.hpp"
#include "kwb/normalize.hpp"
#include "kwb/template_store.hpp"
#include "kwb/thresholds.hpp"

namespace kwb {

namespace detail {

// Directed Hausdorff with the early-break scan: once a point of `a` is
// closer to `b` than the running maximum it cannot raise the result.
inline double directed_hausdorff_sq(std::span<const Point> a, std::span<const Point> b) {
  double cmax = 0.0;
  for (const auto& p : a) {
    double cmin = std::numeric_limits<double>::infinity();
    bool dominated = false;
    for (const auto& q : b) {
      const double dx = p.x - q.x, dy = p.y - q.y;
      const double d = dx * dx + dy * dy;
      if (d < cmax) {
        dominated = true;
        break;
      }
      cmin = std::min(cmin, d);
    }
    if (!dominated && cmin > cmax) cmax = cmin;
  }
  return cmax;
}

}  // namespace detail

// Symmetric Hausdorff distance between the point sets of two strokes.
inline double hausdorff(const Stroke& a, const Stroke& b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::argument, "hausdorff of an empty stroke");
  const double ab = detail::directed_hausdorff_sq(a.points, b.points);
  const double ba = detail::directed_hausdorff_sq(b.points, a.points);
  return std::sqrt(std::max(ab, ba));
}

class CostMatrix {
 public:
  CostMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

inline CostMatrix hausdorff_costs(std::span<const Stroke> input, std::span<const Stroke> model) {
  CostMatrix m(input.size(), model.size());
  for (std::size_t i = 0; i < input.size(); ++i)
    for (std::size_t j = 0; j < model.size(); ++j) m(i, j) = hausdorff(input[i], model[j]);
  return m;
}

struct Assignment {
  std::vector<std::optional<std::size_t>> row_to_col;
  double cost = 0.0;  // summed in row order
};

namespace detail {

// Hungarian method with potentials on a rows x cols submatrix, padded to a
// square with zero-cost dummies. Returns the column (or nullopt) per row.
inline std::vector<std::optional<std::size_t>> hungarian(const CostMatrix& cost,
                                                         const std::vector<std::size_t>& rows,
                                                         const std::vector<std::size_t>& cols) {
  const std::size_t k = std::max(rows.size(), cols.size());
  std::vector<std::optional<std::size_t>> result(rows.size());
  if (k == 0) return result;
  const auto c = [&](std::size_t r, std::size_t col) -> double {
    if (r >= rows.size() || col >= cols.size()) return 0.0;
    return cost(rows[r], cols[col]);
  };
  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based arrays; index 0 is the virtual start column.
  std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0), minv(k + 1);
  std::vector<std::size_t> p(k + 1, 0), way(k + 1, 0);
  std::vector<char> used(k + 1);
  for (std::size_t i = 1; i <= k; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= k; ++j) {
        if (used[j]) continue;
        const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= k; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (std::size_t j = 1; j <= k; ++j) {
    const std::size_t r = p[j] - 1;
    if (p[j] != 0 && r < rows.size() && j - 1 < cols.size()) result[r] = cols[j - 1];
  }
  return result;
}

inline double assignment_cost(const CostMatrix& cost, const std::vector<std::size_t>& rows,
                              const std::vector<std::optional<std::size_t>>& picks) {
  double total = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (picks[r]) total += cost(rows[r], *picks[r]);
  return total;
}

}  // namespace detail

// Minimum-cost assignment matching min(rows, cols) pairs. Among optimal
// assignments (within a relative 1e-9) the lexicographically smallest one
// is chosen: rows in order take the lowest column that keeps the optimum,
// with "unassigned" ranked after every column.
inline Assignment optimal_assignment(const CostMatrix& cost) {
  std::vector<std::size_t> rows(cost.rows()), cols(cost.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = j;

  auto picks = detail::hungarian(cost, rows, cols);
  const double best = detail::assignment_cost(cost, rows, picks);
  const double tol = 1e-9 * (1.0 + std::abs(best));

  Assignment out;
  out.row_to_col.assign(cost.rows(), std::nullopt);
  double fixed = 0.0;
  std::vector<std::size_t> free_rows = rows, free_cols = cols;
  // Invariant: picks[k] is an optimal completion for free_rows[k].
  for (std::size_t r = 0; r < cost.rows(); ++r) {
    const auto current = picks.front();
    std::vector<std::size_t> rest_rows(free_rows.begin() + 1, free_rows.end());
    std::optional<std::size_t> chosen = current;
    std::vector<std::optional<std::size_t>> chosen_rest(picks.begin() + 1, picks.end());

    for (auto col : free_cols) {
      if (current && col >= *current) break;
      auto rest_cols = free_cols;
      rest_cols.erase(std::find(rest_cols.begin(), rest_cols.end(), col));
      auto rest = detail::hungarian(cost, rest_rows, rest_cols);
      const double total = fixed + cost(r, col) + detail::assignment_cost(cost, rest_rows, rest);
      if (total <= best + tol) {
        chosen = col;
        chosen_rest = std::move(rest);
        break;
      }
    }
    out.row_to_col[r] = chosen;
    if (chosen) {
      fixed += cost(r, *chosen);
      free_cols.erase(std::find(free_cols.begin(), free_cols.end(), *chosen));
    }
    free_rows = std::move(rest_rows);
    picks = std::move(chosen_rest);
  }
  out.cost = detail::assignment_cost(cost, rows, out.row_to_col);
  return out;
}

struct MatchPair {
  std::size_t input_index = 0;
  std::size_t model_index = 0;
  double distance = 0.0;

  friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

struct MatchMap {
  std::vector<MatchPair> pairs;  // ascending input_index
  std::vector<std::size_t> unmatched_input;
  std::vector<std::size_t> unmatched_model;

  std::size_t input_count() const noexcept { return pairs.size() + unmatched_input.size(); }
  std::size_t model_count() const noexcept { return pairs.size() + unmatched_model.size(); }
  double total_distance() const noexcept {
    double total = 0.0;
    for (const auto& p : pairs) total += p.distance;
    return total;
  }

  friend bool operator==(const MatchMap&, const MatchMap&) = default;
};

// Optimal assignment on the Hausdorff cost matrix; assigned pairs farther
// apart than `threshold` are demoted to unmatched on both sides.
inline MatchMap match_strokes(std::span<const Stroke> input, std::span<const Stroke> model, double threshold) {
  if (input.empty()) throw Error(ErrorKind::empty_sketch, "no assessable strokes", "strokes");
  const auto cost = hausdorff_costs(input, model);
  const auto assignment = optimal_assignment(cost);

  MatchMap m;
  std::vector<char> model_used(model.size(), 0);
  for (std::size_t i = 0; i < input.size(); ++i) {
    const auto col = assignment.row_to_col[i];
    if (col && cost(i, *col) <= threshold) {
      m.pairs.push_back({i, *col, cost(i, *col)});
      model_used[*col] = 1;
    } else {
      m.unmatched_input.push_back(i);
    }
  }
  for (std::size_t j = 0; j < model.size(); ++j)
    if (!model_used[j]) m.unmatched_model.push_back(j);
  return m;
}

inline MatchMap match_strokes(const NormalizedSketch& input, const Template& model, const ThresholdConfig& cfg) {
  return match_strokes(input.strokes, model.normalized.strokes, cfg.match_threshold);
}

struct StructureResult {
  double match_ratio = 0.0;
  double valid_ratio = 0.0;
  double exist_ratio = 0.0;
  MatchMap match_map;
};

inline StructureResult structure_metrics(const MatchMap& m) {
  StructureResult r;
  r.match_map = m;
  const auto pairs = static_cast<double>(m.pairs.size());
  const auto ni = m.input_count();
  const auto nm = m.model_count();
  const auto larger = std::max(ni, nm);
  r.match_ratio = larger ? pairs / static_cast<double>(larger) : 0.0;
  r.valid_ratio = nm ? pairs / static_cast<double>(nm) : 0.0;
  r.exist_ratio = ni ? pairs / static_cast<double>(ni) : 0.0;
  return r;
}

}  // namespace kwb
