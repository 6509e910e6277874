#include <gtest/gtest.h>

#include <fstream>

#include "support/fixtures.hpp"

using namespace kwb;
using namespace kwb::testing;
namespace fs = std::filesystem;

namespace {

// Independent hash of every file below `dir` (relative path + contents).
std::string tree_digest(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) all += fs::relative(f, dir).string() + "\n" + read_text_file(f) + "\n";
  return std::to_string(std::hash<std::string>{}(all)) + ":" + std::to_string(all.size());
}

}  // namespace

TEST(TemplateStore, SampleHasTenTemplates) {
  const auto& store = sample_store();
  EXPECT_EQ(store.size(), 10u);
  for (const auto& label : store.labels()) {
    const auto& t = store.lookup_template(label);
    EXPECT_EQ(t.stroke_count, t.normalized.strokes.size());
    for (const auto& s : t.normalized.strokes) EXPECT_EQ(s.size(), 64u);
    EXPECT_EQ(t.per_stroke_durations.size(), t.stroke_count);
    EXPECT_EQ(t.total_duration, sketch_duration(t.raw));
  }
}

TEST(TemplateStore, LookupOne) {
  EXPECT_EQ(sample_store().lookup_template("一").stroke_count, 1u);
  EXPECT_EQ(sample_store().lookup_template("日").stroke_count, 4u);
}

TEST(TemplateStore, UnknownLabelNotFound) {
  try {
    sample_store().lookup_template("☃");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_found);
  }
}

TEST(TemplateStore, EveryCatalogLabelResolves) {
  for (const auto& lesson : sample_store().list_lessons())
    for (const auto& label : lesson.character_labels) EXPECT_NO_THROW(sample_store().lookup_template(label));
}

TEST(TemplateStore, LessonsInAuthoredOrder) {
  const auto& lessons = sample_store().list_lessons();
  ASSERT_EQ(lessons.size(), 3u);
  EXPECT_EQ(lessons[0].id, "L1");
  EXPECT_EQ(lessons[1].id, "L2");
  EXPECT_EQ(lessons[2].id, "L3");
  const auto& l1 = sample_store().lesson_characters("L1");
  ASSERT_EQ(l1.size(), 5u);
  const std::vector<std::string> expected = {"一", "三", "上", "下", "大"};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(l1[i].label, expected[i]);
  EXPECT_FALSE(l1[0].pronunciations.empty());
  EXPECT_FALSE(l1[0].vocabulary.empty());
}

TEST(TemplateStore, UnknownLessonNotFound) {
  try {
    sample_store().lesson_characters("L99");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_found);
  }
  EXPECT_THROW(sample_store().lesson("L99"), Error);
}

TEST(TemplateStore, MissingTemplateNamesLabel) {
  auto catalog = sample_catalog();
  catalog.lessons[1].character_labels.push_back("水");
  try {
    TemplateStore::build(sample_raw_inks(), catalog);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::validation);
    EXPECT_NE(std::string(e.what()).find("水"), std::string::npos);
  }
}

TEST(TemplateStore, DuplicateLabelRejected) {
  auto raws = sample_raw_inks();
  raws.push_back(raws.front());
  EXPECT_THROW(TemplateStore::build(raws, sample_catalog()), Error);
}

TEST(TemplateStore, OrphanTemplateWarns) {
  auto raws = sample_raw_inks();
  auto extra = raws.front();
  extra.metadata.label = "火";
  raws.push_back(extra);
  const auto store = TemplateStore::build(raws, sample_catalog());
  EXPECT_EQ(store.size(), 10u);
  ASSERT_EQ(store.warnings().size(), 1u);
}

TEST(TemplateStore, WriteLoadRoundTrip) {
  const auto dir = scratch_dir("store_rt");
  const auto result = preprocess_templates(sample_dir() / "raw", sample_dir() / "catalog.json", dir);
  const auto loaded = TemplateStore::load(dir);
  EXPECT_EQ(loaded.version(), result.version);
  EXPECT_EQ(loaded.labels(), sample_store().labels());
  for (const auto& label : loaded.labels()) {
    const auto& a = loaded.lookup_template(label);
    const auto& b = sample_store().lookup_template(label);
    EXPECT_EQ(a.normalized, b.normalized);
    EXPECT_EQ(a.raw, b.raw);
    EXPECT_EQ(a.per_stroke_lengths, b.per_stroke_lengths);
  }
  fs::remove_all(dir);
}

TEST(TemplateStore, PreprocessDeterministic) {
  const auto a = scratch_dir("store_a");
  const auto b = scratch_dir("store_b");
  const auto va = preprocess_templates(sample_dir() / "raw", sample_dir() / "catalog.json", a).version;
  const auto vb = preprocess_templates(sample_dir() / "raw", sample_dir() / "catalog.json", b).version;
  EXPECT_EQ(va, vb);
  EXPECT_EQ(tree_digest(a), tree_digest(b));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(TemplateStore, UnparseableInkNamesFile) {
  const auto raw = scratch_dir("bad_raw");
  for (const auto& e : fs::directory_iterator(sample_dir() / "raw")) fs::copy_file(e.path(), raw / e.path().filename());
  std::ofstream(raw / "zz_broken.json") << "{\"metadata\":";
  try {
    preprocess_templates(raw, sample_dir() / "catalog.json", scratch_dir("bad_out"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parse);
    EXPECT_NE(e.path().find("zz_broken.json"), std::string::npos);
  }
  fs::remove_all(raw);
}

TEST(TemplateStore, TamperedTemplateRejectedOnLoad) {
  const auto dir = scratch_dir("store_tamper");
  preprocess_templates(sample_dir() / "raw", sample_dir() / "catalog.json", dir);
  const auto file = dir / "templates" / "u4e00.json";
  auto doc = nlohmann::json::parse(read_text_file(file));
  doc["strokeCount"] = 2;
  std::ofstream(file, std::ios::trunc) << doc.dump(2);
  EXPECT_THROW(TemplateStore::load(dir), Error);
  fs::remove_all(dir);
}

TEST(TemplateStore, FileStems) {
  EXPECT_EQ(label_file_stem("一"), "u4e00");
  EXPECT_EQ(label_file_stem("日"), "u65e5");
}
