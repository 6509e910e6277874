#!/usr/bin/env python3
"""Regenerates the sample expert ink under data/sample/.

Strokes are authored as polylines in a unit box (y down), mapped onto a
400x400 canvas and sampled at slightly irregular spacing with pen timing,
so the files look like captured ink rather than clean vectors.
"""

import json
import math
import random
from pathlib import Path

CANVAS = 400.0
MARGIN = 70.0

# Stroke order and direction follow standard writing rules.
CHARACTERS = {
    "一": [[(0.05, 0.50), (0.50, 0.48), (0.95, 0.50)]],
    "三": [
        [(0.20, 0.20), (0.80, 0.20)],
        [(0.28, 0.50), (0.72, 0.50)],
        [(0.10, 0.82), (0.90, 0.82)],
    ],
    "上": [
        [(0.45, 0.10), (0.45, 0.85)],
        [(0.45, 0.45), (0.75, 0.45)],
        [(0.10, 0.85), (0.90, 0.85)],
    ],
    "下": [
        [(0.10, 0.15), (0.90, 0.15)],
        [(0.50, 0.15), (0.50, 0.90)],
        [(0.58, 0.40), (0.70, 0.55)],
    ],
    "大": [
        [(0.10, 0.35), (0.90, 0.35)],
        [(0.50, 0.08), (0.50, 0.35), (0.42, 0.60), (0.12, 0.92)],
        [(0.52, 0.42), (0.70, 0.70), (0.92, 0.92)],
    ],
    "山": [
        [(0.50, 0.10), (0.50, 0.85)],
        [(0.15, 0.35), (0.15, 0.85), (0.85, 0.85)],
        [(0.85, 0.35), (0.85, 0.92)],
    ],
    "川": [
        [(0.20, 0.15), (0.20, 0.60), (0.10, 0.90)],
        [(0.50, 0.20), (0.50, 0.75)],
        [(0.80, 0.10), (0.80, 0.92)],
    ],
    "日": [
        [(0.25, 0.10), (0.25, 0.90)],
        [(0.25, 0.10), (0.75, 0.10), (0.75, 0.90)],
        [(0.25, 0.50), (0.75, 0.50)],
        [(0.25, 0.90), (0.75, 0.90)],
    ],
    "口": [
        [(0.15, 0.20), (0.15, 0.85)],
        [(0.15, 0.20), (0.85, 0.20), (0.85, 0.85)],
        [(0.15, 0.85), (0.85, 0.85)],
    ],
    "中": [
        [(0.15, 0.30), (0.15, 0.70)],
        [(0.15, 0.30), (0.85, 0.30), (0.85, 0.70)],
        [(0.15, 0.70), (0.85, 0.70)],
        [(0.50, 0.05), (0.50, 0.95)],
    ],
}

LESSONS = [
    ("L1", "Numbers and position", ["一", "三", "上", "下", "大"]),
    ("L2", "Nature", ["山", "川", "日"]),
    ("L3", "Enclosures", ["口", "中"]),
]

INFO = {
    "一": (["いち", "ひと"], ["one"], [("一つ", "ひとつ", "one (thing)", True)]),
    "三": (["さん", "み"], ["three"], [("三つ", "みっつ", "three (things)", True)]),
    "上": (["じょう", "うえ"], ["up", "above"], [("上", "うえ", "on top", True)]),
    "下": (["か", "した"], ["down", "below"], [("下", "した", "under", True)]),
    "大": (["だい", "おお"], ["big"], [("大きい", "おおきい", "big", True), ("大学", "だいがく", "university", False)]),
    "山": (["さん", "やま"], ["mountain"], [("山", "やま", "mountain", True)]),
    "川": (["せん", "かわ"], ["river"], [("川", "かわ", "river", True)]),
    "日": (["にち", "ひ", "か"], ["day", "sun"], [("日本", "にほん", "Japan", True), ("毎日", "まいにち", "every day", False)]),
    "口": (["こう", "くち"], ["mouth"], [("口", "くち", "mouth", True)]),
    "中": (["ちゅう", "なか"], ["middle", "inside"], [("中", "なか", "inside", True), ("中国", "ちゅうごく", "China", False)]),
}


def to_canvas(p):
    span = CANVAS - 2 * MARGIN
    return (MARGIN + p[0] * span, MARGIN + p[1] * span)


def sample_stroke(poly, rng, t0):
    """Samples a polyline at ~6px with jittered spacing; returns points and end time."""
    pts = [to_canvas(p) for p in poly]
    out = [(pts[0][0], pts[0][1], t0)]
    t = t0
    for (ax, ay), (bx, by) in zip(pts, pts[1:]):
        seg = math.hypot(bx - ax, by - ay)
        pos = 0.0
        while True:
            pos += rng.uniform(4.0, 8.0)
            if pos >= seg:
                break
            f = pos / seg
            t += rng.randint(7, 12)
            out.append((round(ax + f * (bx - ax), 2), round(ay + f * (by - ay), 2), t))
        t += rng.randint(7, 12)
        out.append((bx, by, t))
    return out, t


def make_ink(label, strokes, seed):
    rng = random.Random(seed)
    t = 400
    ink_strokes = []
    for poly in strokes:
        points, t = sample_stroke(poly, rng, t)
        ink_strokes.append({"points": [{"x": float(x), "y": float(y), "t": ts} for x, y, ts in points]})
        t += rng.randint(180, 320)
    return {
        "metadata": {"label": label, "canvasWidth": CANVAS, "canvasHeight": CANVAS},
        "strokes": ink_strokes,
        "events": {"startedAt": 0, "submittedAt": t + 200, "edits": []},
    }


def main():
    root = Path(__file__).resolve().parent.parent / "data" / "sample"
    raw = root / "raw"
    raw.mkdir(parents=True, exist_ok=True)
    for i, (label, strokes) in enumerate(CHARACTERS.items()):
        name = "_".join("u%04x" % ord(c) for c in label)
        doc = make_ink(label, strokes, seed=1000 + i)
        (raw / f"{name}.json").write_text(json.dumps(doc, ensure_ascii=False) + "\n", encoding="utf-8")

    lessons = []
    for lid, title, labels in LESSONS:
        chars = []
        for label in labels:
            pron, trans, vocab = INFO[label]
            chars.append({
                "label": label,
                "pronunciations": pron,
                "translations": trans,
                "vocabulary": [
                    {"word": w, "pronunciation": p, "translation": tr, "highlighted": h} for w, p, tr, h in vocab
                ],
            })
        lessons.append({"id": lid, "title": title, "characters": chars})
    (root / "catalog.json").write_text(
        json.dumps({"lessons": lessons}, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
