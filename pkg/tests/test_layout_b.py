import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from tablegrid.evalkit import grid_similarity
from tablegrid.layout_b import (
    collision_profile,
    default_merge_gap,
    default_spacing,
    dilate_boxes,
    extract_approach_two,
    least_collision_bounds,
    words_to_grid,
)
from tablegrid.ocr import OcrConfig, WordBox
from tablegrid.raster import BoxRect
from tablegrid.standardize import ScaleContext
from tablegrid.synthgen import TableSpec

from oracles import free_corridors


def word(left, top, width, height, text="w"):
    return WordBox(BoxRect(left, top, width, height), text, 90.0)


def span_box(x0, x1, top=0, height=10):
    return BoxRect.from_edges(x0, top, x1, top + height)


# -- dilate_boxes

def test_dilate_boxes_empty():
    assert dilate_boxes([], ScaleContext(100, 100)) == []


def test_dilate_boxes_formula():
    assert dilate_boxes([word(100, 50, 40, 12)], ScaleContext(2500, 1000)) == [BoxRect(90, 48, 60, 16)]


def test_dilate_boxes_clamped():
    (b,) = dilate_boxes([word(0, 0, 10, 10)], ScaleContext(200, 100))
    assert b.left == 0 and b.top == 0 and b.right == 13


# -- collision_profile

def test_profile_no_boxes():
    prof = collision_profile([], 20, 3)
    assert [x for x, _ in prof.counts] == [0, 3, 6, 9, 12, 15, 18]
    assert all(c == 0 for _, c in prof.counts)


def test_profile_two_spans_matches_corridor_oracle():
    boxes = [span_box(10, 40), span_box(60, 90)]
    prof = collision_profile(boxes, 100, 2)
    zero = [x for x, c in prof.counts if c == 0]
    corridors = free_corridors([(10, 40), (60, 90)], 100)
    assert corridors == [(0, 10), (40, 60), (90, 100)]
    expected = [x for x in range(0, 101, 2) if any(lo <= x <= hi for lo, hi in corridors)]
    assert zero == expected


def test_profile_edge_is_not_collision():
    prof = dict(collision_profile([span_box(10, 20)], 30, 1).counts)
    assert prof[10] == 0 and prof[11] == 1 and prof[19] == 1 and prof[20] == 0


# -- least_collision_bounds

def test_bounds_two_spans():
    prof = collision_profile([span_box(10, 40), span_box(60, 90)], 100, 2)
    assert least_collision_bounds(prof, 100, 8).separators == (0, 5, 50, 95, 100)


def test_bounds_blank_page():
    prof = collision_profile([], 100, 2)
    assert least_collision_bounds(prof, 100, 8).separators == (0, 50, 100)


def test_bounds_gap_rule():
    # kept lines at 20 and 36: 16 = 2 x merge_gap apart
    boxes = [span_box(0, 20), span_box(20, 36), span_box(36, 60)]
    prof = collision_profile(boxes, 60, 4)
    assert [x for x, c in prof.counts if c == 0] == [0, 20, 36, 60]
    assert least_collision_bounds(prof, 60, 8).separators == (0, 20, 36, 60)


def test_bounds_reducer_is_transitive():
    boxes = [span_box(5, 10), span_box(12, 18)]
    prof = collision_profile(boxes, 40, 1)
    # zero lines 0..5, 10..12, 18..40 chain through gaps <= 8 into one group
    assert least_collision_bounds(prof, 40, 8).separators == (0, 20, 40)


random_spans = st.lists(st.tuples(st.integers(0, 300), st.integers(2, 60)), min_size=1, max_size=12)


@settings(max_examples=300, deadline=None)
@given(random_spans, st.integers(1, 6), st.integers(8, 20))
def test_bounds_strictly_increasing(spans, spacing, merge_gap):
    boxes = [span_box(x, min(x + w, 320)) for x, w in spans if x + 1 < 320]
    prof = collision_profile(boxes, 320, spacing)
    seps = least_collision_bounds(prof, 320, merge_gap).separators
    assert seps[0] == 0 and seps[-1] == 320
    assert all(b > a for a, b in zip(seps, seps[1:]))


@settings(max_examples=300, deadline=None)
@given(random_spans, st.integers(1, 6))
def test_wide_corridors_always_probed(spans, spacing):
    intervals = [(x, min(x + w, 320)) for x, w in spans]
    boxes = [span_box(a, b) for a, b in intervals if b > a]
    prof = dict(collision_profile(boxes, 320, spacing).counts)
    for lo, hi in free_corridors(intervals, 320):
        if hi - lo + 1 > spacing:
            assert any(prof.get(x) == 0 for x in range(lo, hi + 1))


def test_spacing_and_merge_gap_defaults():
    ctx = ScaleContext(2000, 800)
    assert default_spacing(ctx) == 2 and default_merge_gap(ctx) == 10
    small = ScaleContext(300, 200)
    assert default_spacing(small) == 1 and default_merge_gap(small) == 8
    assert default_spacing(ScaleContext(300, 200, spacing=4)) == 4


# -- pipeline

def test_approach_two_borderless_3x2(rendered):
    texts = [["Item", "Price"], ["Bread", "2.50"], ["Milk jug", "1.25"]]
    img, truth, cfg = rendered(TableSpec(3, 2, texts, style="borderless", seed=1))
    assert extract_approach_two(img, None, cfg).texts() == texts


def test_approach_two_bordered_5x4(rendered):
    texts = [[f"v{r}{c} {'x' * (c + 1)}" for c in range(4)] for r in range(5)]
    img, truth, cfg = rendered(TableSpec(5, 4, texts, style="bordered", seed=4))
    grid = extract_approach_two(img, None, cfg)
    assert grid.shape == (5, 4)
    assert grid_similarity(grid, truth.grid) >= 0.99


def test_approach_two_no_words(tmp_path):
    path = tmp_path / "none.json"
    path.write_text("[]")
    grid = extract_approach_two(np.full((50, 50), 255, dtype=np.uint8), None,
                                OcrConfig(engine="fixture", fixture_path=path))
    assert grid.shape == (0, 0)


def test_approach_two_keeps_original_boxes_and_confidences():
    words = [word(10, 10, 30, 10, "a"), word(44, 10, 30, 10, "b"), word(150, 10, 30, 10, "c"),
             word(10, 50, 30, 10, "d"), word(150, 50, 30, 10, "e")]
    grid = words_to_grid(words, ScaleContext(200, 80))
    assert grid.texts() == [["a b", "c"], ["d", "e"]]
    assert grid.cells[0][0].boxes == (words[0].box, words[1].box)
    assert grid.cells[0][0].source_confidences == (90.0, 90.0)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 380), st.integers(0, 280), st.integers(1, 40), st.integers(4, 14)),
                min_size=1, max_size=30))
def test_every_word_lands_in_one_cell(raw):
    words = [word(x, y, min(w, 400 - x), min(h, 300 - y), f"t{i}") for i, (x, y, w, h) in enumerate(raw)]
    grid = words_to_grid(words, ScaleContext(400, 300))
    placed = sorted(t for row in grid.texts() for cell in row for t in cell.split())
    assert placed == sorted(w.text for w in words)


def test_approach_two_debug_files(rendered, tmp_path):
    img, _, cfg = rendered(TableSpec(2, 2, [["a", "b"], ["c", "d"]], seed=2))
    extract_approach_two(img, None, cfg, debug_dir=tmp_path / "dbg")
    assert sorted(p.name for p in (tmp_path / "dbg").iterdir()) == [
        "05_word_boxes.png", "06_collision_lines.png", "07_cells_demarcated.png",
    ]
