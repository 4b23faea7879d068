"""Approach One (OCR last): morphology-driven cell estimation, then per-cell OCR."""

from __future__ import annotations

import logging
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import debug
from .errors import InvalidInputError
from .grid import Cell, CellGrid
from .ocr import OcrConfig, recognize_regions
from .raster import (
    BinaryImage,
    BoxRect,
    GrayImage,
    StructuringElement,
    binarize,
    check_gray,
    connected_components,
    dilate,
    round_half_up,
    union_all,
)
from .standardize import ScaleContext, normalize_polarity, remove_lines

log = logging.getLogger(__name__)

BAND_OVERLAP = 0.5
CELL_PADDING = 2


@dataclass(frozen=True)
class RowBand:
    top: int
    bottom: int
    boxes: tuple[BoxRect, ...]
    # positions of ``boxes`` in the list handed to sort_rows
    indices: tuple[int, ...]


@dataclass(frozen=True)
class RowBands:
    rows: tuple[RowBand, ...]

    def __len__(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class ColumnBounds:
    separators: tuple[int, ...]

    def __post_init__(self):
        seps = self.separators
        if len(seps) < 2 or seps[0] != 0 or any(b <= a for a, b in zip(seps, seps[1:])):
            raise InvalidInputError(f"invalid column separators {seps}")

    @property
    def count(self) -> int:
        return len(self.separators) - 1

    @property
    def width(self) -> int:
        return self.separators[-1]

    def column_of(self, x: float) -> int:
        """Index of the half-open interval ``[sep_j, sep_j+1)`` holding ``x``."""
        j = bisect_right(self.separators, x) - 1
        return min(max(j, 0), self.count - 1)


def row_blob_kernel(ctx: ScaleContext) -> StructuringElement:
    return StructuringElement(max(9, round_half_up(ctx.width / 100)), max(3, round_half_up(ctx.height / 300)))


def estimate_row_blobs(img: BinaryImage, ctx: ScaleContext) -> list[BoxRect]:
    """Smear ink horizontally so each cell's words fuse into one blob."""
    return connected_components(dilate(img, row_blob_kernel(ctx)))


def filter_small(boxes: Sequence[BoxRect], ctx: ScaleContext) -> list[BoxRect]:
    min_h = max(4, round_half_up(ctx.height * 0.003))
    min_w = max(4, round_half_up(ctx.width * 0.003))
    return [b for b in boxes if b.height >= min_h and b.width >= min_w]


def sort_rows(boxes: Sequence[BoxRect]) -> RowBands:
    """Group boxes into row bands, top to bottom, each band sorted left to right.

    Boxes are visited in vertical-centre order. A box joins the open band when
    its vertical overlap with the band covers at least half of the smaller of
    the two heights.
    """
    order = sorted(range(len(boxes)), key=lambda i: (boxes[i].center_y, boxes[i].left, i))
    groups: list[list[int]] = []
    top = bottom = 0
    for i in order:
        b = boxes[i]
        if groups:
            overlap = min(bottom, b.bottom) - max(top, b.top)
            if overlap >= BAND_OVERLAP * min(b.height, bottom - top):
                groups[-1].append(i)
                top, bottom = min(top, b.top), max(bottom, b.bottom)
                continue
        groups.append([i])
        top, bottom = b.top, b.bottom

    bands = []
    for g in groups:
        g.sort(key=lambda i: (boxes[i].left, boxes[i].top, i))
        bands.append(RowBand(
            top=min(boxes[i].top for i in g),
            bottom=max(boxes[i].bottom for i in g),
            boxes=tuple(boxes[i] for i in g),
            indices=tuple(g),
        ))
    bands.sort(key=lambda band: (band.top, band.bottom))
    return RowBands(tuple(bands))


def _merge_intervals(intervals: list[tuple[int, int]]) -> list[tuple[int, int]]:
    merged: list[list[int]] = []
    for lo, hi in sorted(intervals):
        if merged and lo < merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [tuple(m) for m in merged]


def separators_between(intervals: list[tuple[int, int]], img_width: int) -> ColumnBounds:
    """Separators at the midpoints of the gaps between sorted, disjoint intervals."""
    seps = [0]
    for (_, right), (left, _) in zip(intervals, intervals[1:]):
        mid = round_half_up((right + left) / 2)
        if seps[-1] < mid < img_width:
            seps.append(mid)
    seps.append(img_width)
    return ColumnBounds(tuple(seps))


def estimate_column_bounds_a(bands: RowBands, img_width: int) -> ColumnBounds:
    """Column intervals from boxes sharing the same left-to-right index.

    Column ``j`` spans from the smallest left edge to the largest right edge of
    the ``j``-th box over all bands. Overlapping spans are merged.
    """
    ncols = max((len(b.boxes) for b in bands.rows), default=0)
    if ncols == 0:
        raise InvalidInputError("cannot estimate columns: every row band is empty")
    intervals = []
    for j in range(ncols):
        at_j = [band.boxes[j] for band in bands.rows if len(band.boxes) > j]
        intervals.append((min(b.left for b in at_j), max(b.right for b in at_j)))
    merged = _merge_intervals(intervals)
    if len(merged) < len(intervals):
        log.warning("column spans overlap; %d columns merged into %d", len(intervals), len(merged))
    return separators_between(merged, img_width)


def assign_indices(bands: RowBands, bounds: ColumnBounds) -> tuple[list[list[list[int]]], list[int]]:
    """Map every box to a (row, column) slot.

    Returns the per-slot lists of input indices (left-to-right) and the list
    of non-empty column indices that survive pruning.
    """
    slots = [[[] for _ in range(bounds.count)] for _ in bands.rows]
    for r, band in enumerate(bands.rows):
        for box, idx in zip(band.boxes, band.indices):
            slots[r][bounds.column_of(box.center_x)].append(idx)
    kept = [j for j in range(bounds.count) if any(slots[r][j] for r in range(len(slots)))]
    return slots, kept


def assign_cells(bands: RowBands, bounds: ColumnBounds) -> CellGrid:
    """Boxes-only grid; boxes sharing a slot are merged into one cell."""
    slots, kept = assign_indices(bands, bounds)
    if not kept:
        return CellGrid.empty()
    lookup = {}
    for band in bands.rows:
        lookup.update(zip(band.indices, band.boxes))
    rows = []
    for r in range(len(slots)):
        row = []
        for j in kept:
            boxes = sorted((lookup[i] for i in slots[r][j]), key=lambda b: (b.left, b.top))
            row.append(Cell("", tuple(boxes)))
        rows.append(row)
    return CellGrid.from_cells(rows)


def standardize(img: GrayImage, ctx: ScaleContext) -> tuple[BinaryImage, BinaryImage]:
    """Return (polarity-normalized, lines-removed) rasters."""
    binary = normalize_polarity(binarize(img))
    return binary, remove_lines(binary, ctx)


def extract_approach_one(
    img: GrayImage,
    ctx: ScaleContext | None,
    cfg: OcrConfig,
    debug_dir: str | Path | None = None,
) -> CellGrid:
    check_gray(img)
    ctx = ctx or ScaleContext.for_image(img)
    binary, clean = standardize(img, ctx)
    blobs = filter_small(estimate_row_blobs(clean, ctx), ctx)
    if debug_dir is not None:
        debug.save_mask(binary, debug_dir, "01_thresholded.png")
        debug.save_mask(clean, debug_dir, "02_lines_removed.png")
        debug.save_boxes(img, blobs, debug_dir, "03_contours.png")
    if not blobs:
        if debug_dir is not None:
            debug.save_cells(img, CellGrid.empty(), debug_dir, "04_cells_demarcated.png")
        return CellGrid.empty()

    bands = sort_rows(blobs)
    bounds = estimate_column_bounds_a(bands, ctx.width)
    layout = assign_cells(bands, bounds)

    height, width = img.shape
    regions, where = [], []
    for r, row in enumerate(layout.cells):
        for c, cell in enumerate(row):
            if cell.boxes:
                box = union_all(cell.boxes)
                padded = BoxRect.from_edges(box.left - CELL_PADDING, box.top - CELL_PADDING,
                                            box.right + CELL_PADDING, box.bottom + CELL_PADDING)
                regions.append(padded.clamp(width, height))
                where.append((r, c))
    texts = recognize_regions(img, regions, cfg)
    filled = [list(row) for row in layout.cells]
    for (r, c), text in zip(where, texts):
        filled[r][c] = Cell(text, layout.cells[r][c].boxes)
    grid = CellGrid.from_cells(filled)
    if debug_dir is not None:
        debug.save_cells(img, grid, debug_dir, "04_cells_demarcated.png")
    return grid
