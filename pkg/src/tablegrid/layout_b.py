"""Approach Two (OCR first): word boxes in, Least Collision column search."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import debug
from .errors import InvalidInputError
from .grid import Cell, CellGrid
from .layout_a import ColumnBounds, assign_indices, sort_rows
from .ocr import OcrConfig, WordBox, recognize
from .raster import BoxRect, GrayImage, check_gray, round_half_up
from .standardize import ScaleContext


@dataclass(frozen=True)
class CollisionProfile:
    spacing: int
    counts: tuple[tuple[int, int], ...]  # (x, collisions)


def default_spacing(ctx: ScaleContext) -> int:
    return ctx.spacing or max(1, round_half_up(ctx.width / 1000))


def default_merge_gap(ctx: ScaleContext) -> int:
    return ctx.merge_gap or max(8, round_half_up(ctx.width / 200))


def dilate_boxes(words: Sequence[WordBox], ctx: ScaleContext) -> list[BoxRect]:
    """Grow each word box by a size-dependent margin, clamped to the image."""
    dx = max(3, round_half_up(ctx.width / 250))
    dy = max(1, round_half_up(ctx.height / 500))
    out = []
    for w in words:
        b = w.box
        grown = BoxRect.from_edges(b.left - dx, b.top - dy, b.right + dx, b.bottom + dy)
        out.append(grown.clamp(ctx.width, ctx.height) or b)
    return out


def collision_profile(boxes: Sequence[BoxRect], img_width: int, spacing: int) -> CollisionProfile:
    """Count, for vertical probes at 0, spacing, ..., how many boxes each crosses.

    A probe only collides with a box whose interior it passes through; running
    along a box edge does not count.
    """
    if spacing < 1:
        raise InvalidInputError("spacing must be >= 1")
    diff = np.zeros(img_width + 2, dtype=np.int64)
    for b in boxes:
        lo, hi = max(b.left + 1, 0), min(b.right, img_width + 1)
        if lo < hi:
            diff[lo] += 1
            diff[hi] -= 1
    per_x = np.cumsum(diff)
    xs = range(0, img_width + 1, spacing)
    return CollisionProfile(spacing, tuple((x, int(per_x[x])) for x in xs))


def least_collision_bounds(profile: CollisionProfile, img_width: int, merge_gap: int) -> ColumnBounds:
    """Keep the minimum-collision probes, fuse close runs, use run midpoints as separators."""
    if not profile.counts:
        raise InvalidInputError("empty collision profile")
    fewest = min(c for _, c in profile.counts)
    kept = [x for x, c in profile.counts if c == fewest]

    groups = [[kept[0], kept[0]]]
    for x in kept[1:]:
        if x - groups[-1][1] <= merge_gap:
            groups[-1][1] = x
        else:
            groups.append([x, x])

    seps = [round_half_up((lo + hi) / 2) for lo, hi in groups]
    seps = [s for s in seps if 0 <= s <= img_width]
    if not seps or seps[0] != 0:
        seps.insert(0, 0)
    if seps[-1] != img_width:
        seps.append(img_width)
    deduped = [seps[0]]
    for s in seps[1:]:
        if s > deduped[-1]:
            deduped.append(s)
    return ColumnBounds(tuple(deduped))


def words_to_grid(words: Sequence[WordBox], ctx: ScaleContext,
                  debug_img: GrayImage | None = None, debug_dir: str | Path | None = None) -> CellGrid:
    """Cell estimation over already-recognized words."""
    if not words:
        return CellGrid.empty()
    grown = dilate_boxes(words, ctx)
    bands = sort_rows(grown)
    profile = collision_profile(grown, ctx.width, default_spacing(ctx))
    bounds = least_collision_bounds(profile, ctx.width, default_merge_gap(ctx))
    slots, kept = assign_indices(bands, bounds)

    rows = []
    for r in range(len(slots)):
        row = []
        for j in kept:
            members = sorted(slots[r][j], key=lambda i: (words[i].box.left, words[i].box.top))
            row.append(Cell(
                " ".join(words[i].text for i in members),
                tuple(words[i].box for i in members),
                tuple(words[i].confidence for i in members),
            ))
        rows.append(row)
    grid = CellGrid.from_cells(rows)

    if debug_dir is not None and debug_img is not None:
        debug.save_boxes(debug_img, [w.box for w in words], debug_dir, "05_word_boxes.png")
        fewest = min(c for _, c in profile.counts)
        debug.save_lines(debug_img, [x for x, c in profile.counts if c == fewest], debug_dir,
                         "06_collision_lines.png")
        debug.save_cells(debug_img, grid, debug_dir, "07_cells_demarcated.png")
    return grid


def extract_approach_two(
    img: GrayImage,
    ctx: ScaleContext | None,
    cfg: OcrConfig,
    debug_dir: str | Path | None = None,
) -> CellGrid:
    check_gray(img)
    ctx = ctx or ScaleContext.for_image(img)
    words = recognize(img, cfg)
    if not words and debug_dir is not None:
        debug.save_boxes(img, [], debug_dir, "05_word_boxes.png")
        debug.save_lines(img, [], debug_dir, "06_collision_lines.png")
        debug.save_cells(img, CellGrid.empty(), debug_dir, "07_cells_demarcated.png")
    return words_to_grid(words, ctx, debug_img=img, debug_dir=debug_dir)
