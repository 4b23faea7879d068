"""Stage overlays written when a debug directory is configured."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from PIL import Image, ImageDraw

from .grid import CellGrid
from .raster import BinaryImage, BoxRect, GrayImage, save_image


def _target(debug_dir: str | Path, name: str) -> Path:
    d = Path(debug_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d / name


def _canvas(img: GrayImage) -> Image.Image:
    return Image.fromarray(np.asarray(img, dtype=np.uint8)).convert("RGB")


def save_mask(mask: BinaryImage, debug_dir: str | Path, name: str) -> None:
    save_image(mask, _target(debug_dir, name))


def save_boxes(img: GrayImage, boxes: Iterable[BoxRect], debug_dir: str | Path, name: str,
               color=(255, 0, 0)) -> None:
    im = _canvas(img)
    draw = ImageDraw.Draw(im)
    for b in boxes:
        draw.rectangle([b.left, b.top, b.right - 1, b.bottom - 1], outline=color)
    im.save(_target(debug_dir, name))


def save_lines(img: GrayImage, xs: Sequence[int], debug_dir: str | Path, name: str) -> None:
    im = _canvas(img)
    draw = ImageDraw.Draw(im)
    for x in xs:
        draw.line([x, 0, x, im.height - 1], fill=(0, 160, 255))
    im.save(_target(debug_dir, name))


def save_cells(img: GrayImage, grid: CellGrid, debug_dir: str | Path, name: str) -> None:
    """Outline every occupied cell and label it ``r,c`` (zero-based)."""
    im = _canvas(img)
    draw = ImageDraw.Draw(im)
    for r, row in enumerate(grid.cells):
        for c, cell in enumerate(row):
            box = cell.box
            if box is None:
                continue
            draw.rectangle([box.left, box.top, box.right - 1, box.bottom - 1], outline=(0, 170, 0))
            draw.text((box.left, max(0, box.top - 10)), f"{r},{c}", fill=(200, 0, 0))
    im.save(_target(debug_dir, name))
