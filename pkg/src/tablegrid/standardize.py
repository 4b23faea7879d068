"""Approach One standardization: polarity normalization and ruling-line removal."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .raster import (
    BinaryImage,
    StructuringElement,
    check_binary,
    dilate,
    open_,
    round_half_up,
    subtract,
)

MIN_LINE_KERNEL = 20
LINE_MASK_GROWTH = StructuringElement(3, 3)


@dataclass(frozen=True)
class ScaleContext:
    """Document size plus the knobs every size-dependent kernel derives from.

    ``spacing`` and ``merge_gap`` are optional overrides for the column
    search of Approach Two; when ``None`` they are derived from ``width``.
    """

    width: int
    height: int
    ref_width: int = 2000
    line_kernel_base: int = 40
    spacing: int | None = None
    merge_gap: int | None = None

    def __post_init__(self):
        for name in ("width", "height", "ref_width", "line_kernel_base"):
            if getattr(self, name) < 1:
                raise InvalidInputError(f"ScaleContext.{name} must be >= 1")
        for name in ("spacing", "merge_gap"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise InvalidInputError(f"ScaleContext.{name} must be >= 1")

    @classmethod
    def for_image(cls, img: np.ndarray, **overrides) -> "ScaleContext":
        height, width = img.shape[:2]
        overrides = {k: v for k, v in overrides.items() if v is not None}
        return cls(width=width, height=height, **overrides)

    @property
    def line_kernel(self) -> int:
        return max(MIN_LINE_KERNEL, round_half_up(self.line_kernel_base * self.width / self.ref_width))


def normalize_polarity(img: BinaryImage) -> BinaryImage:
    """Make ink the minority class; an exact tie is left alone."""
    check_binary(img)
    fg = int(np.count_nonzero(img))
    if fg > img.size - fg:
        return ~img
    return img


def detect_lines(img: BinaryImage, ctx: ScaleContext) -> tuple[BinaryImage, BinaryImage]:
    """Return (horizontal, vertical) line masks by opening with long thin kernels."""
    length = ctx.line_kernel
    horizontal = open_(img, StructuringElement(length, 1))
    vertical = open_(img, StructuringElement(1, length))
    return horizontal, vertical


def remove_lines(img: BinaryImage, ctx: ScaleContext) -> BinaryImage:
    horizontal, vertical = detect_lines(img, ctx)
    lines = horizontal | vertical
    if not lines.any():
        return img.copy()
    return subtract(img, dilate(lines, LINE_MASK_GROWTH))
