"""Pixel-level primitives.

Images are plain numpy arrays indexed ``[y, x]``:

* a gray image is a 2-D ``uint8`` array of luminance values,
* a binary image is a 2-D ``bool`` array where ``True`` always means ink.

Morphology uses rectangular structuring elements anchored at ``k // 2``.
Dilation clips at the border (outside counts as background); erosion treats
outside pixels as foreground so full-width rules survive at the image edges.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from PIL import Image, UnidentifiedImageError
from scipy import ndimage

from .errors import InvalidInputError

GrayImage = np.ndarray
BinaryImage = np.ndarray

LUMA_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass(frozen=True, order=True)
class BoxRect:
    """Integer pixel rectangle ``(left, top, width, height)``."""

    left: int
    top: int
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise InvalidInputError(f"box must be at least 1x1, got {self.width}x{self.height}")

    @property
    def right(self) -> int:
        return self.left + self.width

    @property
    def bottom(self) -> int:
        return self.top + self.height

    @property
    def center_x(self) -> float:
        return self.left + self.width / 2

    @property
    def center_y(self) -> float:
        return self.top + self.height / 2

    @classmethod
    def from_edges(cls, left: int, top: int, right: int, bottom: int) -> "BoxRect":
        return cls(int(left), int(top), int(right - left), int(bottom - top))

    def as_list(self) -> list[int]:
        return [self.left, self.top, self.width, self.height]

    def union(self, other: "BoxRect") -> "BoxRect":
        return BoxRect.from_edges(
            min(self.left, other.left),
            min(self.top, other.top),
            max(self.right, other.right),
            max(self.bottom, other.bottom),
        )

    def clamp(self, width: int, height: int) -> "BoxRect | None":
        """Intersect with the ``width`` x ``height`` image; None if nothing is left."""
        left, top = max(0, self.left), max(0, self.top)
        right, bottom = min(width, self.right), min(height, self.bottom)
        if right <= left or bottom <= top:
            return None
        return BoxRect.from_edges(left, top, right, bottom)

    def inside(self, width: int, height: int) -> bool:
        return self.left >= 0 and self.top >= 0 and self.right <= width and self.bottom <= height


def union_all(boxes: Iterable[BoxRect]) -> BoxRect:
    it = iter(boxes)
    out = next(it)
    for b in it:
        out = out.union(b)
    return out


@dataclass(frozen=True)
class StructuringElement:
    """Rectangular kernel of ``kw`` x ``kh`` pixels."""

    kw: int
    kh: int

    def __post_init__(self):
        if self.kw < 1 or self.kh < 1:
            raise InvalidInputError(f"structuring element must be at least 1x1, got ({self.kw},{self.kh})")


def round_half_up(value: float) -> int:
    """Round to nearest integer, halves away from zero for positives."""
    return int(np.floor(value + 0.5))


def check_gray(img: GrayImage) -> GrayImage:
    if not isinstance(img, np.ndarray) or img.ndim != 2:
        raise InvalidInputError("gray image must be a 2-D array")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise InvalidInputError(f"image has zero dimension: {img.shape[1]}x{img.shape[0]}")
    if img.dtype != np.uint8:
        raise InvalidInputError(f"gray image must be uint8, got {img.dtype}")
    return img


def check_binary(img: BinaryImage) -> BinaryImage:
    if not isinstance(img, np.ndarray) or img.ndim != 2 or img.dtype != bool:
        raise InvalidInputError("binary image must be a 2-D bool array")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise InvalidInputError(f"image has zero dimension: {img.shape[1]}x{img.shape[0]}")
    return img


def to_gray(rgb: np.ndarray) -> GrayImage:
    """Luma conversion ``round(0.299 R + 0.587 G + 0.114 B)``."""
    rgb = np.asarray(rgb, dtype=np.float64)
    r, g, b = LUMA_WEIGHTS
    y = r * rgb[..., 0] + g * rgb[..., 1] + b * rgb[..., 2]
    return np.clip(np.floor(y + 0.5), 0, 255).astype(np.uint8)


def load_image(path: str | os.PathLike) -> GrayImage:
    """Decode a PNG/JPEG file into a gray image.

    Raises ``OSError`` when the file cannot be read or decoded and
    ``InvalidInputError`` for zero-sized rasters.
    """
    try:
        with Image.open(path) as im:
            im.load()
            if im.width == 0 or im.height == 0:
                raise InvalidInputError(f"{path}: image has zero dimension")
            if im.mode in ("L", "1", "I;16", "I", "F"):
                arr = np.asarray(im.convert("L"), dtype=np.uint8)
            else:
                arr = to_gray(np.asarray(im.convert("RGB")))
    except UnidentifiedImageError as exc:
        raise OSError(f"{path}: not a decodable image") from exc
    except (SyntaxError, ValueError) as exc:
        if isinstance(exc, InvalidInputError):
            raise
        raise OSError(f"{path}: {exc}") from exc
    return check_gray(np.ascontiguousarray(arr))


def save_image(img: np.ndarray, path: str | os.PathLike) -> None:
    """Write a gray image, or a binary image as black ink on white, to PNG."""
    if img.dtype == bool:
        img = np.where(img, 0, 255).astype(np.uint8)
    Image.fromarray(img).save(path, format="PNG")


def otsu_threshold(img: GrayImage) -> int:
    """Exhaustive Otsu search over thresholds 0..255.

    Class 0 is ``pixel < t``. The between-class variance is compared exactly
    in integer arithmetic as ``(n1*s0 - n0*s1)^2 / (n0*n1)`` so that every
    threshold yielding the same split ties, and the lowest one wins.
    Degenerate splits score 0, so uniform images return 0.
    """
    hist = np.bincount(check_gray(img).ravel(), minlength=256).astype(object)
    levels = np.arange(256, dtype=object)
    n_total = int(hist.sum())
    s_total = int((hist * levels).sum())
    best_t, best_num, best_den = 0, 0, 1
    n0 = s0 = 0
    for t in range(256):
        # class 0 holds levels < t
        if t > 0:
            n0 += int(hist[t - 1])
            s0 += int(hist[t - 1]) * (t - 1)
        n1, s1 = n_total - n0, s_total - s0
        if n0 == 0 or n1 == 0:
            continue
        num = (n1 * s0 - n0 * s1) ** 2
        den = n0 * n1
        if num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    return best_t


def binarize(img: GrayImage) -> BinaryImage:
    """Foreground is every pixel strictly darker than the Otsu threshold."""
    return check_gray(img) < otsu_threshold(img)


def _window_counts(img: np.ndarray, k: int, axis: int, pad_value: bool) -> np.ndarray:
    # counts of foreground in the k-window [x - k//2, x - k//2 + k - 1] along axis
    lo = k // 2
    hi = k - 1 - lo
    pad = [(0, 0), (0, 0)]
    pad[axis] = (lo, hi)
    padded = np.pad(img, pad, constant_values=pad_value).astype(np.int32)
    cs = np.cumsum(padded, axis=axis)
    zero_shape = list(cs.shape)
    zero_shape[axis] = 1
    cs = np.concatenate([np.zeros(zero_shape, dtype=np.int32), cs], axis=axis)
    n = img.shape[axis]
    upper = np.take(cs, np.arange(k, k + n), axis=axis)
    lower = np.take(cs, np.arange(0, n), axis=axis)
    return upper - lower


def _reflected_window_counts(img: np.ndarray, k: int, axis: int) -> np.ndarray:
    # window [x - (k - 1 - k//2), x + k//2]: the reflected kernel
    flipped = np.flip(img, axis=axis)
    return np.flip(_window_counts(flipped, k, axis, False), axis=axis)


def dilate(img: BinaryImage, se: StructuringElement) -> BinaryImage:
    """Union of kernel-shaped neighbourhoods of the foreground, clipped at the border."""
    check_binary(img)
    out = img
    if se.kw > 1:
        out = _reflected_window_counts(out, se.kw, axis=1) > 0
    if se.kh > 1:
        out = _reflected_window_counts(out, se.kh, axis=0) > 0
    return out.copy() if out is img else out


def erode(img: BinaryImage, se: StructuringElement) -> BinaryImage:
    """Keep pixels whose whole in-bounds neighbourhood is foreground."""
    check_binary(img)
    out = img
    if se.kw > 1:
        out = _window_counts(out, se.kw, axis=1, pad_value=True) == se.kw
    if se.kh > 1:
        out = _window_counts(out, se.kh, axis=0, pad_value=True) == se.kh
    return out.copy() if out is img else out


def open_(img: BinaryImage, se: StructuringElement) -> BinaryImage:
    """Morphological opening: erosion followed by dilation with the same element."""
    return dilate(erode(img, se), se)


def complement(img: BinaryImage) -> BinaryImage:
    return ~check_binary(img)


def subtract(a: BinaryImage, b: BinaryImage) -> BinaryImage:
    check_binary(a)
    check_binary(b)
    if a.shape != b.shape:
        raise InvalidInputError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a & ~b


_EIGHT = np.ones((3, 3), dtype=bool)


def connected_components(img: BinaryImage) -> list[BoxRect]:
    """Tight boxes of 8-connected foreground components in raster discovery order."""
    check_binary(img)
    labels, n = ndimage.label(img, structure=_EIGHT)
    if n == 0:
        return []
    flat = labels.ravel()
    ids, first = np.unique(flat, return_index=True)
    order = [int(i) for _, i in sorted(zip(first[ids > 0], ids[ids > 0]))]
    slices = ndimage.find_objects(labels)
    boxes = []
    for lab in order:
        ys, xs = slices[lab - 1]
        boxes.append(BoxRect.from_edges(xs.start, ys.start, xs.stop, ys.stop))
    return boxes
