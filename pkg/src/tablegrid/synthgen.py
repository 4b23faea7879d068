"""Ground-truthed synthetic table images.

Characters are drawn as blocky pseudo-glyphs: a solid frame with a
character-dependent pattern of interior holes. A real OCR engine cannot read
them; the generator emits a perfect word fixture instead.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidInputError
from .grid import Cell, CellGrid
from .ocr import WordBox
from .raster import BoxRect, GrayImage

STYLES = ("bordered", "row-lines", "col-lines", "borderless", "inverted")
FIXTURE_CONFIDENCE = 99.0
CHAR_GAP = 1
MARGIN = 8
MAX_JITTER = 2
MAX_FONT_PX = 19  # taller glyph stems would be mistaken for ruling lines


@dataclass(frozen=True)
class TableSpec:
    rows: int
    cols: int
    texts: tuple[tuple[str, ...], ...]
    style: str = "borderless"
    cell_padding: int = 12
    font_px: int = 10
    seed: int = 0
    max_cell_width: int = 600

    def __post_init__(self):
        object.__setattr__(self, "texts", tuple(tuple(r) for r in self.texts))
        if self.rows < 1 or self.cols < 1:
            raise InvalidInputError("a table needs at least one row and one column")
        if len(self.texts) != self.rows or any(len(r) != self.cols for r in self.texts):
            raise InvalidInputError(f"texts do not form a {self.rows}x{self.cols} matrix")
        if self.style not in STYLES:
            raise InvalidInputError(f"unknown style {self.style!r}; expected one of {STYLES}")
        if not 5 <= self.font_px <= MAX_FONT_PX:
            raise InvalidInputError(f"font_px must lie in [5, {MAX_FONT_PX}]")
        if self.cell_padding < MAX_JITTER + 3:
            raise InvalidInputError(f"cell_padding must be >= {MAX_JITTER + 3}")


@dataclass
class GroundTruth:
    grid: CellGrid
    word_fixture: list[WordBox]
    glyph_mask: np.ndarray = field(repr=False)
    line_mask: np.ndarray = field(repr=False)


def char_width(font_px: int) -> int:
    return max(3, round(font_px * 0.6))


def word_gap(font_px: int) -> int:
    return max(2, font_px // 3)


def text_width(text: str, font_px: int) -> int:
    words = text.split()
    if not words:
        return 0
    cw = char_width(font_px)
    chars = sum(len(w) for w in words)
    return chars * cw + (chars - len(words)) * CHAR_GAP + (len(words) - 1) * word_gap(font_px)


def _glyph(ch: str, w: int, h: int) -> np.ndarray:
    g = np.ones((h, w), dtype=bool)
    iw, ih = w - 2, h - 2
    if iw < 1 or ih < 1:
        return g
    bits = (ord(ch) * 2654435761) & 0xFFFFFFFF
    # 2 x 3 interior blocks, each cleared when its bit is set
    for by in range(3):
        for bx in range(2):
            if bits >> (by * 2 + bx) & 1:
                y0, y1 = 1 + by * ih // 3, 1 + (by + 1) * ih // 3
                x0, x1 = 1 + bx * iw // 2, 1 + (bx + 1) * iw // 2
                g[y0:y1, x0:x1] = False
    return g


def _layout(spec: TableSpec):
    widths = []
    for c in range(spec.cols):
        col_w = max(text_width(spec.texts[r][c], spec.font_px) for r in range(spec.rows))
        for r in range(spec.rows):
            if text_width(spec.texts[r][c], spec.font_px) > spec.max_cell_width:
                raise InvalidInputError(f"text of cell ({r},{c}) is wider than {spec.max_cell_width}px")
        widths.append(max(col_w, char_width(spec.font_px)) + 2 * spec.cell_padding)
    row_h = spec.font_px + 2 * spec.cell_padding
    xs = [MARGIN]
    for w in widths:
        xs.append(xs[-1] + w)
    ys = [MARGIN + r * row_h for r in range(spec.rows + 1)]
    return xs, ys


def render(spec: TableSpec) -> tuple[GrayImage, GroundTruth]:
    """Draw ``spec`` and return the image with its ground truth.

    Pixels depend only on the spec; the seed picks line thickness, per-cell
    offsets and ink/paper levels. The inverted style is the borderless table
    with luminance flipped.
    """
    for r, row in enumerate(spec.texts):
        for c, text in enumerate(row):
            if any(ch in "\n\r\t" for ch in text):
                raise InvalidInputError(f"text of cell ({r},{c}) contains control whitespace")

    rng = np.random.default_rng(spec.seed)
    thickness = int(rng.integers(1, 3))
    paper = 255 - int(rng.integers(0, 30))
    ink = int(rng.integers(0, 60))
    jitter = rng.integers(-MAX_JITTER, MAX_JITTER + 1, size=(spec.rows, spec.cols, 2))

    xs, ys = _layout(spec)
    width, height = xs[-1] + MARGIN + thickness, ys[-1] + MARGIN + thickness
    glyphs = np.zeros((height, width), dtype=bool)
    lines = np.zeros((height, width), dtype=bool)

    cw, fh = char_width(spec.font_px), spec.font_px
    gap = word_gap(spec.font_px)
    words: list[WordBox] = []
    cells = []
    for r in range(spec.rows):
        row_cells = []
        for c in range(spec.cols):
            cell_box = BoxRect.from_edges(xs[c], ys[r], xs[c + 1], ys[r + 1])
            jx, jy = int(jitter[r, c, 0]), int(jitter[r, c, 1])
            x = xs[c] + spec.cell_padding + jx
            y = ys[r] + spec.cell_padding + jy
            cell_words = []
            for k, token in enumerate(spec.texts[r][c].split()):
                x0 = x
                for ch in token:
                    glyphs[y:y + fh, x:x + cw] |= _glyph(ch, cw, fh)
                    x += cw + CHAR_GAP
                box = BoxRect.from_edges(x0, y, x - CHAR_GAP, y + fh)
                cell_words.append(WordBox(box, token, FIXTURE_CONFIDENCE, block_id=r * spec.cols + c + 1,
                                          para_id=1, line_id=1, word_id=k + 1))
                x += gap - CHAR_GAP
            words.extend(cell_words)
            row_cells.append(Cell(" ".join(w.text for w in cell_words), (cell_box,)))
        cells.append(row_cells)

    style = spec.style
    if style in ("bordered", "row-lines"):
        for y in ys:
            lines[y:y + thickness, xs[0]:xs[-1] + thickness] = True
    if style in ("bordered", "col-lines"):
        for x in xs:
            lines[ys[0]:ys[-1] + thickness, x:x + thickness] = True

    img = np.full((height, width), paper, dtype=np.uint8)
    img[glyphs | lines] = ink
    if style == "inverted":
        img = 255 - img
    return img, GroundTruth(CellGrid.from_cells(cells), words, glyphs, lines)


WORD_ALPHABET = string.ascii_letters + string.digits + ".,$%-"


def random_text(rng: np.random.Generator, max_words: int = 3, max_len: int = 8) -> str:
    n_words = int(rng.integers(1, max_words + 1))
    return " ".join(
        "".join(rng.choice(list(WORD_ALPHABET), size=int(rng.integers(1, max_len + 1))))
        for _ in range(n_words)
    )


def random_spec(seed: int, rows: tuple[int, int] = (2, 12), cols: tuple[int, int] = (2, 8),
                style: str | None = None, texts: Sequence[Sequence[str]] | None = None) -> TableSpec:
    """A reproducible random table; column gaps always exceed 3x the word gap."""
    rng = np.random.default_rng(seed)
    n_rows = int(rng.integers(rows[0], rows[1] + 1))
    n_cols = int(rng.integers(cols[0], cols[1] + 1))
    font_px = int(rng.integers(8, 15))
    padding = int(rng.integers(12, 17))
    if style is None:
        style = STYLES[int(rng.integers(0, len(STYLES)))]
    if texts is None:
        texts = [[random_text(rng) for _ in range(n_cols)] for _ in range(n_rows)]
    return TableSpec(n_rows, n_cols, texts, style=style, cell_padding=padding, font_px=font_px, seed=seed)
