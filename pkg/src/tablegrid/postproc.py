"""Structural cleanup and type-guided repair of extracted grids."""

from __future__ import annotations

import json
import logging
import os
import re
from dataclasses import replace
from pathlib import Path
from typing import Mapping

from .errors import FormatError, InvalidInputError
from .grid import Cell, CellGrid

log = logging.getLogger(__name__)

HINT_TYPES = ("numeric", "currency", "text")
CURRENCY_SYMBOLS = "$€£¥₹"

CONFUSIONS = str.maketrans({
    "/": "7", "O": "0", "o": "0", "l": "1", "I": "1", "|": "1", "S": "5", "B": "8",
})
NUMERIC = re.compile(
    rf"[+-]?[{CURRENCY_SYMBOLS}]? ?[+-]?(?:\d{{1,3}}(?:,\d{{3}})+|\d+)(?:\.\d+)?%?"
)
SYMBOL_ONLY = re.compile(rf"[{CURRENCY_SYMBOLS}]")

ColumnHints = Mapping[int, str]


def drop_empty(grid: CellGrid) -> CellGrid:
    """Remove all-blank rows, then all-blank columns."""
    rows = [row for row in grid.cells if any(not c.empty for c in row)]
    if not rows:
        return CellGrid.empty()
    keep = [j for j in range(grid.cols) if any(not row[j].empty for row in rows)]
    return CellGrid.from_cells([[row[j] for j in keep] for row in rows])


def _merge_cells(a: Cell, b: Cell) -> Cell:
    if a.empty and b.empty:
        return Cell("", a.boxes + b.boxes, a.source_confidences + b.source_confidences)
    return b if a.empty else a


def _complementary(a: tuple[Cell, ...], b: tuple[Cell, ...], fill_ratio: float) -> bool:
    single = 0
    for x, y in zip(a, b):
        if not x.empty and not y.empty:
            return False
        if x.empty != y.empty:
            single += 1
    return single >= fill_ratio * len(a)


def _merge_rows(rows: list[tuple[Cell, ...]], fill_ratio: float) -> list[tuple[Cell, ...]]:
    changed = True
    while changed:
        changed = False
        i = 0
        while i + 1 < len(rows):
            if _complementary(rows[i], rows[i + 1], fill_ratio):
                rows[i] = tuple(_merge_cells(x, y) for x, y in zip(rows[i], rows[i + 1]))
                del rows[i + 1]
                changed = True
            else:
                i += 1
    return rows


def _is_symbol_column(col: tuple[Cell, ...]) -> bool:
    filled = [c for c in col if not c.empty]
    return bool(filled) and all(SYMBOL_ONLY.fullmatch(c.text) for c in filled)


def _fold_symbol_columns(cols: list[tuple[Cell, ...]]) -> list[tuple[Cell, ...]]:
    # a column holding nothing but currency signs was split off its amounts
    j = 0
    while j + 1 < len(cols):
        if _is_symbol_column(cols[j]) and not _is_symbol_column(cols[j + 1]):
            merged = []
            for sym, amount in zip(cols[j], cols[j + 1]):
                text = " ".join(t for t in (sym.text, amount.text) if t)
                merged.append(Cell(text, sym.boxes + amount.boxes,
                                   sym.source_confidences + amount.source_confidences))
            cols[j] = tuple(merged)
            del cols[j + 1]
        else:
            j += 1
    return cols


def merge_split_lines(grid: CellGrid, fill_ratio: float = 0.6) -> CellGrid:
    """Re-join rows and columns that dilation split apart.

    Adjacent rows are merged when no column is filled in both and at least
    ``fill_ratio`` of the columns are filled in exactly one; the same rule is
    then applied to adjacent columns, and a column made up only of currency
    signs is folded into the amounts on its right ("$" + "5" -> "$ 5"). The
    passes repeat until the shape stops changing, so the result is a fixpoint.
    """
    if not 0 < fill_ratio <= 1:
        raise InvalidInputError("fill_ratio must lie in (0, 1]")
    if grid.rows == 0:
        return grid
    rows = list(grid.cells)
    while True:
        shape = (len(rows), len(rows[0]))
        rows = _merge_rows(rows, fill_ratio)
        cols = _merge_rows([tuple(col) for col in zip(*rows)], fill_ratio)
        cols = _fold_symbol_columns(cols)
        rows = [tuple(r) for r in zip(*cols)]
        # every merge removes a row or column, so this terminates
        if (len(rows), len(rows[0])) == shape:
            return CellGrid.from_cells([list(r) for r in rows])


def repair_cell(text: str) -> str | None:
    """Numeric repair via the confusion map; None when the result is still not a number."""
    if NUMERIC.fullmatch(text):
        return text
    fixed = text.translate(CONFUSIONS)
    return fixed if NUMERIC.fullmatch(fixed) else None


def repair_typed(grid: CellGrid, hints: ColumnHints) -> CellGrid:
    """Fix common OCR confusions in numeric/currency columns, validate or revert."""
    for col, kind in hints.items():
        if kind not in HINT_TYPES:
            raise InvalidInputError(f"unknown column type {kind!r} for column {col}")
    active = {c: k for c, k in hints.items() if k != "text" and 0 <= c < grid.cols}
    for col in hints:
        if not 0 <= col < grid.cols:
            log.warning("hint for column %d ignored: grid has %d columns", col, grid.cols)
    if not active:
        return grid
    rows = []
    for r, row in enumerate(grid.cells):
        out = list(row)
        for c in active:
            cell = row[c]
            if cell.empty:
                continue
            fixed = repair_cell(cell.text)
            if fixed is None:
                log.warning("cell (%d,%d) %r does not look %s; left as is", r, c, cell.text, active[c])
                out[c] = replace(cell, flags=cell.flags + (f"not-{active[c]}",))
            elif fixed != cell.text:
                out[c] = replace(cell, text=fixed, flags=cell.flags + ("repaired",))
        rows.append(out)
    return CellGrid.from_cells(rows)


def parse_hints(obj: object) -> dict[int, str]:
    if not isinstance(obj, dict):
        raise FormatError("hints: expected a JSON object mapping column index to type")
    hints = {}
    for key, kind in obj.items():
        try:
            col = int(key)
        except ValueError as exc:
            raise FormatError(f"hints: field '{key}' is not a column index") from exc
        if kind not in HINT_TYPES:
            raise FormatError(f"hints: field '{key}' has unknown type {kind!r}")
        hints[col] = kind
    return hints


def load_hints(path: str | os.PathLike) -> dict[int, str]:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"hints {path}: invalid JSON ({exc})") from exc
    return parse_hints(obj)
