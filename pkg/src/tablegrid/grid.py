"""Cell grids: the extraction product and evaluation input."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any, Sequence

from .errors import FormatError, InvalidInputError
from .raster import BoxRect, union_all

CELL_SEP = "|"
ROW_SEP = "\n"


@dataclass(frozen=True)
class Cell:
    text: str = ""
    boxes: tuple[BoxRect, ...] = ()
    source_confidences: tuple[float, ...] = ()
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "text", self.text.strip())
        object.__setattr__(self, "boxes", tuple(self.boxes))
        object.__setattr__(self, "source_confidences", tuple(self.source_confidences))

    @property
    def empty(self) -> bool:
        return not self.text

    @property
    def box(self) -> BoxRect | None:
        return union_all(self.boxes) if self.boxes else None


@dataclass(frozen=True)
class CellGrid:
    rows: int
    cols: int
    cells: tuple[tuple[Cell, ...], ...] = field(default=())

    def __post_init__(self):
        cells = tuple(tuple(r) for r in self.cells)
        object.__setattr__(self, "cells", cells)
        if (self.rows == 0) != (self.cols == 0):
            raise InvalidInputError(f"grid {self.rows}x{self.cols}: rows == 0 iff cols == 0")
        if len(cells) != self.rows or any(len(r) != self.cols for r in cells):
            raise InvalidInputError(f"cell matrix does not match {self.rows}x{self.cols}")

    @classmethod
    def empty(cls) -> "CellGrid":
        return cls(0, 0, ())

    @classmethod
    def from_cells(cls, cells: Sequence[Sequence[Cell]]) -> "CellGrid":
        cells = [list(r) for r in cells]
        if not cells or not cells[0]:
            return cls.empty()
        return cls(len(cells), len(cells[0]), cells)

    @classmethod
    def from_texts(cls, texts: Sequence[Sequence[str]]) -> "CellGrid":
        return cls.from_cells([[Cell(t) for t in row] for row in texts])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def texts(self) -> list[list[str]]:
        return [[c.text for c in row] for row in self.cells]

    def transpose(self) -> "CellGrid":
        return CellGrid.from_cells([list(col) for col in zip(*self.cells)])


def to_csv(grid: CellGrid) -> str:
    """RFC-4180 text with CRLF terminators; minimal quoting."""
    if grid.rows == 0:
        return ""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerows(grid.texts())
    return buf.getvalue()


def from_csv(text: str) -> CellGrid:
    rows = list(csv.reader(io.StringIO(text, newline="")))
    if not rows:
        return CellGrid.empty()
    width = max(len(r) for r in rows)
    return CellGrid.from_texts([r + [""] * (width - len(r)) for r in rows])


def _cell_to_obj(cell: Cell) -> dict[str, Any]:
    obj: dict[str, Any] = {"text": cell.text}
    if cell.boxes:
        obj["box"] = cell.box.as_list()
    if cell.source_confidences:
        confs = cell.source_confidences
        obj["conf"] = round(sum(confs) / len(confs), 2)
    return obj


def grid_to_obj(grid: CellGrid) -> dict[str, Any]:
    return {
        "rows": grid.rows,
        "cols": grid.cols,
        "cells": [[_cell_to_obj(c) for c in row] for row in grid.cells],
    }


def to_json(grid: CellGrid) -> str:
    return json.dumps(grid_to_obj(grid), separators=(",", ":"), ensure_ascii=False)


def grid_from_obj(obj: Any) -> CellGrid:
    """Inverse of :func:`grid_to_obj`; raises FormatError naming the bad field."""
    if not isinstance(obj, dict):
        raise FormatError("grid: expected a JSON object")
    for key in ("rows", "cols", "cells"):
        if key not in obj:
            raise FormatError(f"grid: missing field '{key}'")
    rows, cols, raw = obj["rows"], obj["cols"], obj["cells"]
    if not isinstance(rows, int) or rows < 0:
        raise FormatError("grid: field 'rows' must be a non-negative integer")
    if not isinstance(cols, int) or cols < 0:
        raise FormatError("grid: field 'cols' must be a non-negative integer")
    if not isinstance(raw, list) or len(raw) != rows:
        raise FormatError(f"grid: field 'cells' must be a list of {rows} rows")
    cells = []
    for r, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != cols:
            raise FormatError(f"grid: field 'cells[{r}]' must hold {cols} cells")
        out_row = []
        for c, item in enumerate(row):
            where = f"cells[{r}][{c}]"
            if not isinstance(item, dict) or not isinstance(item.get("text"), str):
                raise FormatError(f"grid: field '{where}.text' must be a string")
            boxes: tuple[BoxRect, ...] = ()
            if "box" in item:
                b = item["box"]
                if not (isinstance(b, list) and len(b) == 4 and all(isinstance(v, int) for v in b)):
                    raise FormatError(f"grid: field '{where}.box' must be [left, top, width, height]")
                try:
                    boxes = (BoxRect(*b),)
                except InvalidInputError as exc:
                    raise FormatError(f"grid: field '{where}.box': {exc}") from exc
            confs: tuple[float, ...] = ()
            if "conf" in item:
                if not isinstance(item["conf"], (int, float)):
                    raise FormatError(f"grid: field '{where}.conf' must be a number")
                confs = (float(item["conf"]),)
            out_row.append(Cell(item["text"], boxes, confs))
        cells.append(out_row)
    try:
        return CellGrid(rows, cols, cells)
    except InvalidInputError as exc:
        raise FormatError(f"grid: {exc}") from exc


def from_json(text: str) -> CellGrid:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"grid: invalid JSON ({exc})") from exc
    return grid_from_obj(obj)


def serialize_flat(grid: CellGrid) -> str:
    """Canonical string used for similarity scoring: ``a|b\\nc|d``."""
    return ROW_SEP.join(CELL_SEP.join(c.text for c in row) for row in grid.cells)
