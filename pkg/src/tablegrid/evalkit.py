"""Evaluation: count deltas, gestalt similarity ratio, aggregate statistics."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, fields
from importlib import resources
from typing import Sequence

from .errors import FormatError, InvalidInputError
from .grid import CellGrid, serialize_flat

SERIES = ("a_raw", "a_clean", "b_raw", "b_clean")


def count_delta(a: int, b: int) -> int:
    return abs(a - b)


def longest_match(a: str, b: str, alo: int, ahi: int, blo: int, bhi: int,
                  b2j: dict[str, list[int]]) -> tuple[int, int, int]:
    """Longest common substring of ``a[alo:ahi]`` and ``b[blo:bhi]``.

    Ties go to the smallest start in ``a``, then the smallest start in ``b``.
    ``j2len[j]`` holds the length of the match ending at ``a[i-1]``/``b[j]``.
    """
    best_i, best_j, best_k = alo, blo, 0
    j2len: dict[int, int] = {}
    for i in range(alo, ahi):
        new_j2len: dict[int, int] = {}
        for j in b2j.get(a[i], ()):
            if j < blo:
                continue
            if j >= bhi:
                break
            k = j2len.get(j - 1, 0) + 1
            new_j2len[j] = k
            if k > best_k:
                best_i, best_j, best_k = i - k + 1, j - k + 1, k
        j2len = new_j2len
    return best_i, best_j, best_k


def matching_blocks(a: str, b: str) -> list[tuple[int, int, int]]:
    """Ratcliff-Obershelp decomposition into (i, j, size) blocks, sorted."""
    b2j: dict[str, list[int]] = {}
    for j, ch in enumerate(b):
        b2j.setdefault(ch, []).append(j)
    blocks = []
    stack = [(0, len(a), 0, len(b))]
    while stack:
        alo, ahi, blo, bhi = stack.pop()
        i, j, k = longest_match(a, b, alo, ahi, blo, bhi, b2j)
        if k == 0:
            continue
        blocks.append((i, j, k))
        if alo < i and blo < j:
            stack.append((alo, i, blo, j))
        if i + k < ahi and j + k < bhi:
            stack.append((i + k, ahi, j + k, bhi))
    blocks.sort()
    return blocks


def similarity_ratio(a: str, b: str) -> float:
    """``2 M / (len(a) + len(b))`` with M the characters matched by gestalt matching."""
    total = len(a) + len(b)
    if total == 0:
        return 1.0
    matched = sum(k for _, _, k in matching_blocks(a, b))
    return 2.0 * matched / total


def grid_similarity(pred: CellGrid, truth: CellGrid) -> float:
    return similarity_ratio(serialize_flat(pred), serialize_flat(truth))


def evaluate(pred: CellGrid, truth: CellGrid) -> dict:
    return {
        "row_delta": count_delta(pred.rows, truth.rows),
        "col_delta": count_delta(pred.cols, truth.cols),
        "similarity": grid_similarity(pred, truth),
    }


@dataclass(frozen=True)
class MetricsRow:
    """One observation; ``None`` marks a value that is not available."""

    name: str
    row_manual: int
    row_a_raw: int | None
    row_a_clean: int | None
    row_b_raw: int | None
    row_b_clean: int | None
    col_manual: int
    col_a_raw: int | None
    col_a_clean: int | None
    col_b_raw: int | None
    col_b_clean: int | None
    sim_a_raw: float | None
    sim_a_clean: float | None
    sim_b_raw: float | None
    sim_b_clean: float | None

    def __post_init__(self):
        for s in SERIES:
            v = getattr(self, f"sim_{s}")
            if v is not None and not 0 <= v <= 1:
                raise InvalidInputError(f"{self.name}: sim_{s}={v} outside [0, 1]")

    def best(self, approach: str) -> float | None:
        vals = [v for v in (getattr(self, f"sim_{approach}_raw"), getattr(self, f"sim_{approach}_clean"))
                if v is not None]
        return max(vals) if vals else None


METRIC_FIELDS = tuple(f.name for f in fields(MetricsRow))
NA = {"NA", "na", "N/A", ""}


def parse_metrics_csv(text: str) -> list[MetricsRow]:
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    for name in METRIC_FIELDS:
        if name not in header:
            raise FormatError(f"metrics: missing field '{name}'")
    rows = []
    for lineno, rec in enumerate(reader, start=2):
        values: dict = {"name": rec["name"].strip()}
        for name in METRIC_FIELDS[1:]:
            raw = (rec[name] or "").strip()
            manual = name.endswith("_manual")
            if raw in NA:
                if manual:
                    raise FormatError(f"metrics line {lineno}: field '{name}' cannot be NA")
                values[name] = None
                continue
            try:
                values[name] = float(raw) if name.startswith("sim_") else int(raw)
            except ValueError as exc:
                raise FormatError(f"metrics line {lineno}: field '{name}' has bad value {raw!r}") from exc
        try:
            rows.append(MetricsRow(**values))
        except InvalidInputError as exc:
            raise FormatError(f"metrics line {lineno}: {exc}") from exc
    return rows


def comparison_results() -> list[MetricsRow]:
    """The fourteen published comparison observations, NA preserved."""
    text = resources.files("tablegrid").joinpath("data/comparison.csv").read_text(encoding="utf-8")
    return parse_metrics_csv(text)


@dataclass(frozen=True)
class Extreme:
    observation: str
    delta: float


@dataclass(frozen=True)
class AggregateReport:
    avg_best_sim_a: float
    avg_raw_sim_b: float
    avg_best_sim_b: float
    avg_best_overall: float
    max_row_error: int
    ceil_avg_row_error: int
    max_col_error: int
    ceil_avg_col_error: int
    # approach -> {"drop": Extreme, "rise": Extreme}
    extremes: dict

    def to_dict(self) -> dict:
        return asdict(self)


def _mean(values: Sequence[float | None]) -> float:
    present = [v for v in values if v is not None]
    if not present:
        return math.nan
    return math.fsum(present) / len(present)


def _ceil_mean(values: list[int]) -> int:
    return -(-sum(values) // len(values)) if values else 0


def aggregate(rows: Sequence[MetricsRow]) -> AggregateReport:
    """Reduce observations to the summary statistics quoted with the results table.

    Best-of values are the per-observation maximum of raw and cleaned; count
    errors pool the absolute deltas of all four extracted series against the
    manual count, and their average is rounded up.
    """
    if not rows:
        raise InvalidInputError("aggregate needs at least one observation")
    row_err = [count_delta(getattr(r, f"row_{s}"), r.row_manual)
               for r in rows for s in SERIES if getattr(r, f"row_{s}") is not None]
    col_err = [count_delta(getattr(r, f"col_{s}"), r.col_manual)
               for r in rows for s in SERIES if getattr(r, f"col_{s}") is not None]

    best_overall = []
    for r in rows:
        vals = [v for v in (r.best("a"), r.best("b")) if v is not None]
        best_overall.append(max(vals) if vals else None)

    extremes = {}
    for approach in ("a", "b"):
        deltas = [
            (getattr(r, f"sim_{approach}_clean") - getattr(r, f"sim_{approach}_raw"), r.name)
            for r in rows
            if getattr(r, f"sim_{approach}_raw") is not None and getattr(r, f"sim_{approach}_clean") is not None
        ]
        if deltas:
            drop = min(deltas, key=lambda d: d[0])
            rise = max(deltas, key=lambda d: d[0])
            extremes[approach] = {"drop": Extreme(drop[1], drop[0]), "rise": Extreme(rise[1], rise[0])}

    return AggregateReport(
        avg_best_sim_a=_mean([r.best("a") for r in rows]),
        avg_raw_sim_b=_mean([r.sim_b_raw for r in rows]),
        avg_best_sim_b=_mean([r.best("b") for r in rows]),
        avg_best_overall=_mean(best_overall),
        max_row_error=max(row_err, default=0),
        ceil_avg_row_error=_ceil_mean(row_err),
        max_col_error=max(col_err, default=0),
        ceil_avg_col_error=_ceil_mean(col_err),
        extremes=extremes,
    )
