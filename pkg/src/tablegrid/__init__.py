"""Table structure and text extraction from table images.

Two pipelines are provided: :func:`extract_approach_one` (morphology first,
OCR per cell) and :func:`extract_approach_two` (OCR once, Least Collision
column search).
"""

from .errors import FormatError, InvalidInputError, OcrEngineError, TableGridError
from .evalkit import (
    AggregateReport,
    MetricsRow,
    aggregate,
    comparison_results,
    count_delta,
    grid_similarity,
    similarity_ratio,
)
from .grid import Cell, CellGrid, from_json, serialize_flat, to_csv, to_json
from .layout_a import ColumnBounds, RowBands, extract_approach_one
from .layout_b import extract_approach_two
from .ocr import OcrConfig, WordBox, parse_tsv, recognize, recognize_region
from .postproc import drop_empty, merge_split_lines, repair_typed
from .raster import BoxRect, StructuringElement, binarize, load_image
from .standardize import ScaleContext, normalize_polarity, remove_lines
from .synthgen import GroundTruth, TableSpec, render

__all__ = [
    "AggregateReport", "BoxRect", "Cell", "CellGrid", "ColumnBounds", "FormatError", "GroundTruth",
    "InvalidInputError", "MetricsRow", "OcrConfig", "OcrEngineError", "RowBands", "ScaleContext",
    "StructuringElement", "TableGridError", "TableSpec", "WordBox", "aggregate", "binarize",
    "count_delta", "drop_empty", "extract_approach_one", "extract_approach_two", "from_json",
    "grid_similarity", "load_image", "merge_split_lines", "normalize_polarity", "parse_tsv",
    "recognize", "recognize_region", "remove_lines", "render", "repair_typed", "serialize_flat",
    "similarity_ratio", "comparison_results", "to_csv", "to_json",
]
