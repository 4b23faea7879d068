"""OCR abstraction: whole-image and per-region word recognition.

Two engines are supported. ``fixture`` replays pre-recorded word boxes from a
JSON file and makes every pipeline deterministic. ``external-process`` runs an
OCR command that prints word-level TSV (the 12-column layout produced by
``tesseract <image> stdout tsv``) on standard output.
"""

from __future__ import annotations

import json
import logging
import os
import shlex
import subprocess
import tempfile
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import FormatError, InvalidInputError, OcrEngineError
from .raster import BoxRect, GrayImage, check_gray, save_image

log = logging.getLogger(__name__)

ENGINE_FIXTURE = "fixture"
ENGINE_EXTERNAL = "external-process"
ENGINES = (ENGINE_FIXTURE, ENGINE_EXTERNAL)

DEFAULT_COMMAND = "tesseract {input} stdout tsv"
CMD_ENV_VAR = "TABLEGRID_OCR_CMD"

TSV_COLUMNS = (
    "level", "page_num", "block_num", "par_num", "line_num", "word_num",
    "left", "top", "width", "height", "conf", "text",
)
WORD_LEVEL = 5


@dataclass(frozen=True)
class WordBox:
    box: BoxRect
    text: str
    confidence: float
    block_id: int = 1
    para_id: int = 1
    line_id: int = 1
    word_id: int = 1

    def __post_init__(self):
        if not 0 <= self.confidence <= 100:
            raise InvalidInputError(f"confidence {self.confidence} outside [0, 100]")


@dataclass(frozen=True)
class OcrConfig:
    min_confidence: float = 30.0
    engine: str = ENGINE_FIXTURE
    command_template: str | None = None
    fixture_path: str | os.PathLike | None = None

    def __post_init__(self):
        if not 0 <= self.min_confidence <= 100:
            raise InvalidInputError("min_confidence must lie in [0, 100]")
        if self.engine not in ENGINES:
            raise InvalidInputError(f"unknown OCR engine {self.engine!r}; expected one of {ENGINES}")
        if self.engine == ENGINE_FIXTURE and self.fixture_path is None:
            raise InvalidInputError("fixture engine needs fixture_path")

    @property
    def command(self) -> str:
        """Effective command template; the environment variable wins."""
        return os.environ.get(CMD_ENV_VAR) or self.command_template or DEFAULT_COMMAND


# ---------------------------------------------------------------- TSV format

def parse_tsv(text: str, min_confidence: float = 30.0) -> list[WordBox]:
    """Parse engine TSV output into word boxes.

    Only word-level rows (level 5) with ``conf >= min_confidence`` and
    non-blank text are kept.
    """
    words = []
    lines = text.splitlines()
    if not lines:
        return words
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != len(TSV_COLUMNS):
            raise FormatError(f"TSV line {lineno}: expected {len(TSV_COLUMNS)} columns, got {len(fields)}")
        try:
            level = int(fields[0])
            ids = [int(v) for v in fields[2:6]]
            left, top, width, height = (int(v) for v in fields[6:10])
            conf = float(fields[10])
        except ValueError as exc:
            raise FormatError(f"TSV line {lineno}: {exc}") from exc
        word = fields[11].strip()
        if level != WORD_LEVEL or conf < min_confidence or not word:
            continue
        if width < 1 or height < 1:
            log.warning("TSV line %d: dropping zero-sized word %r", lineno, word)
            continue
        words.append(WordBox(BoxRect(left, top, width, height), word, min(conf, 100.0), *ids))
    return words


def serialize_tsv(words: Iterable[WordBox]) -> str:
    out = ["\t".join(TSV_COLUMNS)]
    for w in words:
        b = w.box
        out.append("\t".join(str(v) for v in (
            WORD_LEVEL, 1, w.block_id, w.para_id, w.line_id, w.word_id,
            b.left, b.top, b.width, b.height, _fmt_conf(w.confidence), w.text,
        )))
    return "\n".join(out) + "\n"


def _fmt_conf(conf: float) -> str:
    return str(int(conf)) if float(conf).is_integer() else repr(float(conf))


# ------------------------------------------------------------ fixture format

def words_to_fixture(words: Iterable[WordBox]) -> list[dict]:
    return [
        {
            "left": w.box.left, "top": w.box.top, "width": w.box.width, "height": w.box.height,
            "text": w.text, "conf": w.confidence,
            "block": w.block_id, "para": w.para_id, "line": w.line_id, "word": w.word_id,
        }
        for w in words
    ]


def words_from_fixture(items: object) -> list[WordBox]:
    if not isinstance(items, list):
        raise FormatError("fixture: expected a JSON array of word objects")
    words = []
    for i, item in enumerate(items):
        if not isinstance(item, dict):
            raise FormatError(f"fixture[{i}]: expected an object")
        try:
            words.append(WordBox(
                BoxRect(int(item["left"]), int(item["top"]), int(item["width"]), int(item["height"])),
                str(item["text"]),
                float(item["conf"]),
                int(item.get("block", 1)), int(item.get("para", 1)),
                int(item.get("line", 1)), int(item.get("word", 1)),
            ))
        except KeyError as exc:
            raise FormatError(f"fixture[{i}]: missing field {exc.args[0]!r}") from exc
        except (TypeError, ValueError) as exc:
            raise FormatError(f"fixture[{i}]: {exc}") from exc
    return words


def save_fixture(words: Iterable[WordBox], path: str | os.PathLike) -> None:
    Path(path).write_text(json.dumps(words_to_fixture(words), indent=1), encoding="utf-8")


@lru_cache(maxsize=64)
def _load_fixture_cached(path: str, mtime_ns: int) -> tuple[WordBox, ...]:
    try:
        items = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"fixture {path}: invalid JSON ({exc})") from exc
    return tuple(words_from_fixture(items))


def load_fixture(path: str | os.PathLike) -> list[WordBox]:
    p = os.fspath(path)
    return list(_load_fixture_cached(p, os.stat(p).st_mtime_ns))


# ------------------------------------------------------------ engine control

_engine_slots = threading.BoundedSemaphore(os.cpu_count() or 1)
_slots_lock = threading.Lock()


def set_max_engine_processes(n: int) -> None:
    """Cap the number of OCR processes that may run at the same time."""
    global _engine_slots
    if n < 1:
        raise InvalidInputError("process cap must be >= 1")
    with _slots_lock:
        _engine_slots = threading.BoundedSemaphore(n)


def _run_engine(img: GrayImage, cfg: OcrConfig) -> str:
    with tempfile.TemporaryDirectory(prefix="tablegrid-ocr-") as tmp:
        src = os.path.join(tmp, "input.png")
        save_image(img, src)
        argv = [a.replace("{input}", src) for a in shlex.split(cfg.command)]
        with _engine_slots:
            try:
                proc = subprocess.run(argv, capture_output=True, text=True, check=False)
            except OSError as exc:
                raise OcrEngineError(f"cannot start OCR engine {argv[0]!r}: {exc}") from exc
    if proc.returncode != 0:
        raise OcrEngineError(
            f"OCR engine exited with status {proc.returncode}: {proc.stderr.strip()[:2000]}",
            returncode=proc.returncode,
            stderr=proc.stderr,
        )
    return proc.stdout


def _clamp_words(words: Sequence[WordBox], width: int, height: int) -> list[WordBox]:
    out = []
    for w in words:
        if w.box.inside(width, height):
            out.append(w)
            continue
        clamped = w.box.clamp(width, height)
        if clamped is None:
            log.warning("word %r at %s lies outside the %dx%d image; dropped", w.text, w.box.as_list(), width, height)
            continue
        log.warning("word %r clamped from %s to %s", w.text, w.box.as_list(), clamped.as_list())
        out.append(replace(w, box=clamped))
    return out


def _filter(words: Iterable[WordBox], min_confidence: float) -> list[WordBox]:
    out = []
    for w in words:
        text = w.text.strip()
        if text and w.confidence >= min_confidence:
            out.append(w if text == w.text else replace(w, text=text))
    return out


def recognize(img: GrayImage, cfg: OcrConfig) -> list[WordBox]:
    """Run OCR once over the whole image and return the retained words."""
    check_gray(img)
    height, width = img.shape
    if cfg.engine == ENGINE_FIXTURE:
        words = _filter(load_fixture(cfg.fixture_path), cfg.min_confidence)
    else:
        words = parse_tsv(_run_engine(img, cfg), cfg.min_confidence)
    return _clamp_words(words, width, height)


def recognize_region(img: GrayImage, region: BoxRect, cfg: OcrConfig) -> str:
    """Text inside ``region``, words joined by single spaces."""
    check_gray(img)
    height, width = img.shape
    if not region.inside(width, height):
        raise InvalidInputError(f"region {region.as_list()} outside the {width}x{height} image")
    if cfg.engine == ENGINE_FIXTURE:
        words = [
            w for w in _filter(load_fixture(cfg.fixture_path), cfg.min_confidence)
            if region.left <= w.box.center_x < region.right and region.top <= w.box.center_y < region.bottom
        ]
    else:
        crop = np.ascontiguousarray(img[region.top:region.bottom, region.left:region.right])
        words = parse_tsv(_run_engine(crop, cfg), cfg.min_confidence)
    return " ".join(w.text for w in words)


def recognize_regions(img: GrayImage, regions: Sequence[BoxRect], cfg: OcrConfig) -> list[str]:
    """Per-region OCR; external engine calls run concurrently under the process cap."""
    if cfg.engine == ENGINE_FIXTURE or len(regions) <= 1:
        return [recognize_region(img, r, cfg) for r in regions]
    with ThreadPoolExecutor(max_workers=os.cpu_count() or 1) as pool:
        return list(pool.map(lambda r: recognize_region(img, r, cfg), regions))
