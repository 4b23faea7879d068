"""Command-line entry point: ``tablegrid {extract,eval,report,synth}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import ocr
from .errors import FormatError, InvalidInputError, OcrEngineError
from .evalkit import aggregate, comparison_results, evaluate, parse_metrics_csv
from .grid import CellGrid, from_json, to_csv, to_json, grid_to_obj
from .layout_a import extract_approach_one
from .layout_b import extract_approach_two
from .postproc import drop_empty, load_hints, merge_split_lines, repair_typed
from .raster import load_image, save_image
from .standardize import ScaleContext
from .synthgen import STYLES, TableSpec, random_spec, render

log = logging.getLogger("tablegrid")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_EMPTY = 2
EXIT_USAGE = 64
EXIT_DATAERR = 65

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    approach: str
    input: Path
    ocr: ocr.OcrConfig
    out: Path | None = None
    format: str = "csv"
    clean: bool = False
    hints: Path | None = None
    debug_dir: Path | None = None
    scale: dict = field(default_factory=dict)
    jobs: int = 1


def extract_one(cfg: RunConfig, image_path: Path, ocr_cfg: ocr.OcrConfig,
                debug_dir: Path | None) -> CellGrid:
    img = load_image(image_path)
    ctx = ScaleContext.for_image(img, **cfg.scale)
    run = extract_approach_one if cfg.approach == "one" else extract_approach_two
    grid = run(img, ctx, ocr_cfg, debug_dir=debug_dir)
    if cfg.clean:
        grid = merge_split_lines(drop_empty(grid))
    if cfg.hints is not None:
        grid = repair_typed(grid, load_hints(cfg.hints))
    return grid


def render_grid(grid: CellGrid, fmt: str) -> str:
    return to_csv(grid) if fmt == "csv" else to_json(grid) + "\n"


def _write(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8", newline="")


def run_extract(cfg: RunConfig) -> int:
    if cfg.input.is_dir():
        return _run_batch(cfg)
    grid = extract_one(cfg, cfg.input, cfg.ocr, cfg.debug_dir)
    _write(render_grid(grid, cfg.format), cfg.out)
    if grid.rows == 0:
        log.warning("%s: no table content extracted", cfg.input)
        return EXIT_EMPTY
    return EXIT_OK


def _run_batch(cfg: RunConfig) -> int:
    images = sorted(p for p in cfg.input.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    if cfg.out is None:
        raise UsageError("batch mode needs --out DIR")
    fixture_dir = None
    if cfg.ocr.engine == ocr.ENGINE_FIXTURE:
        given = Path(cfg.ocr.fixture_path)
        fixture_dir = given if given.is_dir() else cfg.input

    def work(path: Path) -> tuple[Path, str, str]:
        try:
            ocr_cfg = cfg.ocr
            if fixture_dir is not None:
                ocr_cfg = ocr.OcrConfig(cfg.ocr.min_confidence, cfg.ocr.engine, cfg.ocr.command_template,
                                        fixture_dir / f"{path.stem}.words.json")
            debug_dir = cfg.debug_dir / path.stem if cfg.debug_dir else None
            grid = extract_one(cfg, path, ocr_cfg, debug_dir)
            _write(render_grid(grid, cfg.format), cfg.out / f"{path.stem}.{cfg.format}")
            return path, "empty" if grid.rows == 0 else "ok", ""
        except Exception as exc:  # per-file failure; the batch continues
            return path, "failed", str(exc)

    with ThreadPoolExecutor(max_workers=max(1, cfg.jobs)) as pool:
        results = list(pool.map(work, images))
    counts = {"ok": 0, "empty": 0, "failed": 0}
    for path, status, detail in results:
        counts[status] += 1
        if status != "ok":
            print(f"{path.name}: {status}{': ' + detail if detail else ''}", file=sys.stderr)
    print(f"processed {len(results)} images: {counts['ok']} ok, {counts['empty']} empty, "
          f"{counts['failed']} failed", file=sys.stderr)
    if counts["failed"]:
        return EXIT_ERROR
    return EXIT_EMPTY if counts["empty"] else EXIT_OK


def _read_grid(path: Path) -> CellGrid:
    return from_json(path.read_text(encoding="utf-8"))


def cmd_extract(args) -> int:
    engine = ocr.ENGINE_FIXTURE if args.ocr == "fixture" else ocr.ENGINE_EXTERNAL
    if engine == ocr.ENGINE_FIXTURE and args.fixture is None:
        if not Path(args.input).is_dir():
            raise UsageError("--ocr fixture needs --fixture PATH")
    if args.jobs is not None:
        ocr.set_max_engine_processes(args.jobs)
    ocr_cfg = ocr.OcrConfig(
        min_confidence=args.min_conf,
        engine=engine,
        command_template=args.ocr_cmd,
        fixture_path=args.fixture or args.input,
    )
    scale = {
        "ref_width": args.ref_width,
        "line_kernel_base": args.line_kernel_base,
        "spacing": args.spacing,
        "merge_gap": args.merge_gap,
    }
    cfg = RunConfig(
        approach=args.approach,
        input=Path(args.input),
        ocr=ocr_cfg,
        out=Path(args.out) if args.out else None,
        format=args.format,
        clean=args.clean,
        hints=Path(args.hints) if args.hints else None,
        debug_dir=Path(args.debug_dir) if args.debug_dir else None,
        scale={k: v for k, v in scale.items() if v is not None},
        jobs=args.jobs or 1,
    )
    return run_extract(cfg)


def cmd_eval(args) -> int:
    result = evaluate(_read_grid(Path(args.pred)), _read_grid(Path(args.truth)))
    _write(json.dumps(result) + "\n", Path(args.out) if args.out else None)
    return EXIT_OK


def cmd_report(args) -> int:
    if args.metrics:
        rows = parse_metrics_csv(Path(args.metrics).read_text(encoding="utf-8"))
    else:
        rows = comparison_results()
    report = aggregate(rows).to_dict()
    _write(json.dumps(report, indent=2) + "\n", Path(args.out) if args.out else None)
    return EXIT_OK


def cmd_synth(args) -> int:
    if args.texts:
        try:
            texts = json.loads(Path(args.texts).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise FormatError(f"{args.texts}: not valid JSON ({exc})") from exc
        if not isinstance(texts, list) or not all(isinstance(row, list) for row in texts):
            raise FormatError(f"{args.texts}: expected a list of rows")
        spec = TableSpec(len(texts), len(texts[0]) if texts else 0, texts, style=args.style or "borderless",
                         cell_padding=args.padding, font_px=args.font_px, seed=args.seed)
    else:
        rows = (args.rows, args.rows) if args.rows else (2, 12)
        cols = (args.cols, args.cols) if args.cols else (2, 8)
        spec = random_spec(args.seed, rows=rows, cols=cols, style=args.style)
    img, truth = render(spec)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_image(img, out / f"{args.name}.png")
    (out / f"{args.name}.truth.json").write_text(json.dumps(grid_to_obj(truth.grid)) + "\n", encoding="utf-8")
    ocr.save_fixture(truth.word_fixture, out / f"{args.name}.words.json")
    print(f"{out / args.name}.png: {spec.rows}x{spec.cols} {spec.style}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tablegrid", description="Extract tables from images and score the results.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ex = sub.add_parser("extract", help="extract a cell grid from a table image (or a directory of them)")
    ex.add_argument("--approach", required=True, choices=["one", "two"])
    ex.add_argument("--input", required=True)
    ex.add_argument("--ocr", choices=["fixture", "external"], default="external")
    ex.add_argument("--fixture", help="word fixture JSON (or directory of <stem>.words.json in batch mode)")
    ex.add_argument("--ocr-cmd", help=f"engine command with {{input}} placeholder (env {ocr.CMD_ENV_VAR} wins)")
    ex.add_argument("--min-conf", type=float, default=30.0)
    ex.add_argument("--clean", action="store_true", help="drop empty lines and merge split rows/columns")
    ex.add_argument("--hints", help="JSON map of column index to numeric|currency|text")
    ex.add_argument("--out")
    ex.add_argument("--format", choices=["csv", "json"], default="csv")
    ex.add_argument("--debug-dir")
    ex.add_argument("--ref-width", type=int)
    ex.add_argument("--line-kernel-base", type=int)
    ex.add_argument("--spacing", type=int)
    ex.add_argument("--merge-gap", type=int)
    ex.add_argument("--jobs", type=int)
    ex.set_defaults(func=cmd_extract)

    ev = sub.add_parser("eval", help="compare a predicted grid with the ground truth")
    ev.add_argument("--pred", required=True)
    ev.add_argument("--truth", required=True)
    ev.add_argument("--out")
    ev.set_defaults(func=cmd_eval)

    rp = sub.add_parser("report", help="aggregate statistics over a metrics CSV (default: bundled comparison results)")
    rp.add_argument("--metrics")
    rp.add_argument("--out")
    rp.set_defaults(func=cmd_report)

    sy = sub.add_parser("synth", help="render a synthetic table with ground truth")
    sy.add_argument("--out-dir", required=True)
    sy.add_argument("--name", default="table")
    sy.add_argument("--seed", type=int, default=0)
    sy.add_argument("--rows", type=int)
    sy.add_argument("--cols", type=int)
    sy.add_argument("--style", choices=STYLES)
    sy.add_argument("--texts", help="JSON file holding a rows x cols array of strings")
    sy.add_argument("--font-px", type=int, default=10)
    sy.add_argument("--padding", type=int, default=12)
    sy.set_defaults(func=cmd_synth)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"tablegrid: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"tablegrid: {exc}", file=sys.stderr)
        return EXIT_DATAERR
    except OcrEngineError as exc:
        print(f"tablegrid: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, InvalidInputError) as exc:
        print(f"tablegrid: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
