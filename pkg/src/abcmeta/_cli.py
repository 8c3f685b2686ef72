#!/usr/bin/env python3
"""Command-line front end: `abcmeta estimate` and `abcmeta batch`."""

from __future__ import annotations

import argparse
import functools
import importlib.metadata
import json
import logging
import os
import sys
import time
from collections.abc import Sequence

import anyio

from ._batch import (
    BatchOptions,
    ReportRow,
    make_record,
    read_batch,
    report_row,
    run_batch,
    run_study,
    write_report,
)
from ._distributions import Family, PriorLimits
from ._engine import AbcConfig
from ._errors import InvalidConfig, ValidationError
from ._progress import progress_display
from ._rng import DEFAULT_SEED
from ._summary import SELECT

logger = logging.getLogger("abcmeta")

SEED_ENV = "ABCMETA_SEED"

# CLI flag -> PriorLimits key.
_LIMIT_FLAGS = {
    "sigma_max": "--sigma-max",
    "lambda_max": "--lambda-max",
    "shape_max": "--shape-max",
    "scale_max": "--scale-max",
    "alpha_max": "--alpha-max",
    "beta_max": "--beta-max",
    "lower": "--lower",
    "upper": "--upper",
}

_TABLE_COLUMNS = (
    ("study_id", "study"),
    ("scenario", "scenario"),
    ("family", "family"),
    ("est_mean", "mean"),
    ("est_sd", "sd"),
    ("selection_probability", "sel_prob"),
    ("retained", "K"),
    ("n_simul", "iters"),
    ("seed", "seed"),
    ("wall_time", "time_s"),
)


def _version() -> str:
    try:
        return importlib.metadata.version("abcmeta")
    except importlib.metadata.PackageNotFoundError:
        return "unknown"


def _choice(text: str) -> Family | str:
    text = text.lower()
    if text == SELECT:
        return SELECT
    try:
        return Family(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"invalid distribution {text!r}; choose from"
            f" {', '.join(f.value for f in Family)} or {SELECT}"
        ) from None


def _shift(text: str) -> float | str:
    if text.lower() == "auto":
        return "auto"
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid shift {text!r}") from None


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("simulation")
    g.add_argument("--iters", type=int, default=50_000, help="simulations per family")
    g.add_argument(
        "--accept-pct", type=float, default=0.1, help="acceptance percentage"
    )
    g.add_argument(
        "--seed",
        type=int,
        default=None,
        help=f"random seed (default ${SEED_ENV} or {DEFAULT_SEED})",
    )
    g.add_argument("--chunk-size", type=int, default=500, help=argparse.SUPPRESS)
    g.add_argument("--threads", type=int, default=None, help="worker threads")
    g = p.add_argument_group("priors")
    for key, flag in _LIMIT_FLAGS.items():
        g.add_argument(flag, dest=key, type=float, default=None)
    g.add_argument(
        "--shift",
        type=_shift,
        default=None,
        help='constant added to every summary value before fitting, or "auto"',
    )
    g = p.add_argument_group("output")
    g.add_argument("--json", action="store_true", help="print JSON")
    g.add_argument("--quiet", "-q", action="store_true", help="no progress, fewer logs")
    g.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    g.add_argument(
        "--timings", action="store_true", help="include wall_time in machine output"
    )
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="abcmeta",
        description="Estimate a study's sample mean and SD from its median, range"
        " and/or quartiles with rejection ABC.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", parents=[common], help="estimate one study")
    est.add_argument("--n", type=int, required=True, help="sample size")
    est.add_argument("--min", type=float, default=None)
    est.add_argument("--q1", type=float, default=None)
    est.add_argument("--median", type=float, required=True)
    est.add_argument("--q3", type=float, default=None)
    est.add_argument("--max", type=float, default=None)
    est.add_argument(
        "--dist",
        type=_choice,
        required=True,
        help=f"{', '.join(f.value for f in Family)} or {SELECT}",
    )

    batch = sub.add_parser(
        "batch", parents=[common], help="estimate a table of studies"
    )
    batch.add_argument("input", help="CSV (header required) or JSON file")
    batch.add_argument(
        "output", nargs="?", default="-", help='output file, "-" for stdout'
    )
    batch.add_argument(
        "--dist",
        type=_choice,
        default=Family.NORMAL,
        help="distribution for rows with an empty distribution cell",
    )
    batch.add_argument(
        "--fail-fast", action="store_true", help="stop at the first failing study"
    )
    batch.add_argument("--jobs", type=int, default=None, help="concurrent studies")
    return parser


def _resolve_seed(args: argparse.Namespace) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if not env:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise InvalidConfig(f"${SEED_ENV} must be an integer, got {env!r}") from None


def _config(args: argparse.Namespace) -> AbcConfig:
    return AbcConfig(
        n_simul=args.iters,
        acceptance_pct=args.accept_pct,
        seed=_resolve_seed(args),
        chunk_size=args.chunk_size,
        threads=args.threads,
    )


def _limits(args: argparse.Namespace) -> PriorLimits:
    limits = PriorLimits()
    for key in _LIMIT_FLAGS:
        value = getattr(args, key)
        if value is not None:
            limits[key] = value  # type: ignore[literal-required]
    return limits


def render_table(rows: Sequence[ReportRow]) -> str:
    """Fixed-width table; estimates rounded to 3 decimals for display."""

    def cell(row: ReportRow, attr: str) -> str:
        v = getattr(row, attr)
        if v is None:
            return "-"
        if attr == "wall_time":
            return f"{v:.2f}"
        if isinstance(v, float):
            return f"{v:.3f}"
        return str(v)

    header = [title for _, title in _TABLE_COLUMNS]
    body = [[cell(r, attr) for attr, _ in _TABLE_COLUMNS] for r in rows]
    widths = [max(len(x) for x in col) for col in zip(header, *body, strict=True)]
    lines = ["  ".join(x.ljust(w) for x, w in zip(line, widths, strict=True)).rstrip()
             for line in [header, *body]]
    for r in rows:
        if r.error:
            lines.append(f"{r.study_id}: {r.error}")
    return "\n".join(lines)


async def cmd_estimate(args: argparse.Namespace) -> int:
    cfg = _config(args)
    fields = {k: getattr(args, k) for k in ("n", "min", "q1", "median", "q3", "max")}
    record = make_record(
        "study", fields, args.dist, shift=args.shift, limits=_limits(args)
    )
    if args.shift == "auto":
        print(f"shift: adding c={record.shift:g} to all summary statistics",
              file=sys.stderr)
    arms = 4 if record.distribution == SELECT else 1
    start = time.perf_counter()
    async with progress_display(
        cfg.n_simul * arms, desc="Simulate", quiet=args.quiet
    ) as progress:
        result = await run_study(record, cfg, progress=progress)
    row = report_row(record, result, cfg.seed, time.perf_counter() - start)
    if args.json:
        print(json.dumps(row.formatted(timings=args.timings), indent=2))
    else:
        print(render_table([row]))
        print(result.describe())
    return 0


async def cmd_batch(args: argparse.Namespace) -> int:
    rows = read_batch(args.input)
    options = BatchOptions(
        cfg=_config(args),
        distribution=args.dist,
        limits=_limits(args),
        shift=args.shift,
        fail_fast=args.fail_fast,
        jobs=args.jobs,
    )
    async with progress_display(
        len(rows), desc="Studies", unit="study", quiet=args.quiet
    ) as progress:
        report = await run_batch(rows, options, progress=progress)
    if args.output == "-":
        write_report(report, sys.stdout, as_json=args.json, timings=args.timings)
    else:
        write_report(report, args.output, as_json=args.json, timings=args.timings)
        logger.info(f"wrote {len(report)} rows to {args.output}")
    return 0


def _root_cause(exc: BaseException) -> BaseException:
    # anyio task groups wrap errors in exception groups.
    while True:
        inner = getattr(exc, "exceptions", None)
        if not isinstance(inner, tuple) or len(inner) != 1:
            return exc
        exc = inner[0]


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING
    if args.quiet:
        level = logging.ERROR
    logging.basicConfig(stream=sys.stderr, level=level)

    command = cmd_estimate if args.command == "estimate" else cmd_batch
    try:
        return anyio.run(functools.partial(command, args))
    except Exception as e:
        cause = _root_cause(e)
        if isinstance(cause, ValidationError):
            print(f"error: {type(cause).__name__}: {cause}", file=sys.stderr)
            return 2
        logger.exception("internal error")
        return 1


if __name__ == "__main__":
    sys.exit(main())
