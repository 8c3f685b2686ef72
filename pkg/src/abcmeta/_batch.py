from __future__ import annotations

import dataclasses
import json
import logging
import math
import os
import pathlib
import re
import time
from collections.abc import Sequence
from typing import Any, Literal, TextIO, cast

import anyio
import pandas as pd

from ._distributions import DEFAULT_LIMITS, DistributionSpec, Family, PriorLimits
from ._engine import (
    AbcConfig,
    AbcResult,
    Progress,
    ProgressCallback,
    run_abc_async,
    run_selection_async,
)
from ._errors import AbcMetaError, BatchFormatError
from ._rescale import apply_shift, auto_shift, unshift_result
from ._rng import study_seed
from ._summary import FIELDS, SELECT, StudyRecord, parse_summary

logger = logging.getLogger("abcmeta")

LIMIT_COLUMNS = tuple(PriorLimits.__annotations__)
REQUIRED_COLUMNS = ("study_id", "n", "median")
COLUMNS = ("study_id", "n", *FIELDS, "distribution", "shift", *LIMIT_COLUMNS)

REPORT_COLUMNS = (
    "study_id",
    "scenario",
    "family",
    "est_mean",
    "est_sd",
    "selection_probability",
    "retained",
    "n_simul",
    "seed",
    "error",
)

Choice = Family | Literal["select"]
Shift = float | Literal["auto"]


@dataclasses.dataclass(frozen=True)
class StudyRow:
    """A syntactically valid batch row.

    Semantic checks (ordering, scenario, sample size) happen when the study
    runs, so one bad study doesn't sink the batch.
    """

    row: int
    study_id: str
    n: float
    values: dict[str, float]
    distribution: Choice | None = None
    shift: Shift | None = None
    limits: PriorLimits = dataclasses.field(default_factory=lambda: PriorLimits())


@dataclasses.dataclass
class ReportRow:
    study_id: str
    scenario: str = ""
    family: str = ""
    est_mean: float | None = None
    est_sd: float | None = None
    selection_probability: float | None = None
    retained: int | None = None
    n_simul: int | None = None
    seed: int | None = None
    wall_time: float | None = None
    error: str = ""

    def formatted(self, *, timings: bool = False) -> dict[str, Any]:
        """Column -> value, floats rounded to 6 significant digits."""
        d = {col: getattr(self, col) for col in REPORT_COLUMNS}
        if timings:
            d["wall_time"] = self.wall_time
        return {k: round_sig(v) if isinstance(v, float) else v for k, v in d.items()}


def format_float(x: float) -> str:
    return f"{x:.6g}"


def round_sig(x: float) -> float:
    return float(format_float(x))


def _parse_choice(text: str) -> Choice:
    text = text.strip().lower()
    if text == SELECT:
        return SELECT
    return Family(text)


def _parse_shift(text: str) -> Shift:
    text = text.strip().lower()
    if text == "auto":
        return "auto"
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"shift must be finite, got {text}")
    return value


def _parse_number(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"not a finite number: {text!r}")
    return value


def parse_rows(
    records: Sequence[dict[str, Any]], columns: Sequence[str]
) -> list[StudyRow]:
    """Turns raw cells into StudyRows. Empty cells and None mean absent."""
    diagnostics: list[tuple[int, str, str]] = []
    for col in REQUIRED_COLUMNS:
        if col not in columns:
            diagnostics.append((0, col, "missing required column"))
    for col in columns:
        if col not in COLUMNS:
            diagnostics.append((0, col, "unknown column"))
    if diagnostics:
        raise BatchFormatError(diagnostics)

    rows = []
    seen: dict[str, int] = {}
    for i, record in enumerate(records, start=1):
        cells = {
            k: str(v).strip()
            for k, v in record.items()
            if v is not None and str(v).strip() != ""
        }
        study_id = cells.get("study_id", "")
        if not study_id:
            diagnostics.append((i, "study_id", "empty study id"))
        elif study_id in seen:
            diagnostics.append(
                (i, "study_id", f'duplicate of row {seen[study_id]} ("{study_id}")')
            )
        else:
            seen[study_id] = i

        parsed: dict[str, Any] = {}
        for col, text in cells.items():
            if col == "study_id":
                continue
            try:
                if col == "distribution":
                    parsed[col] = _parse_choice(text)
                elif col == "shift":
                    parsed[col] = _parse_shift(text)
                else:
                    parsed[col] = _parse_number(text)
            except ValueError:
                diagnostics.append((i, col, f"invalid value {text!r}"))
        for col in ("n", "median"):
            if col not in cells:
                diagnostics.append((i, col, "value required"))
        if diagnostics and diagnostics[-1][0] == i:
            continue
        rows.append(
            StudyRow(
                row=i,
                study_id=study_id,
                n=parsed["n"],
                values={f: parsed[f] for f in FIELDS if f in parsed},
                distribution=parsed.get("distribution"),
                shift=parsed.get("shift"),
                limits=cast(
                    PriorLimits, {k: parsed[k] for k in LIMIT_COLUMNS if k in parsed}
                ),
            )
        )
    if diagnostics:
        raise BatchFormatError(diagnostics)
    return rows


def _line_of(error: Exception) -> int:
    # pandas reports "... in line 3, saw 6"; line 1 is the header.
    m = re.search(r"line (\d+)", str(error))
    return max(int(m.group(1)) - 1, 0) if m else 0


def _read_csv(path: pathlib.Path) -> pd.DataFrame:
    # No header row here: a row wider than the header must be an error, not
    # an implicit index.
    try:
        return pd.read_csv(
            path,
            header=None,
            index_col=False,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError:
        raise BatchFormatError([(0, "", "empty file, header row required")]) from None
    except pd.errors.ParserError as e:
        message = str(e).strip().removeprefix("Error tokenizing data. C error: ")
        raise BatchFormatError([(_line_of(e), "", message)]) from None


def read_batch(path: str | pathlib.Path) -> list[StudyRow]:
    """Reads a comma-separated file (header required) or a JSON file.

    JSON input is either a list of objects or {"studies": [...]}, with the
    same field names as the CSV columns. Unreadable files, bad encodings and
    rows with more cells than the header raise BatchFormatError.
    """
    path = pathlib.Path(path)
    try:
        if path.suffix.lower() == ".json":
            return _read_json(path)
        df = _read_csv(path)
    except OSError as e:
        raise BatchFormatError([(0, "", f"cannot read {path}: {e.strerror}")]) from None
    except UnicodeDecodeError as e:
        raise BatchFormatError(
            [(0, "", f"not UTF-8 text ({e.reason} at byte {e.start})")]
        ) from None

    columns = [str(c).strip() for c in df.iloc[0]]
    dupes = sorted({c for c in columns if columns.count(c) > 1})
    if dupes:
        raise BatchFormatError([(0, c, "duplicate column") for c in dupes])
    # Short rows are padded with NaN; those cells count as empty.
    records = [
        {
            c: v if isinstance(v, str) else ""
            for c, v in zip(columns, values, strict=True)
        }
        for values in df.iloc[1:].itertuples(index=False, name=None)
    ]
    return parse_rows(records, columns)


def _read_json(path: pathlib.Path) -> list[StudyRow]:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise BatchFormatError([(0, "", f"invalid JSON: {e}")]) from None
    if isinstance(data, dict):
        data = data.get("studies")
    if not isinstance(data, list) or not all(isinstance(r, dict) for r in data):
        raise BatchFormatError([(0, "", "expected a list of study objects")])
    columns = sorted({k for r in data for k in r}) or list(REQUIRED_COLUMNS)
    return parse_rows(data, columns)


def _limits_for(family: Family, limits: PriorLimits) -> PriorLimits:
    allowed = DEFAULT_LIMITS[family]
    return cast(PriorLimits, {k: v for k, v in limits.items() if k in allowed})


def make_record(
    study_id: str,
    stats_fields: dict[str, Any],
    choice: Choice,
    *,
    shift: Shift | None = None,
    limits: PriorLimits | None = None,
) -> StudyRecord:
    """Validates one study's inputs into a StudyRecord."""
    stats = parse_summary(**stats_fields)
    if shift == "auto":
        shift = auto_shift(stats)
    distribution: DistributionSpec | Literal["select"]
    if choice == SELECT:
        distribution = SELECT
    else:
        family = Family(choice)
        overrides = _limits_for(family, limits or PriorLimits())
        distribution = DistributionSpec.create(family, **overrides)
    return StudyRecord(study_id, stats, distribution, shift)


async def run_study(
    record: StudyRecord,
    cfg: AbcConfig,
    *,
    progress: ProgressCallback | None = None,
    limiter: anyio.CapacityLimiter | None = None,
) -> AbcResult:
    """Runs one study, applying and undoing its shift."""
    stats = record.stats
    c = record.shift or 0.0
    if c:
        stats = apply_shift(stats, c)
        logger.debug(f'study "{record.study_id}": shifted by {c:g}')
    if isinstance(record.distribution, DistributionSpec):
        result = await run_abc_async(
            stats, record.distribution, cfg, progress=progress, limiter=limiter
        )
    elif record.distribution == SELECT:
        result = await run_selection_async(
            stats, cfg, progress=progress, limiter=limiter
        )
    else:
        raise RuntimeError(f'study "{record.study_id}" has no distribution')
    return unshift_result(result, c)


def report_row(
    record: StudyRecord, result: AbcResult, seed: int, wall_time: float
) -> ReportRow:
    return ReportRow(
        study_id=record.study_id,
        scenario=record.stats.scenario.value,
        family=result.family.value,
        est_mean=result.est_mean,
        est_sd=result.est_sd,
        selection_probability=result.selection_probability,
        retained=result.retained,
        n_simul=result.n_simul,
        seed=seed,
        wall_time=wall_time,
    )


@dataclasses.dataclass(frozen=True)
class BatchOptions:
    cfg: AbcConfig = dataclasses.field(default_factory=AbcConfig)
    # Used for rows with an empty distribution cell.
    distribution: Choice = Family.NORMAL
    # Global prior limits; per-row columns win.
    limits: PriorLimits = dataclasses.field(default_factory=lambda: PriorLimits())
    shift: Shift | None = None
    fail_fast: bool = False
    # Concurrent studies; None means cfg.threads (or one per CPU).
    jobs: int | None = None


async def run_batch(
    rows: Sequence[StudyRow],
    options: BatchOptions,
    *,
    progress: ProgressCallback | None = None,
) -> list[ReportRow]:
    """Runs every study; the report keeps input order.

    Each study gets seed study_seed(global seed, study_id), so its result does
    not depend on the other rows or on scheduling.
    """
    cfg = options.cfg
    limiter = anyio.CapacityLimiter(cfg.threads or _cpu_count())
    studies = anyio.Semaphore(options.jobs or cfg.threads or _cpu_count())
    report: list[ReportRow | None] = [None] * len(rows)
    done = 0

    async def run_one(i: int, row: StudyRow) -> None:
        nonlocal done
        seed = study_seed(cfg.seed, row.study_id)
        async with studies:
            logger.debug(f'study "{row.study_id}" (row {row.row}): seed {seed}')
            start = time.perf_counter()
            try:
                record = make_record(
                    row.study_id,
                    {"n": row.n, **row.values},
                    row.distribution or options.distribution,
                    shift=row.shift if row.shift is not None else options.shift,
                    limits=cast(PriorLimits, {**options.limits, **row.limits}),
                )
                result = await run_study(
                    record, dataclasses.replace(cfg, seed=seed), limiter=limiter
                )
            except AbcMetaError as e:
                if options.fail_fast:
                    raise
                logger.error(f'study "{row.study_id}" (row {row.row}) failed: {e}')
                report[i] = ReportRow(
                    study_id=row.study_id, seed=seed, error=f"{type(e).__name__}: {e}"
                )
            else:
                report[i] = report_row(
                    record, result, seed, time.perf_counter() - start
                )
        done += 1
        if progress is not None:
            progress(Progress(done, len(rows)))

    async with anyio.create_task_group() as tg:
        for i, row in enumerate(rows):
            tg.start_soon(run_one, i, row)

    assert all(r is not None for r in report)
    return report  # type: ignore[return-value]


def _cpu_count() -> int:
    return os.cpu_count() or 1


def write_report(
    rows: Sequence[ReportRow],
    out: str | pathlib.Path | TextIO,
    *,
    as_json: bool = False,
    timings: bool = False,
) -> None:
    """Writes the report as CSV, or JSON when as_json or the path ends in .json.

    Floats are written with 6 significant digits so reruns are byte-identical.
    """
    if isinstance(out, str | pathlib.Path) and str(out).lower().endswith(".json"):
        as_json = True
    records = [r.formatted(timings=timings) for r in rows]
    if as_json:
        text = json.dumps(records, indent=2) + "\n"
    else:
        columns = list(REPORT_COLUMNS) + (["wall_time"] if timings else [])
        # Cells are formatted up front so pandas never coerces the int columns.
        cells = [[_csv_cell(rec.get(c)) for c in columns] for rec in records]
        df = pd.DataFrame(cells, columns=columns, dtype=str)
        text = df.to_csv(index=False, lineterminator="\n")
    if isinstance(out, str | pathlib.Path):
        pathlib.Path(out).write_text(text, encoding="utf-8")
    else:
        out.write(text)


def _csv_cell(v: Any) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if isinstance(v, float):
        return format_float(v)
    return str(v)
