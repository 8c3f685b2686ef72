from __future__ import annotations

import dataclasses
import enum
import logging
import math
import numbers
from collections.abc import Callable
from typing import TYPE_CHECKING, Any, Literal

import numpy as np
import numpy.typing as npt

from ._errors import (
    BadSampleSize,
    NonFiniteValue,
    OrderingViolation,
    ShiftInsufficient,
    UnsupportedPattern,
    ValidationError,
)

if TYPE_CHECKING:
    from ._distributions import DistributionSpec

logger = logging.getLogger("abcmeta")

MIN_SAMPLE_SIZE = 3

# Order of the five-number summary everywhere in the package.
FIELDS = ("min", "q1", "median", "q3", "max")

SELECT = "select"


class Scenario(enum.Enum):
    """Which order statistics a study reported."""

    S1 = "s1"  # min, median, max
    S2 = "s2"  # q1, median, q3
    S3 = "s3"  # min, q1, median, q3, max

    @property
    def mask(self) -> tuple[bool, bool, bool, bool, bool]:
        return _MASKS[self]


_MASKS = {
    Scenario.S1: (True, False, True, False, True),
    Scenario.S2: (False, True, True, True, False),
    Scenario.S3: (True, True, True, True, True),
}


@dataclasses.dataclass(frozen=True)
class SummaryStats:
    """Observed summary statistics of one study.

    Build these with parse_summary(), which validates them.
    """

    n: int
    median: float
    min: float | None = None
    q1: float | None = None
    q3: float | None = None
    max: float | None = None
    # Problems that don't make the input invalid, e.g. tied order statistics.
    warnings: tuple[str, ...] = dataclasses.field(default=(), compare=False)

    @property
    def scenario(self) -> Scenario:
        return _infer_scenario(self.min, self.q1, self.q3, self.max)

    def as_tuple(self) -> tuple[float | None, ...]:
        return (self.min, self.q1, self.median, self.q3, self.max)

    def present(self) -> list[float]:
        """Present values, in (min, q1, median, q3, max) order."""
        return [v for v in self.as_tuple() if v is not None]

    def vector(self) -> npt.NDArray[np.float64]:
        """Five-element array with NaN in the absent slots."""
        return np.array(
            [np.nan if v is None else v for v in self.as_tuple()], dtype=np.float64
        )

    def location_bounds(self) -> tuple[float, float]:
        """Bounds of the location prior: (min, max) for S1, (q1, q3) otherwise."""
        if self.scenario is Scenario.S1:
            assert self.min is not None and self.max is not None
            return self.min, self.max
        assert self.q1 is not None and self.q3 is not None
        return self.q1, self.q3

    def map_values(self, fn: Callable[[float], float]) -> SummaryStats:
        """Applies fn to every present value; n and scenario are unchanged."""
        changed = {
            name: fn(value)
            for name, value in zip(FIELDS, self.as_tuple(), strict=True)
            if value is not None
        }
        return dataclasses.replace(self, **changed)

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"n": self.n}
        d.update(zip(FIELDS, self.as_tuple(), strict=True))
        return d


def _infer_scenario(
    min_: float | None, q1: float | None, q3: float | None, max_: float | None
) -> Scenario:
    pattern = (min_ is not None, q1 is not None, q3 is not None, max_ is not None)
    match pattern:
        case (True, False, False, True):
            return Scenario.S1
        case (False, True, True, False):
            return Scenario.S2
        case (True, True, True, True):
            return Scenario.S3
    present = [
        name
        for name, here in zip(("min", "q1", "q3", "max"), pattern, strict=True)
        if here
    ]
    raise UnsupportedPattern(
        f"unsupported combination of summary statistics: median with {present};"
        " expected min/max, q1/q3, or all five"
    )


def _check_sample_size(n: Any) -> int:
    if isinstance(n, bool):
        raise BadSampleSize(f"sample size must be an integer, got {n!r}")
    if isinstance(n, numbers.Integral):
        n = int(n)
    elif isinstance(n, numbers.Real) and float(n).is_integer():
        n = int(n)
    else:
        raise BadSampleSize(f"sample size must be an integer, got {n!r}")
    if n < MIN_SAMPLE_SIZE:
        raise BadSampleSize(f"sample size must be at least {MIN_SAMPLE_SIZE}, got {n}")
    return n


def parse_summary(
    n: int,
    *,
    median: float,
    min: float | None = None,
    q1: float | None = None,
    q3: float | None = None,
    max: float | None = None,
) -> SummaryStats:
    """Validates reported summary statistics and infers their scenario."""
    n = _check_sample_size(n)
    values = dict(zip(FIELDS, (min, q1, median, q3, max), strict=True))
    for name, value in values.items():
        if value is not None and not math.isfinite(value):
            raise NonFiniteValue(f'"{name}" must be finite, got {value!r}')
    _infer_scenario(min, q1, q3, max)

    present = [(name, float(v)) for name, v in values.items() if v is not None]
    warnings = []
    for (name_a, a), (name_b, b) in zip(present, present[1:]):
        if a > b:
            raise OrderingViolation(
                f'summary statistics must be non-decreasing: "{name_a}"={a}'
                f' > "{name_b}"={b}'
            )
        if a == b:
            warnings.append(f'"{name_a}" equals "{name_b}" ({a})')
    for w in warnings:
        logger.warning(f"degenerate summary statistics: {w}")

    return SummaryStats(
        n=n,
        median=float(median),
        min=None if min is None else float(min),
        q1=None if q1 is None else float(q1),
        q3=None if q3 is None else float(q3),
        max=None if max is None else float(max),
        warnings=tuple(warnings),
    )


def required_positive(stats: SummaryStats) -> bool:
    """True iff every present summary value is strictly positive."""
    return all(v > 0 for v in stats.present())


@dataclasses.dataclass(frozen=True)
class StudyRecord:
    """One study of a batch: its statistics plus per-study overrides."""

    study_id: str
    stats: SummaryStats
    distribution: DistributionSpec | Literal["select"] | None = None
    # Additive constant for the positive-shift trick.
    shift: float | None = None

    def __post_init__(self):
        if not self.study_id:
            raise ValidationError("study_id must not be empty")
        if self.shift is None or not self._needs_positive():
            return
        low = [v for v in self.stats.present() if v + self.shift <= 0]
        if low:
            raise ShiftInsufficient(
                f'study "{self.study_id}": shift {self.shift} leaves {low[0]}'
                " non-positive"
            )

    def _needs_positive(self) -> bool:
        if self.distribution == SELECT:
            return True
        if self.distribution is None or isinstance(self.distribution, str):
            return False
        return self.distribution.family.requires_positive
