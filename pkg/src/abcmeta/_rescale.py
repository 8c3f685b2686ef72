from __future__ import annotations

import dataclasses
import logging
import math
from typing import TYPE_CHECKING, TypeVar

import numpy as np

from ._errors import InvalidPrior, OutOfBounds, ShiftInsufficient
from ._summary import SummaryStats

if TYPE_CHECKING:
    from ._engine import AbcResult

logger = logging.getLogger("abcmeta")

T = TypeVar("T", float, np.ndarray)


@dataclasses.dataclass(frozen=True)
class BoundsTransform:
    """Affine map between [lower, upper] and the unit interval."""

    lower: float
    upper: float

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise InvalidPrior(
                f"bounds must be finite, got [{self.lower}, {self.upper}]"
            )
        if not self.lower < self.upper:
            raise InvalidPrior(
                "lower bound must be below upper bound,"
                f" got [{self.lower}, {self.upper}]"
            )

    @property
    def width(self) -> float:
        return self.upper - self.lower


def to_unit(stats: SummaryStats, t: BoundsTransform) -> SummaryStats:
    outside = [v for v in stats.present() if not t.lower <= v <= t.upper]
    if outside:
        raise OutOfBounds(
            f"summary value {outside[0]} lies outside [{t.lower}, {t.upper}]"
        )
    return stats.map_values(lambda v: (v - t.lower) / t.width)


def from_unit_moments(mean_u: T, sd_u: T, t: BoundsTransform) -> tuple[T, T]:
    """Maps a mean and SD on the unit scale back to [lower, upper]."""
    return t.width * mean_u + t.lower, t.width * sd_u


def apply_shift(stats: SummaryStats, c: float) -> SummaryStats:
    """Adds c to every present value; all results must be strictly positive."""
    low = [v for v in stats.present() if not v + c > 0]
    if low:
        raise ShiftInsufficient(
            f"shift {c} leaves {low[0]} + {c} = {low[0] + c}, which is not positive"
        )
    if c == 0:
        return stats
    return stats.map_values(lambda v: v + c)


def auto_shift(stats: SummaryStats) -> float:
    """Smallest multiple of the data's order of magnitude making all values positive.

    Returns 0 when the values are already positive. For min=-9.65 and
    max=39.25 the unit is 10 and the shift is 10.
    """
    values = stats.present()
    low = values[0]
    if low > 0:
        return 0.0
    magnitude = max(abs(v) for v in values)
    unit = 10.0 ** math.floor(math.log10(magnitude)) if magnitude > 0 else 1.0
    c = (math.floor(-low / unit) + 1) * unit
    logger.warning(f"automatic shift: adding c={c:g} to all summary statistics")
    return c


def unshift_result(result: AbcResult, c: float) -> AbcResult:
    """Undoes apply_shift on an estimate. SD and selection are unchanged."""
    if c == 0:
        return result
    accepted = tuple(
        dataclasses.replace(cand, pseudo_mean=cand.pseudo_mean - c)
        for cand in result.accepted
    )
    return dataclasses.replace(
        result, est_mean=result.est_mean - c, accepted=accepted
    )
