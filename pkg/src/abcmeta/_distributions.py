from __future__ import annotations

import dataclasses
import enum
import math
from collections.abc import Mapping
from typing import TypedDict

import numpy as np
import numpy.typing as npt
from typing_extensions import Unpack

from ._errors import (
    BadSampleSize,
    EmptySample,
    InvalidParam,
    InvalidPrior,
    NonPositiveSupport,
    TooFewPoints,
)
from ._rescale import BoundsTransform
from ._summary import MIN_SAMPLE_SIZE, SummaryStats, required_positive

Array = npt.NDArray[np.float64]

QUARTILES = (0.25, 0.5, 0.75)


class Family(enum.Enum):
    """Candidate outcome distributions, in tie-breaking order."""

    NORMAL = "normal"
    LOGNORMAL = "lognormal"
    EXPONENTIAL = "exponential"
    WEIBULL = "weibull"
    BETA = "beta"

    @property
    def rank(self) -> int:
        return list(Family).index(self)

    @property
    def requires_positive(self) -> bool:
        return self in (Family.LOGNORMAL, Family.EXPONENTIAL, Family.WEIBULL)

    @property
    def params(self) -> tuple[str, ...]:
        return _PARAMS[self]

    @property
    def label(self) -> str:
        return _LABELS[self]


_PARAMS = {
    Family.NORMAL: ("mu", "sigma"),
    Family.LOGNORMAL: ("mu", "sigma"),
    Family.EXPONENTIAL: ("lam",),
    Family.WEIBULL: ("shape", "scale"),
    Family.BETA: ("alpha", "beta"),
}

_LABELS = {
    Family.NORMAL: "Normal",
    Family.LOGNORMAL: "Log-Normal",
    Family.EXPONENTIAL: "Exponential",
    Family.WEIBULL: "Weibull",
    Family.BETA: "Beta",
}

# Families pooled by distribution selection. Beta is not a candidate there.
SELECTION_FAMILIES = (
    Family.NORMAL,
    Family.LOGNORMAL,
    Family.EXPONENTIAL,
    Family.WEIBULL,
)


class PriorLimits(TypedDict, total=False):
    """Upper limits of the uniform priors (and the Beta bounds)."""

    sigma_max: float
    # Upper limit for the exponential MEAN.
    lambda_max: float
    shape_max: float
    scale_max: float
    alpha_max: float
    beta_max: float
    lower: float
    upper: float


DEFAULT_LIMITS: dict[Family, PriorLimits] = {
    Family.NORMAL: {"sigma_max": 50.0},
    Family.LOGNORMAL: {"sigma_max": 10.0},
    Family.EXPONENTIAL: {"lambda_max": 40.0},
    Family.WEIBULL: {"shape_max": 50.0, "scale_max": 50.0},
    Family.BETA: {"alpha_max": 40.0, "beta_max": 40.0, "lower": 0.0, "upper": 100.0},
}


@dataclasses.dataclass(frozen=True)
class DistributionSpec:
    """A family plus its prior limits. Use DistributionSpec.create()."""

    family: Family
    limits: Mapping[str, float]

    @classmethod
    def create(
        cls, family: Family | str, **overrides: Unpack[PriorLimits]
    ) -> DistributionSpec:
        family = Family(family)
        limits = dict(DEFAULT_LIMITS[family])
        unknown = set(overrides) - set(limits)
        if unknown:
            raise InvalidPrior(
                f"{family.value} prior does not take {sorted(unknown)};"
                f" allowed: {sorted(limits)}"
            )
        limits.update(overrides)
        for name, value in limits.items():
            if name.endswith("_max") and not (math.isfinite(value) and value > 0):
                raise InvalidPrior(f'"{name}" must be positive, got {value}')
        if family is Family.BETA:
            # Validates lower < upper.
            BoundsTransform(limits["lower"], limits["upper"])
        return cls(family, {k: float(v) for k, v in limits.items()})

    @property
    def bounds(self) -> BoundsTransform:
        if self.family is not Family.BETA:
            raise RuntimeError(f"{self.family.value} has no bounds")
        return BoundsTransform(self.limits["lower"], self.limits["upper"])


@dataclasses.dataclass(frozen=True)
class ParamDraw:
    """A batch of parameter vectors; values[name] has one entry per draw."""

    family: Family
    values: Mapping[str, Array]

    def __len__(self) -> int:
        return len(next(iter(self.values.values())))

    def __getitem__(self, name: str) -> Array:
        return self.values[name]

    def rows(self, start: int, stop: int) -> ParamDraw:
        """Parameter vectors start..stop-1."""
        return ParamDraw(
            self.family, {k: np.asarray(v)[start:stop] for k, v in self.values.items()}
        )


def _positive_uniform(rng: np.random.Generator, upper: float, size: int) -> Array:
    """Uniform(0, upper) draws with exact zeros resampled."""
    x = rng.uniform(0.0, upper, size)
    while True:
        zeros = x == 0.0
        if not zeros.any():
            return x
        x[zeros] = rng.uniform(0.0, upper, int(zeros.sum()))


def draw_params(
    spec: DistributionSpec,
    stats: SummaryStats,
    rng: np.random.Generator,
    size: int = 1,
) -> ParamDraw:
    """Draws `size` parameter vectors from the family's default-style priors.

    Normal and lognormal location priors span (min, max) when only the range
    is known and (q1, q3) when quartiles are available. For Beta, `stats` is
    not consulted.
    """
    family = spec.family
    limits = spec.limits
    values: dict[str, Array]
    match family:
        case Family.NORMAL:
            lo, hi = stats.location_bounds()
            values = {
                "mu": rng.uniform(lo, hi, size),
                "sigma": _positive_uniform(rng, limits["sigma_max"], size),
            }
        case Family.LOGNORMAL:
            if not required_positive(stats):
                raise NonPositiveSupport(
                    "lognormal prior needs strictly positive summary statistics,"
                    f" got {stats.present()}"
                )
            lo, hi = stats.location_bounds()
            values = {
                "mu": rng.uniform(math.log(lo), math.log(hi), size),
                "sigma": _positive_uniform(rng, limits["sigma_max"], size),
            }
        case Family.EXPONENTIAL:
            values = {"lam": _positive_uniform(rng, limits["lambda_max"], size)}
        case Family.WEIBULL:
            values = {
                "shape": _positive_uniform(rng, limits["shape_max"], size),
                "scale": _positive_uniform(rng, limits["scale_max"], size),
            }
        case Family.BETA:
            values = {
                "alpha": _positive_uniform(rng, limits["alpha_max"], size),
                "beta": _positive_uniform(rng, limits["beta_max"], size),
            }
    return ParamDraw(family, values)


def _column(theta: ParamDraw, name: str, *, positive: bool) -> Array:
    x = np.asarray(theta[name], dtype=np.float64).reshape(-1, 1)
    if positive and not (x > 0).all():
        raise InvalidParam(
            f'{theta.family.value} "{name}" must be positive, got {x.min()}'
        )
    return x


def sample_pseudo(
    family: Family, theta: ParamDraw, n: int, rng: np.random.Generator
) -> Array:
    """Pseudo-data: one row of n variates per parameter vector in theta."""
    if theta.family is not family:
        raise InvalidParam(
            f"parameters are for {theta.family.value}, not {family.value}"
        )
    if n < MIN_SAMPLE_SIZE:
        raise BadSampleSize(f"sample size must be at least {MIN_SAMPLE_SIZE}, got {n}")
    shape = (len(theta), n)
    match family:
        case Family.NORMAL | Family.LOGNORMAL:
            mu = _column(theta, "mu", positive=False)
            sigma = _column(theta, "sigma", positive=True)
            x = mu + sigma * rng.standard_normal(shape)
            return np.exp(x) if family is Family.LOGNORMAL else x
        case Family.EXPONENTIAL:
            lam = _column(theta, "lam", positive=True)
            # 1 - random() lies in (0, 1], so the log is finite.
            return -lam * np.log(1.0 - rng.random(shape))
        case Family.WEIBULL:
            k = _column(theta, "shape", positive=True)
            scale = _column(theta, "scale", positive=True)
            return scale * (-np.log(1.0 - rng.random(shape))) ** (1.0 / k)
        case Family.BETA:
            a = _column(theta, "alpha", positive=True)
            b = _column(theta, "beta", positive=True)
            x = rng.standard_gamma(np.broadcast_to(a, shape))
            y = rng.standard_gamma(np.broadcast_to(b, shape))
            total = x + y
            # Both gammas underflow to 0 only for shapes very close to 0.
            safe = np.where(total > 0, total, 1.0)
            return np.where(total > 0, x / safe, a / (a + b))
    raise InvalidParam(f"unknown family {family!r}")


def summary_of(sample: npt.ArrayLike) -> Array:
    """(min, q1, median, q3, max) along the last axis.

    Quartiles interpolate linearly between order statistics at plotting
    position h = (n - 1) * p + 1 (1-based), i.e. the "type 7" sample quantile.
    """
    x = np.sort(np.asarray(sample, dtype=np.float64), axis=-1)
    n = x.shape[-1]
    if n == 0:
        raise EmptySample("cannot summarize an empty sample")
    out = [x[..., 0]]
    for p in QUARTILES:
        h = (n - 1) * p
        j = math.floor(h)
        g = h - j
        lo = x[..., j]
        hi = x[..., min(j + 1, n - 1)]
        out.append(lo + g * (hi - lo))
    out.append(x[..., -1])
    return np.stack(out, axis=-1)


def moments_of(sample: npt.ArrayLike) -> tuple[Array, Array]:
    """Mean and sample SD (n - 1 denominator) along the last axis."""
    x = np.asarray(sample, dtype=np.float64)
    if x.shape[-1] < 2:
        raise TooFewPoints(f"need at least 2 points for an SD, got {x.shape[-1]}")
    return x.mean(axis=-1), x.std(axis=-1, ddof=1)
