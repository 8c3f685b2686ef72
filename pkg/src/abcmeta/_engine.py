from __future__ import annotations

import dataclasses
import functools
import heapq
import logging
import math
import os
from collections.abc import Callable, Iterable, Mapping
from typing import Any

import anyio
import numpy as np
import numpy.typing as npt

from ._distributions import (
    SELECTION_FAMILIES,
    DistributionSpec,
    Family,
    PriorLimits,
    draw_params,
    moments_of,
    sample_pseudo,
    summary_of,
)
from ._errors import InsufficientCandidates, InvalidConfig, NonPositiveSupport
from ._rescale import BoundsTransform, from_unit_moments, to_unit
from ._rng import DEFAULT_SEED, substream
from ._summary import SummaryStats, required_positive

logger = logging.getLogger("abcmeta")

# Upper bound on pseudo-data variates held per worker thread at once.
BLOCK_ELEMENTS = 1 << 22


@dataclasses.dataclass(frozen=True)
class AbcConfig:
    n_simul: int = 50_000
    # Percentage of simulations retained, e.g. 0.1 means the top 0.1%.
    acceptance_pct: float = 0.1
    seed: int = DEFAULT_SEED
    # Iterations per RNG substream. Part of the stream layout: changing it
    # changes results, unlike `threads`.
    chunk_size: int = 500
    # Worker threads; None means one per CPU.
    threads: int | None = None

    def __post_init__(self):
        if isinstance(self.n_simul, bool) or not isinstance(self.n_simul, int):
            raise InvalidConfig(f"n_simul must be an integer, got {self.n_simul!r}")
        if self.n_simul < 1:
            raise InvalidConfig(f"n_simul must be positive, got {self.n_simul}")
        if not 0 < self.acceptance_pct <= 100:
            raise InvalidConfig(
                f"acceptance_pct must be in (0, 100], got {self.acceptance_pct}"
            )
        if self.seed < 0:
            raise InvalidConfig(f"seed must be non-negative, got {self.seed}")
        if self.chunk_size < 1:
            raise InvalidConfig(f"chunk_size must be positive, got {self.chunk_size}")
        if self.threads is not None and self.threads < 1:
            raise InvalidConfig(f"threads must be positive, got {self.threads}")

    @property
    def retained(self) -> int:
        """K: number of simulations kept, rounded half up and at least 1."""
        k = math.floor(self.n_simul * self.acceptance_pct / 100 + 0.5)
        return min(max(k, 1), self.n_simul)

    def chunks(self) -> list[tuple[int, int, int]]:
        """(chunk index, first iteration, iteration count) for every chunk."""
        return [
            (i, start, min(self.chunk_size, self.n_simul - start))
            for i, start in enumerate(range(0, self.n_simul, self.chunk_size))
        ]


@dataclasses.dataclass(frozen=True)
class Candidate:
    """One simulation: its distance and the moments of its pseudo-data."""

    index: int
    distance: float
    pseudo_mean: float
    pseudo_sd: float
    family: Family


def rank_key(c: Candidate) -> tuple[float, int]:
    return (c.distance, c.index)


def pooled_rank_key(c: Candidate) -> tuple[float, int, int]:
    # Same order as concatenating the arms' iterations in family order.
    return (c.distance, c.family.rank, c.index)


@dataclasses.dataclass(frozen=True)
class AbcResult:
    est_mean: float
    est_sd: float
    retained: int
    family: Family
    # Only set by run_selection.
    selection_probability: float | None = None
    family_counts: Mapping[Family, int] | None = None
    n_simul: int = 0
    # Retained candidates in rank order.
    accepted: tuple[Candidate, ...] = ()

    def describe(self) -> str:
        s = f"[ABC Mean={self.est_mean:.3f}][ABC SD={self.est_sd:.3f}]"
        if self.selection_probability is not None:
            s += (
                f"[Distribution={self.family.label}]"
                f"[model prob={self.selection_probability:g}]"
            )
        return s


@dataclasses.dataclass(frozen=True)
class Progress:
    done: int
    total: int
    # Arm that just finished a chunk.
    family: Family | None = None

    @property
    def fraction(self) -> float:
        return self.done / self.total if self.total else 1.0


ProgressCallback = Callable[[Progress], None]


def distance(obs: SummaryStats, sim_summary: npt.ArrayLike) -> Any:
    """Euclidean distance over the statistics present in obs.

    sim_summary holds five-number summaries along its last axis; the result
    has the remaining shape (a scalar for a single summary). NaN becomes +inf.
    """
    sim = np.asarray(sim_summary, dtype=np.float64)
    mask = np.array(obs.scenario.mask)
    diff = sim[..., mask] - obs.vector()[mask]
    d = np.sqrt(np.sum(diff * diff, axis=-1))
    return np.where(np.isnan(d), np.inf, d)[()]


def top_k(
    candidates: Iterable[Candidate],
    k: int,
    *,
    key: Callable[[Candidate], Any] = rank_key,
) -> list[Candidate]:
    """The k smallest candidates by (distance, index), in ascending order."""
    if k < 1:
        raise InsufficientCandidates(f"k must be positive, got {k}")
    best = heapq.nsmallest(k, candidates, key=key)
    if len(best) < k:
        raise InsufficientCandidates(f"wanted {k} candidates, only got {len(best)}")
    return best


@dataclasses.dataclass(frozen=True)
class _Arm:
    spec: DistributionSpec
    # Observed statistics on the simulation scale (unit interval for Beta).
    obs: SummaryStats
    bounds: BoundsTransform | None = None

    @property
    def family(self) -> Family:
        return self.spec.family


def _simulate_chunk(
    arm: _Arm,
    seed: int,
    chunk: int,
    start: int,
    count: int,
    k: int,
    *,
    block_elements: int = BLOCK_ELEMENTS,
) -> list[Candidate]:
    """Runs one chunk and returns its k best candidates.

    Pseudo-samples are generated a block of rows at a time so that at most
    about block_elements variates are held at once. Parameters are drawn for
    the whole chunk first, then variates block by block from the same
    generator.
    """
    rng = substream(seed, arm.family.rank, chunk)
    theta = draw_params(arm.spec, arm.obs, rng, size=count)
    n = arm.obs.n
    step = max(1, block_elements // n)
    parts: list[tuple[Any, Any, Any]] = []
    # Extreme prior draws (e.g. Weibull shape near 0) overflow to inf; those
    # candidates end up with infinite distance.
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for lo in range(0, count, step):
            sample = sample_pseudo(arm.family, theta.rows(lo, lo + step), n, rng)
            parts.append((distance(arm.obs, summary_of(sample)), *moments_of(sample)))
        d, means, sds = (np.concatenate(p) for p in zip(*parts, strict=True))
        if arm.bounds is not None:
            means, sds = from_unit_moments(means, sds, arm.bounds)
    index = np.arange(start, start + count)
    keep = np.lexsort((index, d))[:k]
    return [
        Candidate(
            int(index[i]), float(d[i]), float(means[i]), float(sds[i]), arm.family
        )
        for i in keep
    ]


async def _simulate_arms(
    arms: list[_Arm],
    cfg: AbcConfig,
    *,
    progress: ProgressCallback | None,
    limiter: anyio.CapacityLimiter | None,
) -> list[list[Candidate]]:
    """Per arm, the chunk-local top-K candidates of every chunk."""
    if limiter is None:
        limiter = anyio.CapacityLimiter(cfg.threads or os.cpu_count() or 1)
    k = cfg.retained
    chunks = cfg.chunks()
    results: list[list[list[Candidate]]] = [[[] for _ in chunks] for _ in arms]
    total = cfg.n_simul * len(arms)
    done = 0

    async def run_chunk(a: int, chunk: int, start: int, count: int) -> None:
        nonlocal done
        fn = functools.partial(
            _simulate_chunk, arms[a], cfg.seed, chunk, start, count, k
        )
        results[a][chunk] = await anyio.to_thread.run_sync(fn, limiter=limiter)
        done += count
        logger.debug(f"{arms[a].family.value}: chunk {chunk} done ({done}/{total})")
        if progress is not None:
            progress(Progress(done, total, arms[a].family))

    async with anyio.create_task_group() as tg:
        for a in range(len(arms)):
            for chunk, start, count in chunks:
                tg.start_soon(run_chunk, a, chunk, start, count)

    return [[c for run in per_arm for c in run] for per_arm in results]


def _average(accepted: list[Candidate]) -> tuple[float, float]:
    # fsum is exactly rounded, so the estimate does not depend on summation order.
    k = len(accepted)
    return (
        math.fsum(c.pseudo_mean for c in accepted) / k,
        math.fsum(c.pseudo_sd for c in accepted) / k,
    )


def _make_arm(stats: SummaryStats, spec: DistributionSpec) -> _Arm:
    family = spec.family
    if family is Family.LOGNORMAL and not required_positive(stats):
        raise NonPositiveSupport(
            "lognormal needs strictly positive summary statistics, got"
            f" {stats.present()}; consider adding a constant with --shift"
        )
    if family.requires_positive and not required_positive(stats):
        logger.warning(
            f"{family.value} has positive support but summary statistics include"
            f" non-positive values {stats.present()}"
        )
    if family is Family.BETA:
        bounds = spec.bounds
        return _Arm(spec, to_unit(stats, bounds), bounds)
    return _Arm(spec, stats)


async def run_abc_async(
    stats: SummaryStats,
    spec: DistributionSpec,
    cfg: AbcConfig | None = None,
    *,
    progress: ProgressCallback | None = None,
    limiter: anyio.CapacityLimiter | None = None,
) -> AbcResult:
    """Rejection ABC with a single candidate family.

    Cancelling the enclosing anyio scope stops the run at the next chunk
    boundary.
    """
    cfg = cfg or AbcConfig()
    arm = _make_arm(stats, spec)
    k = cfg.retained
    logger.debug(
        f"run_abc: {spec.family.value}, scenario {stats.scenario.value},"
        f" n={stats.n}, {cfg.n_simul} simulations, K={k}"
    )
    (pool,) = await _simulate_arms([arm], cfg, progress=progress, limiter=limiter)
    accepted = top_k(pool, k)
    est_mean, est_sd = _average(accepted)
    return AbcResult(
        est_mean=est_mean,
        est_sd=est_sd,
        retained=k,
        family=spec.family,
        n_simul=cfg.n_simul,
        accepted=tuple(accepted),
    )


async def run_selection_async(
    stats: SummaryStats,
    cfg: AbcConfig | None = None,
    limits: Mapping[Family, PriorLimits] | None = None,
    *,
    progress: ProgressCallback | None = None,
    limiter: anyio.CapacityLimiter | None = None,
) -> AbcResult:
    """Distribution selection over normal, lognormal, exponential and Weibull.

    The family owning most of the pooled top K wins; its estimate comes from
    its own top K.
    """
    cfg = cfg or AbcConfig()
    limits = limits or {}
    if not required_positive(stats):
        raise NonPositiveSupport(
            "distribution selection needs strictly positive summary statistics,"
            f" got {stats.present()}; add a constant to all values (--shift) and"
            " subtract it from the estimated mean afterwards"
        )
    unknown = set(limits) - set(SELECTION_FAMILIES)
    if unknown:
        raise InvalidConfig(
            f"selection does not use {sorted(f.value for f in unknown)}"
        )
    arms = [
        _make_arm(stats, DistributionSpec.create(f, **limits.get(f, {})))
        for f in SELECTION_FAMILIES
    ]
    k = cfg.retained
    logger.debug(
        f"run_selection: scenario {stats.scenario.value}, n={stats.n},"
        f" {cfg.n_simul} simulations per arm, K={k}"
    )
    pools = await _simulate_arms(arms, cfg, progress=progress, limiter=limiter)

    pooled = top_k((c for pool in pools for c in pool), k, key=pooled_rank_key)
    counts = {f: 0 for f in SELECTION_FAMILIES}
    for c in pooled:
        counts[c.family] += 1
    # max() keeps the first maximum, so ties go to the earlier family.
    winner = max(SELECTION_FAMILIES, key=lambda f: counts[f])
    accepted = top_k(pools[SELECTION_FAMILIES.index(winner)], k)
    est_mean, est_sd = _average(accepted)
    logger.debug(f"run_selection: counts {counts}, selected {winner.value}")
    return AbcResult(
        est_mean=est_mean,
        est_sd=est_sd,
        retained=k,
        family=winner,
        selection_probability=counts[winner] / k,
        family_counts=counts,
        n_simul=cfg.n_simul,
        accepted=tuple(accepted),
    )


def run_abc(
    stats: SummaryStats,
    spec: DistributionSpec,
    cfg: AbcConfig | None = None,
    *,
    progress: ProgressCallback | None = None,
) -> AbcResult:
    return anyio.run(
        functools.partial(run_abc_async, stats, spec, cfg, progress=progress)
    )


def run_selection(
    stats: SummaryStats,
    cfg: AbcConfig | None = None,
    limits: Mapping[Family, PriorLimits] | None = None,
    *,
    progress: ProgressCallback | None = None,
) -> AbcResult:
    return anyio.run(
        functools.partial(run_selection_async, stats, cfg, limits, progress=progress)
    )
