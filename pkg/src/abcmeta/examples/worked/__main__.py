#!/usr/bin/env python3

import logging
import sys

import abcmeta
import anyio


async def main(iters: int = 50_000) -> list[abcmeta.AbcResult]:
    """Runs four published worked examples and prints one line per study."""
    cfg = abcmeta.AbcConfig(n_simul=iters)
    results = []

    # Normal outcome reported as quartiles.
    stats = abcmeta.parse_summary(500, q1=-1.4, median=-0.2, q3=0.95)
    spec = abcmeta.DistributionSpec.create(abcmeta.Family.NORMAL)
    results.append(await abcmeta.run_abc_async(stats, spec, cfg))

    # Bounded score on [0, 100] reported as a range.
    stats = abcmeta.parse_summary(500, min=2.7, median=72.5, max=99.9)
    spec = abcmeta.DistributionSpec.create(abcmeta.Family.BETA, lower=0, upper=100)
    results.append(await abcmeta.run_abc_async(stats, spec, cfg))

    # Skewed positive outcome, family unknown.
    stats = abcmeta.parse_summary(500, min=0.82, median=4.44, max=22.15)
    results.append(await abcmeta.run_selection_async(stats, cfg))

    # Skewed outcome with negative values: shift, select, shift back.
    stats = abcmeta.parse_summary(500, min=-9.65, median=-5.59, max=39.25)
    shifted = abcmeta.apply_shift(stats, 10)
    result = await abcmeta.run_selection_async(shifted, cfg)
    results.append(abcmeta.unshift_result(result, 10))

    for result in results:
        print(result.describe())
    return results


if __name__ == "__main__":
    logging.basicConfig(stream=sys.stdout, level=logging.DEBUG)
    anyio.run(main)
