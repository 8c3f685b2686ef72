#!/usr/bin/env python3

import sys

import abcmeta
import numpy as np
import pytest
from abcmeta import BoundsTransform


def test_bounds_transform():
    assert BoundsTransform(0, 100).width == 100
    with pytest.raises(abcmeta.InvalidPrior):
        BoundsTransform(1, 1)
    with pytest.raises(abcmeta.InvalidPrior):
        BoundsTransform(2, 1)
    with pytest.raises(abcmeta.InvalidPrior):
        BoundsTransform(0, float("inf"))


def test_to_unit():
    stats = abcmeta.parse_summary(500, min=2.7, median=72.5, max=99.9)
    unit = abcmeta.to_unit(stats, BoundsTransform(0, 100))
    assert unit.present() == pytest.approx([0.027, 0.725, 0.999], rel=1e-12)
    assert unit.n == 500
    assert unit.scenario is stats.scenario


def test_to_unit_endpoints():
    stats = abcmeta.parse_summary(10, min=-5, median=0, max=15)
    unit = abcmeta.to_unit(stats, BoundsTransform(-5, 15))
    assert unit.present() == [0.0, 0.25, 1.0]


def test_to_unit_out_of_bounds():
    stats = abcmeta.parse_summary(10, min=2, median=50, max=101)
    with pytest.raises(abcmeta.OutOfBounds):
        abcmeta.to_unit(stats, BoundsTransform(0, 100))


def test_from_unit_moments():
    t = BoundsTransform(0, 100)
    assert abcmeta.from_unit_moments(0.5, 0.1, t) == pytest.approx((50, 10))
    assert abcmeta.from_unit_moments(0.0, 0.0, t) == (0.0, 0.0)

    t = BoundsTransform(-2, 3)
    means = np.array([0.0, 0.25, 1.0])
    sds = np.array([0.0, 0.1, 0.5])
    m, s = abcmeta.from_unit_moments(means, sds, t)
    np.testing.assert_allclose(m, [-2.0, -0.75, 3.0])
    np.testing.assert_allclose(s, [0.0, 0.5, 2.5])


def test_unit_round_trip():
    rng = np.random.default_rng(7)
    t = BoundsTransform(-3.5, 12.25)
    x = rng.uniform(t.lower, t.upper, 1000)
    u = (x - t.lower) / t.width
    mean, sd = abcmeta.moments_of(x)
    mean_u, sd_u = abcmeta.moments_of(u)
    back_mean, back_sd = abcmeta.from_unit_moments(mean_u, sd_u, t)
    assert back_mean == pytest.approx(mean, rel=1e-12)
    assert back_sd == pytest.approx(sd, rel=1e-12)


def test_apply_shift():
    stats = abcmeta.parse_summary(500, min=-9.65, median=-5.59, max=39.25)
    shifted = abcmeta.apply_shift(stats, 10)
    assert shifted.present() == pytest.approx([0.35, 4.41, 49.25])
    assert shifted.scenario is stats.scenario
    assert shifted.n == stats.n
    assert abcmeta.required_positive(shifted)

    with pytest.raises(abcmeta.ShiftInsufficient):
        abcmeta.apply_shift(stats, 9)

    positive = abcmeta.parse_summary(500, min=0.82, median=4.44, max=22.15)
    assert abcmeta.apply_shift(positive, 0) is positive


def test_auto_shift():
    stats = abcmeta.parse_summary(500, min=-9.65, median=-5.59, max=39.25)
    assert abcmeta.auto_shift(stats) == 10
    stats = abcmeta.parse_summary(500, q1=-1.4, median=-0.2, q3=0.95)
    assert abcmeta.auto_shift(stats) == 2
    stats = abcmeta.parse_summary(10, min=0, median=0, max=0)
    assert abcmeta.auto_shift(stats) == 1
    stats = abcmeta.parse_summary(500, min=0.82, median=4.44, max=22.15)
    assert abcmeta.auto_shift(stats) == 0


def _result(mean: float, sd: float) -> abcmeta.AbcResult:
    accepted = (
        abcmeta.Candidate(3, 0.5, mean - 1, sd, abcmeta.Family.EXPONENTIAL),
        abcmeta.Candidate(1, 0.7, mean + 1, sd, abcmeta.Family.EXPONENTIAL),
    )
    return abcmeta.AbcResult(
        est_mean=mean,
        est_sd=sd,
        retained=2,
        family=abcmeta.Family.EXPONENTIAL,
        selection_probability=0.5,
        n_simul=100,
        accepted=accepted,
    )


def test_unshift_result():
    result = _result(6.67, 6.84)
    out = abcmeta.unshift_result(result, 10)
    assert out.est_mean == pytest.approx(-3.33)
    assert out.est_sd == result.est_sd
    assert out.family is result.family
    assert out.selection_probability == result.selection_probability
    assert [c.pseudo_mean for c in out.accepted] == pytest.approx([-4.33, -2.33])

    assert abcmeta.unshift_result(result, 0) is result
    back = abcmeta.unshift_result(out, -10)
    assert back.est_mean == pytest.approx(result.est_mean, abs=1e-12)


def test_shift_inverse():
    stats = abcmeta.parse_summary(20, min=1, q1=2, median=3, q3=4, max=5)
    there = abcmeta.apply_shift(stats, 2.5)
    back = abcmeta.apply_shift(there, -2.5)
    assert back.present() == pytest.approx(stats.present(), abs=1e-12)


if __name__ == "__main__":
    pytest.main(sys.argv)
