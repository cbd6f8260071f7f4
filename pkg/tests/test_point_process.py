import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from mimocov.errors import EmptyPatternError, InvalidParameterError
from mimocov.point_process import (
    ORIGIN,
    Point,
    PointPattern,
    default_window_radius,
    nearest_point,
    path_gain,
    sample_ppp,
)


def test_counts_are_poisson():
    rng = np.random.default_rng(1)
    lam, R = 1e-4, 300.0
    mean = lam * math.pi * R**2
    counts = np.array([len(sample_ppp(lam, R, rng)) for _ in range(4000)])
    se = math.sqrt(mean / len(counts))
    assert abs(counts.mean() - mean) < 4 * se
    # Variance of a Poisson count equals its mean; sample variance sd ~ mean*sqrt(2/n).
    assert abs(counts.var(ddof=1) - mean) < 4 * mean * math.sqrt(2 / len(counts))


def test_points_uniform_in_disk():
    rng = np.random.default_rng(2)
    p = sample_ppp(1e-3, 200.0, rng)
    r = p.distances()
    assert np.all(r <= 200.0)
    # Radial CDF of a uniform disk point is (r/R)^2.
    assert stats.kstest((r / 200.0) ** 2, "uniform").pvalue > 0.01
    theta = np.arctan2(p.points[:, 1], p.points[:, 0])
    assert stats.kstest((theta + np.pi) / (2 * np.pi), "uniform").pvalue > 0.01


def test_nearest_distance_is_rayleigh():
    rng = np.random.default_rng(3)
    lam, R = 1e-5, 1500.0
    d = np.array([nearest_point(ORIGIN, sample_ppp(lam, R, rng))[1] for _ in range(10_000)])
    cdf = lambda r: 1 - np.exp(-lam * np.pi * r**2)  # noqa: E731
    assert stats.kstest(d, cdf).pvalue > 0.01


def test_nearest_point_ties_and_empty():
    p = PointPattern(np.array([[3.0, 0.0], [0.0, 1.0], [-1.0, 0.0]]), 5.0, 1.0)
    assert nearest_point(ORIGIN, p) == (1, 1.0)
    assert nearest_point(Point(3.0, 1.0), p) == (0, 1.0)
    empty = PointPattern(np.empty((0, 2)), 5.0, 1.0)
    with pytest.raises(EmptyPatternError):
        nearest_point(ORIGIN, empty)


def test_path_gain_values():
    assert path_gain(2.0, 4.0) == 0.0625
    assert path_gain(1.0, 4.0) == 1.0
    assert path_gain(0.3, 4.0) == 1.0
    assert path_gain(0.3, 4.0, delta=0.5) == 0.5**-4
    np.testing.assert_array_equal(path_gain(np.array([1.0, 2.0, 4.0]), 3.0), [1, 1 / 8, 1 / 64])
    assert isinstance(path_gain(3.0, 4.0), float)


@pytest.mark.parametrize("kwargs", [dict(alpha=2.0), dict(alpha=1.5), dict(alpha=4.0, delta=0.0)])
def test_path_gain_rejects(kwargs):
    with pytest.raises(InvalidParameterError):
        path_gain(1.0, **kwargs)


def test_negative_distance_rejected():
    with pytest.raises(InvalidParameterError):
        path_gain(-1.0, 4.0)


@settings(max_examples=100, deadline=None)
@given(d1=st.floats(1.0, 1e4), d2=st.floats(1.0, 1e4), alpha=st.floats(2.01, 8.0))
def test_path_gain_monotone(d1, d2, alpha):
    lo, hi = sorted((d1, d2))
    assert path_gain(lo, alpha) >= path_gain(hi, alpha) > 0


def test_sampling_rejects_bad_parameters():
    rng = np.random.default_rng(0)
    with pytest.raises(InvalidParameterError):
        sample_ppp(0.0, 10.0, rng)
    with pytest.raises(InvalidParameterError):
        sample_ppp(1.0, -1.0, rng)


def test_pattern_validation():
    with pytest.raises(InvalidParameterError):
        PointPattern(np.array([[np.inf, 0.0]]), 1.0, 1.0)
    with pytest.raises(InvalidParameterError):
        PointPattern(np.zeros((0, 2)), 0.0, 1.0)


def test_same_seed_same_pattern():
    a = sample_ppp(1e-5, 1000.0, np.random.default_rng(9))
    b = sample_ppp(1e-5, 1000.0, np.random.default_rng(9))
    np.testing.assert_array_equal(a.points, b.points)


def test_window_truncation_rule():
    lam = 1e-5
    R = default_window_radius(lam, 8.0, 1e-6)
    d = 0.5 / math.sqrt(lam)
    tail = 2 * math.pi * lam * R ** (2 - 8.0) / 6.0
    assert tail == pytest.approx(1e-6 * d**-8.0, rel=1e-12)
    # Radius scales like density**-1/2, keeping the expected point count fixed.
    assert default_window_radius(4 * lam, 8.0) == pytest.approx(R / 2, rel=1e-12)
    with pytest.raises(InvalidParameterError):
        default_window_radius(lam, 2.0)
