import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mimocov.analytic import coverage_baseline, coverage_dl, rate_baseline, rate_dl
from mimocov.errors import InvalidParameterError, WindowTooSmallError
from mimocov.monte_carlo import (
    coverage_from_samples,
    laplace_estimate,
    monotone_within,
    reproduce_table1,
    run_convergence_study,
    run_coverage,
    sample_stream,
    simulate_sirs,
    wilson_interval,
)
from mimocov.network_sim import MODES, SimConfig
from mimocov.special_functions import eta


def test_wilson_known_values():
    lo, hi = wilson_interval(5, 10)
    assert lo == pytest.approx(0.2366, abs=1e-4) and hi == pytest.approx(0.7634, abs=1e-4)
    lo, hi = wilson_interval(0, 20)
    assert lo == 0 and hi == pytest.approx(0.1611, abs=1e-4)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(1, 10**6), frac=st.floats(0, 1))
def test_wilson_brackets_estimate(n, frac):
    k = round(frac * n)
    lo, hi = wilson_interval(k, n)
    assert 0 <= lo <= k / n + 1e-12 and k / n - 1e-12 <= hi <= 1


def test_coverage_from_samples_strict_inequality():
    p, lo, hi = coverage_from_samples([1.0, 2.0, 3.0, 4.0], [0.5, 2.0, 4.0])
    np.testing.assert_array_equal(p, [1.0, 0.5, 0.0])


def test_dl_point_at_one_within_interval(dl_campaign, grid_20):
    sirs = dl_campaign.samples
    p, lo, hi = coverage_from_samples(sirs, [1.0])
    assert lo[0] <= 0.9003163 <= hi[0]
    assert np.all(np.diff(dl_campaign.results.probabilities) <= 0)
    assert dl_campaign.valid and dl_campaign.rejection_rate < 1e-3
    assert dl_campaign.results.source == "monte_carlo"


def test_baseline_point_at_one_within_interval():
    c = run_coverage(SimConfig(mode="baseline_single_antenna", n_samples=20_000, seed=3), [1.0])
    assert c.ci_low[0] <= coverage_baseline(1.0, 4.0) <= c.ci_high[0]
    assert coverage_baseline(1.0, 4.0) == pytest.approx(0.560, abs=1e-3)


def test_single_sample_is_degenerate():
    c = run_coverage(SimConfig(n_samples=1, seed=2), [0.1, 1.0, 10.0])
    assert set(c.results.probabilities) <= {0.0, 1.0}
    # Wilson interval for 0/1 or 1/1 at 95 %: width 0.79, half-width 0.40.
    np.testing.assert_allclose(c.results.half_widths, 0.3963, atol=1e-3)


@pytest.mark.parametrize("mode", MODES)
def test_every_mode_gives_monotone_curve(mode):
    c = run_coverage(SimConfig(mode=mode, n_samples=300, seed=4, K=2, M=8),
                     np.logspace(-1, 3, 15))
    assert np.all(np.diff(c.results.probabilities) <= 0)
    assert c.results.mode == mode


def test_grid_must_increase():
    for grid in ([1.0, 1.0], [2.0, 1.0], []):
        with pytest.raises(InvalidParameterError):
            run_coverage(SimConfig(n_samples=2), grid)


def test_parallel_identical_to_serial():
    cfg = SimConfig(mode="power_constrained_dl", n_samples=400, seed=21)
    a, ra = simulate_sirs(cfg, workers=1)
    b, rb = simulate_sirs(cfg, workers=3)
    assert a.tobytes() == b.tobytes() and ra == rb


def test_streams_depend_on_index_only():
    a = sample_stream(5, 17).random(4)
    np.testing.assert_array_equal(a, sample_stream(5, 17).random(4))
    assert not np.array_equal(a, sample_stream(5, 18).random(4))


def test_small_window_flags_invalid_campaign():
    c = run_coverage(SimConfig(n_samples=200, window_radius=250.0, seed=1), [1.0])
    assert c.rejected_count > 0 and not c.valid
    with pytest.raises(WindowTooSmallError) as info:
        c.raise_if_invalid()
    assert info.value.rejected == c.rejected_count


def test_laplace_transform_quick():
    cfg = SimConfig(n_samples=20_000, seed=8)
    z = np.array([0.5, 1.0, 2.0])
    mean, se = laplace_estimate(cfg, z)
    ref = 1 / eta(z, 4.0).real
    assert np.all(np.abs(mean - ref) < 3 * se)


def test_convergence_repeated_m_is_consistent():
    cfg = SimConfig(K=2, seed=3)
    rows = run_convergence_study(cfg, [64, 64], n_realizations=200, n_draws=20)
    assert rows[0].median_rel_gap == pytest.approx(rows[1].median_rel_gap, rel=0.1)
    assert all(r.p90_rel_gap >= r.median_rel_gap for r in rows)


def test_convergence_more_pilots_larger_gap():
    k1 = run_convergence_study(SimConfig(K=1, seed=4), [64], 200, 20)[0]
    k4 = run_convergence_study(SimConfig(K=4, seed=4), [64], 200, 20)[0]
    assert k4.median_rel_gap >= 0.9 * k1.median_rel_gap


def test_convergence_parallel_identical():
    cfg = SimConfig(K=2, seed=5)
    a = run_convergence_study(cfg, [16, 64], 40, 10, workers=1)
    b = run_convergence_study(cfg, [16, 64], 40, 10, workers=2)
    assert a == b


def test_convergence_rejects_bad_m_list():
    with pytest.raises(InvalidParameterError):
        run_convergence_study(SimConfig(), [64, 16], 2, 2)
    with pytest.raises(InvalidParameterError):
        run_convergence_study(SimConfig(), [0], 2, 2)


def test_monotone_within():
    assert monotone_within([1.0, 0.5, 0.52, 0.3])
    assert not monotone_within([1.0, 0.5, 0.6])


def test_table1_structure():
    t = reproduce_table1()
    assert t.k_opt == 8
    assert t.sum_rate_per_cell == 4 * t.rate_per_user
    assert t.sum_rate_per_cell_nats == pytest.approx(4 * t.rate_per_user_nats, rel=1e-15)
    assert t.rate_per_user == rate_dl(4.0).rate_per_user
    assert t.baseline_rate == rate_baseline(4.0).rate_per_user
    # One user per cell in the baseline: its cell sum rate is its per-user rate.
    assert t.baseline_rate == pytest.approx(2.15, abs=0.05)
    assert t.rate_per_user_nats == pytest.approx(3.79, abs=0.05)
    assert t.sum_rate_per_cell_nats == pytest.approx(15.16, abs=0.2)
    assert t.rate_per_user == pytest.approx(t.rate_per_user_nats / math.log(2), rel=1e-15)


def test_mc_campaign_point_agrees_with_analytic_alpha3():
    c = run_coverage(SimConfig(alpha=3.0, n_samples=20_000, seed=9), [0.5, 2.0, 10.0])
    ref = [coverage_dl(t, 3.0) for t in c.threshold_grid]
    assert np.all((c.ci_low <= ref) & (ref <= c.ci_high))
