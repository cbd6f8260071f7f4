"""Acceptance criteria, at the stated tolerances. Each test records a PASS/FAIL line."""

import math
import time

import numpy as np
import pytest
from conftest import record_acceptance

from mimocov import cli
from mimocov.analytic import coverage_dl, coverage_dl_closed
from mimocov.monte_carlo import reproduce_table1, run_convergence_study, run_coverage
from mimocov.network_sim import SimConfig
from mimocov.special_functions import eta, lower_incomplete_gamma

from test_special_functions import segment_quadrature


def covered(campaign, reference):
    return int(np.sum((campaign.ci_low <= reference) & (reference <= campaign.ci_high)))


def check(criterion, ok, detail):
    record_acceptance(criterion, ok, detail)
    assert ok, detail


def test_1_integral_matches_closed_form():
    t0 = time.perf_counter()
    worst = 0.0
    for alpha in (3.0, 4.0, 6.0):
        for T in np.logspace(0, 3, 30):
            worst = max(worst, abs(coverage_dl(T, alpha) - coverage_dl_closed(T, alpha)))
    dt = time.perf_counter() - t0
    check(1, worst < 1e-4 and dt < 60, f"max |integral - closed| = {worst:.2e}, {dt:.1f} s")


@pytest.fixture(scope="module")
def table1():
    t0 = time.perf_counter()
    t = reproduce_table1(SimConfig(alpha=4.0, L=16))
    return t, time.perf_counter() - t0


def test_2a_rate_per_user(table1):
    t, dt = table1
    ok = abs(t.rate_per_user - 3.79) <= 0.05 and dt < 300
    check("2 (rate/user)", ok, f"{t.rate_per_user:.4f} bps/Hz ({t.rate_per_user_nats:.4f} nats), "
                               f"target 3.79 +- 0.05 bps/Hz, {dt:.1f} s")


def test_2b_baseline_rate(table1):
    t, dt = table1
    ok = abs(t.baseline_rate - 2.15) <= 0.05 and dt < 300
    check("2 (baseline)", ok, f"{t.baseline_rate:.4f} bps/Hz, target 2.15 +- 0.05")


def test_2c_sum_rate(table1):
    t, dt = table1
    ok = abs(t.sum_rate_per_cell - 15.16) <= 0.20 and t.k_opt == 8 and dt < 300
    check("2 (sum rate)", ok, f"{t.sum_rate_per_cell:.4f} bps/Hz ({t.sum_rate_per_cell_nats:.4f} nats) "
                              f"at K = {t.k_opt}, target 15.16 +- 0.20 bps/Hz")


@pytest.fixture(scope="module")
def analytic_grid(grid_20):
    return np.array([coverage_dl(T, 4.0) for T in grid_20])


def test_3_monte_carlo_vs_analytic(dl_campaign, analytic_grid):
    n = covered(dl_campaign, analytic_grid)
    ok = n >= 18 and dl_campaign.valid and dl_campaign.wall_time < 300
    check(3, ok, f"{n}/20 grid points inside Wilson 95 % intervals, "
                 f"{dl_campaign.rejected_count} rejected, {dl_campaign.wall_time:.1f} s")


def test_4_uplink_duality(ul_campaign, analytic_grid):
    n = covered(ul_campaign, analytic_grid)
    check(4, n >= 18 and ul_campaign.valid, f"uplink: {n}/20 grid points inside Wilson 95 % intervals")


def test_5_power_constraint_ordering(grid_20, analytic_grid):
    cfg = SimConfig(mode="power_constrained_dl", alpha=4.0, n_samples=100_000, seed=3)
    c = run_coverage(cfg, grid_20)
    p = c.results.probabilities
    sigma = np.sqrt(np.maximum(p * (1 - p), 1e-300) / cfg.n_samples)
    ok_points = p <= analytic_grid + 3 * sigma
    gap = np.max(p - analytic_grid)
    check(5, bool(ok_points.all()) and c.valid,
          f"{int(ok_points.sum())}/20 points at or below the unconstrained curve (3 sigma); "
          f"largest excess {gap:+.4f}")


def test_6_finite_m_convergence():
    t0 = time.perf_counter()
    m_list = [16, 64, 256, 1024]
    rows = run_convergence_study(SimConfig(alpha=4.0, K=4, seed=0), m_list, 1000, 100)
    dt = time.perf_counter() - t0
    med = [r.median_rel_gap for r in rows]
    ok = all(b < a for a, b in zip(med, med[1:])) and dt < 600
    check(6, ok, "median gaps " + ", ".join(f"M={m}: {g:.4f}" for m, g in zip(m_list, med)) + f", {dt:.0f} s")


def test_7_special_functions():
    re = np.linspace(0, 30, 31)
    im = np.linspace(-30, 30, 41)
    z = (re[:, None] + 1j * im[None, :]).ravel()
    ident = float(np.max(np.abs(lower_incomplete_gamma(1.0, z) - (1 - np.exp(-z)))))

    resid = 0.0
    rays = np.array([m * np.exp(1j * t) for m in np.logspace(-3, 3, 61) for t in (0, np.pi / 4, np.pi / 2)])
    for a in (0.6, 0.75, 0.9):
        g = lower_incomplete_gamma(a, rays)
        r = np.abs(lower_incomplete_gamma(a + 1, rays) - a * g + np.exp(a * np.log(rays) - rays))
        resid = max(resid, float(np.max(r / (1 + np.abs(g)))))

    quad = max(abs(lower_incomplete_gamma(0.75, z) - segment_quadrature(0.75, z))
               for z in (10j, 2j, 0.5j, -7j))
    eta0 = eta(0.0, 4.0) == 1.0
    ok = ident < 1e-12 and resid < 1e-10 and quad < 1e-8 and eta0
    check(7, ok, f"identity {ident:.1e}, recurrence {resid:.1e}, contour quadrature {quad:.1e}, "
                 f"eta(0) == 1: {eta0}")


def test_8_laplace_consistency(dl_campaign):
    f = 1.0 / dl_campaign.samples
    worst = 0.0
    for z in (0.5, 1.0, 2.0):
        v = np.exp(-z * f)
        se = v.std(ddof=1) / math.sqrt(len(v))
        worst = max(worst, abs(v.mean() - 1 / eta(z, 4.0).real) / se)
    check(8, worst < 3, f"largest deviation {worst:.2f} standard errors")


def test_9_density_invariance(dl_campaign, grid_20):
    dense = run_coverage(SimConfig(lambda_b=4e-5, alpha=4.0, n_samples=100_000, seed=2), grid_20)
    overlap = (dl_campaign.ci_low <= dense.ci_high) & (dense.ci_low <= dl_campaign.ci_high)
    n = int(overlap.sum())
    check(9, n >= 18 and dense.valid,
          f"{n}/20 overlapping intervals (windows {dl_campaign.cfg.radius:.0f} m, {dense.cfg.radius:.0f} m)")


def test_10_determinism(tmp_path):
    outs = []
    for workers in (1, 4):
        out = tmp_path / f"w{workers}.csv"
        cli.main(["simulate", "--mode", "power_constrained_dl", "--samples", "20000", "--seed", "7",
                  "--workers", str(workers), "--out", str(out)])
        outs.append(out.read_bytes())
    check(10, outs[0] == outs[1], f"1 worker vs 4 workers: {'byte-identical' if outs[0] == outs[1] else 'DIFFERENT'}")
