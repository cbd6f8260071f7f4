"""Monte Carlo campaigns: coverage curves, convergence in M, Table-1 numbers.

Every sample ``i`` draws from its own stream ``SeedSequence(seed,
spawn_key=(i,))``, so results do not depend on how samples are split over
workers. Workers return their slice in index order and the slices are
concatenated before any reduction.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from . import analytic
from .analytic import CoverageCurve
from .errors import InfiniteSirError, InvalidParameterError, WindowTooSmallError
from .network_sim import (
    SimConfig,
    build_realization,
    sample_sir_finite_dl,
    sir_asymptotic_dl,
    sir_asymptotic_ul,
    sir_baseline_single_antenna,
    sir_power_constrained_dl,
)

MAX_REJECTION_RATE = 1e-3
WILSON_Z = float(stats.norm.ppf(0.975))


def sample_stream(seed, *key):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def draw_sir(cfg, rng):
    """One SIR sample for ``cfg.mode``; returns ``(sir, rejected_draws)``."""
    rejected = 0
    while True:
        real = build_realization(cfg, rng)
        rejected += real.resampled
        try:
            if cfg.mode == "asymptotic_dl":
                return sir_asymptotic_dl(real), rejected
            if cfg.mode == "uplink":
                return sir_asymptotic_ul(real), rejected
            if cfg.mode == "power_constrained_dl":
                return sir_power_constrained_dl(real), rejected
            if cfg.mode == "baseline_single_antenna":
                return sir_baseline_single_antenna(real, rng), rejected
            return float(sample_sir_finite_dl(real, cfg.M, rng)[0]), rejected
        except InfiniteSirError:
            rejected += 1


def _sample_range(args):
    cfg, start, stop = args
    out = np.empty(stop - start)
    rejected = 0
    for j, i in enumerate(range(start, stop)):
        out[j], r = draw_sir(cfg, sample_stream(cfg.seed, i))
        rejected += r
    return out, rejected


def _chunks(n, workers):
    size = max(1, math.ceil(n / (4 * workers)))
    return [(s, min(s + size, n)) for s in range(0, n, size)]


def simulate_sirs(cfg, n=None, workers=1):
    """SIR samples ``0 .. n-1`` of ``cfg`` (default ``cfg.n_samples``) and the rejection count."""
    cfg = cfg.resolved()
    n = cfg.n_samples if n is None else n
    if workers <= 1:
        return _sample_range((cfg, 0, n))
    jobs = [(cfg, a, b) for a, b in _chunks(n, workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_sample_range, jobs))
    return np.concatenate([p[0] for p in parts]), sum(p[1] for p in parts)


def wilson_interval(successes, n, z=WILSON_Z):
    """Score interval for a binomial proportion; vectorised over ``successes``."""
    k = np.asarray(successes, dtype=float)
    p = k / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return np.clip(centre - half, 0, 1), np.clip(centre + half, 0, 1)


@dataclass
class Campaign:
    cfg: SimConfig
    threshold_grid: np.ndarray
    results: CoverageCurve
    ci_low: np.ndarray
    ci_high: np.ndarray
    rejected_count: int
    wall_time: float
    samples: np.ndarray = field(repr=False, default=None)

    @property
    def rejection_rate(self):
        return self.rejected_count / self.cfg.n_samples

    @property
    def valid(self):
        return self.rejection_rate < MAX_REJECTION_RATE

    def raise_if_invalid(self):
        if not self.valid:
            raise WindowTooSmallError(
                f"{self.rejected_count} of {self.cfg.n_samples} samples rejected; "
                f"enlarge the window (radius {self.cfg.radius:.1f} m)",
                self.rejected_count, self.cfg.n_samples,
            )


def coverage_from_samples(sirs, grid):
    """Fraction of samples strictly above each threshold, plus Wilson bounds."""
    sirs = np.sort(np.asarray(sirs))
    n = len(sirs)
    above = n - np.searchsorted(sirs, grid, side="right")
    lo, hi = wilson_interval(above, n)
    return above / n, lo, hi


def run_coverage(cfg, grid, workers=1, keep_samples=False):
    """Coverage curve of ``cfg.mode`` on ``grid`` (linear thresholds).

    One sample set serves every threshold, so the curve is exactly
    non-increasing. The campaign is flagged invalid, not raised, when the
    rejection rate reaches 0.1 %.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0 or np.any(np.diff(grid) <= 0):
        raise InvalidParameterError("threshold grid must be non-empty and strictly increasing")
    cfg = cfg.resolved()
    t0 = time.perf_counter()
    sirs, rejected = simulate_sirs(cfg, workers=workers)
    p, lo, hi = coverage_from_samples(sirs, grid)
    curve = CoverageCurve(grid, p, 0.5 * (hi - lo), "monte_carlo", cfg.mode)
    return Campaign(cfg, grid, curve, lo, hi, rejected, time.perf_counter() - t0,
                    sirs if keep_samples else None)


@dataclass(frozen=True)
class ConvergenceRow:
    M: int
    median_rel_gap: float
    p90_rel_gap: float


def _convergence_range(args):
    cfg, m_list, n_draws, start, stop = args
    gaps = np.empty((len(m_list), stop - start, n_draws))
    rejected = 0
    for j, r in enumerate(range(start, stop)):
        rng = sample_stream(cfg.seed, r)
        while True:
            real = build_realization(cfg, rng)
            rejected += real.resampled
            try:
                limit = sir_asymptotic_dl(real)
                break
            except InfiniteSirError:
                rejected += 1
        for mi, M in enumerate(m_list):
            fading = sample_stream(cfg.seed, r, 1, mi)
            sir = sample_sir_finite_dl(real, M, fading, n_draws)
            gaps[mi, j] = np.abs(sir / limit - 1.0)
    return gaps, rejected


def run_convergence_study(cfg, m_list, n_realizations=1000, n_draws=100, workers=1):
    """Median and 90th percentile of ``|SIR_M / SIR_inf - 1|`` for each ``M``.

    Realizations are shared across ``m_list``; fading is fresh for every
    ``(realization, M)`` pair. ``cfg.K`` sets the number of pilots.
    """
    m_list = [int(m) for m in m_list]
    if any(m < 1 for m in m_list) or any(b < a for a, b in zip(m_list, m_list[1:])):
        raise InvalidParameterError("m_list must be positive and non-decreasing")
    cfg = replace(cfg, mode="finite_dl").resolved()
    jobs = [(cfg, m_list, n_draws, a, b) for a, b in _chunks(n_realizations, max(workers, 1))]
    if workers <= 1:
        parts = [_convergence_range(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_convergence_range, jobs))
    gaps = np.concatenate([p[0] for p in parts], axis=1).reshape(len(m_list), -1)
    rows = [ConvergenceRow(M, float(np.median(g)), float(np.quantile(g, 0.9)))
            for M, g in zip(m_list, gaps)]
    return rows


def monotone_within(values, rel_tol=0.1):
    """True when each value is at most ``(1 + rel_tol)`` times its predecessor."""
    v = np.asarray(values, dtype=float)
    return bool(np.all(v[1:] <= v[:-1] * (1.0 + rel_tol)))


def laplace_estimate(cfg, z, n=None, workers=1):
    """Monte Carlo ``E[exp(-z / SIR)]`` and its standard error for each ``z``."""
    sirs, _ = simulate_sirs(cfg, n=n, workers=workers)
    f = 1.0 / sirs
    z = np.atleast_1d(np.asarray(z, dtype=float))
    vals = np.exp(-np.outer(z, f))
    return vals.mean(axis=1), vals.std(axis=1, ddof=1) / math.sqrt(len(f))


@dataclass(frozen=True)
class Table1:
    """Rates in bps/Hz, with the raw nat-valued integrals alongside."""

    rate_per_user: float
    baseline_rate: float
    sum_rate_per_cell: float
    k_opt: int
    rate_per_user_nats: float
    baseline_rate_nats: float
    sum_rate_per_cell_nats: float


def reproduce_table1(cfg=None, tol=1e-8):
    """Massive-MIMO rate, single-antenna rate and optimal cell sum rate at ``cfg.alpha``, ``cfg.L``."""
    cfg = cfg or SimConfig()
    massive = analytic.rate_dl(cfg.alpha, tol)
    base = analytic.rate_baseline(cfg.alpha, tol)
    best = analytic.optimal_sum_rate(cfg.L, massive.rate_per_user)
    return Table1(
        massive.rate_per_user, base.rate_per_user, best.gamma_tot, best.K_opt,
        massive.rate_nats, base.rate_nats,
        analytic.sum_rate(cfg.L, best.K_opt, massive.rate_nats),
    )
