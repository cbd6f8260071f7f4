"""Asymptotic coverage probability and rate of a Poisson massive-MIMO network.

The downlink coverage probability as the antenna count grows is

    P(T) = int_R (exp(2j pi s / T) - 1) / (2j pi s eta(2j pi s)) ds,

an inversion of the Laplace transform ``1 / eta`` of ``1 / SIR``. With
``y = 2 pi s`` and conjugate symmetry this is

    P(T) = (1 / pi) int_0^inf Re[(exp(j x y) - 1) q(y)] dy,   x = 1 / T,

where ``q(y) = -j / (y eta(j y))``. The integrand decays only like
``y**(-1 - 1/alpha)``, so plain truncation is hopeless. Instead:

* on ``[0, Y]`` the ``-j/y`` pole is split off (its contribution is the
  sine integral ``Si(x Y)``) and the smooth remainder is interpolated on
  fixed Legendre panels whose oscillatory moments against ``exp(j x y)``
  are exact (spherical Bessel functions), so ``eta`` is sampled once per
  ``alpha`` and any ``T`` is cheap;
* beyond ``Y`` the asymptotic expansion
  ``1/eta = sum_n exp(-n x) u(x)**n / (Gamma(a) x**b)**(n+1)``, with
  ``b = 1/alpha``, ``a = 1 - b`` and ``u`` the Poincare series of
  ``x**b Gamma(a, x) exp(x) - 1``, is integrated term by term in closed
  form through upper incomplete gamma functions.

Rates are computed in nats by ``int_0^inf P(T) / (1 + T) dT`` and reported
in bps/Hz after a single division by ``ln 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .errors import InvalidParameterError, NumericalFailureError, OutOfDomainError
from .special_functions import eta, upper_incomplete_gamma

LN2 = math.log(2.0)

# Panel layout for the [0, Y] part; see _CoverageKernel.
_CUTOFF = 64.0
_PANEL_WIDTH = 0.5
_NODES = 16
_CHECK_NODES = 12
_MAX_ORDER = 8.0


def _check_alpha(alpha):
    if not alpha > 2:
        raise InvalidParameterError(f"path loss exponent must exceed 2, got {alpha}")


@dataclass
class CoverageCurve:
    thresholds: np.ndarray
    probabilities: np.ndarray
    half_widths: np.ndarray
    source: str
    mode: str = "asymptotic_dl"

    def __post_init__(self):
        self.thresholds = np.asarray(self.thresholds, dtype=float)
        self.probabilities = np.asarray(self.probabilities, dtype=float)
        self.half_widths = np.asarray(self.half_widths, dtype=float)
        n = len(self.thresholds)
        if len(self.probabilities) != n or len(self.half_widths) != n:
            raise InvalidParameterError("curve arrays must have equal lengths")
        if np.any(np.diff(self.thresholds) <= 0):
            raise InvalidParameterError("thresholds must be strictly increasing")
        if np.any((self.probabilities < 0) | (self.probabilities > 1)):
            raise InvalidParameterError("probabilities must lie in [0, 1]")
        if self.source not in ("analytic", "closed_form", "monte_carlo"):
            raise InvalidParameterError(f"unknown curve source {self.source!r}")

    @property
    def thresholds_db(self):
        return 10.0 * np.log10(self.thresholds)


@dataclass(frozen=True)
class RateResult:
    """Per-user rate. ``rate_per_user`` is in bps/Hz; ``rate_nats`` is the raw integral."""

    rate_per_user: float
    quadrature_error_estimate: float
    rate_nats: float = field(default=float("nan"))


@dataclass(frozen=True)
class SumRateResult:
    K_opt: int
    gamma_tot: float


# ---------------------------------------------------------------------------
# Asymptotic expansion of q(y) = -j / (y eta(j y)) for large y
# ---------------------------------------------------------------------------


def _tail_terms(alpha, max_order=_MAX_ORDER):
    """Terms ``(coef, n, p)`` with ``q(y) ~ sum coef * exp(-j n y) * y**(-1 - p)``."""
    b = 1.0 / alpha
    a = 1.0 - b
    g = math.gamma(a)
    kmax = int(max_order) + 1
    # u(x) ~ sum_k c_k x^-k with c_k = (a-1)(a-2)...(a-k).
    u = np.zeros(kmax + 1)
    c = 1.0
    for k in range(1, kmax + 1):
        c *= a - k
        u[k] = c
    terms = []
    power = np.zeros(kmax + 1)
    power[0] = 1.0  # u**0
    n = 0
    while (n + 1) * b + n <= max_order:
        for m in range(n, kmax + 1):
            p = (n + 1) * b + m
            if p > max_order or power[m] == 0.0:
                continue
            # x**-p at x = j y is y**-p exp(-j pi p / 2); the leading -j/y is q's prefactor.
            coef = -1j * power[m] / g ** (n + 1) * np.exp(-0.5j * np.pi * p)
            terms.append((complex(coef), n, p))
        power = np.convolve(power, u)[: kmax + 1]
        n += 1
    return terms


def _q_asymptotic(y, alpha):
    y = np.asarray(y, dtype=float)
    total = np.zeros(y.shape, dtype=complex)
    for coef, n, p in _tail_terms(alpha):
        total += coef * np.exp(-1j * n * y) * y ** (-1.0 - p)
    return total


def _power_tail(omega, p, cutoff):
    """``int_cutoff^inf exp(j omega y) y**(-1 - p) dy`` for ``p > 0``."""
    if abs(omega) < 1e-14:
        return cutoff ** (-p) / p
    c = -1j * omega
    return complex(np.exp(p * np.log(c)) * upper_incomplete_gamma(-p, c * cutoff))


# ---------------------------------------------------------------------------
# Coverage kernel
# ---------------------------------------------------------------------------


class _CoverageKernel:
    """Per-alpha precomputation for the coverage integral.

    ``f(y) = -j (1/eta(j y) - 1) / y`` is smooth on ``[0, Y]`` (``|eta| >= 1``
    on the imaginary axis because ``1/eta`` is a characteristic function). It
    is expanded in Legendre polynomials on panels of width ``h``, so that

        int_panel exp(j x y) f(y) dy = (h/2) exp(j x c) sum_k f_k 2 j^k j_k(x h / 2).
    """

    def __init__(self, alpha, cutoff=_CUTOFF, width=_PANEL_WIDTH):
        self.alpha = alpha
        self.cutoff = cutoff
        self.width = width
        n_panels = int(round(cutoff / width))
        self.centers = width * (np.arange(n_panels) + 0.5)
        self.coef = self._legendre_coefficients(_NODES)
        self.coef_check = self._legendre_coefficients(_CHECK_NODES)
        self.terms = _tail_terms(alpha)
        self._nonosc = None

    def _legendre_coefficients(self, n):
        t, w = np.polynomial.legendre.leggauss(n)
        y = self.centers[:, None] + 0.5 * self.width * t[None, :]
        f = -1j * (1.0 / eta(1j * y, self.alpha) - 1.0) / y
        # f_k = (2k+1)/2 * sum_i w_i f(t_i) P_k(t_i)
        vander = np.polynomial.legendre.legvander(t, n - 1)  # (n, n)
        scale = (2 * np.arange(n) + 1) / 2.0
        return (f * w[None, :]) @ vander * scale[None, :]

    def _moment(self, x, coef):
        n = coef.shape[1]
        k = np.arange(n)
        half = 0.5 * self.width
        jk = special.spherical_jn(k, x * half)
        weights = 2.0 * (1j ** k) * jk
        return half * np.sum(np.exp(1j * x * self.centers) * (coef @ weights))

    def _tail(self, x):
        total = 0.0
        for coef, n, p in self.terms:
            total += (coef * _power_tail(x - n, p, self.cutoff)).real
        return total

    def _tail_nonosc(self):
        total = 0.0
        for coef, n, p in self.terms:
            total -= (coef * _power_tail(-n, p, self.cutoff)).real
        return total

    def nonoscillatory(self):
        """``int_0^inf Re[-q(y)] dy``, which is ``pi / 2`` when ``1/SIR > 0`` a.s."""
        if self._nonosc is None:
            self._nonosc = -self._moment(0.0, self.coef).real + self._tail_nonosc()
        return self._nonosc

    def coverage(self, x):
        """Coverage at ``T = 1/x`` and an error estimate (both unclipped)."""
        base = special.sici(x * self.cutoff)[0]
        osc = self._moment(x, self.coef).real
        osc_check = self._moment(x, self.coef_check).real
        value = (base + osc + self._tail(x) + self.nonoscillatory()) / np.pi
        err = abs(osc - osc_check) / np.pi + self.truncation_error()
        return value, err

    def truncation_error(self):
        # Size of the highest retained order gives a conservative bound on
        # what was dropped; factor 2 covers both the oscillatory and constant parts.
        worst = max(p for _, _, p in self.terms)
        mags = [abs(c) for c, _, p in self.terms if p == worst]
        return 2 * max(mags) * self.cutoff ** (-worst) / worst / np.pi


@lru_cache(maxsize=32)
def _kernel(alpha):
    return _CoverageKernel(float(alpha))


def coverage_dl(T, alpha, tol=1e-8):
    """Asymptotic downlink (and uplink) coverage probability ``P(SIR > T)``.

    Args:
        T: linear SIR threshold, ``T > 0``.
        alpha: path loss exponent, ``alpha > 2``.
        tol: absolute accuracy demanded, in (1e-12, 1e-2).

    Raises:
        NumericalFailureError: the internal error estimate exceeds ``tol``.
    """
    _check_alpha(alpha)
    if not T > 0:
        raise InvalidParameterError(f"threshold must be positive, got {T}")
    if not 1e-12 < tol < 1e-2:
        raise InvalidParameterError(f"tol must be in (1e-12, 1e-2), got {tol}")
    value, err = _kernel(alpha).coverage(1.0 / T)
    if err > tol:
        raise NumericalFailureError(
            f"coverage integral error estimate {err:.3g} exceeds tol {tol:.3g}",
            error_estimate=err, threshold=T, alpha=alpha,
        )
    return float(min(max(value, 0.0), 1.0))


def coverage_dl_closed(T, alpha):
    """Closed form ``alpha sin(pi/alpha) / (pi T**(1/alpha))``, valid for ``T >= 1``."""
    _check_alpha(alpha)
    if T < 1:
        raise OutOfDomainError(f"closed form holds only for T >= 1, got {T}")
    return alpha * math.sin(math.pi / alpha) / (math.pi * T ** (1.0 / alpha))


def coverage_baseline(T, alpha):
    """Single-antenna Rayleigh-fading PPP downlink coverage, interference limited.

    ``1 / (1 + rho)`` with ``rho = T**(2/alpha) int_{T**(-2/alpha)}^inf du / (1 + u**(alpha/2))``.
    """
    _check_alpha(alpha)
    if not T > 0:
        raise InvalidParameterError(f"threshold must be positive, got {T}")
    lower = T ** (-2.0 / alpha)
    val, err = integrate.quad(lambda u: 1.0 / (1.0 + u ** (alpha / 2.0)), lower, np.inf,
                              epsabs=1e-13, epsrel=1e-12, limit=200)
    if not np.isfinite(val) or err > 1e-9:
        raise NumericalFailureError("baseline integral failed", error_estimate=err)
    return 1.0 / (1.0 + T ** (2.0 / alpha) * val)


def coverage_curve(thresholds, alpha, method="integral", tol=1e-8):
    """Evaluate a coverage curve on a grid of linear thresholds.

    ``method`` is ``"integral"``, ``"closed"`` (NaN for ``T < 1``) or
    ``"baseline"``.
    """
    thresholds = np.asarray(thresholds, dtype=float)
    if method == "integral":
        p = [coverage_dl(t, alpha, tol) for t in thresholds]
        source = "analytic"
    elif method == "closed":
        p = [coverage_dl_closed(t, alpha) if t >= 1 else np.nan for t in thresholds]
        source = "closed_form"
    elif method == "baseline":
        p = [coverage_baseline(t, alpha) for t in thresholds]
        source = "analytic"
    else:
        raise InvalidParameterError(f"unknown method {method!r}")
    p = np.asarray(p)
    keep = ~np.isnan(p)
    mode = "baseline_single_antenna" if method == "baseline" else "asymptotic_dl"
    return CoverageCurve(thresholds[keep], p[keep], np.zeros(keep.sum()), source, mode)


def _closed_form_tail(alpha):
    """``int_1^inf T**(-1/alpha) / (1 + T) dT`` = ``(psi((b+1)/2) - psi(b/2)) / 2``, b = 1/alpha."""
    b = 1.0 / alpha
    return 0.5 * (special.digamma(0.5 * (b + 1.0)) - special.digamma(0.5 * b))


def rate_dl(alpha, tol=1e-8):
    """Asymptotic per-user rate ``int_0^inf P(T) / (1 + T) dT``.

    The integral is split at ``T = 1``: the coverage integral is used on
    ``(0, 1]`` and the closed form above, whose tail integral is a digamma
    difference. The same value is the uplink rate.
    """
    _check_alpha(alpha)
    head, err = integrate.quad(lambda t: coverage_dl(t, alpha, tol) / (1.0 + t) if t > 0 else 1.0,
                               0.0, 1.0, epsabs=tol, epsrel=tol, limit=200)
    c = alpha * math.sin(math.pi / alpha) / math.pi
    nats = head + c * _closed_form_tail(alpha)
    err += tol
    return RateResult(nats / LN2, err / LN2, nats)


def rate_baseline(alpha, tol=1e-8):
    """Rate of the single-antenna Rayleigh baseline, same units as :func:`rate_dl`."""
    _check_alpha(alpha)
    f = lambda t: coverage_baseline(t, alpha) / (1.0 + t)  # noqa: E731
    head, e1 = integrate.quad(f, 0.0, 1.0, epsabs=tol, epsrel=tol, limit=200)
    tail, e2 = integrate.quad(f, 1.0, np.inf, epsabs=tol, epsrel=tol, limit=200)
    nats = head + tail
    return RateResult(nats / LN2, (e1 + e2) / LN2, nats)


def sum_rate(L, K, rate_per_user):
    """Cell throughput ``K (L - K) rate / L`` with ``K`` pilot uses out of ``L``."""
    if not (isinstance(L, (int, np.integer)) and isinstance(K, (int, np.integer))):
        raise InvalidParameterError("L and K must be integers")
    if not 1 <= K < L:
        raise InvalidParameterError(f"need 1 <= K < L, got K={K}, L={L}")
    return K * (L - K) * rate_per_user / L


def optimal_pilot_length(L):
    """Integer maximiser of ``K (L - K)``; ``floor(L / 2)`` (the lower one on ties)."""
    if L < 2:
        raise InvalidParameterError(f"need L >= 2, got {L}")
    return L // 2


def optimal_sum_rate(L, rate_per_user):
    k = optimal_pilot_length(L)
    return SumRateResult(k, sum_rate(L, k, rate_per_user))
