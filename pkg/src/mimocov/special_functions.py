r"""Complex incomplete gamma functions and the :math:`\eta` kernel.

The lower incomplete gamma function

.. math::

    \gamma(a, z) = \int_0^z t^{a-1} e^{-t} \, dt

is evaluated on the closed right half-plane with the principal branch of
:math:`z^a`. For :math:`|z| \le a + 8` the Kummer series is used,

.. math::

    \gamma(a, z) = z^a e^{-z} \sum_{n \ge 0} \frac{z^n}{a (a+1) \cdots (a+n)},

and above that radius :math:`\gamma = \Gamma(a) - \Gamma(a, z)` with the
Legendre continued fraction for the upper function, evaluated by the
modified Lentz method.

All functions accept scalars or arrays and broadcast like numpy ufuncs.
"""

import math

import numpy as np

from .errors import InvalidParameterError, NumericalFailureError

SERIES_RTOL = 1e-15
CF_RTOL = 1e-15
MAX_TERMS = 10_000
_TINY = 1e-300
_ARG_SLACK = 1e-12
_UPPER_CF_RADIUS = 2.0


def _as_complex(z):
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise InvalidParameterError("argument must be finite")
    return z


def _check_half_plane(z):
    if np.any(np.abs(np.angle(z[z != 0])) > np.pi / 2 + _ARG_SLACK):
        raise InvalidParameterError("argument must lie in the closed right half-plane")


def _unwrap(out, like):
    return out[()] if np.ndim(like) == 0 else out


def _kummer_sum(a, z):
    """``sum_n z^n / (a)_(n+1)`` for every entry of the 1-D array ``z``."""
    term = np.full(z.shape, 1.0 / a, dtype=complex)
    total = term.copy()
    active = np.ones(z.shape, dtype=bool)
    for n in range(1, MAX_TERMS):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            return total
        term[idx] *= z[idx] / (a + n)
        total[idx] += term[idx]
        done = np.abs(term[idx]) <= SERIES_RTOL * np.abs(total[idx])
        active[idx[done]] = False
    raise NumericalFailureError(
        "incomplete gamma series did not converge",
        terms=MAX_TERMS, unconverged=int(active.sum()),
    )


def _legendre_cf(a, z):
    """Continued fraction ``Gamma(a, z) / (z^a e^-z)`` by modified Lentz.

    Valid for any real ``a`` and ``z`` off the negative real axis; converges
    quickly once ``|z|`` is a few units.
    """
    b = z + 1.0 - a
    c = np.full(z.shape, 1.0 / _TINY, dtype=complex)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(z.shape, dtype=bool)
    for i in range(1, MAX_TERMS):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            return h
        an = -i * (i - a)
        b[idx] += 2.0
        dd = an * d[idx] + b[idx]
        dd[np.abs(dd) < _TINY] = _TINY
        cc = b[idx] + an / c[idx]
        cc[np.abs(cc) < _TINY] = _TINY
        dd = 1.0 / dd
        step = dd * cc
        d[idx] = dd
        c[idx] = cc
        h[idx] *= step
        active[idx[np.abs(step - 1.0) <= CF_RTOL]] = False
    raise NumericalFailureError(
        "incomplete gamma continued fraction did not converge",
        iterations=MAX_TERMS, unconverged=int(active.sum()),
    )


def _lower_gamma_core(a, z):
    """``gamma(a, z)`` on a flat complex array, no validation."""
    out = np.zeros(z.shape, dtype=complex)
    nz = z != 0
    small = nz & (np.abs(z) <= a + 8.0)
    large = np.abs(z) > a + 8.0
    if small.any():
        zs = z[small]
        out[small] = np.exp(a * np.log(zs) - zs) * _kummer_sum(a, zs)
    if large.any():
        zl = z[large]
        out[large] = math.gamma(a) - np.exp(a * np.log(zl) - zl) * _legendre_cf(a, zl)
    return out


def lower_incomplete_gamma(a, z):
    """Lower incomplete gamma function for real ``a`` in (0, 2] and complex ``z``.

    ``z`` must satisfy ``|arg z| <= pi/2``. The upper bound on ``a`` is 2
    rather than 1 so that the recurrence
    ``gamma(a+1, z) = a gamma(a, z) - z^a e^-z`` can be checked directly.

    Raises:
        InvalidParameterError: ``a`` outside (0, 2] or ``z`` outside the
            closed right half-plane.
        NumericalFailureError: series or continued fraction ran out of terms.
    """
    if not 0 < a <= 2:
        raise InvalidParameterError(f"a must be in (0, 2], got {a}")
    zz = _as_complex(z)
    _check_half_plane(zz)
    out = _lower_gamma_core(float(a), zz.ravel()).reshape(zz.shape)
    return _unwrap(out, z)


def _e1_series(z):
    """Exponential integral ``E1(z) = Gamma(0, z)`` by its power series, |z| <= 2."""
    term = -z
    total = term.copy()
    active = np.ones(z.shape, dtype=bool)
    for n in range(2, MAX_TERMS):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        term[idx] *= -z[idx] * (n - 1) / (n * n)
        total[idx] += term[idx]
        active[idx[np.abs(term[idx]) <= SERIES_RTOL * np.abs(total[idx])]] = False
    else:
        raise NumericalFailureError("E1 series did not converge", terms=MAX_TERMS)
    return -np.euler_gamma - np.log(z) - total


def upper_incomplete_gamma(s, z):
    """Upper incomplete gamma ``Gamma(s, z)`` for any real ``s`` and ``z != 0``.

    For ``|z| > 2`` the continued fraction is used directly. Closer to the
    origin the value starts from ``Gamma(s0) - gamma(s0, z)`` with ``s0`` in
    (0, 1], or from ``E1(z)`` when ``s`` is an integer ``<= 0``, and is moved
    to ``s`` with ``Gamma(s+1, z) = s Gamma(s, z) + z^s e^-z``.
    """
    s = float(s)
    zz = _as_complex(z)
    _check_half_plane(zz)
    if np.any(zz == 0):
        raise InvalidParameterError("z must be non-zero")
    flat = zz.ravel()
    out = np.empty(flat.shape, dtype=complex)
    far = np.abs(flat) > _UPPER_CF_RADIUS
    if far.any():
        zf = flat[far]
        out[far] = np.exp(s * np.log(zf) - zf) * _legendre_cf(s, zf)
    near = ~far
    if near.any():
        zn = flat[near]
        logz = np.log(zn)
        if s <= 0 and s.is_integer():
            cur = 0.0
            g = _e1_series(zn)
        else:
            cur = s - math.floor(s) or 1.0
            g = math.gamma(cur) - _lower_gamma_core(cur, zn)
        while cur - s > 0.5:
            cur -= 1.0
            g = (g - np.exp(cur * logz - zn)) / cur
        while s - cur > 0.5:
            g = cur * g + np.exp(cur * logz - zn)
            cur += 1.0
        out[near] = g
    return _unwrap(out.reshape(zz.shape), z)


def eta(x, alpha):
    r"""Kernel :math:`\eta(x) = e^{-x} + x^{1/\alpha}\gamma(1 - 1/\alpha, x)`.

    :math:`1/\eta` is the Laplace transform of the inverse asymptotic SIR.
    The product :math:`x^{1/\alpha}\gamma(1-1/\alpha, x)` equals
    :math:`x e^{-x}\sum_n x^n/(a)_{n+1}` inside the series radius, so no
    fractional power is formed there and :math:`\eta(0) = 1` exactly.
    """
    if not alpha > 2:
        raise InvalidParameterError(f"alpha must exceed 2, got {alpha}")
    xx = _as_complex(x)
    _check_half_plane(xx)
    flat = xx.ravel()
    a = 1.0 - 1.0 / alpha
    out = np.ones(flat.shape, dtype=complex)
    nz = flat != 0
    small = nz & (np.abs(flat) <= a + 8.0)
    large = np.abs(flat) > a + 8.0
    if small.any():
        xs = flat[small]
        out[small] = np.exp(-xs) * (1.0 + xs * _kummer_sum(a, xs))
    if large.any():
        xl = flat[large]
        h = _legendre_cf(a, xl)
        out[large] = np.exp(-xl) * (1.0 - xl * h) + math.gamma(a) * np.exp(np.log(xl) / alpha)
    return _unwrap(out.reshape(xx.shape), x)
