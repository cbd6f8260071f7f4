"""Homogeneous Poisson point processes on a disk and basic geometry.

Patterns are stored as ``(n, 2)`` float arrays of coordinates in meters,
always inside the closed disk of radius ``window_radius`` centred at the
origin.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import EmptyPatternError, InvalidParameterError


class Point(NamedTuple):
    x: float
    y: float


ORIGIN = Point(0.0, 0.0)


@dataclass(frozen=True)
class PointPattern:
    points: np.ndarray
    window_radius: float
    density: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "points", pts)
        if not self.window_radius > 0:
            raise InvalidParameterError("window_radius must be positive")
        if not self.density > 0:
            raise InvalidParameterError("density must be positive")
        if not np.all(np.isfinite(pts)):
            raise InvalidParameterError("point coordinates must be finite")

    def __len__(self):
        return len(self.points)

    def distances(self, origin=ORIGIN):
        """Euclidean distance from ``origin`` to every point."""
        return np.hypot(self.points[:, 0] - origin[0], self.points[:, 1] - origin[1])


def sample_ppp(density, window_radius, rng):
    """Draw a homogeneous PPP restricted to the disk of radius ``window_radius``.

    The count is Poisson with mean ``density * pi * window_radius**2``;
    positions use the inverse-CDF map ``r = R sqrt(u)``, ``theta = 2 pi v``.
    """
    if not density > 0:
        raise InvalidParameterError(f"density must be positive, got {density}")
    if not window_radius > 0:
        raise InvalidParameterError(f"window_radius must be positive, got {window_radius}")
    n = rng.poisson(density * np.pi * window_radius**2)
    radius = window_radius * np.sqrt(rng.random(n))
    # The sqrt can round a hair above R; containment is part of the contract.
    np.minimum(radius, window_radius, out=radius)
    theta = 2.0 * np.pi * rng.random(n)
    points = np.column_stack((radius * np.cos(theta), radius * np.sin(theta)))
    return PointPattern(points, window_radius, density)


def nearest_point(origin, pattern):
    """Index and distance of the point closest to ``origin``.

    Ties go to the lowest index (``np.argmin`` semantics).
    """
    if len(pattern) == 0:
        raise EmptyPatternError("nearest_point needs a non-empty pattern")
    d = pattern.distances(origin)
    i = int(np.argmin(d))
    return i, float(d[i])


def path_gain(distance, alpha, delta=1.0):
    """Log-distance path gain ``max(distance, delta) ** -alpha``.

    Works elementwise on arrays. ``alpha`` must exceed 2 so that the
    interference moments used throughout remain finite.
    """
    if not alpha > 2:
        raise InvalidParameterError(f"path loss exponent must exceed 2, got {alpha}")
    if not delta > 0:
        raise InvalidParameterError(f"exclusion radius must be positive, got {delta}")
    distance = np.asarray(distance, dtype=float)
    if np.any(distance < 0):
        raise InvalidParameterError("distance must be non-negative")
    gain = np.maximum(distance, delta) ** (-alpha)
    return float(gain) if gain.ndim == 0 else gain


def default_window_radius(density, exponent, rel_tol=1e-6):
    """Disk radius making the expected truncated tail of ``sum r**-exponent`` small.

    By Campbell's formula the expected contribution of points beyond ``R``
    is ``2 pi density R**(2 - exponent) / (exponent - 2)``. The radius is
    chosen so that this equals ``rel_tol`` times the power received from
    a point at the mean nearest-neighbour distance ``1 / (2 sqrt(density))``.
    """
    if not exponent > 2:
        raise InvalidParameterError("tail of r**-exponent diverges unless exponent > 2")
    d = 0.5 / np.sqrt(density)
    scale = 2.0 * np.pi * density * d**exponent / ((exponent - 2.0) * rel_tol)
    return float(scale ** (1.0 / (exponent - 2.0)))
