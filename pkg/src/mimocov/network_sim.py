"""Network realizations, Rayleigh fading and SIR of the typical link.

A realization places the typical entity at the origin: the typical user
for the downlink modes (served by its nearest BS) or the typical BS for the
uplink (serving its nearest pilot-1 user). Users sharing a pilot are an
independent PPP with the BS density. Channel estimates are formed by
correlating with the pilot, so the estimate of a user's channel is the sum
of the channels of every user on that pilot.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InfiniteSirError, InvalidParameterError
from .point_process import (
    ORIGIN,
    PointPattern,
    default_window_radius,
    path_gain,
    sample_ppp,
)

MODES = (
    "asymptotic_dl",
    "finite_dl",
    "power_constrained_dl",
    "uplink",
    "baseline_single_antenna",
)

# Truncation tolerance of the default window, per effective path-loss
# exponent. The baseline sums r**-alpha, whose tail decays too slowly for
# 1e-6 at a practical point count.
MASSIVE_WINDOW_RTOL = 1e-6
BASELINE_WINDOW_RTOL = 1e-3


@dataclass(frozen=True)
class SimConfig:
    lambda_b: float = 1e-5
    alpha: float = 4.0
    M: int = 64
    K: int = 1
    L: int = 16
    window_radius: float | None = None
    delta: float = 1.0
    n_samples: int = 100_000
    seed: int = 0
    mode: str = "asymptotic_dl"

    def __post_init__(self):
        if not self.lambda_b > 0:
            raise InvalidParameterError("lambda_b must be positive")
        if not self.alpha > 2:
            raise InvalidParameterError("alpha must exceed 2")
        if self.M < 1:
            raise InvalidParameterError("M must be at least 1")
        if not 1 <= self.K < self.L:
            raise InvalidParameterError("need 1 <= K < L")
        if self.n_samples < 1:
            raise InvalidParameterError("n_samples must be at least 1")
        if not self.delta > 0:
            raise InvalidParameterError("delta must be positive")
        if self.window_radius is not None and not self.window_radius > 0:
            raise InvalidParameterError("window_radius must be positive")
        if self.mode not in MODES:
            raise InvalidParameterError(
                f"unknown mode {self.mode!r}; valid modes: {', '.join(MODES)}"
            )
        if not 0 <= self.seed < 2**64:
            raise InvalidParameterError("seed must be a 64-bit unsigned integer")

    @property
    def radius(self):
        """Window radius, defaulting to the truncation rule for this mode."""
        if self.window_radius is not None:
            return float(self.window_radius)
        if self.mode == "baseline_single_antenna":
            return default_window_radius(self.lambda_b, self.alpha, BASELINE_WINDOW_RTOL)
        return default_window_radius(self.lambda_b, 2 * self.alpha, MASSIVE_WINDOW_RTOL)

    def resolved(self):
        """Copy with the window radius filled in."""
        return replace(self, window_radius=self.radius)


@dataclass
class NetworkRealization:
    """One snapshot of the network around the typical entity.

    ``gains_to_typical[i]`` is the path gain between the typical entity and
    candidate ``i`` (BS ``i`` in the downlink, pilot-1 user ``i`` in the
    uplink); ``serving`` indexes that array. ``user_gains[k]`` holds the
    ``(n_bs, n_users)`` gains from every BS to the users of pilot ``k + 1``
    other than the typical user, when the mode needs them.
    """

    bs: PointPattern | None
    users_per_pilot: list
    typical_kind: str
    serving: int
    gains_to_typical: np.ndarray
    user_gains: list = field(default_factory=list)
    alpha: float = 4.0
    delta: float = 1.0
    resampled: int = 0


def _gains(a, b, alpha, delta):
    d = np.hypot(a[:, None, 0] - b[None, :, 0], a[:, None, 1] - b[None, :, 1])
    return path_gain(d, alpha, delta).reshape(len(a), len(b))


def realization_from_points(bs_points, users_per_pilot=(), *, alpha=4.0, delta=1.0,
                            typical_kind="user_at_origin", window_radius=None, density=1e-5):
    """Build a realization from explicit coordinates (fixtures, hand checks).

    For ``user_at_origin`` the typical user sits at the origin and
    ``users_per_pilot`` lists the *other* users of each pilot. For
    ``bs_at_origin`` ``bs_points`` is ignored except for its role as the
    typical BS at the origin, and ``users_per_pilot[0]`` are the pilot-1 users.
    """
    def pattern(pts):
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        r = window_radius or max(1.0, float(np.max(np.hypot(*pts.T), initial=0.0)))
        return PointPattern(pts, r, density)

    users = [pattern(u) for u in users_per_pilot]
    if typical_kind == "user_at_origin":
        bs = pattern(bs_points)
        if len(bs) == 0:
            raise InvalidParameterError("need at least one BS")
        g0 = path_gain(bs.distances(ORIGIN), alpha, delta).reshape(-1)
        serving = int(np.argmin(bs.distances(ORIGIN)))
        ug = [_gains(bs.points, u.points, alpha, delta) for u in users]
        return NetworkRealization(bs, users, typical_kind, serving, g0, ug, alpha, delta)
    if typical_kind == "bs_at_origin":
        if not users or len(users[0]) == 0:
            raise InvalidParameterError("uplink needs at least one pilot-1 user")
        d = users[0].distances(ORIGIN)
        g0 = path_gain(d, alpha, delta).reshape(-1)
        return NetworkRealization(None, users, typical_kind, int(np.argmin(d)), g0,
                                  [], alpha, delta)
    raise InvalidParameterError(f"unknown typical_kind {typical_kind!r}")


def build_realization(cfg, rng):
    """Sample a realization for ``cfg.mode``.

    Patterns with fewer than two candidates (no interferer) are redrawn;
    the number of redraws is recorded in ``resampled``.
    """
    R = cfg.radius
    resampled = 0
    if cfg.mode == "uplink":
        while True:
            users = sample_ppp(cfg.lambda_b, R, rng)
            if len(users) >= 2:
                break
            resampled += 1
        d = users.distances(ORIGIN)
        g0 = path_gain(d, cfg.alpha, cfg.delta)
        return NetworkRealization(None, [users], "bs_at_origin", int(np.argmin(d)), g0,
                                  [], cfg.alpha, cfg.delta, resampled)

    while True:
        bs = sample_ppp(cfg.lambda_b, R, rng)
        if len(bs) >= 2:
            break
        resampled += 1
    d = bs.distances(ORIGIN)
    g0 = path_gain(d, cfg.alpha, cfg.delta)
    n_pilots = {"power_constrained_dl": 1, "finite_dl": cfg.K}.get(cfg.mode, 0)
    users = [sample_ppp(cfg.lambda_b, R, rng) for _ in range(n_pilots)]
    ug = [_gains(bs.points, u.points, cfg.alpha, cfg.delta) for u in users]
    return NetworkRealization(bs, users, "user_at_origin", int(np.argmin(d)), g0, ug,
                              cfg.alpha, cfg.delta, resampled)


def _ratio(signal, weights, serving):
    interference = np.sum(np.delete(weights, serving))
    if not interference > 0:
        raise InfiniteSirError("no interference in the window")
    return float(signal / interference)


def _require(real, kind):
    if real.typical_kind != kind:
        raise InvalidParameterError(f"realization must be {kind}, got {real.typical_kind}")


def sir_asymptotic_dl(real):
    """Large-antenna downlink SIR ``beta_00**2 / sum_{l != 0} beta_l0**2``."""
    _require(real, "user_at_origin")
    w = real.gains_to_typical ** 2
    return _ratio(w[real.serving], w, real.serving)


def sir_asymptotic_ul(real):
    """Large-antenna uplink SIR at the typical BS; interferers are the other pilot-1 users."""
    _require(real, "bs_at_origin")
    w = real.gains_to_typical ** 2
    return _ratio(w[real.serving], w, real.serving)


def power_normalizers(real):
    """``b_l``: sum of gains from BS ``l`` to every pilot-1 user, typical user included."""
    _require(real, "user_at_origin")
    if not real.user_gains:
        raise InvalidParameterError("power-constrained SIR needs the pilot-1 user pattern")
    return real.gains_to_typical + real.user_gains[0].sum(axis=1)


def sir_power_constrained_dl(real, normalizers=None):
    """Large-antenna downlink SIR with unit-norm matched-filter precoders.

    ``(beta_00**2 / b_0) / sum_{l != 0} beta_l0**2 / b_l``. ``normalizers``
    overrides the computed ``b_l`` (synthetic fixtures).
    """
    b = power_normalizers(real) if normalizers is None else np.asarray(normalizers, float)
    w = real.gains_to_typical ** 2 / b
    return _ratio(w[real.serving], w, real.serving)


def sir_baseline_single_antenna(real, rng, fading=None):
    """Single-antenna SIR ``e_0 beta_00 / sum_{l != 0} e_l beta_l0``, ``e`` ~ Exp(1).

    ``fading`` replaces the exponential draws when given.
    """
    _require(real, "user_at_origin")
    n = len(real.gains_to_typical)
    e = rng.standard_exponential(n) if fading is None else np.asarray(fading, float)
    w = e * real.gains_to_typical
    return _ratio(w[real.serving], w, real.serving)


# ---------------------------------------------------------------------------
# Finite number of antennas
# ---------------------------------------------------------------------------


@dataclass
class ChannelBlock:
    """Small-scale fading for one coherence block.

    ``to_typical`` is ``(n_bs, M)``: BS ``l`` to the typical user.
    ``to_users[k]`` is ``(n_bs, n_k, M)``: BS ``l`` to user ``u`` of pilot ``k + 1``.
    Entries are i.i.d. CN(0, 1).
    """

    to_typical: np.ndarray
    to_users: list

    @property
    def M(self):
        return self.to_typical.shape[1]

    @property
    def fading(self):
        """All draws as an ``M x n_pairs`` matrix (typical pairs first)."""
        cols = [self.to_typical] + [v.reshape(-1, self.M) for v in self.to_users]
        return np.concatenate(cols, axis=0).T

    def channels(self, real):
        """``h = sqrt(beta) v`` laid out like the fading arrays."""
        h0 = np.sqrt(real.gains_to_typical)[:, None] * self.to_typical
        hu = [np.sqrt(g)[:, :, None] * v for g, v in zip(real.user_gains, self.to_users)]
        return h0, hu


def _cn(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(0.5)


def draw_channel_block(real, M, rng):
    _require(real, "user_at_origin")
    n_bs = len(real.gains_to_typical)
    return ChannelBlock(_cn(rng, (n_bs, M)), [_cn(rng, g.shape + (M,)) for g in real.user_gains])


@dataclass
class ChannelEstimate:
    """Estimate ``g`` of BS ``bs``'s channel to its own user on ``pilot``.

    ``own`` is that user's true channel and ``contaminators`` (rows) the
    channels of every other user on the same pilot.
    """

    bs: int
    pilot: int
    g: np.ndarray
    own: np.ndarray
    contaminators: np.ndarray

    @property
    def error(self):
        return self.g - self.own


def channel_estimate(real, block, bs, pilot=1):
    """Correlation-based estimate at BS ``bs`` for ``pilot`` (1-based).

    The serving BS's own pilot-1 user is the typical user; any other BS
    owns the pilot user nearest to it.
    """
    h0, hu = block.channels(real)
    users = hu[pilot - 1]
    if pilot == 1:
        pool = np.concatenate([h0[bs][None, :], users[bs]], axis=0)
        gains = np.concatenate([[real.gains_to_typical[bs]], real.user_gains[0][bs]])
    else:
        pool = users[bs]
        gains = real.user_gains[pilot - 1][bs]
    own_idx = 0 if (pilot == 1 and bs == real.serving) else int(np.argmax(gains))
    own = pool[own_idx]
    contaminators = np.delete(pool, own_idx, axis=0)
    g = own + contaminators.sum(axis=0)
    return ChannelEstimate(bs, pilot, g, own, contaminators)


def finite_dl_terms(real, block):
    """Signal power and the three interference sums of the finite-``M`` downlink SIR.

    Returns ``(signal, same_pilot_power, same_pilot_cross, other_pilot)``:
    ``||h_00||**4``, ``sum_{l != 0} ||h_l0||**4``,
    ``sum_l sum_{u} |h_l0^H h_lu|**2`` over the other pilot-1 users, and the
    same over users of every other pilot.
    """
    h0, hu = block.channels(real)
    norms2 = np.sum(np.abs(h0) ** 2, axis=1)
    s = real.serving
    signal = norms2[s] ** 2
    same_power = np.sum(np.delete(norms2, s) ** 2)
    cross = []
    for h in hu:
        inner = np.einsum("lm,lum->lu", h0.conj(), h)
        cross.append(np.sum(np.abs(inner) ** 2))
    same_cross = cross[0] if cross else 0.0
    other = float(np.sum(cross[1:])) if len(cross) > 1 else 0.0
    return float(signal), float(same_power), float(same_cross), other


def sir_finite_dl(real, block, cfg=None):
    """Finite-``M`` downlink SIR from explicit channel vectors."""
    _require(real, "user_at_origin")
    if cfg is not None and block.M != cfg.M:
        raise InvalidParameterError("channel block antenna count differs from cfg.M")
    signal, a, b, c = finite_dl_terms(real, block)
    interference = a + b + c
    if not interference > 0:
        raise InfiniteSirError("no interference in the finite-M SIR")
    return signal / interference


def sample_sir_finite_dl(real, M, rng, n_draws=1):
    """``n_draws`` finite-``M`` downlink SIRs drawn without materialising channels.

    Conditioned on ``h_l0``, the projection ``h_l0^H h_lu`` of an independent
    channel is CN(0, ||h_l0||**2 beta_lu), and ``||v||**2`` of an M-vector of
    CN(0, 1) entries is Gamma(M, 1). The SIR therefore has the same law as

        (beta_00 G_0)**2 / (sum_{l!=0} (beta_l0 G_l)**2
                            + sum_l beta_l0 G_l sum_u beta_lu E_lu)

    with ``G`` ~ Gamma(M, 1) and ``E`` ~ Exp(1) independent. This is what
    makes a 10^5-draw convergence study tractable.
    """
    _require(real, "user_at_origin")
    g0 = real.gains_to_typical
    n_bs = len(g0)
    G = rng.standard_gamma(M, size=(n_draws, n_bs))
    p = g0[None, :] * G
    s = real.serving
    signal = p[:, s] ** 2
    interference = np.sum(np.delete(p, s, axis=1) ** 2, axis=1)
    for gains in real.user_gains:
        if gains.shape[1] == 0:
            continue
        E = rng.standard_exponential(size=(n_draws,) + gains.shape)
        interference = interference + np.sum(p * np.sum(gains[None] * E, axis=2), axis=1)
    if np.any(interference <= 0):
        raise InfiniteSirError("no interference in the finite-M SIR")
    return signal / interference
