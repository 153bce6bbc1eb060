"""Explicit five-point schemes assembled from flux coefficients.

A scheme is described by the coefficients of its numerical fluxes::

    h_{j+1/2} = b_prev u_{j-1} + b_center u_j + b_next u_{j+1} + bt_far  u_{j+2}
    h_{j-1/2} = bt_prev u_{j-2} + b_center u_{j-1} + b_next u_j + b_far u_{j+1}

and the conservative update ``u_j <- u_j - lam (h_{j+1/2} - h_{j-1/2})``
expands into five stencil weights.  When the weights are nonnegative they are
the jump probabilities of a Markov chain (see :mod:`probflux.markov`).

Note on the Lax-Friedrichs preset: solving the defining relations gives
``b_center = a/2 + 1/(2 lam)``.  The form with a minus sign that is sometimes
quoted does not reproduce the averaging scheme and is not used here.

Note on the centered Euler preset: its weights are ``(lam a/2, 1, -lam a/2)``
so one of them is negative for every ``a != 0``.  The checker reports that
honestly, including for ``a < 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidArgumentError

PRESETS = ("centered-euler", "lax-friedrichs", "upwind", "lax-wendroff", "limiter")
OFFSETS = (-2, -1, 0, 1, 2)


@dataclass(frozen=True)
class Velocity:
    v: float | np.ndarray

    @property
    def v_plus(self):
        return np.maximum(self.v, 0.0)

    @property
    def v_minus(self):
        return np.maximum(-np.asarray(self.v, dtype=float), 0.0)

    @property
    def speed(self):
        return np.abs(self.v)


@dataclass(frozen=True)
class LimiterSet:
    """Constant flux limiters of the five-point upwind scheme.

    Sign constraints: ``gamma1, gamma2 <= 0`` and ``gamma3, gamma4 >= 0``.
    Fields may be arrays (one value per cell), e.g. when the edge cells of
    a cone drop their next-nearest term.
    """

    gamma1: float | np.ndarray = 0.0
    gamma2: float | np.ndarray = 0.0
    gamma3: float | np.ndarray = 0.0
    gamma4: float | np.ndarray = 0.0

    def __post_init__(self) -> None:
        checks = (
            ("gamma1", self.gamma1, np.less_equal),
            ("gamma2", self.gamma2, np.less_equal),
            ("gamma3", self.gamma3, np.greater_equal),
            ("gamma4", self.gamma4, np.greater_equal),
        )
        for name, value, ok in checks:
            arr = np.asarray(value, dtype=float)
            if not np.all(np.isfinite(arr)):
                raise InvalidArgumentError(f"{name} must be finite")
            if not np.all(ok(arr, 0.0)):
                side = "non-positive" if ok is np.less_equal else "non-negative"
                raise InvalidArgumentError(f"{name} must be {side}, got {value!r}")

    def as_tuple(self) -> tuple:
        return (self.gamma1, self.gamma2, self.gamma3, self.gamma4)


@dataclass(frozen=True)
class FluxCoefficients:
    b_prev: float | np.ndarray
    b_center: float | np.ndarray
    b_next: float | np.ndarray
    b_far: float | np.ndarray
    bt_prev: float | np.ndarray | None = None
    bt_far: float | np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.bt_prev is None:
            object.__setattr__(self, "bt_prev", self.b_prev)
        if self.bt_far is None:
            object.__setattr__(self, "bt_far", self.b_far)

    def total(self):
        """Plain sum ``b_prev + b_center + b_next + b_far``."""
        return self.b_prev + self.b_center + self.b_next + self.b_far


@dataclass(frozen=True)
class StencilWeights:
    """Multipliers of ``u_{j-2}, u_{j-1}, u_j, u_{j+1}, u_{j+2}``."""

    w_m2: float | np.ndarray
    w_m1: float | np.ndarray
    w_0: float | np.ndarray
    w_p1: float | np.ndarray
    w_p2: float | np.ndarray

    def as_array(self) -> np.ndarray:
        return np.stack(np.broadcast_arrays(*map(np.asarray, self.as_tuple()))).astype(float)

    def as_tuple(self) -> tuple:
        return (self.w_m2, self.w_m1, self.w_0, self.w_p1, self.w_p2)

    def total(self):
        return self.w_m2 + self.w_m1 + self.w_0 + self.w_p1 + self.w_p2


def weights_from_fluxes(fc: FluxCoefficients, lam: float) -> StencilWeights:
    """Expand flux coefficients into stencil weights of the explicit update."""
    return StencilWeights(
        w_m2=lam * fc.bt_prev,
        w_m1=lam * (fc.b_center - fc.b_prev),
        w_0=1.0 - lam * (fc.b_center - fc.b_next),
        w_p1=lam * (fc.b_far - fc.b_next),
        w_p2=0.0 - lam * fc.bt_far,
    )


def _require_lambda(lam) -> None:
    if not np.all(np.asarray(lam) > 0):
        raise InvalidArgumentError(f"lambda = tau/h must be positive, got {lam!r}")


def preset_centered_euler(a) -> FluxCoefficients:
    half = 0.5 * a
    return FluxCoefficients(0.0 * half, half, half, 0.0 * half)


def preset_lax_friedrichs(a, lam) -> FluxCoefficients:
    _require_lambda(lam)
    half = 0.5 * a
    damp = 0.5 / lam
    return FluxCoefficients(0.0 * half, half + damp, half - damp, 0.0 * half)


def preset_upwind(a) -> FluxCoefficients:
    mag = np.abs(a)
    return FluxCoefficients(0.0 * mag, 0.5 * (a + mag), 0.5 * (a - mag), 0.0 * mag)


def preset_lax_wendroff(a, lam) -> FluxCoefficients:
    _require_lambda(lam)
    half = 0.5 * a
    corr = 0.5 * lam * a * a
    return FluxCoefficients(0.0 * half, half + corr, half - corr, 0.0 * half)


def preset_limiter_scheme(vel: Velocity, lim: LimiterSet) -> FluxCoefficients:
    """Flux coefficients of the five-point upwind scheme with constant limiters.

    The coefficients are chosen so that the assembled stencil is::

        u_{i-2}: -lam v+ g2
        u_{i-1}:  lam [v+ (1 + g2) + v- g4]
        u_i    :  1 - lam [|v| + v- g4 - v+ g1]
        u_{i+1}:  lam [v- (1 - g3) - v+ g1]
        u_{i+2}:  lam v- g3

    ``b_next`` follows from the centre weight and ``b_far`` from the
    ``u_{i+1}`` weight; the two tilde coefficients carry the outer weights.
    For ``g2 = g3 = 0`` this coincides with the upwind preset.
    """
    if not isinstance(lim, LimiterSet):
        raise InvalidArgumentError("limiters must be a LimiterSet")
    g1, g2, g3, g4 = lim.as_tuple()
    vp, vm, speed = vel.v_plus, vel.v_minus, vel.speed
    b_center = vp * (1.0 + g2) + vm * g4
    b_next = vp * (1.0 + g1 + g2) - speed
    b_far = vp * g2 - vm * g3
    return FluxCoefficients(
        b_prev=0.0 * b_center,
        b_center=b_center,
        b_next=b_next,
        b_far=b_far,
        bt_prev=0.0 - vp * g2,
        bt_far=0.0 - vm * g3,
    )


def limiter_balance_residual(vel: Velocity, lim: LimiterSet):
    """``v+ (1 + 2 g2) + v- (1 - 2 g3) - |v|``.

    Zero whenever ``g2 = g3 = 0``.  Then ``b_next`` read off the u_{i-1}
    weight and the one read off the u_{i+1} weight coincide.
    """
    return vel.v_plus * (1.0 + 2.0 * lim.gamma2) + vel.v_minus * (1.0 - 2.0 * lim.gamma3) - vel.speed


def step(u, fc: FluxCoefficients, lam: float, boundary: str = "periodic", source=None, tau=None) -> np.ndarray:
    """Advance one explicit step.

    Parameters
    ----------
    u : array_like
        Current state.
    fc : FluxCoefficients
        Scalars or per-cell arrays, one entry per *output* cell.
    lam : float
        Courant ratio ``tau / h``.
    boundary : {"periodic", "cone"}
        ``"cone"`` returns the next cone layer, two entries shorter; the edge
        cells must not carry a next-nearest weight.
    source : array_like, optional
        Forcing evaluated at the output cells; adds ``tau * source``.
    tau : float, optional
        Required with ``source``.
    """
    u = np.asarray(u, dtype=float)
    w = weights_from_fluxes(fc, lam)
    if boundary == "periodic":
        if u.size < 5:
            raise InvalidArgumentError("periodic state needs at least 5 cells")
        m2, m1, c, p1, p2 = (np.roll(u, s) for s in (2, 1, 0, -1, -2))
    elif boundary == "cone":
        if u.size < 3:
            raise InvalidArgumentError("cone layer needs at least 3 points")
        c = u[1:-1]
        m1, p1 = u[:-2], u[2:]
        m2 = np.concatenate(([0.0], u[:-3]))
        p2 = np.concatenate((u[3:], [0.0]))
        w_m2 = np.broadcast_to(w.w_m2, c.shape)
        w_p2 = np.broadcast_to(w.w_p2, c.shape)
        if w_m2[0] != 0.0 or w_p2[-1] != 0.0:
            raise InvalidArgumentError("next-nearest weight at a cone edge must vanish")
    else:
        raise InvalidArgumentError(f"unknown boundary mode {boundary!r}")
    out = w.w_m2 * m2 + w.w_m1 * m1 + w.w_0 * c + w.w_p1 * p1 + w.w_p2 * p2
    out = np.broadcast_to(out, c.shape).astype(float)
    if source is not None:
        if tau is None:
            raise InvalidArgumentError("tau is required when a source is given")
        out = out + tau * np.asarray(source, dtype=float)
    return out


def numerical_flux(u, fc: FluxCoefficients) -> tuple[np.ndarray, np.ndarray]:
    """Right and left interface fluxes of every cell on a periodic state."""
    u = np.asarray(u, dtype=float)
    m2, m1, c, p1, p2 = (np.roll(u, s) for s in (2, 1, 0, -1, -2))
    right = fc.b_prev * m1 + fc.b_center * c + fc.b_next * p1 + fc.bt_far * p2
    left = fc.bt_prev * m2 + fc.b_center * m1 + fc.b_next * c + fc.b_far * p1
    return right, left


def flux_difference_step(u, fc: FluxCoefficients, lam: float) -> np.ndarray:
    """Conservative form ``u - lam (h_{j+1/2} - h_{j-1/2})`` on a periodic state."""
    right, left = numerical_flux(u, fc)
    return np.asarray(u, dtype=float) - lam * (right - left)


@dataclass(frozen=True)
class Scheme:
    """A named preset together with the velocity information it needs.

    For a linear law the velocity is the constant ``a``.  With ``speed`` set
    (``a(u) = F'(u)``) the coefficients are rebuilt every step from the
    current state.  ``averaging="mean"`` evaluates them at
    ``(a(u_{j-1}) + a(u_j)) / 2``; ``"cell"`` freezes them at ``a(u_j)``.
    """

    name: str
    a: float = 1.0
    limiters: LimiterSet = field(default_factory=LimiterSet)
    speed: Callable | None = None
    averaging: str = "mean"

    def __post_init__(self) -> None:
        if self.name not in PRESETS:
            raise InvalidArgumentError(f"unknown scheme {self.name!r}; expected one of {PRESETS}")
        if self.averaging not in ("mean", "cell"):
            raise InvalidArgumentError(f"unknown averaging {self.averaging!r}")

    @property
    def state_dependent(self) -> bool:
        return self.speed is not None

    def fluxes(self, lam, v=None, limiters: LimiterSet | None = None) -> FluxCoefficients:
        v = self.a if v is None else v
        if self.name == "centered-euler":
            return preset_centered_euler(v)
        if self.name == "lax-friedrichs":
            return preset_lax_friedrichs(v, lam)
        if self.name == "upwind":
            return preset_upwind(v)
        if self.name == "lax-wendroff":
            return preset_lax_wendroff(v, lam)
        return preset_limiter_scheme(Velocity(v), limiters or self.limiters)

    def weights(self, lam, v=None) -> StencilWeights:
        return weights_from_fluxes(self.fluxes(lam, v), lam)

    def cell_velocity(self, u, boundary: str = "periodic") -> np.ndarray:
        """Velocity assigned to every output cell of one step from state ``u``."""
        u = np.asarray(u, dtype=float)
        v = np.full(u.shape, float(self.a)) if self.speed is None else np.asarray(self.speed(u), dtype=float)
        if boundary == "periodic":
            return 0.5 * (np.roll(v, 1) + v) if self.averaging == "mean" else v
        return 0.5 * (v[:-2] + v[1:-1]) if self.averaging == "mean" else v[1:-1]

    def cell_fluxes(self, u, lam, boundary: str = "periodic") -> FluxCoefficients:
        v = self.cell_velocity(u, boundary)
        if self.name == "limiter" and boundary == "cone":
            g1, g2, g3, g4 = (np.full(v.shape, float(g)) for g in self.limiters.as_tuple())
            g2[0] = 0.0
            g3[-1] = 0.0
            return self.fluxes(lam, v, LimiterSet(g1, g2, g3, g4))
        return self.fluxes(lam, v)

    def cell_weights(self, u, lam, boundary: str = "periodic") -> StencilWeights:
        return weights_from_fluxes(self.cell_fluxes(u, lam, boundary), lam)

    def advance(self, u, lam, boundary: str = "periodic", source=None, tau=None) -> np.ndarray:
        return step(u, self.cell_fluxes(u, lam, boundary), lam, boundary, source, tau)
