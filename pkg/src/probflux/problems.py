"""Scalar conservation laws, Riemann data and exact-solution oracles."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidArgumentError, UnsupportedProblemError


@dataclass(frozen=True)
class ConservationLaw:
    name: str
    flux: Callable
    speed: Callable
    linear_speed: float | None = None

    def derivative_gap(self, samples, eps: float = 1e-6) -> float:
        """Max gap between ``speed`` and a centred difference of ``flux``."""
        u = np.asarray(samples, dtype=float)
        fd = (self.flux(u + eps) - self.flux(u - eps)) / (2 * eps)
        return float(np.max(np.abs(fd - self.speed(u))))


def linear_advection(a: float) -> ConservationLaw:
    a = float(a)
    return ConservationLaw(
        "advection",
        flux=lambda u: a * np.asarray(u, dtype=float),
        speed=lambda u: np.full(np.shape(u), a),
        linear_speed=a,
    )


def burgers() -> ConservationLaw:
    return ConservationLaw(
        "burgers",
        flux=lambda u: 0.5 * np.asarray(u, dtype=float) ** 2,
        speed=lambda u: np.asarray(u, dtype=float),
    )


@dataclass(frozen=True)
class CauchyProblem:
    law: ConservationLaw
    u0: Callable
    domain: tuple[float, float]
    horizon: float

    def __post_init__(self) -> None:
        if not self.horizon > 0:
            raise InvalidArgumentError("horizon must be positive")
        if not self.domain[1] > self.domain[0]:
            raise InvalidArgumentError("empty domain")


@dataclass(frozen=True)
class RiemannProblem:
    law: ConservationLaw
    u_left: float
    u_right: float
    x_jump: float = 0.0

    def __post_init__(self) -> None:
        if self.u_left == self.u_right:
            raise InvalidArgumentError("Riemann data needs u_left != u_right")

    def u0(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < self.x_jump, self.u_left, self.u_right)


def rankine_hugoniot_speed(rp: RiemannProblem) -> float:
    if rp.u_left == rp.u_right:
        raise InvalidArgumentError("jump speed undefined for equal states")
    f = rp.law.flux
    return float((f(rp.u_right) - f(rp.u_left)) / (rp.u_right - rp.u_left))


def entropy_admissible(rp: RiemannProblem) -> bool:
    """Lax condition ``a(u_right) < s < a(u_left)`` with strict inequalities.

    A contact (linear flux) fails it; see :func:`classify_discontinuity`.
    """
    s = rankine_hugoniot_speed(rp)
    return bool(rp.law.speed(rp.u_right) < s < rp.law.speed(rp.u_left))


def classify_discontinuity(rp: RiemannProblem) -> str:
    """``"shock"``, ``"contact"`` or ``"rarefaction"``."""
    if entropy_admissible(rp):
        return "shock"
    a_l, a_r = float(rp.law.speed(rp.u_left)), float(rp.law.speed(rp.u_right))
    return "contact" if a_l == a_r else "rarefaction"


def exact_solution(problem, x, t: float):
    """Closed-form solution of linear advection or Burgers Riemann data.

    ``problem`` is a :class:`CauchyProblem` with a linear law (any
    profile) or a :class:`RiemannProblem` for linear advection or Burgers.
    """
    x = np.asarray(x, dtype=float)
    law = problem.law
    if law.linear_speed is not None:
        return np.asarray(problem.u0(x - law.linear_speed * t), dtype=float)
    if isinstance(problem, RiemannProblem) and law.name == "burgers":
        ul, ur, x0 = problem.u_left, problem.u_right, problem.x_jump
        if t <= 0:
            return problem.u0(x)
        if ul > ur:
            s = rankine_hugoniot_speed(problem)
            return np.where(x < x0 + s * t, ul, ur)
        xi = (x - x0) / t
        return np.clip(xi, ul, ur)
    raise UnsupportedProblemError(f"no exact solution for {law.name} with this initial data")


def l1_error(numeric, exact, h: float) -> float:
    numeric = np.asarray(numeric, dtype=float)
    exact = np.asarray(exact, dtype=float)
    if numeric.shape != exact.shape:
        raise InvalidArgumentError(f"length mismatch: {numeric.shape} vs {exact.shape}")
    return float(h * np.sum(np.abs(numeric - exact)))


def observed_orders(hs, errors) -> list[float]:
    """``log(e_k / e_{k+1}) / log(h_k / h_{k+1})`` for consecutive levels."""
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    return list(np.log(errors[:-1] / errors[1:]) / np.log(hs[:-1] / hs[1:]))


def shock_position(x, u, level: float) -> float:
    """First crossing of ``level`` going left to right, linearly interpolated."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float) - level
    idx = np.nonzero(np.sign(u[:-1]) != np.sign(u[1:]))[0]
    if idx.size == 0:
        raise InvalidArgumentError("profile never crosses the given level")
    i = idx[0]
    return float(x[i] - u[i] * (x[i + 1] - x[i]) / (u[i + 1] - u[i]))


# initial profiles used by the CLI and the tests

def sine_profile(period: float = 1.0, amplitude: float = 1.0, offset: float = 0.0):
    return lambda x: offset + amplitude * np.sin(2 * np.pi * np.asarray(x, dtype=float) / period)


def gauss_profile(center: float = 0.0, width: float = 0.1, amplitude: float = 1.0):
    return lambda x: amplitude * np.exp(-((np.asarray(x, dtype=float) - center) / width) ** 2)
