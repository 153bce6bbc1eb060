"""Closed-form limiters that turn the covariance bound into an equality.

Setting ``spread == drift**2`` (spread and chain drift as in
:func:`probflux.markov.check_stability`) makes the covariance bound
``lam <= spread / drift**2`` read ``lam <= 1``.  With only one of ``v+``,
``v-`` nonzero the equality, divided through by that velocity, is a
quadratic in ``gamma1`` (``v > 0``) or ``gamma4`` (``v < 0``).  The root with
the admissible sign is taken; the trivial root ``0`` that appears for
``gamma2 = 0`` / ``gamma3 = 0`` is never returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidArgumentError
from .schemes import LimiterSet, Velocity


@dataclass(frozen=True)
class LimiterSolution:
    gamma: float
    residual: float
    branch: str


def gamma1_quadratic(gamma1: float, v_plus: float, gamma2: float) -> float:
    """``v+ g1^2 + [2 v+ (1 - g2) + 1] g1 + v+ (1 - g2)^2 + 3 g2 - 1``."""
    c = 1.0 - gamma2
    return v_plus * gamma1 ** 2 + (2.0 * v_plus * c + 1.0) * gamma1 + v_plus * c * c + 3.0 * gamma2 - 1.0


def gamma4_quadratic(gamma4: float, v_minus: float, gamma3: float) -> float:
    """``v- g4^2 - [2 v- (1 + g3) + 1] g4 + v- (1 + g3)^2 - 1 - 3 g3``."""
    c = 1.0 + gamma3
    return v_minus * gamma4 ** 2 - (2.0 * v_minus * c + 1.0) * gamma4 + v_minus * c * c - 1.0 - 3.0 * gamma3


def solve_gamma1(v_plus: float, gamma2: float = 0.0) -> LimiterSolution:
    if not v_plus > 0:
        raise InvalidArgumentError(f"v+ must be positive, got {v_plus!r}; use the v- branch")
    if gamma2 > 0:
        raise InvalidArgumentError(f"gamma2 must be non-positive, got {gamma2!r}")
    disc = 8.0 * v_plus + 1.0 - 16.0 * v_plus * gamma2
    g1 = -1.0 + gamma2 - (math.sqrt(disc) + 1.0) / (2.0 * v_plus)
    return LimiterSolution(g1, gamma1_quadratic(g1, v_plus, gamma2), "minus-root")


def solve_gamma4(v_minus: float, gamma3: float = 0.0) -> LimiterSolution:
    if not v_minus > 0:
        raise InvalidArgumentError(f"v- must be positive, got {v_minus!r}; use the v+ branch")
    if gamma3 < 0:
        raise InvalidArgumentError(f"gamma3 must be non-negative, got {gamma3!r}")
    disc = 8.0 * v_minus + 1.0 + 16.0 * v_minus * gamma3
    g4 = 1.0 + gamma3 + (math.sqrt(disc) + 1.0) / (2.0 * v_minus)
    return LimiterSolution(g4, gamma4_quadratic(g4, v_minus, gamma3), "plus-root")


def stability_equality_residual(vel: Velocity, lim: LimiterSet) -> float:
    """Spread minus squared chain drift; zero for the solved limiters."""
    g1, g2, g3, g4 = lim.as_tuple()
    vp, vm = float(vel.v_plus), float(vel.v_minus)
    lhs = vp * (1 - g1 - 3 * g2) + vm * (1 + g4 + 3 * g3)
    rhs = (vm * (1 + g3 - g4) - vp * (1 + g1 - g2)) ** 2
    return lhs - rhs


def equality_limiters(v: float, gamma2: float = 0.0, gamma3: float = 0.0) -> LimiterSet:
    """Limiter set with the free limiter solved for the sign of ``v``.

    The limiter that multiplies the zero half of the velocity is left at 0.
    """
    if v > 0:
        return LimiterSet(solve_gamma1(v, gamma2).gamma, gamma2, gamma3, 0.0)
    if v < 0:
        return LimiterSet(0.0, gamma2, gamma3, solve_gamma4(-v, gamma3).gamma)
    raise InvalidArgumentError("v = 0 has no limiter equation")
