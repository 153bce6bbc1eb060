"""Discrete space-time of events.

Two grid flavours are provided:

* :class:`ConeGrid` -- the triangular domain of dependence of an explicit
  scheme.  Layer ``j`` holds indices ``j..2n-j`` at time ``t_j``; each level
  loses one point on either side until only the apex ``i = n`` survives.
* :class:`PeriodicGrid` -- a ring of ``m`` cells, used when many steps are
  needed (conservation and convergence studies) and the cone would run out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError


@dataclass(frozen=True)
class ConeGrid:
    n: int
    h: float
    tau_levels: tuple[float, ...]
    x0: float = 0.0
    t0: float = 0.0

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise InvalidArgumentError(f"cone half-width must be a positive integer, got {self.n!r}")
        if not self.h > 0:
            raise InvalidArgumentError(f"space step must be positive, got {self.h!r}")
        if len(self.tau_levels) != self.n:
            raise InvalidArgumentError("need exactly one time increment per level")
        if any(not tau > 0 for tau in self.tau_levels):
            raise InvalidArgumentError("time increments must be positive")

    @property
    def N(self) -> int:
        return 2 * self.n

    @property
    def times(self) -> tuple[float, ...]:
        # floating-grid rule: t_j = t_{j-1} + tau_{j-1}
        out = [float(self.t0)]
        for tau in self.tau_levels:
            out.append(out[-1] + tau)
        return tuple(out)

    @property
    def apex(self) -> tuple[float, float]:
        return self.x0 + self.n * self.h, self.times[-1]

    def _check_layer(self, j: int) -> None:
        if not 0 <= j <= self.n:
            raise InvalidArgumentError(f"layer {j} outside 0..{self.n}")

    def layer_indices(self, j: int) -> np.ndarray:
        self._check_layer(j)
        return np.arange(j, self.N - j + 1)

    def layer_size(self, j: int) -> int:
        self._check_layer(j)
        return self.N - 2 * j + 1

    def layer_x(self, j: int) -> np.ndarray:
        return self.x0 + self.layer_indices(j) * self.h

    def lam(self, j: int = 0) -> float:
        """Courant ratio tau/h used to go from layer ``j`` to ``j + 1``."""
        return self.tau_levels[j] / self.h


def build_cone(n: int, h: float, tau: float, x0: float = 0.0, t0: float = 0.0) -> ConeGrid:
    """Cone of ``n`` levels with a uniform time increment ``tau``."""
    if not tau > 0:
        raise InvalidArgumentError(f"time step must be positive, got {tau!r}")
    if int(n) != n or n < 1:
        raise InvalidArgumentError(f"cone half-width must be a positive integer, got {n!r}")
    return ConeGrid(int(n), float(h), (float(tau),) * int(n), float(x0), float(t0))


def layer_points(grid: ConeGrid, j: int) -> list[tuple[float, float]]:
    xs = grid.layer_x(j)
    t = grid.times[j]
    return [(float(x), t) for x in xs]


def stencil_contained(grid: ConeGrid, reach: int = 2) -> bool:
    """Check that no stencil read of the cone update leaves the previous layer.

    Every point of layer ``j + 1`` must find its nearest neighbours in layer
    ``j``; next-nearest neighbours (``reach = 2``) are only required where
    they exist, i.e. away from the two edge cells, which drop that term.
    """
    for j in range(grid.n):
        old = set(grid.layer_indices(j).tolist())
        for i in grid.layer_indices(j + 1).tolist():
            if i - 1 not in old or i + 1 not in old:
                return False
            for k in range(2, reach + 1):
                if i - k >= j + 1 and i + k <= grid.N - j - 1:
                    if i - k not in old or i + k not in old:
                        return False
    return True


@dataclass(frozen=True)
class PeriodicGrid:
    m: int
    h: float
    tau: float
    x0: float = 0.0

    def __post_init__(self) -> None:
        if int(self.m) != self.m or self.m < 1:
            raise InvalidArgumentError(f"cell count must be a positive integer, got {self.m!r}")
        if not self.h > 0:
            raise InvalidArgumentError(f"space step must be positive, got {self.h!r}")
        if not self.tau > 0:
            raise InvalidArgumentError(f"time step must be positive, got {self.tau!r}")

    @property
    def period(self) -> float:
        return self.m * self.h

    @property
    def x(self) -> np.ndarray:
        return self.x0 + np.arange(self.m) * self.h

    def lam(self, j: int = 0) -> float:
        return self.tau / self.h

    def wrap(self, i):
        return np.mod(i, self.m)


def build_periodic(m: int, h: float, tau: float, x0: float = 0.0) -> PeriodicGrid:
    return PeriodicGrid(int(m), float(h), float(tau), float(x0))
