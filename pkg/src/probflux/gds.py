"""Two-scale evolution: a slow ODE driven by a fast transported field.

Each slow step first corrects the slow trajectory with an explicit Euler
step ``h <- h + dtau * v0(tau, h, summary(mu))`` and then moves the fast field
``mu`` forward by ``substeps`` steps of a probabilistic scheme.  How ``mu``
enters ``v0`` is left to the caller through ``summary`` (mean by default).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import InvalidArgumentError
from .grid import PeriodicGrid
from .markov import evolve_deterministic
from .schemes import Scheme


@dataclass(frozen=True)
class TwoScaleState:
    h_slow: float
    mu_field: np.ndarray
    tau_slow: float = 0.0
    t_fast: float = 0.0


def evolve_two_scale(init: TwoScaleState, v0: Callable, scheme: Scheme, grid, slow_step: float,
                     substeps: int, n_slow: int, strict: bool = True,
                     summary: Callable = np.mean, source: Callable | None = None) -> list[TwoScaleState]:
    """Return the initial state followed by one state per slow step.

    ``source(t, x, mu)``, if given, is the forcing of the fast equation with
    ``t`` on the fast clock.
    """
    if not isinstance(grid, PeriodicGrid):
        raise InvalidArgumentError("two-scale evolution runs on a PeriodicGrid")
    if int(substeps) != substeps or substeps < 1:
        raise InvalidArgumentError("substeps must be a positive integer")
    if int(n_slow) != n_slow or n_slow < 0:
        raise InvalidArgumentError("n_slow must be a non-negative integer")
    if not slow_step > 0:
        raise InvalidArgumentError("slow_step must be positive")
    traj = [init]
    state = init
    for _ in range(int(n_slow)):
        h = state.h_slow + slow_step * v0(state.tau_slow, state.h_slow, summary(state.mu_field))
        forcing = None
        if source is not None:
            def forcing(t, x, u, _t0=state.t_fast):
                return source(_t0 + t, x, u)
        mu = evolve_deterministic(state.mu_field, scheme, grid, int(substeps), strict=strict, source=forcing)[-1]
        state = replace(state, h_slow=h, mu_field=mu, tau_slow=state.tau_slow + slow_step,
                        t_fast=state.t_fast + substeps * grid.tau)
        traj.append(state)
    return traj


def trajectory_rows(traj: list[TwoScaleState]) -> list[dict]:
    return [
        {
            "tau": s.tau_slow,
            "h_slow": s.h_slow,
            "mu_mean": float(np.mean(s.mu_field)),
            "mu_min": float(np.min(s.mu_field)),
            "mu_max": float(np.max(s.mu_field)),
        }
        for s in traj
    ]
