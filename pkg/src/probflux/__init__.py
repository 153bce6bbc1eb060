"""Explicit conservation-law schemes and the Markov chains behind them."""

from .errors import InconsistencyError, InvalidArgumentError, StabilityError, UnsupportedProblemError
from .grid import ConeGrid, PeriodicGrid, build_cone, build_periodic
from .markov import check_stability, evolve_deterministic, simulate_mc, stability_summary, transition_table
from .schemes import LimiterSet, Scheme, Velocity

__version__ = "0.1.0"

__all__ = [
    "ConeGrid", "PeriodicGrid", "build_cone", "build_periodic",
    "LimiterSet", "Scheme", "Velocity",
    "check_stability", "evolve_deterministic", "simulate_mc", "stability_summary", "transition_table",
    "InconsistencyError", "InvalidArgumentError", "StabilityError", "UnsupportedProblemError",
]
