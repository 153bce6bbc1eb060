"""Explicit schemes read as Markov chains.

The five stencil weights of a scheme are the probabilities that a chain
sitting at a point of the new time layer jumps to ``x - 2h .. x + 2h`` in the
old layer.  The update is then the expectation of the old data under that
jump law, and it can be evaluated either deterministically or by simulating
the chain backward from a query point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import rng
from .errors import InconsistencyError, InvalidArgumentError, StabilityError
from .grid import ConeGrid, PeriodicGrid
from .schemes import OFFSETS, LimiterSet, Scheme, StencilWeights, Velocity, step, weights_from_fluxes

PROB_TOL = 1e-14
SUM_TOL = 1e-9


@dataclass(frozen=True)
class TransitionTable:
    p_m2: float | np.ndarray
    p_m1: float | np.ndarray
    p_0: float | np.ndarray
    p_p1: float | np.ndarray
    p_p2: float | np.ndarray

    def as_tuple(self) -> tuple:
        return (self.p_m2, self.p_m1, self.p_0, self.p_p1, self.p_p2)

    def as_array(self) -> np.ndarray:
        return np.stack(np.broadcast_arrays(*map(np.asarray, self.as_tuple()))).astype(float)

    def total(self):
        return self.p_m2 + self.p_m1 + self.p_0 + self.p_p1 + self.p_p2

    def violated_entries(self, tol: float = PROB_TOL) -> list[tuple[int, float]]:
        """``(offset, most negative value)`` for every offset below ``-tol``."""
        out = []
        for k, p in zip(OFFSETS, self.as_tuple()):
            low = float(np.min(p))
            if low < -tol:
                out.append((k, low))
        return out

    @property
    def probabilistic(self) -> bool:
        return not self.violated_entries()


def transition_table(w: StencilWeights) -> TransitionTable:
    dev = np.max(np.abs(np.asarray(w.total(), dtype=float) - 1.0))
    if dev > SUM_TOL:
        raise InconsistencyError(f"stencil weights sum to 1{dev:+.3e}, not a transition law")
    return TransitionTable(*w.as_tuple())


@dataclass(frozen=True)
class ChainMoments:
    drift: float
    second_moment: float
    covariance: float
    tau: float

    @property
    def v_mc(self) -> float:
        return self.drift / self.tau


def chain_moments(tt: TransitionTable, h: float, tau: float) -> ChainMoments:
    """First two moments of one chain jump, in length units."""
    drift = h * (-tt.p_m1 + tt.p_p1 - 2.0 * tt.p_m2 + 2.0 * tt.p_p2)
    second = h * h * (tt.p_m1 + tt.p_p1 + 4.0 * tt.p_m2 + 4.0 * tt.p_p2)
    return ChainMoments(drift, second, second - drift * drift, tau)


# closed forms --------------------------------------------------------------

def _v(scheme: Scheme, v):
    return float(scheme.a if v is None else v)


def symbolic_chain_velocity(scheme: Scheme, v=None) -> float:
    """Chain velocity ``E[jump] / tau`` predicted by the scheme's closed form.

    Every linear preset drifts against the flow (``-v``).  The limiter scheme
    drifts at ``v- (1 - g4 + g3) - v+ (1 + g1 - g2)``.
    """
    v = _v(scheme, v)
    if scheme.name != "limiter":
        return -v
    g1, g2, g3, g4 = scheme.limiters.as_tuple()
    vel = Velocity(v)
    return float(vel.v_minus * (1 - g4 + g3) - vel.v_plus * (1 + g1 - g2))


def symbolic_second_moment(scheme: Scheme, tau: float, h: float, v=None) -> float:
    v = _v(scheme, v)
    if scheme.name == "upwind":
        return tau * h * abs(v)
    if scheme.name == "lax-friedrichs":
        return h * h
    if scheme.name == "lax-wendroff":
        return tau * tau * v * v
    if scheme.name == "centered-euler":
        return 0.0
    g1, g2, g3, g4 = scheme.limiters.as_tuple()
    vel = Velocity(v)
    spread = vel.v_plus * (1 - g1 - 3 * g2) + vel.v_minus * (1 + g4 + 3 * g3)
    return float(tau * h * spread)


def symbolic_covariance(scheme: Scheme, tau: float, h: float, v=None) -> float:
    vmc = symbolic_chain_velocity(scheme, v)
    return symbolic_second_moment(scheme, tau, h, v) - (tau * vmc) ** 2


def local_consistency_residual(moments: ChainMoments, scheme: Scheme, tau: float, h: float,
                               v=None, reference: str = "scheme") -> float:
    """Normalized first-moment mismatch ``|drift - target * tau| / (tau + h)``.

    ``reference`` picks the target velocity: ``"scheme"`` (the closed-form
    chain velocity), ``"+v"`` or ``"-v"``.  The two sign conventions found in
    the literature for this condition disagree, so both are exposed.
    """
    if reference == "scheme":
        target = symbolic_chain_velocity(scheme, v)
    elif reference == "+v":
        target = _v(scheme, v)
    elif reference == "-v":
        target = -_v(scheme, v)
    else:
        raise InvalidArgumentError(f"unknown reference {reference!r}")
    return abs(moments.drift - target * tau) / (tau + h)


def global_consistency_residual(moments: ChainMoments, scheme: Scheme, tau: float, h: float, v=None) -> float:
    """Normalized covariance mismatch against the closed form."""
    return abs(moments.covariance - symbolic_covariance(scheme, tau, h, v)) / (tau + h)


def flux_sum(scheme: Scheme, lam: float, v=None) -> float:
    """Aggregate ``sum_k b_k`` reported by the local consistency condition.

    For the limiter scheme this is the closed form
    ``v+ [2 (1 + 2 g2) + g1 + g2] + v- (g3 + g4) - |v|``; for the other
    presets the plain coefficient sum (``a`` for all four).
    """
    v = _v(scheme, v)
    if scheme.name == "limiter":
        g1, g2, g3, g4 = scheme.limiters.as_tuple()
        vel = Velocity(v)
        return float(vel.v_plus * (2 * (1 + 2 * g2) + g1 + g2) + vel.v_minus * (g3 + g4) - vel.speed)
    return float(scheme.fluxes(lam, v).total())


def landau_constant(tau: float, h: float, v: float) -> float:
    """Pre-limit value of ``2 tau v / (tau + h)``."""
    return 2.0 * tau * v / (tau + h)


# stability -------------------------------------------------------------------

def _limiter_terms(lim: LimiterSet, v: float):
    g1, g2, g3, g4 = lim.as_tuple()
    vel = Velocity(v)
    vp, vm = float(vel.v_plus), float(vel.v_minus)
    centre = abs(v) + vm * g4 - vp * g1
    left = vp * (1 + g2) + vm * g4
    right = vm * (1 - g3) - vp * g1
    spread = vp * (1 - g1 - 3 * g2) + vm * (1 + g4 + 3 * g3)
    drift = vm * (1 + g3 - g4) - vp * (1 + g1 - g2)
    return centre, left, right, spread, drift


def cfl_bound(scheme: Scheme, v=None) -> float:
    """Largest ``lam`` at which every transition weight is nonnegative.

    ``inf`` when no bound applies, ``0`` when no positive ``lam`` works.  For
    Lax-Wendroff the admissible set is the single point ``1/|v|``.
    """
    v = _v(scheme, v)
    if v == 0.0:
        return math.inf
    if scheme.name in ("upwind", "lax-friedrichs", "lax-wendroff"):
        return 1.0 / abs(v)
    if scheme.name == "centered-euler":
        return 0.0
    centre, left, right, _, _ = _limiter_terms(scheme.limiters, v)
    if left < 0 or right < 0:
        return 0.0
    return math.inf if centre <= 0 else 1.0 / centre


def cfl_bound_numeric(scheme: Scheme, v=None, lam_max: float = 1e6, iters: int = 200) -> float:
    """Bisection for the stability bound, assuming the admissible set is ``(0, bound]``."""
    def ok(lam):
        return min(np.min(p) for p in scheme.weights(lam, v).as_tuple()) >= -PROB_TOL

    lo = 1e-12
    if not ok(lo):
        return 0.0
    hi = 1.0
    while ok(hi):
        lo, hi = hi, 2.0 * hi
        if hi > lam_max:
            return math.inf
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if ok(mid) else (lo, mid)
    return lo


@dataclass(frozen=True)
class StabilityReport:
    probabilistic: bool
    violated_entries: list = field(default_factory=list)
    cfl_bound: float = math.inf
    limiter_feasible: bool | None = None
    covariance_nonnegative: bool = True
    covariance_bound: float | None = None
    lam: float = math.nan


def check_stability(scheme: Scheme, lam: float, v=None) -> StabilityReport:
    """Probabilistic-interpretation verdict for ``scheme`` at Courant ratio ``lam``.

    For the limiter preset ``limiter_feasible`` combines the nonnegativity
    of all five weights with the covariance bound
    ``lam <= spread / drift**2``.
    """
    v = _v(scheme, v)
    w = scheme.weights(lam, v)
    tt = TransitionTable(*(float(p) for p in w.as_tuple()))
    violated = tt.violated_entries()
    mom = chain_moments(tt, 1.0, lam)
    cov_ok = bool(mom.covariance >= -1e-12)
    feasible = None
    cov_bound = None
    if scheme.name == "limiter":
        centre, left, right, spread, drift = _limiter_terms(scheme.limiters, v)
        cov_bound = math.inf if drift == 0 else spread / drift ** 2
        feasible = bool(lam * centre <= 1 + PROB_TOL and left >= 0 and right >= 0
                        and lam <= cov_bound * (1 + 1e-12))
    return StabilityReport(
        probabilistic=not violated,
        violated_entries=violated,
        cfl_bound=cfl_bound(scheme, v),
        limiter_feasible=feasible,
        covariance_nonnegative=cov_ok,
        covariance_bound=cov_bound,
        lam=float(lam),
    )


def _finite(x):
    return None if x is None or not math.isfinite(x) else float(x)


def stability_summary(scheme: Scheme, tau: float, h: float, v=None) -> dict:
    """JSON-ready stability and consistency record for one scheme."""
    lam = tau / h
    v = _v(scheme, v)
    report = check_stability(scheme, lam, v)
    w = scheme.weights(lam, v)
    mom = chain_moments(TransitionTable(*(float(p) for p in w.as_tuple())), h, tau)
    return {
        "scheme": scheme.name,
        "velocity": v,
        "lambda": lam,
        "tau": tau,
        "h": h,
        "probabilistic": report.probabilistic,
        "violated_entries": [[k, val] for k, val in report.violated_entries],
        "cfl_bound": _finite(report.cfl_bound),
        "weights": [float(p) for p in w.as_tuple()],
        "drift": float(mom.drift),
        "second_moment": float(mom.second_moment),
        "covariance": float(mom.covariance),
        "v_mc": float(mom.v_mc),
        "local_residual": local_consistency_residual(mom, scheme, tau, h, v),
        "local_residual_plus_v": local_consistency_residual(mom, scheme, tau, h, v, "+v"),
        "local_residual_minus_v": local_consistency_residual(mom, scheme, tau, h, v, "-v"),
        "global_residual": global_consistency_residual(mom, scheme, tau, h, v),
        "flux_sum": flux_sum(scheme, lam, v),
        "landau_constant": landau_constant(tau, h, v),
        "limiter_feasible": report.limiter_feasible,
        "covariance_nonnegative": report.covariance_nonnegative,
        "covariance_bound": _finite(report.covariance_bound),
    }


# evolution -------------------------------------------------------------------

def _boundary(grid) -> str:
    if isinstance(grid, ConeGrid):
        return "cone"
    if isinstance(grid, PeriodicGrid):
        return "periodic"
    raise InvalidArgumentError(f"unsupported grid {type(grid).__name__}")


def _times(grid, steps: int) -> list[float]:
    if isinstance(grid, ConeGrid):
        return list(grid.times[: steps + 1])
    out = [0.0]
    for _ in range(steps):
        out.append(out[-1] + grid.tau)
    return out


def _layer_x(grid, j: int) -> np.ndarray:
    return grid.layer_x(j) if isinstance(grid, ConeGrid) else grid.x


def _check_steps(grid, d0, steps):
    if isinstance(grid, ConeGrid):
        steps = grid.n if steps is None else steps
        if not 0 <= steps <= grid.n:
            raise InvalidArgumentError(f"steps must lie in 0..{grid.n}")
        if d0.size != grid.N + 1:
            raise InvalidArgumentError(f"initial layer needs {grid.N + 1} values, got {d0.size}")
    else:
        if steps is None or steps < 0:
            raise InvalidArgumentError("periodic evolution needs a non-negative step count")
        if d0.size != grid.m:
            raise InvalidArgumentError(f"initial state needs {grid.m} values, got {d0.size}")
    return int(steps)


def _strict_check(scheme: Scheme, w: StencilWeights, v_cells: np.ndarray, lam: float) -> None:
    tt = TransitionTable(*w.as_tuple())
    bad = tt.violated_entries()
    if bad:
        arr = tt.as_array()
        worst = int(np.argmin(np.broadcast_to(arr.min(axis=0), v_cells.shape)))
        report = check_stability(scheme, lam, float(v_cells[worst]))
        if report.probabilistic:
            # the violation comes from per-cell limiter edits, not the bulk scheme
            report = StabilityReport(False, bad, report.cfl_bound, report.limiter_feasible,
                                     report.covariance_nonnegative, report.covariance_bound, lam)
        raise StabilityError(f"scheme {scheme.name!r} is not probabilistic at lambda={lam:g}", report)


def evolve_deterministic(d0, scheme: Scheme, grid, steps: int | None = None, strict: bool = False,
                         source: Callable | None = None) -> list[np.ndarray]:
    """Run the explicit update and return every layer, starting with ``d0``.

    ``source(t, x, u)`` adds ``tau * source`` evaluated at the old time level
    and the old value of the same cell.
    """
    d0 = np.asarray(d0, dtype=float)
    steps = _check_steps(grid, d0, steps)
    boundary = _boundary(grid)
    times = _times(grid, steps)
    layers = [d0]
    for j in range(steps):
        u = layers[-1]
        lam = grid.lam(j)
        tau = lam * grid.h if boundary == "periodic" else grid.tau_levels[j]
        fc = scheme.cell_fluxes(u, lam, boundary)
        if strict:
            _strict_check(scheme, weights_from_fluxes(fc, lam), scheme.cell_velocity(u, boundary), lam)
        src = None
        if source is not None:
            inner = u[1:-1] if boundary == "cone" else u
            src = np.broadcast_to(source(times[j], _layer_x(grid, j + 1), inner), inner.shape)
        layers.append(step(u, fc, lam, boundary, src, tau))
    return layers


def transition_matrix(u, scheme: Scheme, lam: float, boundary: str = "periodic") -> np.ndarray:
    """Dense matrix mapping a layer to the next one, built from transition tables."""
    u = np.asarray(u, dtype=float)
    tt = transition_table(scheme.cell_weights(u, lam, boundary))
    n_in = u.size
    n_out = n_in if boundary == "periodic" else n_in - 2
    probs = np.broadcast_to(tt.as_array(), (5, n_out))
    mat = np.zeros((n_out, n_in))
    rows = np.arange(n_out)
    centre = rows if boundary == "periodic" else rows + 1
    for r, k in enumerate(OFFSETS):
        cols = centre + k
        if boundary == "periodic":
            cols = np.mod(cols, n_in)
            np.add.at(mat, (rows, cols), probs[r])
        else:
            ok = (cols >= 0) & (cols < n_in)
            if np.any(probs[r][~ok] != 0.0):
                raise InvalidArgumentError("stencil leaves the cone")
            np.add.at(mat, (rows[ok], cols[ok]), probs[r][ok])
    return mat


# Monte Carlo -----------------------------------------------------------------

@dataclass(frozen=True)
class MCResult:
    estimate: float
    std_error: float
    n_paths: int


def _thresholds(probs: np.ndarray) -> np.ndarray:
    """Inverse-CDF cut points, shape ``(cells, 4)``.

    A cut point after which no probability mass remains is pushed to 2 so a
    uniform draw in [0, 1) can never select a zero-probability jump.
    """
    p = np.clip(probs.T, 0.0, None)
    p = p / p.sum(axis=1, keepdims=True)
    cum = np.cumsum(p, axis=1)[:, :4]
    tail = np.cumsum(p[:, ::-1], axis=1)[:, ::-1][:, 1:]
    return np.where(tail > 0.0, cum, 2.0)


def simulate_mc(target: tuple[int, int], d0, scheme: Scheme, grid, n_paths: int, seed: int,
                workers: int = 1, source: Callable | None = None) -> MCResult:
    """Estimate one value of the deterministic evolution by backward chains.

    Each path starts at ``target = (layer, index)``, jumps down one layer at
    a time according to the transition table of the cell it sits on, and
    scores ``d0`` at its landing site (plus ``tau * source`` picked up along
    the way).  ``index`` is the global point index: ``layer..2n-layer`` on a
    cone, ``0..m-1`` on a ring.  Coefficients that depend on the solution
    are frozen along the deterministic layers.
    """
    d0 = np.asarray(d0, dtype=float)
    seed = rng.check_seed(seed)
    if int(n_paths) != n_paths or n_paths < 1:
        raise InvalidArgumentError("n_paths must be a positive integer")
    layer, index = (int(t) for t in target)
    boundary = _boundary(grid)
    _check_steps(grid, d0, layer)
    if boundary == "cone" and not layer <= index <= grid.N - layer:
        raise InvalidArgumentError(f"index {index} is not in cone layer {layer}")
    if boundary == "periodic" and not 0 <= index < grid.m:
        raise InvalidArgumentError(f"index {index} outside 0..{grid.m - 1}")

    frozen = None
    if scheme.state_dependent or source is not None:
        frozen = evolve_deterministic(d0, scheme, grid, layer, source=None if source is None else source)
    times = _times(grid, layer)
    cuts, bonus = [], []
    for j in range(layer):
        size = d0.size - 2 * j if boundary == "cone" else d0.size
        u = frozen[j] if frozen is not None else np.zeros(size)
        lam = grid.lam(j)
        w = scheme.cell_weights(u, lam, boundary)
        tt = transition_table(w)
        out_size = size - 2 if boundary == "cone" else size
        probs = np.broadcast_to(tt.as_array(), (5, out_size))
        if np.min(probs) < -PROB_TOL:
            v_cells = scheme.cell_velocity(u, boundary)
            worst = int(np.argmin(probs.min(axis=0)))
            report = check_stability(scheme, lam, float(v_cells[worst]))
            raise StabilityError(f"Monte Carlo needs nonnegative weights (lambda={lam:g})", report)
        cuts.append(_thresholds(probs))
        if source is not None:
            tau = grid.tau_levels[j] if boundary == "cone" else grid.tau
            inner = u[1:-1] if boundary == "cone" else u
            bonus.append(tau * np.broadcast_to(source(times[j], _layer_x(grid, j + 1), inner), inner.shape))

    def run_block(block: int, start: int, stop: int) -> np.ndarray:
        gen = rng.block_generator(seed, block)
        count = stop - start
        pos = np.full(count, index, dtype=np.int64)
        acc = np.zeros(count)
        for j in range(layer - 1, -1, -1):
            draws = gen.random(rng.BLOCK_SIZE)[:count]
            local = pos - (j + 1) if boundary == "cone" else pos
            if source is not None:
                acc += bonus[j][local]
            jump = (draws[:, None] >= cuts[j][local]).sum(axis=1) - 2
            pos = pos + jump
            if boundary == "periodic":
                pos = np.mod(pos, grid.m)
        return d0[pos] + acc

    samples = rng.run_blocks(run_block, int(n_paths), workers)
    est, err = rng.mean_and_stderr(samples)
    return MCResult(est, err, int(n_paths))
