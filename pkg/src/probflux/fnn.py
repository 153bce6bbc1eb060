"""One-hidden-layer sigmoidal networks and their L1 distance to a target."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import expit

from . import rng
from .errors import InvalidArgumentError


def logistic(t):
    """Logistic sigmoid; tends to 0 at -inf and to 1 at +inf."""
    return expit(t)


@dataclass(frozen=True)
class Node:
    alpha: float
    direction: tuple[float, ...]
    beta: float


@dataclass(frozen=True)
class SigmoidalNetwork:
    alpha0: float
    nodes: tuple[Node, ...] = ()

    def __post_init__(self) -> None:
        dims = {len(node.direction) for node in self.nodes}
        if len(dims) > 1:
            raise InvalidArgumentError(f"nodes disagree on input dimension: {sorted(dims)}")

    @property
    def dim(self) -> int | None:
        return len(self.nodes[0].direction) if self.nodes else None

    @classmethod
    def from_json(cls, data: dict) -> "SigmoidalNetwork":
        """Build from ``{"alpha0": .., "nodes": [{"alpha", "y", "beta"}, ...]}``."""
        nodes = tuple(
            Node(float(rec["alpha"]), tuple(float(c) for c in rec["y"]), float(rec["beta"]))
            for rec in data.get("nodes", [])
        )
        return cls(float(data.get("alpha0", 0.0)), nodes)

    def to_json(self) -> dict:
        return {
            "alpha0": self.alpha0,
            "nodes": [{"alpha": n.alpha, "y": list(n.direction), "beta": n.beta} for n in self.nodes],
        }


def eval_fnn(net: SigmoidalNetwork, x) -> np.ndarray | float:
    """Evaluate ``alpha0 + sum_i alpha_i sigma(y_i . x + beta_i)``.

    ``x`` is one point of shape ``(d,)`` or a batch of shape ``(n, d)``.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    if net.nodes:
        if pts.shape[1] != net.dim:
            raise InvalidArgumentError(f"input has dimension {pts.shape[1]}, network expects {net.dim}")
        Y = np.array([n.direction for n in net.nodes])
        alpha = np.array([n.alpha for n in net.nodes])
        beta = np.array([n.beta for n in net.nodes])
        out = net.alpha0 + logistic(pts @ Y.T + beta) @ alpha
    else:
        out = np.full(pts.shape[0], float(net.alpha0))
    return float(out[0]) if single else out


def l1_distance(net: SigmoidalNetwork, target: Callable, box: Sequence[tuple[float, float]],
                n_samples: int, seed: int, workers: int = 1) -> tuple[float, float]:
    """Monte Carlo estimate of ``||target - net||_1`` over a box.

    Returns ``(estimate, std_error)``; both scale with the box volume.
    ``target`` maps an ``(n, d)`` batch to ``n`` values.
    """
    if int(n_samples) != n_samples or n_samples < 2:
        raise InvalidArgumentError("need at least 2 samples")
    bounds = np.asarray(box, dtype=float).reshape(-1, 2)
    widths = bounds[:, 1] - bounds[:, 0]
    if bounds.shape[0] == 0 or np.any(widths <= 0):
        raise InvalidArgumentError("box must have positive width in every direction")
    volume = float(np.prod(widths))
    dim = bounds.shape[0]
    seed = rng.check_seed(seed)

    def run_block(block: int, start: int, stop: int) -> np.ndarray:
        gen = rng.block_generator(seed, block)
        unit = gen.random((rng.BLOCK_SIZE, dim))[: stop - start]
        pts = bounds[:, 0] + unit * widths
        return np.abs(np.asarray(target(pts), dtype=float) - eval_fnn(net, pts))

    gaps = rng.run_blocks(run_block, int(n_samples), workers)
    mean, err = rng.mean_and_stderr(gaps)
    return volume * mean, volume * err
