"""Node systems, the Lagrange basis and the weighted fundamental functions.

All polynomial evaluation goes through the product form
``l_k(t) = prod_{j != k} (t - x_j) / (x_k - x_j)``; nothing is expanded in
monomials.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .weights import Weight, WeightKind


class SystemKind(enum.Enum):
    YN_HALFLINE = "yn"
    HYBRID = "hybrid"
    HERMITE_LINE = "hermite"
    FINITE_INTERVAL = "finite"


_ALLOWED_WEIGHTS = {
    SystemKind.YN_HALFLINE: {WeightKind.EXPONENTIAL, WeightKind.SQRT_EXPONENTIAL},
    SystemKind.HYBRID: {WeightKind.EXPONENTIAL},
    SystemKind.HERMITE_LINE: {WeightKind.HERMITE},
    SystemKind.FINITE_INTERVAL: {WeightKind.UNIT},
}


class NodeError(ValueError):
    """Invalid node system, or a node system paired with the wrong weight."""


@dataclass(frozen=True, eq=False)
class NodeSystem:
    """Strictly increasing nodes ``x_0 < ... < x_n`` of a given system kind."""

    kind: SystemKind
    nodes: np.ndarray

    def __post_init__(self):
        x = np.array(self.nodes, dtype=float).ravel()
        x.flags.writeable = False
        object.__setattr__(self, "nodes", x)
        if x.size < 2:
            raise NodeError("need at least two nodes (n >= 1)")
        if not np.all(np.isfinite(x)):
            raise NodeError("nodes must be finite")
        if np.any(np.diff(x) <= 0):
            raise NodeError("nodes must be strictly increasing")
        if self.kind in (SystemKind.YN_HALFLINE, SystemKind.HYBRID) and x[0] != 0.0:
            raise NodeError("halfline systems fix x_0 = 0")

    @classmethod
    def hybrid(cls, interior) -> NodeSystem:
        """Hybrid system from the free nodes ``x_1 < ... < x_n``."""
        return cls(SystemKind.HYBRID, np.concatenate([[0.0], np.asarray(interior, float)]))

    @property
    def n(self) -> int:
        return self.nodes.size - 1

    @property
    def is_hybrid(self) -> bool:
        return self.kind is SystemKind.HYBRID

    @property
    def free(self) -> np.ndarray:
        """The coordinates of the simplex point (the nodes that may move)."""
        return self.nodes[self.free_indices]

    @property
    def free_indices(self) -> list[int]:
        if self.kind is SystemKind.HERMITE_LINE:
            return list(range(self.n + 1))
        if self.kind is SystemKind.FINITE_INTERVAL:
            return list(range(1, self.n))
        return list(range(1, self.n + 1))

    @property
    def branch_indices(self) -> list[int]:
        """Indices i of the intervals I_i for this system kind."""
        if self.kind is SystemKind.HERMITE_LINE:
            return list(range(self.n + 2))
        if self.kind is SystemKind.FINITE_INTERVAL:
            return list(range(1, self.n + 1))
        return list(range(1, self.n + 2))

    def interval(self, i: int) -> tuple[float, float]:
        """End points of I_i; unbounded ends are +-inf."""
        x = self.nodes
        if i == 0:
            return (-math.inf, float(x[0]))
        if i == self.n + 1:
            return (float(x[-1]), math.inf)
        return (float(x[i - 1]), float(x[i]))

    def interval_of(self, t: float) -> int:
        """Index of an interval containing t (the left one at a shared node)."""
        k = int(np.searchsorted(self.nodes, t, side="left"))
        if k == 0 and self.kind is not SystemKind.HERMITE_LINE:
            return 1
        if k > self.n and self.kind is SystemKind.FINITE_INTERVAL:
            return self.n
        return k

    def with_node(self, j: int, value: float) -> NodeSystem:
        x = self.nodes.copy()
        x[j] = value
        return NodeSystem(self.kind, x)

    def with_free(self, free) -> NodeSystem:
        x = self.nodes.copy()
        x[self.free_indices] = free
        return NodeSystem(self.kind, x)

    def check_weight(self, w: Weight) -> None:
        if w.kind not in _ALLOWED_WEIGHTS[self.kind]:
            raise NodeError(f"{w.kind.value} weight cannot be used with a {self.kind.value} system")
        if w.kind is WeightKind.SQRT_EXPONENTIAL and self.n != 1:
            raise NodeError("exp(-sqrt(t)) is supported only for n = 1")
        if w.kind is WeightKind.UNIT and (self.nodes[0] != w.lower or self.nodes[-1] != w.upper):
            raise NodeError("finite-interval systems interpolate at both end points")

    def __repr__(self) -> str:
        return f"NodeSystem({self.kind.value}, {np.array2string(self.nodes, precision=6)})"


def leading_b(x: NodeSystem) -> np.ndarray:
    """Leading coefficients b_k = prod_{j != k} 1/(x_k - x_j) of the l_k."""
    d = x.nodes[:, None] - x.nodes[None, :]
    np.fill_diagonal(d, 1.0)
    return 1.0 / np.prod(d, axis=1)


def _inverse_gaps(x: NodeSystem) -> np.ndarray:
    d = x.nodes[:, None] - x.nodes[None, :]
    np.fill_diagonal(d, 1.0)
    inv = 1.0 / d
    np.fill_diagonal(inv, 0.0)
    return inv


def ell_all(x: NodeSystem, t, order: int = 0) -> list[np.ndarray]:
    """Values (and up to two t-derivatives) of every l_k at the points t.

    Returns a list of ``order + 1`` arrays of shape ``(n + 1, len(t))``.
    Derivatives follow from the product rule applied factor by factor, so
    the evaluation stays exact at the nodes.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    xs = x.nodes
    m = xs.size
    inv = _inverse_gaps(x)
    p = np.ones((m, t.size))
    dp = np.zeros_like(p) if order >= 1 else None
    ddp = np.zeros_like(p) if order >= 2 else None
    for j in range(m):
        slope = inv[:, j][:, None]
        f = (t[None, :] - xs[j]) * slope
        f[j, :] = 1.0
        if order >= 2:
            ddp = ddp * f + 2.0 * dp * slope
        if order >= 1:
            dp = dp * f + p * slope
        p = p * f
    return [p, dp, ddp][: order + 1]


def eval_ell(x: NodeSystem, k: int, t):
    """The unweighted Lagrange fundamental polynomial l_k(t)."""
    if not 0 <= k <= x.n:
        raise IndexError(f"k={k} out of range 0..{x.n}")
    out = ell_all(x, t)[0][k]
    return float(out[0]) if np.ndim(t) == 0 else out


def weight_ratios(w: Weight, x: NodeSystem, t) -> np.ndarray:
    """w(t)/w(x_k) for all k, shape (n + 1, len(t)), using the extension of w."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    with np.errstate(over="ignore"):
        return np.exp(w.log_weight(t)[None, :] - w.log_weight(x.nodes)[:, None])


def h_all(w: Weight, x: NodeSystem, t, order: int = 0) -> list[np.ndarray]:
    """h_k = (w(t)/w(x_k)) l_k(t) and its t-derivatives for k = 0..n."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    ells = ell_all(x, t, order)
    ratio = weight_ratios(w, x, t)
    out = [ratio * ells[0]]
    if order >= 1:
        d1 = w.log_derivative(t)[None, :]
        out.append(ratio * (d1 * ells[0] + ells[1]))
    if order >= 2:
        d2 = w.log_second_derivative(t)[None, :]
        out.append(ratio * ((d2 + d1 * d1) * ells[0] + 2.0 * d1 * ells[1] + ells[2]))
    return out


def eval_h(w: Weight, x: NodeSystem, k: int, t):
    """The weighted fundamental function h_k(t)."""
    if not 0 <= k <= x.n:
        raise IndexError(f"k={k} out of range 0..{x.n}")
    w.check_domain(t)
    out = h_all(w, x, t)[0][k]
    return float(out[0]) if np.ndim(t) == 0 else out


def eval_h_hybrid_tail(w: Weight, x: NodeSystem, t):
    """h_{n+1}(t) = 1 - sum_k h_k(t), the constant-adjoined basis element."""
    if not x.is_hybrid:
        raise NodeError("h_{n+1} exists only for the hybrid system")
    x.check_weight(w)
    w.check_domain(t)
    out = 1.0 - h_all(w, x, t)[0].sum(axis=0)
    return float(out[0]) if np.ndim(t) == 0 else out


def h_limits_at_infinity(w: Weight, x: NodeSystem) -> np.ndarray:
    """lim_{t -> inf} of h_0..h_n (and h_{n+1} for hybrid), as exact values."""
    if w.kind is WeightKind.UNIT:
        raise NodeError("no interpolation at infinity on a finite interval")
    limits = np.zeros(x.n + 1)
    if x.is_hybrid:
        limits = np.append(limits, 1.0)
    return limits


def random_free_nodes(n: int, rng: np.random.Generator, x_max: float | None = None) -> np.ndarray:
    """Sorted uniform draws on (0, x_max), x_max defaulting to 4n."""
    x_max = 4.0 * n if x_max is None else x_max
    while True:
        free = np.sort(rng.uniform(0.0, x_max, n))
        if free[0] > 0.0 and np.all(np.diff(free) > 0.0):
            return free


def spaced_free_nodes(n: int, rng: np.random.Generator, gap=(0.25, 1.25)) -> np.ndarray:
    """Nodes with gaps drawn uniformly from ``gap``; keeps zero clusters resolvable."""
    return np.cumsum(rng.uniform(gap[0], gap[1], n))
