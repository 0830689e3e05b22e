"""Gradients of the interval maxima and the matrices A, A_k, Q, Q_k.

For the hybrid system every maximum is interior and
``dm_i/dx_j = -h_j(z_i) * P_i'(x_j)``. Non-hybrid systems can have maxima at
a node, where that formula does not apply; their gradients are taken by
central differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lebesgue_branches import branch, interval_maxima, interval_maximum
from .nodes_basis import NodeSystem, h_all
from .roots_interlacing import DerivRootTable, Verdict, deriv_roots
from .weights import Weight

FD_STEP = 1e-6
SINGULAR_RTOL = 1e-10
_NEAR_Z = 1e-8


class AnalyticGradientUnavailable(ValueError):
    """The maximum sits at an end point, so the stationary-point formula fails."""


class CollisionError(ValueError):
    """A node coincides with a maximum place z_i."""


def partial_m(w: Weight, x: NodeSystem, i: int, j: int, zi: float | None = None) -> float:
    """dm_i/dx_j = -h_j(z_i) * P_i'(x_j) for an interior maximum."""
    if j not in x.free_indices:
        raise IndexError(f"x_{j} is not a free node")
    if zi is None:
        mx = interval_maximum(w, x, i)
        if not mx.interior:
            raise AnalyticGradientUnavailable(
                f"m_{i} is attained at {mx.location.value} t={mx.z}; use finite differences"
            )
        zi = mx.z
    hj = h_all(w, x, zi)[0][j, 0]
    return float(-hj * branch(w, x, i).deriv(x.nodes[j])[0])


def maxima_vector(w: Weight, x: NodeSystem) -> np.ndarray:
    return np.array([mx.m for mx in interval_maxima(w, x)])


def fd_jacobian(w: Weight, x: NodeSystem, step: float = FD_STEP) -> np.ndarray:
    """Central differences of (m_i) with respect to each free node."""
    cols = []
    for j in x.free_indices:
        up = maxima_vector(w, x.with_node(j, x.nodes[j] + step))
        dn = maxima_vector(w, x.with_node(j, x.nodes[j] - step))
        cols.append((up - dn) / (2.0 * step))
    return np.column_stack(cols)


def resolve_fd(A: np.ndarray, m: np.ndarray, step: float = FD_STEP) -> np.ndarray:
    """Zero out entries below the rounding floor of a central difference."""
    floor = 16.0 * np.finfo(float).eps * np.maximum(1.0, np.abs(m)) / step
    return np.where(np.abs(A) <= floor[:, None], 0.0, A)


def analytic_jacobian(w: Weight, x: NodeSystem, maxima=None) -> np.ndarray:
    maxima = maxima or interval_maxima(w, x)
    free = x.free_indices
    A = np.empty((len(maxima), len(free)))
    for r, mx in enumerate(maxima):
        if not mx.interior:
            raise AnalyticGradientUnavailable(f"m_{mx.i} is attained at {mx.location.value}")
        hz = h_all(w, x, mx.z)[0][:, 0]
        dP = branch(w, x, mx.i).deriv(x.nodes[free])
        A[r] = -hz[free] * dP
    return A


def eval_q(w: Weight, x: NodeSystem, i: int, t, zi: float):
    """q_i(t) = P_i'(t) / (t - z_i), with the limit P_i''(z_i) near z_i."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    b = branch(w, x, i)
    d = t - zi
    near = np.abs(d) < _NEAR_Z
    out = np.empty_like(t)
    if np.any(~near):
        out[~near] = b.deriv(t[~near]) / d[~near]
    if np.any(near):
        out[near] = b.deriv2(np.full(near.sum(), zi))
    return out


def singular(M: np.ndarray, rtol: float = SINGULAR_RTOL) -> tuple[float, bool]:
    """det(M) by LU with partial pivoting and the relative singularity flag."""
    det = float(np.linalg.det(M)) if M.size else 1.0
    scale = float(np.prod(np.linalg.norm(M, axis=1))) if M.size else 1.0
    return det, bool(abs(det) <= rtol * scale)


def minors(M: np.ndarray, axis: int) -> list[np.ndarray]:
    return [np.delete(M, k, axis=axis) for k in range(M.shape[axis])]


@dataclass
class JacobianBundle:
    """A (rows: branch indices, columns: free nodes) and its square minors.

    ``Q`` has rows indexed by the free nodes and columns by branches; it is
    built for the hybrid system only.
    """

    x: NodeSystem
    mode: str
    rows: list[int]
    cols: list[int]
    A: np.ndarray
    z: np.ndarray
    A_raw: np.ndarray | None = None
    a_dets: dict[int, float] = field(default_factory=dict)
    a_conds: dict[int, float] = field(default_factory=dict)
    a_singular: dict[int, bool] = field(default_factory=dict)
    Q: np.ndarray | None = None
    q_dets: dict[int, float] = field(default_factory=dict)
    q_singular: dict[int, bool] = field(default_factory=dict)

    def A_minor(self, k: int) -> np.ndarray:
        return np.delete(self.A, self.rows.index(k), axis=0)

    def Q_minor(self, k: int) -> np.ndarray:
        return np.delete(self.Q, self.rows.index(k), axis=1)

    @property
    def flags_agree(self) -> bool:
        return self.Q is None or self.a_singular == self.q_singular


def build_q(w: Weight, x: NodeSystem, z) -> np.ndarray:
    free = x.free_indices
    cols = [eval_q(w, x, i, x.nodes[free], zi) for i, zi in zip(x.branch_indices, z)]
    Q = np.column_stack(cols)
    d = x.nodes[free][:, None] - np.asarray(z)[None, :]
    if np.any(np.abs(d) < _NEAR_Z):
        raise CollisionError("a node coincides with a maximum place")
    return Q


def build_bundle(w: Weight, x: NodeSystem, mode: str | None = None) -> JacobianBundle:
    """Assemble A and its minors; analytic for hybrid systems, FD otherwise."""
    maxima = interval_maxima(w, x)
    mode = mode or ("analytic" if x.is_hybrid else "fd")
    if mode == "analytic":
        A = analytic_jacobian(w, x, maxima)
        raw = A
    elif mode == "fd":
        raw = fd_jacobian(w, x)
        A = resolve_fd(raw, np.array([mx.m for mx in maxima]))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    rows = [mx.i for mx in maxima]
    z = np.array([mx.z for mx in maxima])
    bundle = JacobianBundle(x, mode, rows, list(x.free_indices), A, z, raw)
    for k, Ak in zip(rows, minors(A, 0)):
        det, flag = singular(Ak)
        bundle.a_dets[k] = det
        bundle.a_singular[k] = flag
        bundle.a_conds[k] = float(np.linalg.cond(Ak))
    if x.is_hybrid:
        bundle.Q = build_q(w, x, z)
        for k, Qk in zip(rows, minors(bundle.Q, 1)):
            det, flag = singular(Qk)
            bundle.q_dets[k] = det
            bundle.q_singular[k] = flag
    return bundle


def scaling_factors(w: Weight, x: NodeSystem, z) -> tuple[np.ndarray, np.ndarray]:
    """C_i, R_j with A[i, j] = C_i * R_j * Q[j, i] (exponential weight).

    C_i = w(z_i) prod_l (z_i - x_l),  R_j = 1 / (w(x_j) prod_{l != j} (x_j - x_l)).
    """
    xs = x.nodes
    z = np.asarray(z, dtype=float)
    C = np.exp(w.log_weight(z)) * np.prod(z[:, None] - xs[None, :], axis=1)
    d = xs[:, None] - xs[None, :]
    np.fill_diagonal(d, 1.0)
    R = 1.0 / (np.exp(w.log_weight(xs)) * np.prod(d, axis=1))
    return C, R[x.free_indices]


@dataclass
class QVerdict:
    nonzero_at_z: Verdict
    one_root_per_window: Verdict
    no_root_near_own_z: Verdict

    @property
    def ok(self) -> bool:
        return self.nonzero_at_z.ok and self.one_root_per_window.ok and self.no_root_near_own_z.ok


def check_q_properties(w: Weight, x: NodeSystem, dtable: DerivRootTable | None = None) -> QVerdict:
    """Check q_i(z_j) != 0, one simple root per [z_j, z_{j+1}] (j != i-1, i),
    and no root in [z_{i-1}, z_{i+1}] (clipped to [z_1, z_{n+1}])."""
    dtable = dtable or deriv_roots(w, x)
    n = x.n
    z = dtable.z
    p1, p2, p3 = Verdict(True), Verdict(True), Verdict(True)
    for i in x.branch_indices:
        ws = dtable.W[i]
        roots = ws[(ws != z[i]) & (ws != dtable.augmented if dtable.augmented is not None else True)]
        zs = np.array([z[j] for j in x.branch_indices])
        vals = eval_q(w, x, i, zs, z[i])
        if np.any(vals == 0.0) or not np.all(np.isfinite(vals)):
            p1.fail(f"q_{i} vanishes at some z_j: {vals}")
        for j in x.branch_indices:
            if np.any(np.abs(roots - z[j]) <= 1e-9 * max(1.0, abs(z[j]))):
                p1.fail(f"q_{i} has a root at z_{j}")
        for j in range(1, n + 1):
            if j in (i - 1, i):
                continue
            cnt = int(np.count_nonzero((roots >= z[j]) & (roots <= z[j + 1])))
            if cnt != 1:
                p2.fail(f"q_{i} has {cnt} roots in [z_{j}, z_{j + 1}]")
            else:
                rt = float(roots[(roots >= z[j]) & (roots <= z[j + 1])][0])
                if branch(w, x, i).deriv2(rt)[0] == 0.0:
                    p2.fail(f"root {rt} of q_{i} is not simple")
        lo, hi = z[max(i - 1, 1)], z[min(i + 1, n + 1)]
        inside = roots[(roots >= lo) & (roots <= hi)]
        if inside.size:
            p3.fail(f"q_{i} has roots {inside.tolist()} in [{lo}, {hi}]")
    return QVerdict(p1, p2, p3)
