"""Lebesgue branches P_i, the Lebesgue function and interval maxima.

On each interval I_i the Lebesgue function agrees with a fixed signed
combination ``P_i = sum_k eps_{k,i} h_k`` (plus ``eps_{n+1,i} h_{n+1}`` for
the hybrid system). Branches are evaluated on the whole real line where the
weight extends, which the root analysis relies on.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ._roots import BracketError, expand_bracket, find_root, sample_signs, sign
from .nodes_basis import NodeSystem, SystemKind, ell_all, h_all, leading_b
from .weights import DomainError, Weight, WeightKind


def epsilon(k: int, i: int) -> int:
    """Sign of h_k on I_i: (-1)^(k + 1 - i + [i <= k])."""
    return -1 if (k + 1 - i + (1 if i <= k else 0)) % 2 else 1


def sign_pattern(n: int, hybrid: bool = True) -> np.ndarray:
    """Table eps[k, i] for k = 0..n(+1), i = 0..n+1."""
    rows = n + 2 if hybrid else n + 1
    return np.array([[epsilon(k, i) for i in range(n + 2)] for k in range(rows)])


class Location(enum.Enum):
    INTERIOR = "interior"
    LEFT_ENDPOINT = "left_endpoint"
    RIGHT_ENDPOINT = "right_endpoint"
    AT_INFINITY_FLAT = "at_infinity_flat"


@dataclass(frozen=True)
class IntervalMaximum:
    i: int
    m: float
    z: float
    location: Location
    nonunique_risk: bool = False
    endpoint_slope: float | None = None

    @property
    def interior(self) -> bool:
        return self.location is Location.INTERIOR


@dataclass(frozen=True, eq=False)
class Branch:
    """The branch P_i of a node system, written as ``c + w(t) * p(t)``.

    ``coef[k] = (eps_{k,i} - c) / w(x_k)`` are the coefficients of p in the
    Lagrange basis, so ``p = sum_k coef[k] l_k``.
    """

    w: Weight
    x: NodeSystem
    i: int
    signs: np.ndarray = field(repr=False)
    c: float

    @cached_property
    def coef(self) -> np.ndarray:
        return (self.signs - self.c) * np.exp(-self.w.log_weight(self.x.nodes))

    @cached_property
    def a(self) -> float:
        """Coefficient of t^n in the polynomial part p."""
        return float(self.coef @ leading_b(self.x))

    @property
    def limit_at_infinity(self) -> float:
        return self.c

    def value(self, t):
        hs = h_all(self.w, self.x, t)[0]
        return self.c + (self.signs - self.c) @ hs

    def deriv(self, t):
        hs = h_all(self.w, self.x, t, order=1)[1]
        return (self.signs - self.c) @ hs

    def deriv2(self, t):
        hs = h_all(self.w, self.x, t, order=2)[2]
        return (self.signs - self.c) @ hs

    # P/w and P'/w share signs with P and P' and do not overflow on the
    # far left; P'/w is a plain polynomial for the exponential weight.

    def scaled_value(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        ells = ell_all(self.x, t)[0]
        with np.errstate(over="ignore"):
            head = self.c * np.exp(-self.w.log_weight(t)) if self.c else 0.0
        return head + self.coef @ ells

    def scaled_deriv(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        ells = ell_all(self.x, t, order=1)
        return self.coef @ (self.w.log_derivative(t)[None, :] * ells[0] + ells[1])

    def scaled_deriv_slope(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        ells = ell_all(self.x, t, order=2)
        d1 = self.w.log_derivative(t)[None, :]
        d2 = self.w.log_second_derivative(t)[None, :]
        return self.coef @ (d2 * ells[0] + d1 * ells[1] + ells[2])

    # scalar helpers for root finders
    def f(self, t: float) -> float:
        return float(self.value(t)[0])

    def f_sign(self, t: float) -> float:
        """P(t) where finite, otherwise the sign-equivalent P(t)/w(t)."""
        return float(self.scaled_value(t)[0]) if t < 0 else float(self.value(t)[0])

    def df(self, t: float) -> float:
        return float(self.scaled_deriv(t)[0])

    def ddf(self, t: float) -> float:
        return float(self.scaled_deriv_slope(t)[0])


def _check_index(x: NodeSystem, i: int) -> None:
    if i not in x.branch_indices:
        raise IndexError(f"branch index {i} not valid for {x.kind.value} system with n={x.n}")


def branch(w: Weight, x: NodeSystem, i: int) -> Branch:
    x.check_weight(w)
    _check_index(x, i)
    n = x.n
    signs = np.array([epsilon(k, i) for k in range(n + 1)], dtype=float)
    c = float(epsilon(n + 1, i)) if x.is_hybrid else 0.0
    return Branch(w, x, i, signs, c)


def _scalar(out, t):
    return float(np.asarray(out).ravel()[0]) if np.ndim(t) == 0 else np.asarray(out)


def eval_branch(w: Weight, x: NodeSystem, i: int, t):
    """P_i(t); defined on all of R where the weight extends."""
    b = branch(w, x, i)
    if w.kind is WeightKind.SQRT_EXPONENTIAL:
        w.check_domain(t)
    return _scalar(b.value(t), t)


def _check_differentiable(w: Weight, t) -> None:
    if w.kind is WeightKind.SQRT_EXPONENTIAL:
        w.check_domain(t)
        if np.any(np.asarray(t) == 0.0):
            raise DomainError("exp(-sqrt(t)) is not differentiable at t = 0")


def eval_branch_deriv(w: Weight, x: NodeSystem, i: int, t):
    """(P_i)'_t computed from the analytic derivatives of the h_k."""
    _check_differentiable(w, t)
    return _scalar(branch(w, x, i).deriv(t), t)


def eval_branch_deriv2(w: Weight, x: NodeSystem, i: int, t):
    _check_differentiable(w, t)
    return _scalar(branch(w, x, i).deriv2(t), t)


def eval_lebesgue(w: Weight, x: NodeSystem, t):
    """Sum of |h_k(t)|, including |h_{n+1}| for the hybrid system."""
    x.check_weight(w)
    w.check_domain(t)
    hs = h_all(w, x, t)[0]
    total = np.abs(hs).sum(axis=0)
    if x.is_hybrid:
        total = total + np.abs(1.0 - hs.sum(axis=0))
    return _scalar(total, t)


def interval_maximum(w: Weight, x: NodeSystem, i: int) -> IntervalMaximum:
    """m_i = max of the Lebesgue function over I_i, with its location."""
    b = branch(w, x, i)
    if x.is_hybrid:
        return _hybrid_maximum(b)
    return _scanned_maximum(b)


def interval_maxima(w: Weight, x: NodeSystem) -> list[IntervalMaximum]:
    return [interval_maximum(w, x, i) for i in x.branch_indices]


def _hybrid_maximum(b: Branch) -> IntervalMaximum:
    # The maximum is the unique zero of P_i' inside I_i, with P_i' > 0 at the
    # left end; on [x_n, inf) P' < 0 eventually since a_{n+1} > 0.
    lo, hi = b.x.interval(b.i)
    if math.isinf(hi):
        hi = expand_bracket(b.df, lo, +1, -1, first=8.0, limit=2.0**16 * (1.0 + lo))
        if hi is None:
            raise BracketError(f"no descent found right of x_n for P_{b.i}")
    if not (b.df(lo) > 0 > b.df(hi)):
        raise BracketError(
            f"P_{b.i}' does not change sign from + to - on [{lo}, {hi}]",
            sample_signs(b.df, lo, hi),
        )
    z = find_root(b.df, lo, hi, fprime=b.ddf, xtol=1e-13 * max(1.0, float(b.x.nodes[-1])))
    return IntervalMaximum(b.i, b.f(z), z, Location.INTERIOR)


_SCAN_POINTS = 512


def _far_end(b: Branch, start: float, direction: int) -> float:
    # Extend until |P| has decayed below 1/2 and is still decreasing in size.
    step = 8.0
    limit = 2.0**16 * (1.0 + abs(start))
    while step <= limit:
        t = start + direction * step
        v, dv = b.f(t), b.df(t)
        if abs(v) < 0.5 and direction * sign(v) * sign(dv) <= 0:
            return t
        step *= 2.0
    raise BracketError(f"P_{b.i} does not decay on the unbounded side of I_{b.i}")


def _scanned_maximum(b: Branch) -> IntervalMaximum:
    lo, hi = b.x.interval(b.i)
    left_open, right_open = math.isinf(lo), math.isinf(hi)
    a = _far_end(b, hi, -1) if left_open else lo
    c = _far_end(b, lo, +1) if right_open else hi
    grid = np.linspace(a, c, _SCAN_POINTS + 1)
    vals = b.value(grid)

    peaks = []
    for j in range(1, grid.size - 1):
        if vals[j] >= vals[j - 1] and vals[j] >= vals[j + 1]:
            ta, tb = grid[j - 1], grid[j + 1]
            if b.df(ta) > 0 > b.df(tb):
                z = find_root(b.df, ta, tb, fprime=b.ddf)
            else:
                z = float(grid[j])
            peaks.append((b.f(z), z))
    peaks.sort(reverse=True)
    nonunique = len(peaks) > 1 and abs(peaks[0][0] - peaks[1][0]) <= 1e-8

    ends = []
    if not left_open:
        ends.append((b.f(lo), lo, Location.LEFT_ENDPOINT))
    if not right_open:
        ends.append((b.f(hi), hi, Location.RIGHT_ENDPOINT))
    # a tie between the two ends resolves to the left one
    end_val, end_t, end_loc = max(ends, key=lambda e: (e[0], -e[1]))

    slope = None
    if b.w.kind is not WeightKind.SQRT_EXPONENTIAL or end_t > 0:
        slope = float(b.deriv(end_t)[0])
    if peaks and peaks[0][0] > end_val + 1e-12 * max(1.0, abs(end_val)):
        m, z = peaks[0]
        return IntervalMaximum(b.i, m, z, Location.INTERIOR, nonunique, slope)
    return IntervalMaximum(b.i, end_val, end_t, end_loc, nonunique, slope)
