"""Zeros of the hybrid branches and of their derivatives.

Covers the leading coefficients a_i and critical index r, the root tables
y_k^(i) and W^(i), the global orderings they obey, and the pairwise
Markov-type inheritance of interlacing (with the sign of
``phi = f' g - f g'``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial

from ._roots import BracketError, expand_bracket, find_root, sign
from .lebesgue_branches import Branch, branch, epsilon, interval_maximum
from .nodes_basis import NodeSystem, leading_b
from .weights import EXPONENTIAL, Weight

A_ZERO_RTOL = 1e-10


class DegenerateError(ValueError):
    """A zero that should be simple is (numerically) multiple."""


# ---------------------------------------------------------------- coefficients


@dataclass(frozen=True)
class CoefficientReport:
    """Leading coefficients a_1..a_{n+1} (stored at a[0]..a[n]) and index r."""

    a: np.ndarray
    r: int
    a_r_zero: bool
    scale: float

    @property
    def n(self) -> int:
        return self.a.size - 1

    def of(self, i: int) -> float:
        return float(self.a[i - 1])

    def normalized(self) -> np.ndarray:
        """(-1)^(n+1+i) a_i for i = 1..n+1; strictly increasing."""
        i = np.arange(1, self.n + 2)
        return np.where((self.n + 1 + i) % 2, -1.0, 1.0) * self.a


def leading_a(x: NodeSystem) -> CoefficientReport:
    """Closed-form a_i, from |b_k| e^{x_k} summed over the parity classes."""
    if not x.is_hybrid:
        raise ValueError("leading_a is defined for the hybrid system")
    n = x.n
    weighted = np.abs(leading_b(x)) * np.exp(x.nodes)
    k = np.arange(n + 1)
    same = (k % 2) == (n % 2)
    a = np.empty(n + 1)
    for i in range(1, n + 2):
        below = weighted[(k < i) & ~same].sum()
        above = weighted[(k >= i) & same].sum()
        a[i - 1] = 2.0 * epsilon(n + 1, i) * (below - above)
    scale = float(weighted.sum())
    tol = A_ZERO_RTOL * scale
    s = np.where((n + 1 + np.arange(1, n + 2)) % 2, -1.0, 1.0) * a
    r = max(i for i in range(1, n + 2) if s[i - 1] <= tol)
    return CoefficientReport(a, r, bool(abs(a[r - 1]) <= tol), scale)


def expected_index_set(n: int, i: int, coeffs: CoefficientReport) -> set[int]:
    """Intervals I_k holding a zero of P_i, as predicted from a_i and r."""
    left = i < coeffs.r or (i == coeffs.r and not coeffs.a_r_zero)
    return set(range(0 if left else 1, n + 2)) - {i}


# ------------------------------------------------------------ branch zero sets


def _left_limit(b: Branch) -> float:
    return 2.0**16 * (1.0 + float(b.x.nodes[-1]))


def _sign_form_slope(b: Branch, t: float) -> float:
    if t < 0:
        sv = float(b.scaled_value(t)[0])
        return b.df(t) - float(b.w.log_derivative(t)) * sv
    return float(b.deriv(t)[0])


def branch_zeros(b: Branch) -> dict[int, float]:
    """The zero of P_i in each interval I_k where one is found, keyed by k."""
    x = b.x.nodes
    n = b.x.n
    fs = b.f_sign
    slope = lambda t: _sign_form_slope(b, t)  # noqa: E731
    out: dict[int, float] = {}
    for k in range(1, n + 1):
        if k != b.i and sign(fs(x[k - 1])) != sign(fs(x[k])):
            out[k] = find_root(fs, float(x[k - 1]), float(x[k]), fprime=slope)
    if b.i != n + 1:
        s0 = sign(fs(x[-1]))
        far = expand_bracket(fs, float(x[-1]), +1, -s0, limit=_left_limit(b))
        if far is not None:
            out[n + 1] = find_root(fs, float(x[-1]), far, fprime=slope)
    s0 = sign(fs(x[0]))
    far = expand_bracket(fs, float(x[0]), -1, -s0, limit=_left_limit(b))
    if far is not None:
        out[0] = find_root(fs, far, float(x[0]), fprime=slope)
    return dict(sorted(out.items()))


def branch_deriv_zeros(b: Branch, zeros, a_is_zero: bool) -> np.ndarray:
    """Zeros of P_i' from the zeros of P_i.

    One zero between consecutive zeros of P_i; when P_i has only n zeros and
    a nonzero leading coefficient there is one more beyond the last zero.
    """
    ys = sorted(zeros)
    out = [find_root(b.df, ys[j], ys[j + 1], fprime=b.ddf) for j in range(len(ys) - 1)]
    if len(ys) == b.x.n and not a_is_zero:
        far = expand_bracket(b.df, ys[-1], +1, -sign(b.a), limit=_left_limit(b))
        if far is None:
            raise BracketError(f"trailing zero of P_{b.i}' not bracketed")
        out.append(find_root(b.df, ys[-1], far, fprime=b.ddf))
    return np.array(out)


@dataclass
class RootTable:
    """Zeros y[i][k] of P_i in I_k and the index sets J_i."""

    x: NodeSystem
    coeffs: CoefficientReport
    y: dict[int, dict[int, float]]
    expected: dict[int, set[int]]

    @property
    def index_sets(self) -> dict[int, set[int]]:
        return {i: set(row) for i, row in self.y.items()}

    @property
    def consistent(self) -> bool:
        """Found index sets agree with the a_r-based prediction."""
        return all(self.index_sets[i] == self.expected[i] for i in self.y)

    @property
    def degree_flag_mismatch(self) -> bool:
        # zero of P_r left of x_0 present  <=>  a_r != 0
        r = self.coeffs.r
        return (0 in self.y[r]) == self.coeffs.a_r_zero

    def counts(self) -> dict[int, int]:
        return {i: len(row) for i, row in self.y.items()}


def branch_roots(w: Weight, x: NodeSystem) -> RootTable:
    if not x.is_hybrid:
        raise ValueError("root tables are defined for the hybrid system")
    coeffs = leading_a(x)
    y, expected = {}, {}
    for i in x.branch_indices:
        y[i] = branch_zeros(branch(w, x, i))
        expected[i] = expected_index_set(x.n, i, coeffs)
    return RootTable(x, coeffs, y, expected)


@dataclass
class DerivRootTable:
    """Sorted zero sets W^(i) of P_i' (W^(r) augmented when a_r = 0)."""

    x: NodeSystem
    W: dict[int, np.ndarray]
    z: dict[int, float]
    z_gap: dict[int, float]
    augmented: float | None = None

    def union(self) -> np.ndarray:
        return np.sort(np.concatenate(list(self.W.values())))

    def window_counts(self) -> list[int]:
        """#(W n [z_j, z_{j+1}]) for j = 1..n."""
        allw = self.union()
        n = self.x.n
        return [int(np.count_nonzero((allw >= self.z[j]) & (allw <= self.z[j + 1])))
                for j in range(1, n + 1)]

    def outside(self) -> dict[int, list[float]]:
        """Zeros of each P_i' outside [z_1, z_{n+1}] (augmentation excluded)."""
        lo, hi = self.z[1], self.z[self.x.n + 1]
        out = {}
        for i, ws in self.W.items():
            out[i] = [float(v) for v in ws if (v < lo or v > hi) and v != self.augmented]
        return out


def deriv_roots(w: Weight, x: NodeSystem, table: RootTable | None = None) -> DerivRootTable:
    table = table or branch_roots(w, x)
    coeffs = table.coeffs
    W, z, gap = {}, {}, {}
    for i in x.branch_indices:
        b = branch(w, x, i)
        a_zero = i == coeffs.r and coeffs.a_r_zero
        ws = branch_deriv_zeros(b, table.y[i].values(), a_zero)
        z[i] = interval_maximum(w, x, i).z
        # z_i and its twin in W^(i) come from separate solves; keep one value
        # so window counts do not hinge on the last ulp
        near = int(np.argmin(np.abs(ws - z[i])))
        gap[i] = float(abs(ws[near] - z[i]))
        if gap[i] <= 1e-9 * max(1.0, abs(z[i])):
            ws[near] = z[i]
        W[i] = ws
    augmented = None
    if coeffs.a_r_zero:
        augmented = float(min(v.min() for v in W.values() if v.size)) - 1.0
        W[coeffs.r] = np.sort(np.append(W[coeffs.r], augmented))
    return DerivRootTable(x, W, z, gap, augmented)


# --------------------------------------------------------------- verification


@dataclass
class Verdict:
    ok: bool
    failures: list[str] = field(default_factory=list)

    def fail(self, msg: str) -> None:
        self.ok = False
        self.failures.append(msg)


def cyclic_order(n: int, k: int) -> list[int]:
    """Branch indices k-1, ..., 1, n+1, ..., k+1 (the order of zeros in I_k)."""
    return [i for i in range(k - 1, 0, -1)] + [i for i in range(n + 1, k, -1)]


def check_node_values(w: Weight, x: NodeSystem, tol: float = 1e-12) -> Verdict:
    """P_i(x_m) = (-1)^(m-i+1) for m < i, (-1)^(m-i) for m >= i."""
    v = Verdict(True)
    for i in x.branch_indices:
        vals = branch(w, x, i).value(x.nodes)
        for m, val in enumerate(vals):
            want = (-1) ** (m - i + 1) if m < i else (-1) ** (m - i)
            if abs(val - want) > tol:
                v.fail(f"P_{i}(x_{m}) = {val}, expected {want}")
    return v


def check_root_order(table: RootTable, margin_rtol: float = 1e-10) -> Verdict:
    """Zeros in each I_k appear in the cyclic order k-1, ..., 1, n+1, ..., k+1."""
    x, n = table.x.nodes, table.x.n
    margin = margin_rtol * max(1.0, float(x[-1]))
    v = Verdict(True)
    if not table.consistent:
        v.fail(f"index sets {table.index_sets} differ from prediction {table.expected}")
    if table.degree_flag_mismatch:
        v.fail("zero of P_r left of x_0 disagrees with the a_r = 0 classification")
    for k in range(n + 2):
        lo = x[k - 1] if k >= 1 else -math.inf
        hi = x[k] if k <= n else math.inf
        present = [i for i in cyclic_order(n, k) if k in table.y[i]] if k >= 1 else \
            [i for i in range(n + 1, 0, -1) if 0 in table.y[i]]
        vals = [table.y[i][k] for i in present]
        for i, val in zip(present, vals):
            if not lo < val < hi:
                v.fail(f"y_{k}^({i}) = {val} not inside I_{k}")
        diffs = np.diff(vals)
        if np.any(diffs <= margin):
            v.fail(f"zeros in I_{k} out of order: {list(zip(present, vals))}")
    return v


def check_lexicographic(dtable: DerivRootTable, order: list[int]) -> Verdict:
    """Rows W^(order[0]) < W^(order[1]) < ... pairwise interlaced."""
    v = Verdict(True)
    sizes = {dtable.W[i].size for i in order}
    if len(sizes) != 1:
        v.fail(f"unequal derivative zero counts {[dtable.W[i].size for i in order]}")
        return v
    mat = np.column_stack([dtable.W[i] for i in order])
    flat = mat.ravel()  # row-major: element m of each W in precedence order
    if np.any(np.diff(flat) <= 0):
        v.fail("derivative zero sets do not follow the cyclic precedence order")
    return v


def derivative_precedence(n: int, r: int) -> list[int]:
    return list(range(r, 0, -1)) + list(range(n + 1, r, -1))


# ------------------------------------------------------------ hybrid functions


class HybridPolynomial:
    """f(t) = exp(-t) p(t) + c with p of degree at most n.

    ``coeffs`` are the ascending monomial coefficients of p.
    """

    def __init__(self, coeffs, c: float, n: int | None = None):
        self.p = Polynomial(np.asarray(coeffs, dtype=float))
        self.c = float(c)
        self.n = int(n if n is not None else self.p.degree())
        if self.p.degree() > self.n:
            raise ValueError("polynomial part exceeds degree n")
        self.dp = self.p.deriv() - self.p  # exp(t) f'(t)

    @classmethod
    def from_roots_form(cls, scale: float, roots, c: float, n: int | None = None):
        """exp(-t) * scale * prod (t - r) + c."""
        p = Polynomial.fromroots(roots) * scale
        return cls(p.coef, c, n)

    @property
    def a(self) -> float:
        coef = self.p.coef
        return float(coef[self.n]) if coef.size > self.n else 0.0

    @property
    def a_scale(self) -> float:
        return float(np.abs(self.p.coef).max()) if self.p.coef.size else 1.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(over="ignore"):
            return np.exp(-t) * self.p(t) + self.c

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(over="ignore"):
            return np.exp(-t) * self.dp(t)

    def scaled_pair(self, t):
        """(f, f'/w) for t >= 0 and (f/w, f'/w) for t < 0.

        Within each pair both entries carry the same positive factor at every
        t, so the sign of f' g - f g' survives while nothing over- or
        underflows.
        """
        t = np.atleast_1d(np.asarray(t, dtype=float))
        left = t < 0
        val = np.empty_like(t)
        tl, tr = t[left], t[~left]
        val[left] = self.p(tl) + self.c * np.exp(tl)
        with np.errstate(under="ignore"):
            val[~left] = np.exp(-tr) * self.p(tr) + self.c
        return val, self.dp(t)

    def deriv_roots(self) -> np.ndarray:
        if self.dp.degree() < 1 or not np.any(self.dp.coef):
            return np.array([])
        rts = self.dp.roots()
        real = rts[np.abs(rts.imag) <= 1e-9 * np.maximum(1.0, np.abs(rts.real))].real
        return np.sort(real)

    def roots(self) -> np.ndarray:
        """Real zeros, one per monotone piece between derivative zeros."""
        fs = lambda t: float(self.scaled_pair(t)[0][0])  # noqa: E731
        crit = list(self.deriv_roots())
        for d in crit:
            if abs(fs(d)) <= 1e-12 * max(1.0, abs(self.c), self.a_scale):
                raise DegenerateError(f"multiple zero near t = {d}")
        out = []
        lim = 2.0**16 * (1.0 + max([abs(d) for d in crit], default=1.0))
        cuts = [-math.inf] + crit + [math.inf]
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            if math.isinf(lo) and math.isinf(hi):
                anchor = 0.0
                s = sign(fs(anchor))
                left = expand_bracket(fs, anchor, -1, -s, limit=lim)
                right = expand_bracket(fs, anchor, +1, -s, limit=lim)
                if left is not None:
                    out.append(find_root(fs, left, anchor))
                elif right is not None:
                    out.append(find_root(fs, anchor, right))
                continue
            if math.isinf(lo):
                s = sign(fs(hi))
                far = expand_bracket(fs, hi, -1, -s, limit=lim)
                if far is not None:
                    out.append(find_root(fs, far, hi))
            elif math.isinf(hi):
                s = sign(fs(lo))
                far = expand_bracket(fs, lo, +1, -s, limit=lim)
                if far is not None:
                    out.append(find_root(fs, lo, far))
            elif sign(fs(lo)) != sign(fs(hi)):
                out.append(find_root(fs, lo, hi))
        return np.array(sorted(out))


class SignedBranch:
    """The hybrid function s * P_i (s = +-1), with its zero sets."""

    def __init__(self, w: Weight, x: NodeSystem, i: int, s: int = 1,
                 coeffs: CoefficientReport | None = None, zeros=None, dzeros=None):
        self.b = branch(w, x, i)
        self.s = 1 if s >= 0 else -1
        self.n = x.n
        self.i = i
        coeffs = coeffs or leading_a(x)
        self._a_zero = i == coeffs.r and coeffs.a_r_zero
        self._zeros = None if zeros is None else np.array(sorted(zeros))
        self._dzeros = dzeros

    @property
    def a(self) -> float:
        return self.s * self.b.a

    @property
    def a_scale(self) -> float:
        return float(np.abs(self.b.coef * leading_b(self.b.x)).sum())

    @property
    def c(self) -> float:
        return self.s * self.b.c

    def __call__(self, t):
        return self.s * self.b.value(t)

    def deriv(self, t):
        return self.s * self.b.deriv(t)

    def scaled_pair(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        left = t < 0
        val = np.empty_like(t)
        if left.any():
            val[left] = self.b.scaled_value(t[left])
        if (~left).any():
            val[~left] = self.b.value(t[~left])
        return self.s * val, self.s * self.b.scaled_deriv(t)

    def roots(self) -> np.ndarray:
        if self._zeros is None:
            self._zeros = np.array(sorted(branch_zeros(self.b).values()))
        return self._zeros

    def deriv_roots(self) -> np.ndarray:
        if self._dzeros is None:
            self._dzeros = branch_deriv_zeros(self.b, self.roots(), self._a_zero)
        return self._dzeros


def _alternates(first: np.ndarray, second: np.ndarray) -> bool:
    """first[0] < second[0] < first[1] < second[1] < ... (strict)."""
    if not (first.size == second.size or first.size == second.size + 1):
        return False
    merged = np.empty(first.size + second.size)
    merged[0::2] = first
    merged[1::2] = second
    return bool(np.all(np.diff(merged) > 0))


def _is_zero(fn, a: float) -> bool:
    return abs(a) <= A_ZERO_RTOL * max(1.0, fn.a_scale)


def markov_case(f, g, nf: int, ng: int) -> int | None:
    """Which of the five sufficient conditions for inheriting interlacing holds (1-5), or None."""
    n = f.n
    f_osc, g_osc = nf == n + 1, ng == n + 1
    f_near, g_near = nf == n, ng == n
    ag_zero, af_zero = _is_zero(g, g.a), _is_zero(f, f.a)
    if f_osc and g_osc:
        return 1
    if f_osc and g_near:
        return 2 if ag_zero else 3
    if f_near and g_near and not af_zero and f.a > 0:
        if ag_zero:
            return 4
        if f.a >= g.a > 0:
            return 5
    return None


@dataclass
class MarkovVerdict:
    u: np.ndarray
    v: np.ndarray
    xi: np.ndarray
    eta: np.ndarray
    zeros_interlace: bool
    deriv_interlace: bool
    case: int | None
    phi_constant_sign: bool
    phi_sign: int

    @property
    def inheritance_holds(self) -> bool:
        return self.zeros_interlace and self.deriv_interlace


def phi_signs(f, g, lo: float, hi: float, num: int = 1024) -> np.ndarray:
    t = np.linspace(lo, hi, num)
    fv, fd = f.scaled_pair(t)
    gv, gd = g.scaled_pair(t)
    return np.sign(fd * gv - fv * gd)


def verify_markov_pair(f, g) -> MarkovVerdict:
    """Zeros and derivative zeros of f, g; interlacing and phi sign check."""
    u, v = f.roots(), g.roots()
    for fn, zs in ((f, u), (g, v)):
        for z in zs:
            _, d = fn.scaled_pair(z)
            if d[0] == 0.0:
                raise DegenerateError(f"non-simple zero at {z}")
    xi, eta = f.deriv_roots(), g.deriv_roots()
    pts = np.concatenate([u, v, xi, eta])
    lo, hi = float(pts.min()), float(pts.max())
    pad = 0.2 * max(hi - lo, 1.0)
    signs = phi_signs(f, g, lo - pad, hi + pad)
    constant = bool(np.all(signs == signs[0]) and signs[0] != 0)
    return MarkovVerdict(
        u, v, xi, eta,
        zeros_interlace=_alternates(u, v),
        deriv_interlace=_alternates(xi, eta),
        case=markov_case(f, g, u.size, v.size),
        phi_constant_sign=constant,
        phi_sign=int(signs[0]) if constant else 0,
    )


def branch_pair(w: Weight, x: NodeSystem, i: int, j: int, table: RootTable | None = None,
                dtable: DerivRootTable | None = None):
    """The normalized pair (f, g) for branches i < j, ordered so f's zeros lead."""
    table = table or branch_roots(w, x)

    def dz(k):
        if dtable is None:
            return None
        ws = dtable.W[k]
        return ws[ws != dtable.augmented] if dtable.augmented is not None else ws
    coeffs = table.coeffs
    n, r, zero = x.n, coeffs.r, coeffs.a_r_zero
    si = (-1) ** (n + 1 - i)
    sj = (-1) ** (n + 1 - j)
    Pi = SignedBranch(w, x, i, si, coeffs, table.y[i].values(), dz(i))
    Pj = SignedBranch(w, x, j, sj, coeffs, table.y[j].values(), dz(j))
    # i is oscillating iff i < r or (i = r and a_r != 0)
    i_osc = i < r or (i == r and not zero)
    j_osc = j < r or (j == r and not zero)
    if i_osc and j_osc:
        return Pj, Pi          # case 1
    if i_osc:
        return Pi, Pj          # cases 2 and 3
    return Pj, Pi              # cases 4 and 5


def markov_failure_pair() -> tuple[HybridPolynomial, HybridPolynomial]:
    """f = 1 - 10 e^{-t}(t - 1), g = 1 + 50 e^{-t}(t - 2)(t - 4), in Y_2."""
    f = HybridPolynomial([10.0, -10.0], 1.0, n=2)
    g = HybridPolynomial.from_roots_form(50.0, [2.0, 4.0], 1.0, n=2)
    return f, g


@dataclass(frozen=True)
class SignLawVerdict:
    roots: int
    a: float
    c: float
    sign_ac: int
    holds: bool
    consistent: bool


def coeff_sign_law(f) -> SignLawVerdict:
    """n zeros => sign(ac) >= 0;  n + 1 zeros => sign(ac) < 0."""
    if _is_zero(f, f.a):
        raise ValueError("coefficient sign law needs a nonzero leading coefficient")
    k = int(f.roots().size)
    s = sign(f.a) * sign(f.c)
    if k == f.n + 1:
        holds = s < 0
    elif k == f.n:
        holds = s >= 0
    else:
        holds = True
    return SignLawVerdict(k, float(f.a), float(f.c), s, holds, k <= f.n + 1)


# -------------------------------------------------------------- full analysis


@dataclass
class InterlacingReport:
    x: NodeSystem
    coeffs: CoefficientReport
    roots: RootTable
    droots: DerivRootTable
    checks: dict[str, Verdict]
    pairs: dict[tuple[int, int], MarkovVerdict]

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.checks.values())


def analyse(x: NodeSystem, w: Weight = EXPONENTIAL, pairs: bool = True) -> InterlacingReport:
    """Run every interlacing check on one hybrid node system."""
    table = branch_roots(w, x)
    dtable = deriv_roots(w, x, table)
    n, r = x.n, table.coeffs.r
    checks = {
        "node_values": check_node_values(w, x),
        "root_order": check_root_order(table),
        "derivative_order": check_lexicographic(dtable, derivative_precedence(n, r)),
    }
    cyc = Verdict(True)
    counts = dtable.window_counts()
    if counts != [n + 1] * n:
        cyc.fail(f"window counts {counts} != {n + 1}")
    for i in x.branch_indices:
        if dtable.z_gap[i] > 1e-9 * max(1.0, abs(dtable.z[i])):
            cyc.fail(f"z_{i} is not a zero of P_{i}'")
    checks["window_counts"] = cyc

    counts_v = Verdict(True)
    for i, row in table.y.items():
        want = n + 1 if (i < r or (i == r and not table.coeffs.a_r_zero)) else n
        if len(row) != want:
            counts_v.fail(f"P_{i} has {len(row)} zeros, expected {want}")
    checks["zero_counts"] = counts_v

    pv: dict[tuple[int, int], MarkovVerdict] = {}
    if pairs:
        mk = Verdict(True)
        for i in range(1, n + 2):
            for j in range(i + 1, n + 2):
                f, g = branch_pair(w, x, i, j, table, dtable)
                verdict = verify_markov_pair(f, g)
                pv[(i, j)] = verdict
                if not (verdict.inheritance_holds and verdict.phi_constant_sign
                        and verdict.case is not None):
                    mk.fail(f"pair ({i}, {j}): {verdict}")
        checks["markov_pairs"] = mk
    return InterlacingReport(x, table.coeffs, table, dtable, checks, pv)
