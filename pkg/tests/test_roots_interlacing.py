import math

import numpy as np
import pytest
from hypothesis import given

from conftest import hybrid_systems
from wlil.lebesgue_branches import branch
from wlil.nodes_basis import NodeSystem, ell_all, leading_b
from wlil.roots_interlacing import (
    DegenerateError, HybridPolynomial, SignedBranch, analyse, branch_pair, branch_roots,
    check_lexicographic, check_root_order, coeff_sign_law, cyclic_order, deriv_roots,
    derivative_precedence, leading_a, markov_failure_pair, verify_markov_pair,
)
from wlil.weights import EXPONENTIAL

import expected
import oracles


def test_leading_a_against_fit_oracle():
    rep = leading_a(NodeSystem.hybrid([1.0, 4.0]))
    np.testing.assert_allclose(rep.a, expected.A_014, rtol=1e-8)
    for nodes in ([0.5, 1.5, 3.0], [0.3, 0.9, 2.0, 4.5]):
        x = NodeSystem.hybrid(nodes)
        fit = [oracles.leading_a_fit(x.nodes, i) for i in x.branch_indices]
        np.testing.assert_allclose(leading_a(x).a, fit, rtol=1e-8)


@given(hybrid_systems(n_max=8))
def test_leading_a_matches_branch_coefficients(x):
    rep = leading_a(x)
    direct = [branch(EXPONENTIAL, x, i).a for i in x.branch_indices]
    np.testing.assert_allclose(rep.a, direct, rtol=1e-9, atol=1e-9 * rep.scale)


@given(hybrid_systems(n_max=8))
def test_consecutive_difference_identity(x):
    rep = leading_a(x)
    n = x.n
    step = np.abs(leading_b(x)) * np.exp(x.nodes)
    for i in range(1, n + 1):
        lhs = (-1) ** (n + i + 2) * rep.of(i + 1) - (-1) ** (n + i + 1) * rep.of(i)
        assert lhs == pytest.approx(2 * step[i], rel=1e-9)


@given(hybrid_systems(n_max=8))
def test_sign_flip_and_ends(x):
    rep = leading_a(x)
    s = rep.normalized()
    assert np.all(np.diff(s) > 0)
    assert s[0] < 0 and rep.a[-1] > 0
    assert 1 <= rep.r <= x.n
    assert np.all(s[: rep.r] <= 1e-10 * rep.scale) and np.all(s[rep.r:] > 0)


def test_root_table_three_node_example():
    x = NodeSystem.hybrid([1.0, 2.5, 4.0])
    table = branch_roots(EXPONENTIAL, x)
    assert table.consistent and not table.degree_flag_mismatch
    assert check_root_order(table).ok
    r = table.coeffs.r
    for i, row in table.y.items():
        assert i not in row
        assert len(row) == (4 if i <= r else 3)
    # sort everything and compare with the predicted order inside each interval
    for k in range(1, x.n + 2):
        present = [i for i in cyclic_order(x.n, k) if k in table.y[i]]
        vals = [table.y[i][k] for i in present]
        assert vals == sorted(vals)


@given(hybrid_systems(n_min=2, n_max=6))
def test_roots_are_simple_zeros(x):
    table = branch_roots(EXPONENTIAL, x)
    for i, row in table.y.items():
        b = branch(EXPONENTIAL, x, i)
        # left of 0 work with P/w, whose slope at a zero is P'/w
        slope = lambda t: b.df(t) if t < 0 else b.deriv(t)[0]  # noqa: E731
        scale = max(abs(slope(t)) for t in x.nodes)
        for k, y in row.items():
            lo, hi = x.interval(k)
            assert lo < y < hi
            size = max(1.0, float(np.abs(b.coef) @ np.abs(ell_all(x, y)[0][:, 0])))
            assert abs(b.f_sign(y)) < 1e-9 * size
            assert abs(slope(y)) > 1e-8 * scale


@given(hybrid_systems(n_min=1, n_max=6))
def test_derivative_roots(x):
    table = branch_roots(EXPONENTIAL, x)
    d = deriv_roots(EXPONENTIAL, x, table)
    for i, ws in d.W.items():
        assert ws.size == x.n
        assert d.z_gap[i] <= 1e-9 * max(1.0, abs(d.z[i]))
    assert d.window_counts() == [x.n + 1] * x.n
    assert check_lexicographic(d, derivative_precedence(x.n, table.coeffs.r)).ok


@given(hybrid_systems(n_min=2, n_max=5))
def test_every_signed_pair_inherits(x):
    table = branch_roots(EXPONENTIAL, x)
    for i in range(1, x.n + 2):
        for j in range(i + 1, x.n + 2):
            v = verify_markov_pair(*branch_pair(EXPONENTIAL, x, i, j, table))
            assert v.inheritance_holds and v.phi_constant_sign and v.case in (1, 2, 3, 4, 5)


def test_full_analysis_example():
    rep = analyse(NodeSystem.hybrid([1.0, 2.5, 4.0]))
    assert rep.ok, {k: v.failures for k, v in rep.checks.items()}


def test_markov_failure_pair():
    f, g = markov_failure_pair()
    v = verify_markov_pair(f, g)
    assert v.u[0] < v.v[0] < v.u[1] < v.v[1]
    np.testing.assert_allclose(v.xi, expected.MARKOV_XI, atol=1e-9)
    np.testing.assert_allclose(v.eta, expected.MARKOV_ETA, atol=1e-9)
    assert v.zeros_interlace and not v.deriv_interlace and v.case is None


def test_explicit_polynomial_roots():
    # e^{-t} (t - 1)(t - 3) + 0 has zeros exactly at 1 and 3
    f = HybridPolynomial.from_roots_form(1.0, [1.0, 3.0], 0.0)
    np.testing.assert_allclose(f.roots(), [1.0, 3.0], atol=1e-12)
    with pytest.raises(DegenerateError):
        HybridPolynomial.from_roots_form(1.0, [2.0, 2.0], 0.0).roots()


def test_coeff_sign_law():
    g = HybridPolynomial.from_roots_form(50.0, [2.0, 4.0], 1.0, n=2)
    v = coeff_sign_law(g)
    assert v.roots == 2 and v.sign_ac > 0 and v.holds
    c0 = HybridPolynomial.from_roots_form(1.0, [1.0, 3.0], 0.0)
    assert coeff_sign_law(c0).sign_ac == 0
    with pytest.raises(ValueError):
        coeff_sign_law(HybridPolynomial([10.0, -10.0], 1.0, n=2))


@given(hybrid_systems(n_min=2, n_max=6))
def test_oscillating_branches_obey_sign_law(x):
    rep = leading_a(x)
    n = x.n
    for i in range(1, rep.r):
        f = SignedBranch(EXPONENTIAL, x, i, (-1) ** (n + 1 - i), rep)
        v = coeff_sign_law(f)
        assert v.roots == n + 1 and v.sign_ac < 0 and v.holds
