import numpy as np
import pytest
from hypothesis import given

from conftest import hybrid_systems
from wlil.equioscillation import solve_equioscillation
from wlil.jacobian import (
    AnalyticGradientUnavailable, analytic_jacobian, build_bundle, check_q_properties, eval_q,
    fd_jacobian, partial_m, scaling_factors,
)
from wlil.lebesgue_branches import branch
from wlil.nodes_basis import NodeSystem, SystemKind
from wlil.weights import EXPONENTIAL, HERMITE


def test_partial_matches_fd_on_random_triples(rng):
    for _ in range(50):
        n = int(rng.integers(1, 6))
        x = NodeSystem.hybrid(np.cumsum(rng.uniform(0.25, 1.25, n)))
        i = int(rng.integers(1, n + 2))
        j = int(rng.integers(1, n + 1))
        fd = fd_jacobian(EXPONENTIAL, x)[i - 1, j - 1]
        assert partial_m(EXPONENTIAL, x, i, j) == pytest.approx(fd, rel=1e-6, abs=1e-9)


@given(hybrid_systems(n_max=6))
def test_scaling_identity(x):
    b = build_bundle(EXPONENTIAL, x)
    C, R = scaling_factors(EXPONENTIAL, x, b.z)
    np.testing.assert_allclose(b.A, C[:, None] * R[None, :] * b.Q.T, rtol=1e-9, atol=1e-14)
    for k in b.rows:
        pred = np.prod(np.delete(C, b.rows.index(k))) * np.prod(R) * b.q_dets[k]
        assert b.a_dets[k] == pytest.approx(pred, rel=1e-8)


@given(hybrid_systems(n_max=6))
def test_hybrid_minors_nonsingular_and_flags_agree(x):
    b = build_bundle(EXPONENTIAL, x)
    assert not any(b.a_singular.values()) and not any(b.q_singular.values())
    assert b.flags_agree


def test_bundle_is_deterministic():
    x = NodeSystem.hybrid([0.7, 1.9, 3.6])
    b1, b2 = build_bundle(EXPONENTIAL, x), build_bundle(EXPONENTIAL, x)
    assert b1.A.tobytes() == b2.A.tobytes() and b1.q_dets == b2.q_dets


def test_endpoint_maximum_refuses_formula():
    y = NodeSystem(SystemKind.YN_HALFLINE, [0.0, 1.0, 4.0])
    with pytest.raises(AnalyticGradientUnavailable):
        partial_m(EXPONENTIAL, y, 3, 1)
    with pytest.raises(AnalyticGradientUnavailable):
        analytic_jacobian(EXPONENTIAL, y)


def test_yn_example_zero_row_and_singular_minors():
    b = build_bundle(EXPONENTIAL, NodeSystem(SystemKind.YN_HALFLINE, [0.0, 1.0, 4.0]))
    assert b.mode == "fd"
    assert np.abs(b.A_raw[2]).max() < 1e-8
    assert b.a_singular == {1: True, 2: True, 3: False}


def test_hermite_example_all_minors_singular():
    bb = np.sqrt(1.8666512271213576)
    b = build_bundle(HERMITE, NodeSystem(SystemKind.HERMITE_LINE, [-bb, 0.0, bb]))
    assert b.A.shape == (4, 3)
    assert np.abs(b.A_raw[0]).max() < 1e-8 and np.abs(b.A_raw[3]).max() < 1e-8
    assert all(b.a_singular.values())


def test_equioscillating_n1_gradient_of_difference():
    sol = solve_equioscillation(1)
    A = analytic_jacobian(EXPONENTIAL, sol.system)
    assert abs(A[1, 0] - A[0, 0]) > 1e-3


@given(hybrid_systems(n_min=1, n_max=6))
def test_q_properties(x):
    v = check_q_properties(EXPONENTIAL, x)
    assert v.ok, (v.nonzero_at_z.failures, v.one_root_per_window.failures,
                  v.no_root_near_own_z.failures)


def test_q_limit_at_own_maximum():
    x = NodeSystem.hybrid([1.0, 4.0])
    b = build_bundle(EXPONENTIAL, x)
    for i, zi in zip(b.rows, b.z):
        at = eval_q(EXPONENTIAL, x, i, zi, zi)[0]
        near = eval_q(EXPONENTIAL, x, i, zi + 1e-5, zi)[0]
        assert np.isfinite(at) and at != 0
        assert at == pytest.approx(branch(EXPONENTIAL, x, i).deriv2(zi)[0])
        assert near == pytest.approx(at, rel=1e-3)
