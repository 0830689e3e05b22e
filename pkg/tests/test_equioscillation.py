import numpy as np
import pytest
from hypothesis import given

from conftest import hybrid_systems
from wlil.equioscillation import (
    MonteCarloConfig, gamma, gamma_jacobian, gamma_surjectivity_probe, golden_oracle,
    initial_guess, intertwining_check, maxima, properness_path, sandwich_check,
    solve_equioscillation,
)
from wlil.nodes_basis import NodeSystem
from wlil.weights import EXPONENTIAL

import expected


@given(hybrid_systems(n_max=6))
def test_gamma_telescopes(x):
    m = maxima(EXPONENTIAL, x)
    assert gamma(EXPONENTIAL, x).sum() == pytest.approx(m[-1] - m[0], abs=1e-12)


@given(hybrid_systems(n_max=5))
def test_gamma_jacobian_matches_fd(x):
    J = gamma_jacobian(EXPONENTIAL, x)
    h = 1e-6
    cols = []
    for j in x.free_indices:
        up = gamma(EXPONENTIAL, x.with_node(j, x.nodes[j] + h))
        dn = gamma(EXPONENTIAL, x.with_node(j, x.nodes[j] - h))
        cols.append((up - dn) / (2 * h))
    np.testing.assert_allclose(J, np.column_stack(cols), rtol=1e-5, atol=1e-7 * np.abs(J).max())


def test_n1_against_extended_precision():
    rep = solve_equioscillation(1)
    assert rep.converged and rep.residual <= 1e-10
    assert rep.nodes[0] == pytest.approx(expected.OPT_N1_X, abs=1e-10)
    assert rep.level == pytest.approx(expected.OPT_N1_LEVEL, abs=1e-12)
    orc = golden_oracle()
    assert orc.nodes[0] == pytest.approx(rep.nodes[0], abs=1e-6)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_solution_equioscillates_and_is_start_independent(n):
    a = solve_equioscillation(n)
    b = solve_equioscillation(n, x0=np.arange(1, n + 1) * 1.5)
    assert a.converged and b.converged
    assert np.abs(a.nodes - b.nodes).max() <= 1e-8
    assert a.level > 1
    assert np.ptp(maxima(EXPONENTIAL, a.system)) <= 1e-10
    # Jacobian of Gamma at the solution is well away from singular
    assert abs(np.linalg.det(gamma_jacobian(EXPONENTIAL, a.system))) > 1e-6


def test_solver_reports_nonconvergence():
    from wlil.equioscillation import SolverConfig
    rep = solve_equioscillation(3, cfg=SolverConfig(max_iter=1))
    assert not rep.converged and len(rep.trace) == 2 and rep.message


def test_initial_guess_feasible():
    for n in range(1, 9):
        g = initial_guess(n)
        assert g[0] > 0 and np.all(np.diff(g) > 0)


def test_near_degenerate_gap_is_large():
    x = NodeSystem.hybrid([1.0, 1.001])
    assert np.abs(gamma(EXPONENTIAL, x)).max() > 10


def test_sandwich_small_run_and_worker_independence():
    cfg = MonteCarloConfig(trials=60, seed=7)
    v1 = sandwich_check(2, cfg)
    v2 = sandwich_check(2, MonteCarloConfig(trials=60, seed=7, workers=2))
    assert v1.ok and v1.passes == v2.passes == 60
    assert intertwining_check(2, cfg).ok


def test_surjectivity_probe():
    res = gamma_surjectivity_probe(2, [[0.0, 0.0], [5.0, -5.0], [3.0, -3.0]], starts=4)
    assert all(r.solvable and r.unique for r in res)
    star = solve_equioscillation(2)
    np.testing.assert_allclose(res[0].solutions[0], star.nodes, atol=1e-8)


def test_properness_path():
    p = properness_path(2)
    assert p.first_exceeding(1e3) is not None and p.eventually_increasing()
    assert p.norms[-1] > 1e3
