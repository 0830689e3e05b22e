"""Acceptance criteria 1-9, one test each.

Each test prints a single ``[criterion k] PASS|FAIL`` line (shown even
without ``-s``) with the measured quantities and wall time.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from wlil.counterexamples import run_case
from wlil.equioscillation import (
    MonteCarloConfig, intertwining_check, maxima, minimax_oracle, properness_path,
    sandwich_check, solve_equioscillation,
)
from wlil.jacobian import analytic_jacobian, build_bundle, check_q_properties, fd_jacobian
from wlil.nodes_basis import NodeSystem, spaced_free_nodes
from wlil.roots_interlacing import analyse
from wlil.weights import EXPONENTIAL

import expected


@contextmanager
def criterion(k, limit, capsys):
    state = {"ok": False, "detail": ""}
    t0 = time.perf_counter()
    try:
        yield state
    except Exception as exc:
        state["detail"] = f"raised {exc!r}"
        raise
    finally:
        dt = time.perf_counter() - t0
        timely = dt < limit
        verdict = "PASS" if state["ok"] and timely else "FAIL"
        with capsys.disabled():
            print(f"\n[criterion {k}] {verdict}  {state['detail']}  "
                  f"({dt:.2f} s, limit {limit:g} s)")
    assert state["ok"], state["detail"]
    assert timely, f"criterion {k} took {dt:.2f} s (limit {limit} s)"


def _case_criterion(k, case, capsys, extra=""):
    with criterion(k, 1.0, capsys) as st:
        out = run_case(case)
        st["ok"] = out.ok
        bad = "; ".join(out.failures())
        st["detail"] = extra(out) if extra else ""
        if bad:
            st["detail"] += f" failed: {bad}"


def test_criterion_1_exp_halfline(capsys):
    _case_criterion(1, "exp-halfline", capsys,
                    lambda o: f"slope at 4 = {o.values['derivative_at_4']:.6f}, "
                              f"|grad m_3| = {o.values['grad_m_3_inf']:.1e};")


def test_criterion_2_sqrt_weight(capsys):
    _case_criterion(2, "sqrt-weight", capsys,
                    lambda o: "t = " + ", ".join(f"{t:.6f}" for t in o.values["stationary_points"])
                              + ";")


def test_criterion_3_hermite(capsys):
    _case_criterion(3, "hermite", capsys,
                    lambda o: f"B = {o.values['B']:.12f}, |grad| = "
                              f"{max(o.values['grad_m_0_inf'], o.values['grad_m_3_inf']):.1e};")


def test_criterion_4_markov(capsys):
    _case_criterion(4, "markov", capsys,
                    lambda o: f"xi = {o.values['xi']}, eta = {o.values['eta']};")


def test_criterion_5_interlacing_suite(capsys):
    with criterion(5, 60.0, capsys) as st:
        rng = np.random.default_rng(42)
        failures = []
        for s in range(200):
            n = int(rng.integers(2, 7))
            x = NodeSystem.hybrid(spaced_free_nodes(n, rng))
            rep = analyse(x, EXPONENTIAL)
            for name, v in rep.checks.items():
                if not v.ok:
                    failures.append((s, name, v.failures[:1]))
            q = check_q_properties(EXPONENTIAL, x, rep.droots)
            for name, v in (("q1", q.nonzero_at_z), ("q2", q.one_root_per_window),
                            ("q3", q.no_root_near_own_z)):
                if not v.ok:
                    failures.append((s, name, v.failures[:1]))
            b = build_bundle(EXPONENTIAL, x)
            if any(b.q_singular.values()):
                failures.append((s, "Q_k singular", b.q_dets))
        st["ok"] = not failures
        st["detail"] = f"200 systems, {len(failures)} failures {failures[:3] if failures else ''}"


def test_criterion_6_gradient_oracle(capsys):
    with criterion(6, 30.0, capsys) as st:
        rng = np.random.default_rng(42)
        worst = 0.0
        for _ in range(50):
            n = int(rng.integers(1, 7))
            x = NodeSystem.hybrid(spaced_free_nodes(n, rng))
            A, F = analytic_jacobian(EXPONENTIAL, x), fd_jacobian(EXPONENTIAL, x)
            worst = max(worst, float((np.abs(A - F) / np.abs(F)).max()))
        st["ok"] = worst <= 1e-6
        st["detail"] = f"50 systems, worst entrywise rel err {worst:.2e} (tol 1e-6)"


def test_criterion_7_equioscillation(capsys):
    with criterion(7, 30.0, capsys) as st:
        rows, ok = [], True
        for n in (1, 2, 3):
            a = solve_equioscillation(n)
            b = solve_equioscillation(n, x0=np.linspace(0.5, 2.0 * n, n))
            orc = minimax_oracle(n)
            dx = float(np.abs(a.nodes - orc.nodes).max())
            dl = abs(a.level - orc.level)
            ds = float(np.abs(a.nodes - b.nodes).max())
            good = (a.converged and b.converged and a.residual <= 1e-10
                    and dx <= 1e-6 and dl <= 1e-6 and ds <= 1e-8)
            ok &= good
            rows.append(f"n={n}: |G|={a.residual:.1e} dx={dx:.1e} dm={dl:.1e} start={ds:.1e}")
        ok &= abs(solve_equioscillation(1).nodes[0] - expected.OPT_N1_X) <= 1e-10
        st["ok"] = ok
        st["detail"] = "; ".join(rows)


def test_criterion_8_monte_carlo(capsys):
    with criterion(8, 60.0, capsys) as st:
        cfg = MonteCarloConfig(trials=1000, seed=42)
        s = sandwich_check(2, cfg)
        t = intertwining_check(2, cfg)
        st["ok"] = s.ok and t.ok and not s.failures and not t.failures
        st["detail"] = (f"sandwich {s.passes}/{s.trials} (skipped {s.skipped}), "
                        f"intertwining {t.passes}/{t.trials} (skipped {t.skipped})")


def test_criterion_9_properness(capsys):
    with criterion(9, 10.0, capsys) as st:
        p = properness_path(2, steps=20)
        hit = p.first_exceeding(1e3)
        st["ok"] = hit is not None and hit >= 2.0 ** -20
        st["detail"] = (f"||Gamma|| > 1e3 first at gap {hit if hit is None else f'2^{math.log2(hit):.0f}'}"
                        f", final {p.norms[-1]:.2e}")
