"""The map Gamma(x) = (m_2 - m_1, ..., m_{n+1} - m_n) and its zero.

Gamma vanishes exactly at the equioscillating (and optimal) hybrid node
system. It is solved by damped Newton with the analytic Jacobian, checked
against derivative-free minimax oracles, and probed by Monte-Carlo for the
sandwich and intertwining properties.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .jacobian import analytic_jacobian
from .lebesgue_branches import interval_maxima
from .nodes_basis import NodeError, NodeSystem, random_free_nodes
from .weights import EXPONENTIAL, Weight


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-10
    max_iter: int = 200
    min_gap: float = 1e-6
    max_halvings: int = 40
    boundary_fraction: float = 0.9


@dataclass(frozen=True)
class MonteCarloConfig:
    trials: int = 1000
    seed: int = 42
    workers: int = 1
    x_max: float | None = None
    margin: float = 1e-12


def maxima(w: Weight, x: NodeSystem) -> np.ndarray:
    return np.array([mx.m for mx in interval_maxima(w, x)])


def gamma(w: Weight, x: NodeSystem) -> np.ndarray:
    return np.diff(maxima(w, x))


def gamma_jacobian(w: Weight, x: NodeSystem) -> np.ndarray:
    """Rows A[i+1] - A[i] of the analytic maxima Jacobian."""
    return np.diff(analytic_jacobian(w, x), axis=0)


def initial_guess(n: int) -> np.ndarray:
    return np.arange(1, n + 1) * 2.0 * math.log(n + 2) / (n + 1)


def _feasible_scale(free: np.ndarray, step: np.ndarray, cfg: SolverConfig) -> float:
    """Largest t <= 1 keeping x_1 and every gap above ``min_gap``."""
    pos = np.concatenate([[0.0], free])
    gaps = np.diff(pos)
    dgaps = np.diff(np.concatenate([[0.0], step]))
    t = 1.0
    shrinking = dgaps < 0
    if np.any(shrinking):
        room = (gaps[shrinking] - cfg.min_gap) / -dgaps[shrinking]
        t = min(t, cfg.boundary_fraction * float(room.min()))
    return max(t, 0.0)


@dataclass
class SolveReport:
    nodes: np.ndarray
    residual: float
    level: float
    iterations: int
    converged: bool
    trace: list[float] = field(default_factory=list)
    target: np.ndarray | None = None
    oracle_gap: float | None = None
    message: str = ""

    @property
    def system(self) -> NodeSystem:
        return NodeSystem.hybrid(self.nodes)


def solve_equioscillation(n: int, x0=None, w: Weight = EXPONENTIAL, target=None,
                          cfg: SolverConfig = SolverConfig()) -> SolveReport:
    """Damped Newton for Gamma(x) = target (default 0) on the simplex."""
    if n < 1:
        raise ValueError("n must be at least 1")
    free = np.asarray(initial_guess(n) if x0 is None else x0, dtype=float).copy()
    if free.shape != (n,):
        raise ValueError(f"start must have {n} free nodes")
    v = np.zeros(n) if target is None else np.asarray(target, dtype=float)
    x = NodeSystem.hybrid(free)
    F = gamma(w, x) - v
    res = float(np.abs(F).max())
    trace = [res]
    it = 0
    while res > cfg.tol and it < cfg.max_iter:
        it += 1
        J = gamma_jacobian(w, x)
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return SolveReport(free, res, float(maxima(w, x).max()), it, False, trace, v,
                               message="singular Jacobian")
        t = _feasible_scale(free, step, cfg)
        accepted = False
        for _ in range(cfg.max_halvings):
            cand = free + t * step
            try:
                xc = NodeSystem.hybrid(cand)
                Fc = gamma(w, xc) - v
            except (NodeError, RuntimeError):
                t *= 0.5
                continue
            rc = float(np.abs(Fc).max())
            if rc < res:
                free, x, F, res = cand, xc, Fc, rc
                accepted = True
                break
            t *= 0.5
        trace.append(res)
        if not accepted:
            break
    m = maxima(w, x)
    ok = res <= cfg.tol
    return SolveReport(free, res, float(m.mean()), it, ok, trace, v,
                       message="" if ok else "no convergence")


# ------------------------------------------------------------------- oracles


def max_level(w: Weight, free) -> float:
    """max_i m_i, +inf outside the simplex."""
    free = np.asarray(free, dtype=float)
    if free[0] <= 0 or np.any(np.diff(free) <= 0):
        return math.inf
    return float(maxima(w, NodeSystem.hybrid(free)).max())


@dataclass
class OracleResult:
    nodes: np.ndarray
    level: float
    evaluations: int


def golden_oracle(w: Weight = EXPONENTIAL, upper: float = 30.0, tol: float = 1e-11) -> OracleResult:
    """n = 1: golden-section search of max(m_1, m_2) over x_1 in (0, upper)."""
    f = lambda s: max_level(w, [s])  # noqa: E731
    grid = np.geomspace(1e-3, upper, 64)
    k = int(np.argmin([f(s) for s in grid]))
    res = minimize_scalar(f, bracket=(grid[k - 1], grid[k], grid[k + 1]),
                          method="golden", tol=tol)
    return OracleResult(np.array([res.x]), float(res.fun), int(res.nfev) + grid.size)


def nelder_mead_oracle(n: int, w: Weight = EXPONENTIAL, starts: int = 20, seed: int = 42,
                       coarse_iter: int = 60) -> OracleResult:
    """n >= 2: Nelder-Mead on max_i m_i in log-gap coordinates.

    Each start gets a short run; the best one is then polished to tight
    tolerances, restarting the simplex until it stops moving.
    """
    rng = np.random.default_rng(seed)
    to_free = lambda u: np.cumsum(np.exp(u))  # noqa: E731
    f = lambda u: max_level(w, to_free(u))  # noqa: E731
    evals = 0
    best = None
    for s in range(starts):
        free = initial_guess(n) if s == 0 else random_free_nodes(n, rng)
        u0 = np.log(np.diff(np.concatenate([[0.0], free])))
        r = minimize(f, u0, method="Nelder-Mead",
                     options={"maxiter": coarse_iter, "xatol": 1e-4, "fatol": 1e-6})
        evals += r.nfev
        if best is None or r.fun < best.fun:
            best = r
    u = best.x
    for _ in range(20):
        r = minimize(f, u, method="Nelder-Mead",
                     options={"maxiter": 4000, "xatol": 1e-12, "fatol": 1e-15, "adaptive": True})
        evals += r.nfev
        moved = np.abs(r.x - u).max()
        u = r.x
        if moved < 1e-11:
            break
    return OracleResult(to_free(u), float(r.fun), evals)


def minimax_oracle(n: int, w: Weight = EXPONENTIAL, seed: int = 42) -> OracleResult:
    return golden_oracle(w) if n == 1 else nelder_mead_oracle(n, w, seed=seed)


# --------------------------------------------------------------- Monte-Carlo


def _trial_rngs(seed: int, trials: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(trials)


def _sandwich_one(args):
    n, ss, level, star, x_max, margin, w = args
    rng = np.random.default_rng(ss)
    free = random_free_nodes(n, rng, x_max)
    if np.allclose(free, star, rtol=0.0, atol=1e-9):
        return None
    m = maxima(w, NodeSystem.hybrid(free))
    tol = margin * level
    return bool(m.min() < level - tol and m.max() > level + tol), free, m


def _intertwine_one(args):
    n, ss, x_max, margin, w = args
    rng = np.random.default_rng(ss)
    a = random_free_nodes(n, rng, x_max)
    b = random_free_nodes(n, rng, x_max)
    ma = maxima(w, NodeSystem.hybrid(a))
    mb = maxima(w, NodeSystem.hybrid(b))
    d = ma - mb
    tol = margin * np.maximum(np.abs(ma), np.abs(mb))
    return bool(np.any(d < -tol) and np.any(d > tol)), np.stack([a, b]), d


def _run(fn, jobs, workers: int):
    if workers <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


@dataclass
class MonteCarloVerdict:
    trials: int
    passes: int
    skipped: int
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passes + self.skipped == self.trials


def sandwich_check(n: int, cfg: MonteCarloConfig = MonteCarloConfig(), w: Weight = EXPONENTIAL,
                   solution: SolveReport | None = None) -> MonteCarloVerdict:
    """Every x != y* has some m_i(x) below and some m_j(x) above m*."""
    sol = solution or solve_equioscillation(n, w=w)
    if not sol.converged:
        raise RuntimeError(f"optimal nodes not found: {sol.message}")
    jobs = [(n, ss, sol.level, sol.nodes, cfg.x_max, cfg.margin, w)
            for ss in _trial_rngs(cfg.seed, cfg.trials)]
    out = _run(_sandwich_one, jobs, cfg.workers)
    v = MonteCarloVerdict(cfg.trials, 0, 0)
    for r in out:
        if r is None:
            v.skipped += 1
        elif r[0]:
            v.passes += 1
        else:
            v.failures.append({"nodes": r[1].tolist(), "maxima": r[2].tolist()})
    return v


def intertwining_check(n: int, cfg: MonteCarloConfig = MonteCarloConfig(),
                       w: Weight = EXPONENTIAL) -> MonteCarloVerdict:
    """For random x != z some m_i(x) < m_i(z) and some m_j(x) > m_j(z)."""
    jobs = [(n, ss, cfg.x_max, cfg.margin, w) for ss in _trial_rngs(cfg.seed + 1, cfg.trials)]
    out = _run(_intertwine_one, jobs, cfg.workers)
    v = MonteCarloVerdict(cfg.trials, 0, 0)
    for ok, pair, d in out:
        if ok:
            v.passes += 1
        else:
            v.failures.append({"nodes": pair.tolist(), "difference": d.tolist()})
    return v


# ------------------------------------------------------------ global probes


@dataclass
class ProbeResult:
    target: np.ndarray
    solutions: list[np.ndarray]
    converged: int
    starts: int
    spread: float

    @property
    def solvable(self) -> bool:
        return self.converged > 0

    @property
    def unique(self) -> bool:
        return self.converged > 0 and self.spread <= 1e-7


def gamma_surjectivity_probe(n: int, targets, starts: int = 10, seed: int = 42,
                             w: Weight = EXPONENTIAL) -> list[ProbeResult]:
    """Newton on Gamma(x) = v from several starts, for each target v."""
    rng = np.random.default_rng(seed)
    out = []
    for v in targets:
        v = np.asarray(v, dtype=float)
        sols = []
        for s in range(starts):
            x0 = initial_guess(n) if s == 0 else random_free_nodes(n, rng)
            rep = solve_equioscillation(n, x0, w, target=v)
            if rep.converged:
                sols.append(rep.nodes)
        spread = 0.0
        if sols:
            stack = np.stack(sols)
            spread = float(np.abs(stack - stack[0]).max())
        out.append(ProbeResult(v, sols, len(sols), starts, spread))
    return out


@dataclass
class PropernessPath:
    gaps: np.ndarray
    norms: np.ndarray

    def first_exceeding(self, level: float = 1e3) -> float | None:
        hit = np.nonzero(self.norms > level)[0]
        return float(self.gaps[hit[0]]) if hit.size else None

    def eventually_increasing(self, tail: int = 5) -> bool:
        return bool(np.all(np.diff(self.norms[-tail:]) > 0))


def properness_path(n: int = 2, steps: int = 20, w: Weight = EXPONENTIAL) -> PropernessPath:
    """||Gamma||_inf as the first gap (x_1 - x_0 for n = 1, else x_2 - x_1) shrinks as 2^-p."""
    base = initial_guess(n)
    gaps = 2.0 ** -np.arange(1, steps + 1)
    norms = []
    for g in gaps:
        free = base.copy()
        if n == 1:
            free[0] = g
        else:
            free[1] = free[0] + g
            free[2:] = np.maximum(free[2:], free[1] + np.arange(1, n - 1))
        norms.append(float(np.abs(gamma(w, NodeSystem.hybrid(free))).max()))
    return PropernessPath(gaps, np.array(norms))
