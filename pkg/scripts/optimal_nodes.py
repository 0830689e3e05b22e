"""Equioscillating hybrid nodes for a range of degrees, with optional oracle check."""

import time
from dataclasses import dataclass

import numpy as np

from _config import parse
from wlil.equioscillation import SolverConfig, minimax_oracle, solve_equioscillation


@dataclass
class OptimalConfig:
    n_min: int = 1
    n_max: int = 6
    oracle_max: int = 3  # Nelder-Mead gets slow past this
    tol: float = 1e-10
    seed: int = 42


def main():
    cfg = parse(OptimalConfig, __doc__)
    solver = SolverConfig(tol=cfg.tol)
    print(f"{'n':>3} {'level':>20} {'|Gamma|':>9} {'iters':>5} {'oracle dx':>10}  nodes")
    for n in range(cfg.n_min, cfg.n_max + 1):
        t0 = time.perf_counter()
        rep = solve_equioscillation(n, cfg=solver)
        dx = ""
        if n <= cfg.oracle_max:
            orc = minimax_oracle(n, seed=cfg.seed)
            dx = f"{np.abs(orc.nodes - rep.nodes).max():.1e}"
        nodes = " ".join(f"{v:.10f}" for v in rep.nodes)
        print(f"{n:>3} {rep.level:>20.15f} {rep.residual:>9.1e} {rep.iterations:>5} {dx:>10}  "
              f"{nodes}  ({time.perf_counter() - t0:.1f} s)")


if __name__ == "__main__":
    main()
