"""Sandwich and intertwining Monte-Carlo runs around the optimal nodes."""

import os
import time
from dataclasses import dataclass, replace

from _config import parse
from wlil.equioscillation import MonteCarloConfig, intertwining_check, sandwich_check


@dataclass
class RunConfig:
    n_min: int = 1
    n_max: int = 4
    trials: int = 1000
    seed: int = 42
    workers: int = os.cpu_count() or 1


def main():
    cfg = parse(RunConfig, __doc__)
    mc = MonteCarloConfig(trials=cfg.trials, seed=cfg.seed, workers=cfg.workers)
    for n in range(cfg.n_min, cfg.n_max + 1):
        t0 = time.perf_counter()
        s = sandwich_check(n, replace(mc))
        t = intertwining_check(n, replace(mc))
        print(f"n={n}: sandwich {s.passes}/{s.trials} (skip {s.skipped}), "
              f"intertwining {t.passes}/{t.trials} (skip {t.skipped})  "
              f"{time.perf_counter() - t0:.1f} s")
        for f in (s.failures + t.failures)[:5]:
            print("   ", f)


if __name__ == "__main__":
    main()
