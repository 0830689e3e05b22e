"""Write CSV curves for every counterexample plus the properness path."""

import os
from dataclasses import dataclass

from _config import parse
from wlil.cli import write_csv
from wlil.counterexamples import CaseId, run_case
from wlil.equioscillation import properness_path


@dataclass
class FigureConfig:
    outdir: str = "figures"
    properness_n: int = 2
    properness_steps: int = 24


def main():
    cfg = parse(FigureConfig, __doc__)
    os.makedirs(cfg.outdir, exist_ok=True)
    for case in CaseId:
        out = run_case(case)
        path = os.path.join(cfg.outdir, f"{case.value}.csv")
        write_csv(path, out.curves)
        print(path)
    p = properness_path(cfg.properness_n, cfg.properness_steps)
    path = os.path.join(cfg.outdir, "properness.csv")
    write_csv(path, {"gap": p.gaps, "gamma_norm": p.norms})
    print(path)


if __name__ == "__main__":
    main()
