"""Command-line front end: ``wlil <subcommand> ...``.

Exit codes: 0 success, 1 a checked property failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import counterexamples as cx
from .equioscillation import (
    MonteCarloConfig,
    gamma_surjectivity_probe,
    intertwining_check,
    minimax_oracle,
    properness_path,
    sandwich_check,
    solve_equioscillation,
)
from .jacobian import build_bundle, check_q_properties
from .lebesgue_branches import interval_maxima
from .nodes_basis import NodeError, NodeSystem, SystemKind
from .roots_interlacing import analyse
from .weights import DomainError, weight_from_name

SCHEMA = 1
DEFAULT_SEED = 42

_DEFAULT_SYSTEM = {"exp": "hybrid", "sqrtexp": "yn", "hermite": "hermite", "unit": "finite"}


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    json: bool
    out: str | None
    seed: int


def default_seed() -> int:
    raw = os.environ.get("WLIL_SEED")
    if raw is None or raw == "":
        return DEFAULT_SEED
    try:
        seed = int(raw, 0)
    except ValueError:
        raise UsageError(f"WLIL_SEED must be an integer, got {raw!r}") from None
    if not 0 <= seed < 2**64:
        raise UsageError("WLIL_SEED must fit in 64 unsigned bits")
    return seed


def parse_floats(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected finite numbers, got {text!r}")
    return vals


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


# ------------------------------------------------------------------ output


def _clean(v):
    if isinstance(v, np.ndarray):
        return _clean(v.tolist())
    if isinstance(v, (list, tuple)):
        return [_clean(u) for u in v]
    if isinstance(v, (np.floating, float)):
        f = float(v)
        return f if math.isfinite(f) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def to_json(record: dict) -> str:
    body = {"schema": SCHEMA}
    body.update({k: _clean(v) for k, v in record.items()})
    return json.dumps(body, indent=2, allow_nan=False) + "\n"


def to_text(record: dict) -> str:
    lines = []
    for k, v in record.items():
        v = _clean(v)
        if isinstance(v, list) and v and isinstance(v[0], list):
            lines.append(f"{k}:")
            lines.extend("  " + " ".join(f"{u: .10g}" if isinstance(u, float) else str(u) for u in row)
                         for row in v)
        else:
            lines.append(f"{k}: {v}")
    return "\n".join(lines) + "\n"


def write_csv(path: str, columns: dict[str, np.ndarray]) -> None:
    names = list(columns)
    data = np.column_stack([np.asarray(columns[c], dtype=float) for c in names])
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(names)
    for row in data:
        wr.writerow([format(v, ".17g") for v in row])
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def emit(cfg: RunConfig, record: dict) -> None:
    text = to_json(record) if cfg.json else to_text(record)
    if cfg.out:
        with open(cfg.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------- systems


def make_system(weight: str, nodes: list[float], system: str | None):
    kind = SystemKind(system or _DEFAULT_SYSTEM[weight])
    interval = (nodes[0], nodes[-1]) if weight == "unit" else None
    w = weight_from_name(weight, interval)
    x = NodeSystem(kind, nodes)
    x.check_weight(w)
    return w, x


# ---------------------------------------------------------------- commands


def cmd_lebesgue(args, cfg: RunConfig) -> int:
    w, x = make_system(args.weight, args.nodes, args.system)
    mx = interval_maxima(w, x)
    m = np.array([q.m for q in mx])
    record = {
        "command": "lebesgue",
        "weight": w.kind.value,
        "system": x.kind.value,
        "nodes": x.nodes,
        "interval": [q.i for q in mx],
        "m": m,
        "z": [q.z for q in mx],
        "location": [q.location.value for q in mx],
        "nonunique_risk": [q.nonunique_risk for q in mx],
        "lebesgue_constant": float(m.max()),
    }
    if x.is_hybrid:
        record["gamma"] = np.diff(m)
    emit(cfg, record)
    if args.plot_csv:
        from .lebesgue_branches import eval_lebesgue
        lo = float(x.nodes[0]) if w.lower == 0.0 or x.kind is SystemKind.FINITE_INTERVAL else \
            float(x.nodes[0]) - 2.0
        hi = float(x.nodes[-1]) if x.kind is SystemKind.FINITE_INTERVAL else float(x.nodes[-1]) + 4.0
        t = np.linspace(lo, hi, args.points)
        write_csv(args.plot_csv, {"t": t, "lebesgue": eval_lebesgue(w, x, t)})
    return 0


def cmd_jacobian(args, cfg: RunConfig) -> int:
    w, x = make_system(args.weight, args.nodes, args.system)
    b = build_bundle(w, x, mode=args.mode)
    record = {
        "command": "jacobian",
        "weight": w.kind.value,
        "system": x.kind.value,
        "nodes": x.nodes,
        "mode": b.mode,
        "rows": b.rows,
        "cols": b.cols,
        "a_matrix": b.A,
        "a_det": [b.a_dets[k] for k in b.rows],
        "a_cond": [b.a_conds[k] for k in b.rows],
        "a_singular": [b.a_singular[k] for k in b.rows],
    }
    if b.Q is not None:
        record.update(
            q_matrix=b.Q,
            q_det=[b.q_dets[k] for k in b.rows],
            q_singular=[b.q_singular[k] for k in b.rows],
            flags_agree=b.flags_agree,
        )
    emit(cfg, record)
    return 0


def cmd_interlace(args, cfg: RunConfig) -> int:
    x = NodeSystem(SystemKind.HYBRID, args.nodes)
    w = weight_from_name("exp")
    rep = analyse(x, w, pairs=not args.no_pairs)
    qv = check_q_properties(w, x, rep.droots)
    q_ok = qv.ok
    bundle = build_bundle(w, x)
    q_nonsingular = not any(bundle.q_singular.values())
    n = x.n
    record = {
        "command": "interlace",
        "nodes": x.nodes,
        "a": rep.coeffs.a,
        "r": rep.coeffs.r,
        "a_r_zero": rep.coeffs.a_r_zero,
        "root_intervals": [sorted(rep.roots.y[i]) for i in x.branch_indices],
        "roots": [[rep.roots.y[i][k] for k in sorted(rep.roots.y[i])] for i in x.branch_indices],
        "derivative_roots": [rep.droots.W[i] for i in x.branch_indices],
        "z": [rep.droots.z[i] for i in x.branch_indices],
        "window_counts": rep.droots.window_counts(),
        "expected_window_count": n + 1,
        "degree_flag_mismatch": rep.roots.degree_flag_mismatch,
    }
    for name, v in rep.checks.items():
        record[f"{name}_ok"] = v.ok
    record.update(
        q_property_1_ok=qv.nonzero_at_z.ok,
        q_property_2_ok=qv.one_root_per_window.ok,
        q_property_3_ok=qv.no_root_near_own_z.ok,
        q_minors_nonsingular=q_nonsingular,
    )
    ok = rep.ok and q_ok and q_nonsingular
    record["verdict"] = "PASS" if ok else "FAIL"
    emit(cfg, record)
    if not ok:
        for name, v in rep.checks.items():
            for msg in v.failures:
                print(f"{name}: {msg}", file=sys.stderr)
        for v in (qv.nonzero_at_z, qv.one_root_per_window, qv.no_root_near_own_z):
            for msg in v.failures:
                print(f"q_properties: {msg}", file=sys.stderr)
    return 0 if ok else 1


def cmd_optimal(args, cfg: RunConfig) -> int:
    start = args.start
    if start is not None and len(start) != args.n:
        raise UsageError(f"--start needs {args.n} values")
    rep = solve_equioscillation(args.n, start)
    record = {
        "command": "optimal",
        "n": args.n,
        "nodes": np.concatenate([[0.0], rep.nodes]),
        "residual": rep.residual,
        "level": rep.level,
        "iterations": rep.iterations,
        "converged": rep.converged,
        "residual_trace": rep.trace,
    }
    if rep.converged and args.n <= 3 and not args.no_oracle:
        orc = minimax_oracle(args.n, seed=cfg.seed)
        record.update(
            oracle_nodes=np.concatenate([[0.0], orc.nodes]),
            oracle_level=orc.level,
            oracle_node_gap=float(np.abs(orc.nodes - rep.nodes).max()),
            oracle_level_gap=abs(orc.level - rep.level),
        )
    emit(cfg, record)
    return 0 if rep.converged else 1


def cmd_sandwich(args, cfg: RunConfig) -> int:
    mc = MonteCarloConfig(trials=args.trials, seed=cfg.seed, workers=args.workers)
    sol = solve_equioscillation(args.n)
    if not sol.converged:
        print(f"optimal nodes not found (residual {sol.residual:.3g})", file=sys.stderr)
        return 1
    sw = sandwich_check(args.n, mc, solution=sol)
    tw = intertwining_check(args.n, mc)
    record = {
        "command": "sandwich",
        "n": args.n,
        "seed": cfg.seed,
        "trials": args.trials,
        "optimal_nodes": np.concatenate([[0.0], sol.nodes]),
        "optimal_level": sol.level,
        "sandwich_passes": sw.passes,
        "sandwich_skipped": sw.skipped,
        "sandwich_violations": len(sw.failures),
        "intertwining_passes": tw.passes,
        "intertwining_violations": len(tw.failures),
    }
    emit(cfg, record)
    for f in sw.failures[:10] + tw.failures[:10]:
        print(json.dumps(_clean(f)), file=sys.stderr)
    return 0 if sw.ok and tw.ok else 1


def cmd_counterexample(args, cfg: RunConfig) -> int:
    out = cx.run_case(args.case)
    record = {"command": "counterexample", "case": out.case.value}
    record.update({f"input_{k}": v for k, v in out.inputs.items()})
    record.update(out.values)
    record["check_names"] = [c.name for c in out.checks]
    record["check_passed"] = [c.passed for c in out.checks]
    record["check_computed"] = [c.computed for c in out.checks]
    record["check_expected"] = [c.expected for c in out.checks]
    record["check_tolerance"] = [c.tol for c in out.checks]
    record["all_passed"] = out.ok
    emit(cfg, record)
    if args.plot_csv:
        write_csv(args.plot_csv, out.curves)
    for line in out.failures():
        print(f"FAIL {line}", file=sys.stderr)
    return 0 if out.ok else 1


def cmd_gamma_probe(args, cfg: RunConfig) -> int:
    targets = args.target or [[0.0] * args.n]
    for t in targets:
        if len(t) != args.n:
            raise UsageError(f"every --target needs {args.n} components")
    res = gamma_surjectivity_probe(args.n, targets, starts=args.starts, seed=cfg.seed)
    record = {
        "command": "gamma-probe",
        "n": args.n,
        "seed": cfg.seed,
        "targets": [r.target for r in res],
        "converged": [r.converged for r in res],
        "starts": args.starts,
        "spread": [r.spread for r in res],
        "solutions": [r.solutions[0] if r.solutions else [None] * args.n for r in res],
        "unique": [r.unique for r in res],
    }
    ok = all(r.solvable for r in res)
    if args.properness:
        path = properness_path(args.n)
        hit = path.first_exceeding(1e3)
        record.update(
            properness_gaps=path.gaps,
            properness_norms=path.norms,
            properness_first_gap_above_1e3=hit,
            properness_eventually_increasing=path.eventually_increasing(),
        )
        ok = ok and hit is not None
    emit(cfg, record)
    return 0 if ok else 1


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON (schema 1) instead of text")
    common.add_argument("--out", metavar="PATH", help="write the report to PATH instead of stdout")
    common.add_argument("--seed", type=int, default=None,
                        help="master seed (default: $WLIL_SEED or 42)")

    system = argparse.ArgumentParser(add_help=False)
    system.add_argument("--weight", choices=["exp", "hermite", "sqrtexp", "unit"], default="exp")
    system.add_argument("--nodes", type=parse_floats, required=True,
                        help="comma-separated nodes x_0 < ... < x_n, e.g. 0,1,4")
    system.add_argument("--system", choices=[k.value for k in SystemKind],
                        help="node system kind (default: hybrid for exp, yn for sqrtexp, "
                             "hermite for hermite, finite for unit)")

    p = argparse.ArgumentParser(
        prog="wlil",
        description="Weighted Lagrange interpolation: interval Lebesgue maxima, their "
                    "Jacobians, zero interlacing, optimal (equioscillating) hybrid nodes "
                    "and counterexamples for non-hybrid systems.",
        epilog="Exit codes: 0 success, 1 a checked property failed, 2 usage error.",
    )
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    s = sub.add_parser("lebesgue", parents=[common, system],
                       help="interval maxima m_i, their locations and the Lebesgue constant",
                       description="Maximum of the Lebesgue function on every interval I_i "
                                   "between consecutive nodes (and the unbounded ends).")
    s.add_argument("--plot-csv", metavar="PATH", help="sample the Lebesgue function to CSV")
    s.add_argument("--points", type=positive_int, default=801, help="samples for --plot-csv")
    s.set_defaults(func=cmd_lebesgue)

    s = sub.add_parser("jacobian", parents=[common, system],
                       help="matrix A of dm_i/dx_j, minors A_k and Q_k, singularity flags",
                       description="Partial derivatives of the interval maxima with respect "
                                   "to the free nodes, determinants of every square minor and "
                                   "a relative singularity test.")
    s.add_argument("--mode", choices=["analytic", "fd"],
                   help="analytic (hybrid only) or central differences (default by system)")
    s.set_defaults(func=cmd_jacobian)

    s = sub.add_parser("interlace", parents=[common],
                       help="zero tables and interlacing checks for a hybrid system",
                       description="Leading coefficients a_i, critical index r, zeros of every "
                                   "branch and its derivative, their global ordering, window "
                                   "counts, pairwise Markov-type inheritance and the q_i "
                                   "properties. Nodes must start at 0.")
    s.add_argument("--nodes", type=parse_floats, required=True, help="0,x_1,...,x_n")
    s.add_argument("--no-pairs", action="store_true", help="skip the pairwise inheritance checks")
    s.set_defaults(func=cmd_interlace)

    s = sub.add_parser("optimal", parents=[common],
                       help="equioscillating (optimal) hybrid nodes by damped Newton",
                       description="Solve Gamma(x) = 0, i.e. m_1 = ... = m_{n+1}. For n <= 3 "
                                   "the answer is compared with a derivative-free minimax oracle.")
    s.add_argument("--n", type=positive_int, required=True, help="degree n")
    s.add_argument("--start", type=parse_floats, help="free nodes x_1,...,x_n to start from")
    s.add_argument("--no-oracle", action="store_true", help="skip the oracle comparison")
    s.set_defaults(func=cmd_optimal)

    s = sub.add_parser("sandwich", parents=[common],
                       help="Monte-Carlo sandwich and intertwining checks",
                       description="For random node systems x: some m_i(x) lies below and some "
                                   "m_j(x) above the optimal level; for random pairs (x, z) "
                                   "neither maxima vector dominates the other.")
    s.add_argument("--n", type=positive_int, default=2)
    s.add_argument("--trials", type=positive_int, default=1000)
    s.add_argument("--workers", type=positive_int, default=os.cpu_count() or 1)
    s.set_defaults(func=cmd_sandwich)

    s = sub.add_parser("counterexample", parents=[common],
                       help="reproduce a counterexample with named checks",
                       description="exp-halfline: exp(-t), nodes 0,1,4. sqrt-weight: "
                                   "exp(-sqrt t), nodes 0,1. hermite: exp(-t^2), nodes -b,0,b. "
                                   "markov: explicit pair whose derivative zeros fail to "
                                   "interlace.")
    s.add_argument("case", choices=[c.value for c in cx.CaseId])
    s.add_argument("--plot-csv", metavar="PATH", help="write the sampled curves to CSV")
    s.set_defaults(func=cmd_counterexample)

    s = sub.add_parser("gamma-probe", parents=[common],
                       help="solve Gamma(x) = v from several starts; optional properness path",
                       description="Multistart Newton on Gamma(x) = v for each target v, as "
                                   "evidence that Gamma maps the node simplex onto R^n one to "
                                   "one. --properness also follows ||Gamma|| as a gap shrinks.")
    s.add_argument("--n", type=positive_int, default=2)
    s.add_argument("--target", type=parse_floats, action="append",
                   help="target vector v (repeatable; default 0)")
    s.add_argument("--starts", type=positive_int, default=10)
    s.add_argument("--properness", action="store_true")
    s.set_defaults(func=cmd_gamma_probe)
    return p


_LIST_FLAGS = ("--nodes", "--start", "--target")


def _glue_negative_lists(argv: list[str]) -> list[str]:
    # "--nodes -1,0,1" would otherwise be read as an unknown option
    out, it = [], iter(range(len(argv)))
    for k in it:
        a = argv[k]
        nxt = argv[k + 1] if k + 1 < len(argv) else ""
        if a in _LIST_FLAGS and nxt[:1] == "-" and (nxt[1:2].isdigit() or nxt[1:2] == "."):
            out.append(f"{a}={nxt}")
            next(it, None)
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_negative_lists(argv))
    try:
        seed = args.seed if args.seed is not None else default_seed()
        if not 0 <= seed < 2**64:
            raise UsageError("seed must fit in 64 unsigned bits")
        cfg = RunConfig(args.command, args.json, args.out, seed)
        return args.func(args, cfg)
    except (UsageError, NodeError, DomainError, IndexError) as e:
        print(f"wlil {args.command}: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
