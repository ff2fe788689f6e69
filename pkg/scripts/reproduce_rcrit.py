#!/usr/bin/env python3
"""r_crit / r_converged on satisfiable threshold random 3-SAT.

Draws instances seed by seed, drops the unsatisfiable ones at the precheck,
and stops once ``--target`` satisfiable instances have been measured.
"""
import argparse
import sys
import time
from collections import Counter
from pathlib import Path

from wlsat.generators.random3sat import THRESHOLD_MULTIPLIER, random_3sat, threshold_clause_count
from wlsat.harness import aggregate, compute_rcrit, write_aggregate, write_reports
from wlsat.solver import SolverConfig

SHIM = Path(__file__).resolve().parent / "pysat_solver.py"


def measure(n, target, solver, multiplier=THRESHOLD_MULTIPLIER, max_seeds=1000, progress=None):
    reports = []
    solved = 0
    for seed in range(max_seeds):
        f = random_3sat(n, seed, multiplier)
        rep = compute_rcrit(f, solver, instance=f"n{n}_s{seed}", family="3-sat", difficulty=f"n={n}")
        reports.append(rep)
        if rep.status != "precheck_unsat":
            solved += 1
        if progress:
            progress(f"seed {seed}: {rep.status} r_crit={rep.r_crit} r_conv={rep.r_converged} "
                     f"({rep.wall_ms / 1000:.1f}s)")
        if solved >= target:
            break
    return reports


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=250)
    ap.add_argument("--target", type=int, default=50)
    ap.add_argument("--multiplier", type=float, default=THRESHOLD_MULTIPLIER)
    ap.add_argument("--solver", choices=("embedded", "external"), default="external")
    ap.add_argument("--solver-cmd", default=f"{sys.executable} {SHIM} {{input}}")
    ap.add_argument("--timeout-secs", type=float, default=300)
    ap.add_argument("--out", default="wlsat-out/rcrit-3sat")
    args = ap.parse_args(argv)

    solver = SolverConfig(args.solver, args.solver_cmd, args.timeout_secs)
    print(f"n={args.n} m={threshold_clause_count(args.n, args.multiplier)} solver={args.solver}", file=sys.stderr)
    t0 = time.time()
    reports = measure(args.n, args.target, solver, args.multiplier,
                      progress=lambda s: print(s, file=sys.stderr))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_reports(reports, out / "report.csv")
    write_aggregate(reports, out / "aggregate.csv")
    sat = [r for r in reports if r.status != "precheck_unsat"]
    pairs = Counter((r.r_crit, r.r_converged) for r in sat)
    for row in aggregate(reports):
        print(row)
    print(f"(r_crit, r_converged) counts: {dict(pairs)}; total {time.time() - t0:.0f}s")


if __name__ == "__main__":
    main()
