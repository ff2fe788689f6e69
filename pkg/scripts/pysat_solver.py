#!/usr/bin/env python3
"""Competition-style SAT solver front end backed by python-sat.

Reads a DIMACS file, prints ``s SATISFIABLE``/``s UNSATISFIABLE`` plus ``v``
lines, and exits 10/20 like a competition solver. Meant for
``wlsat ... --solver external --solver-cmd "python3 scripts/pysat_solver.py {input}"``.
"""
import argparse
import sys

from pysat.formula import CNF
from pysat.solvers import Solver


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("input")
    ap.add_argument("--backend", default="cadical153")
    args = ap.parse_args(argv)

    cnf = CNF(from_file=args.input)
    with Solver(name=args.backend, bootstrap_with=cnf.clauses) as s:
        ok = s.solve()
        model = s.get_model() if ok else None
    if not ok:
        print("s UNSATISFIABLE")
        return 20
    print("s SATISFIABLE")
    lits = [str(x) for x in model if abs(x) <= cnf.nv]
    for i in range(0, len(lits), 20):
        print("v " + " ".join(lits[i:i + 20]))
    print("v 0")
    return 10


if __name__ == "__main__":
    sys.exit(main())
