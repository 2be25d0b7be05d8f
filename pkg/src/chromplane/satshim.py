"""Minimal DIMACS solver front end backed by python-sat.

Usage: ``python -m chromplane.satshim [--solver NAME] FILE.cnf``

Prints the usual ``s``/``v`` lines and exits with 10 (SAT) or 20 (UNSAT),
so it can stand in for kissat/cadical/glucose wherever the driver expects one.
"""

from __future__ import annotations

import argparse
import sys

from pysat.formula import CNF
from pysat.solvers import Solver


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="chromplane-satshim")
    ap.add_argument("--solver", default="cadical195")
    ap.add_argument("cnf")
    args = ap.parse_args(argv)
    formula = CNF(from_file=args.cnf)
    with Solver(name=args.solver, bootstrap_with=formula.clauses) as s:
        sat = s.solve()
        if not sat:
            print("s UNSATISFIABLE")
            return 20
        model = s.get_model() or []
    print("s SATISFIABLE")
    nv = formula.nv
    lits = [lit for lit in model if abs(lit) <= nv]
    for i in range(0, len(lits), 20):
        print("v " + " ".join(map(str, lits[i:i + 20])))
    print("v 0")
    return 10


if __name__ == "__main__":
    sys.exit(main())
