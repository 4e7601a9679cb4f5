"""Differential run of every engine over a seeded corpus, all frame classes.

    python scripts/cross_check.py --seed 2024 --count 420

Prints verdict counts per class and any disagreement with its minimized CNF.
"""

import argparse
import sys
import time

from modaltw import formula as F
from modaltw import incidence as I
from modaltw import solvers as S
from modaltw.corpus import CorpusSpec, generate


def total_clauses(cnf) -> int:
    return sum(e.kind == "clause" for e in I.build_structure(cnf).elements)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--count", type=int, default=420)
    ap.add_argument("--vars", type=int, default=4)
    ap.add_argument("--max-depth", type=int, default=2)
    ap.add_argument("--max-clauses", type=int, default=3, help="per conjunction")
    ap.add_argument("--max-total-clauses", type=int, default=6, help="at all nesting levels")
    args = ap.parse_args()

    spec = CorpusSpec(args.seed, args.count, args.vars, args.max_depth, args.max_clauses)
    cases = [(i, c) for i, c in generate(spec) if total_clauses(c) <= args.max_total_clauses]
    start = time.monotonic()
    rep = S.cross_check(cases)
    took = time.monotonic() - start

    print(f"{rep.cases} formulas, {rep.checks} class checks, {took:.1f}s")
    for cls in S.CLASSES:
        sat = rep.verdict_counts.get((cls, True), 0)
        unsat = rep.verdict_counts.get((cls, False), 0)
        print(f"  {cls:20s} sat {sat:4d}  unsat {unsat:4d}")
    for d in rep.disagreements:
        print(f"DISAGREE {d.case_id} [{d.cls}] {d.verdicts}: {F.render_cnf(d.minimized)}")
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
