"""Seeded random modal CNFs for differential testing."""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import formula as F

FIG1_TEXT = "(~q | [](r | ~s)) & (q | <>false) & (r | <>~s) & (~r | <>((t | ~s) & r))"
FIG2_TEXT = "(~r | []r) & (r | <>false) & (r | <>~r) & (~r | <>((t | ~r) & r))"

EDGE_CASES = (
    "q",
    "q & ~q",
    "[]false",
    "<>q",
    "[]false & <>q",
    "<>q & []~q",
    "<>q & <>~q",
    "[]q & <>~q",
    "<><>q & []false",
    "[][]false & <><>q",
    "<>q & [](~q | []false) & <>(<>q)",
    "~q | []q",
    "q & []~q",
    "<>(q & []~q)",
    "<>q & []<>~q & [][]q",
    FIG1_TEXT,
    FIG2_TEXT,
)


@dataclass(frozen=True)
class CorpusSpec:
    seed: int = 0
    count: int = 200
    n_vars: int = 3
    max_depth: int = 2
    max_clauses: int = 3
    max_literals: int = 3
    box_bottom_rate: float = 0.08
    include_edge_cases: bool = True


def _clause(rng: random.Random, spec: CorpusSpec, depth: int, names: list) -> F.Clause:
    lits = []
    for _ in range(rng.randint(1, spec.max_literals)):
        roll = rng.random()
        if depth > 0 and roll < 0.22:
            lits.append(F.BoxClause(_clause(rng, spec, depth - 1, names)))
        elif depth > 0 and roll < 0.44:
            k = rng.randint(1, max(1, spec.max_clauses - 1))
            lits.append(F.DiaCnf(tuple(_clause(rng, spec, depth - 1, names) for _ in range(k))))
        elif depth > 0 and roll < 0.44 + spec.box_bottom_rate:
            lits.append(F.BoxBottom())
        else:
            q = rng.choice(names)
            lits.append(F.Pos(q) if rng.random() < 0.5 else F.Neg(q))
    return tuple(lits)


def random_cnf(rng: random.Random, spec: CorpusSpec):
    names = [f"p{i}" for i in range(spec.n_vars)]
    depth = rng.randint(0, spec.max_depth)
    cnf = tuple(_clause(rng, spec, depth, names) for _ in range(rng.randint(1, spec.max_clauses)))
    return F.normalize(cnf)


def generate(spec: CorpusSpec) -> list[tuple[str, tuple]]:
    """(case id, normalized CNF) pairs; trivially unsatisfiable draws are skipped."""
    rng = random.Random(spec.seed)
    out = []
    if spec.include_edge_cases:
        for i, text in enumerate(EDGE_CASES):
            cnf = F.prepare(text)
            if not isinstance(cnf, F.TrivialUnsat):
                out.append((f"edge-{i}", cnf))
    seen = {c for _, c in out}
    target = len(out) + spec.count
    attempts = 0
    while len(out) < target and attempts < spec.count * 50:
        attempts += 1
        cnf = random_cnf(rng, spec)
        if isinstance(cnf, F.TrivialUnsat) or cnf in seen:
            continue
        seen.add(cnf)
        out.append((f"rand-{spec.seed}-{len(out)}", cnf))
    return out
