"""Deciding satisfiability: direct engines, MSO-based engines, the oracle.

The direct engines walk the incidence structure the same way the MSO
sentences quantify over it, but with ordinary Python search and
memoization.  They exist so that two independent codings of each decision
procedure can be compared.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from . import formula as F
from . import kripke as K
from . import mso
from .incidence import LEVEL_MODE, PV_MODE, IncidenceStructure, build_structure

DIRECT, MSO_EVAL, ORACLE = "direct", "mso", "oracle"


@dataclass(frozen=True)
class SatVerdict:
    satisfiable: Optional[bool]  # None means bounded-unknown
    engine: str
    witness: Optional[K.KripkeModel] = None
    bound_used: Optional[int] = None

    @property
    def label(self) -> str:
        return {True: "SAT", False: "UNSAT", None: "UNKNOWN"}[self.satisfiable]


class WitnessError(AssertionError):
    pass


def _checked(v: SatVerdict, cnf, frame: K.FrameClass) -> SatVerdict:
    if v.witness is not None:
        if not K.model_check(v.witness, v.witness.root, cnf):
            raise WitnessError(f"{v.engine} witness fails the formula")
        if not K.frame_check(v.witness, frame):
            raise WitnessError(f"{v.engine} witness is outside {frame.name}")
    return v


# ---------------------------------------------------------------------------
# small propositional search shared by the direct engines


def prop_sat(clauses) -> Optional[frozenset]:
    """Clauses are (positive vars, negative vars) pairs; returns true vars."""
    clauses = [(frozenset(p), frozenset(n)) for p, n in clauses]
    return _dpll(tuple(clauses), frozenset(), frozenset())


def _dpll(clauses, true, false):
    pending = []
    for p, n in clauses:
        if p & true or n & false:
            continue
        p2, n2 = p - false, n - true
        if not p2 and not n2:
            return None
        pending.append((p2, n2))
    if not pending:
        return true
    p, n = min(pending, key=lambda c: len(c[0]) + len(c[1]))
    var = min(p | n)
    first = (true | {var}, false) if var in p else (true, false | {var})
    second = (true, false | {var}) if var in p else (true | {var}, false)
    for t, f in (first, second):
        got = _dpll(tuple(pending), t, f)
        if got is not None:
            return got
    return None


# ---------------------------------------------------------------------------
# structure views


class _View:
    def __init__(self, s: IncidenceStructure):
        self.s = s
        self.kind = {e.id: e.kind for e in s.elements}
        self.name = {e.id: e.name for e in s.elements if e.kind == "var"}
        self.pos: dict = {c: [] for c in s.cl}
        self.neg: dict = {c: [] for c in s.cl}
        self.inner: dict = {}
        for a, b in sorted(s.oc):
            if self.kind[a] == "clause":
                self.pos[a].append(b)
            else:
                self.inner.setdefault(a, []).append(b)
        for a, b in sorted(s.negoc):
            self.neg[a].append(b)
        self.dias = sorted(s.ddia)
        self.boxes = sorted(e for e in s.bbox if e not in s.u)

    def modal_pos(self, c: int) -> list:
        return [x for x in self.pos[c] if self.kind[x] != "var"]

    def prop_part(self, c: int) -> tuple:
        return (
            frozenset(x for x in self.pos[c] if self.kind[x] == "var"),
            frozenset(self.neg[c]),
        )

    def box_clause(self, b: int) -> int:
        return self.inner[b][0]

    def true_names(self, ids) -> frozenset:
        return frozenset(self.name[i] for i in ids)


def _subsets(items: list):
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def _propositional(view: _View, clauses, covered_by: frozenset):
    """Assign variables for every clause not already hit by covered_by."""
    rest = [view.prop_part(c) for c in clauses if not covered_by.intersection(view.pos[c])]
    return prop_sat(rest)


# ---------------------------------------------------------------------------
# general models


def _general_search(view: _View):
    @lru_cache(maxsize=None)
    def sat(level: int, clauses: frozenset):
        modal = sorted({x for c in clauses for x in view.modal_pos(c)})
        for pick in _subsets(modal):
            chosen = frozenset(pick)
            has_dia = any(view.kind[x] == "dia" for x in chosen)
            if has_dia and any(view.kind[x] == "boxbot" for x in chosen):
                continue
            trues = _propositional(view, clauses, chosen)
            if trues is None:
                continue
            cm = frozenset(view.box_clause(x) for x in chosen if view.kind[x] == "box")
            children = []
            for d in (x for x in pick if view.kind[x] == "dia"):
                sub = sat(level - 1, cm | frozenset(view.inner[d]))
                if sub is None:
                    break
                children.append(sub)
            else:
                return (view.true_names(trues), tuple(children))
        return None

    return sat


def solve_general(cnf) -> SatVerdict:
    cnf = _normalized(cnf)
    if cnf is None:
        return SatVerdict(False, DIRECT)
    s = build_structure(cnf, LEVEL_MODE)
    view = _View(s)
    tree = _general_search(view)(s.md, frozenset(s.top_clauses))
    if tree is None:
        return SatVerdict(False, DIRECT)
    return _checked(SatVerdict(True, DIRECT, K.tree_model(tree)), cnf, K.GENERAL)


# ---------------------------------------------------------------------------
# reflexive models


def _reflexive_search(view: _View):
    def box_closure(clauses: frozenset) -> frozenset:
        out, todo = set(clauses), list(clauses)
        while todo:
            c = todo.pop()
            for x in view.modal_pos(c):
                if view.kind[x] == "box":
                    inner = view.box_clause(x)
                    if inner not in out:
                        out.add(inner)
                        todo.append(inner)
        return frozenset(out)

    @lru_cache(maxsize=None)
    def sat(level: int, clauses: frozenset):
        reach = box_closure(clauses)
        modal = sorted({x for c in reach for x in view.modal_pos(c) if view.kind[x] != "boxbot"})
        if level == 0:
            modal = []
        for pick in _subsets(modal):
            chosen = frozenset(pick)
            cm = frozenset(view.box_clause(x) for x in chosen if view.kind[x] == "box")
            trues = _propositional(view, clauses | cm, chosen)
            if trues is None:
                continue
            children = []
            for d in (x for x in pick if view.kind[x] == "dia"):
                sub = sat(level - 1, cm | frozenset(view.inner[d]))
                if sub is None:
                    break
                children.append(sub)
            else:
                return (view.true_names(trues), tuple(children))
        return None

    return sat


def _reflexive_closure(m: K.KripkeModel) -> K.KripkeModel:
    loops = {(w, w) for w in range(m.world_count)}
    return K.KripkeModel(m.world_count, m.rel | loops, m.val, m.root)


def solve_reflexive(cnf) -> SatVerdict:
    cnf = _normalized(cnf)
    if cnf is None:
        return SatVerdict(False, DIRECT)
    s = build_structure(cnf, LEVEL_MODE)
    view = _View(s)
    tree = _reflexive_search(view)(s.md, frozenset(s.top_clauses))
    if tree is None:
        return SatVerdict(False, DIRECT)
    model = _reflexive_closure(K.tree_model(tree))
    return _checked(SatVerdict(True, DIRECT, model), cnf, K.REFLEXIVE)


# ---------------------------------------------------------------------------
# Euclidean models


PLAIN, REFLEXIVE_E, SYMMETRIC_E, TRANSITIVE_E = mso.CHI_VARIANTS
EXTRAS = ("reflexive", "symmetric", "transitive")


def euclid_variant(extras) -> str:
    """Which root shapes are possible for a Euclidean class plus extras."""
    extras = set(extras)
    unknown = extras - set(EXTRAS)
    if unknown:
        raise ValueError(f"unknown frame conditions {sorted(unknown)}")
    if "reflexive" in extras:
        return REFLEXIVE_E
    if "symmetric" in extras:
        return SYMMETRIC_E
    if "transitive" in extras:
        return TRANSITIVE_E
    return PLAIN


def euclid_frame(extras) -> K.FrameClass:
    extras = set(extras)
    return K.FrameClass(
        reflexive="reflexive" in extras,
        symmetric="symmetric" in extras,
        transitive="transitive" in extras,
        euclidean=True,
    )


class _EuclidSearch:
    def __init__(self, view: _View):
        self.v = view
        self.box_clauses = sorted({view.box_clause(b) for b in view.boxes})
        self.cluster = lru_cache(maxsize=None)(self._cluster)

    def glt(self, g: frozenset) -> frozenset:
        return frozenset(b for b in self.v.boxes if self.v.box_clause(b) in g)

    def _cluster(self, c1: frozenset, g: frozenset):
        """Demand world plus one world per chosen diamond, or None."""
        v = self.v
        glt = self.glt(g)
        for pick in _subsets(v.dias):
            tr = frozenset(pick)
            worlds = []
            for lt in pick:
                t1 = _propositional(v, frozenset(v.inner[lt]) | g, tr | glt)
                if t1 is None:
                    break
                worlds.append(v.true_names(t1))
            else:
                t0 = _propositional(v, c1 | g, tr | glt)
                if t0 is not None:
                    return (v.true_names(t0),) + tuple(worlds)
        return None

    def gcl_choices(self):
        for pick in _subsets(self.box_clauses):
            yield frozenset(pick)

    def root(self, c0: frozenset, transitive: bool):
        v = self.v
        modal = sorted({x for c in c0 for x in v.modal_pos(c)})
        for pick in _subsets(modal):
            chosen = frozenset(pick)
            dias = [x for x in pick if v.kind[x] == "dia"]
            if dias and any(v.kind[x] == "boxbot" for x in chosen):
                continue
            t0 = _propositional(v, c0, chosen)
            if t0 is None:
                continue
            if not dias:
                return K.EuclidAssignment(v.true_names(t0), (), "all" if transitive else "demand")
            cm = frozenset(v.box_clause(x) for x in chosen if v.kind[x] == "box")
            for g in self.gcl_choices():
                gg = g | cm if transitive else g
                clusters = []
                for d in dias:
                    sol = self.cluster(frozenset(v.inner[d]) | cm, gg)
                    if sol is None:
                        break
                    clusters.append(sol)
                else:
                    return K.EuclidAssignment(
                        v.true_names(t0), tuple(clusters), "all" if transitive else "demand"
                    )
        return None

    def reflexive_root(self, c0: frozenset):
        v = self.v
        for g in self.gcl_choices():
            obligations = c0 | g
            modal = sorted(
                {
                    x
                    for c in obligations
                    for x in v.modal_pos(c)
                    if v.kind[x] == "dia" or (v.kind[x] == "box" and v.box_clause(x) in g)
                }
            )
            for pick in _subsets(modal):
                chosen = frozenset(pick)
                t0 = _propositional(v, obligations, chosen)
                if t0 is None:
                    continue
                clusters = []
                for d in (x for x in pick if v.kind[x] == "dia"):
                    sol = self.cluster(frozenset(v.inner[d]), g)
                    if sol is None:
                        break
                    clusters.append(sol)
                else:
                    return K.EuclidAssignment(v.true_names(t0), tuple(clusters), "cluster")
        return None

    def no_successor(self, c0: frozenset):
        v = self.v
        boxed = frozenset(x for c in c0 for x in v.pos[c] if v.kind[x] in ("box", "boxbot"))
        t0 = _propositional(v, c0, boxed)
        return None if t0 is None else K.EuclidAssignment(v.true_names(t0), (), "none")


def euclid_assignment(cnf, extras=()) -> Optional[K.EuclidAssignment]:
    s = build_structure(cnf, PV_MODE)
    search = _EuclidSearch(_View(s))
    c0 = frozenset(s.top_clauses)
    variant = euclid_variant(extras)
    if variant == PLAIN:
        attempts = (lambda: search.root(c0, False), lambda: search.reflexive_root(c0))
    elif variant == REFLEXIVE_E:
        attempts = (lambda: search.reflexive_root(c0),)
    elif variant == SYMMETRIC_E:
        attempts = (lambda: search.reflexive_root(c0), lambda: search.no_successor(c0))
    else:
        attempts = (lambda: search.root(c0, True), lambda: search.reflexive_root(c0))
    for attempt in attempts:
        got = attempt()
        if got is not None:
            return got
    return None


def solve_euclidean(cnf, extras=()) -> SatVerdict:
    frame = euclid_frame(extras)
    cnf = _normalized(cnf)
    if cnf is None:
        return SatVerdict(False, DIRECT)
    a = euclid_assignment(cnf, extras)
    if a is None:
        return SatVerdict(False, DIRECT)
    model = K.build_euclid_witness(a)
    return _checked(SatVerdict(True, DIRECT, model), cnf, frame)


# ---------------------------------------------------------------------------
# MSO-based engines


def _normalized(cnf):
    if isinstance(cnf, str):
        cnf = F.prepare(cnf)
    elif isinstance(cnf, tuple):
        cnf = F.normalize(cnf)
    if isinstance(cnf, F.TrivialUnsat):
        return None
    return cnf


def solve_general_mso(cnf, size_guard="env") -> SatVerdict:
    cnf = _normalized(cnf)
    if cnf is None:
        return SatVerdict(False, MSO_EVAL)
    s = build_structure(cnf, LEVEL_MODE)
    return SatVerdict(mso.evaluate(s, mso.build_xi_sentence(s.md), size_guard=size_guard), MSO_EVAL)


def solve_reflexive_mso(cnf, size_guard="env") -> SatVerdict:
    cnf = _normalized(cnf)
    if cnf is None:
        return SatVerdict(False, MSO_EVAL)
    s = build_structure(cnf, LEVEL_MODE)
    return SatVerdict(mso.evaluate(s, mso.build_zeta_sentence(s.md), size_guard=size_guard), MSO_EVAL)


def solve_euclidean_mso(cnf, extras=(), size_guard="env") -> SatVerdict:
    variant = euclid_variant(extras)
    cnf = _normalized(cnf)
    if cnf is None:
        return SatVerdict(False, MSO_EVAL)
    s = build_structure(cnf, PV_MODE)
    return SatVerdict(mso.evaluate(s, mso.build_chi_family(variant), size_guard=size_guard), MSO_EVAL)


# ---------------------------------------------------------------------------
# the bounded oracle as an engine


def default_bound(cnf) -> int:
    """1 + number of diamonds + 1, the default for classes without a proven bound."""
    return F.count_dia(cnf) + 2


def solve_oracle(cnf, frame: K.FrameClass, bound: Optional[int] = None, time_budget=None) -> SatVerdict:
    cnf = _normalized(cnf)
    if cnf is None:
        return SatVerdict(False, ORACLE, bound_used=0)
    general = frame == K.GENERAL
    if bound is None:
        bound = K.sufficient_bound_general(cnf) if general else default_bound(cnf)
    got = K.bounded_sat(cnf, frame, bound, time_budget)
    if isinstance(got, K.Sat):
        return SatVerdict(True, ORACLE, got.model, bound)
    exact = general and bound >= K.sufficient_bound_general(cnf)
    return SatVerdict(False if exact else None, ORACLE, None, bound)


# ---------------------------------------------------------------------------
# dispatch by class name


def parse_class(name: str) -> tuple[str, tuple]:
    """'general', 'reflexive', 'euclid[,extra...]' or 'transitive-bounded'."""
    name = name.strip().lower()
    if name in ("general", "reflexive", "transitive-bounded"):
        return name, ()
    parts = [p.strip() for p in name.split(",") if p.strip()]
    if parts and parts[0] == "euclid":
        extras = tuple(sorted(set(parts[1:])))
        euclid_variant(extras)
        return "euclid", extras
    raise ValueError(f"unknown class {name!r}")


def frame_of(kind: str, extras=()) -> K.FrameClass:
    if kind == "general":
        return K.GENERAL
    if kind == "reflexive":
        return K.REFLEXIVE
    if kind == "transitive-bounded":
        return K.TRANSITIVE
    return euclid_frame(extras)


def solve(cnf, cls: str, engine: str, max_worlds: Optional[int] = None) -> SatVerdict:
    kind, extras = parse_class(cls)
    frame = frame_of(kind, extras)
    if engine == ORACLE or kind == "transitive-bounded":
        if engine not in (ORACLE,) and kind == "transitive-bounded":
            raise ValueError("transitive models are only available through the oracle engine")
        return solve_oracle(cnf, frame, max_worlds)
    table = {
        ("general", DIRECT): lambda: solve_general(cnf),
        ("general", MSO_EVAL): lambda: solve_general_mso(cnf),
        ("reflexive", DIRECT): lambda: solve_reflexive(cnf),
        ("reflexive", MSO_EVAL): lambda: solve_reflexive_mso(cnf),
        ("euclid", DIRECT): lambda: solve_euclidean(cnf, extras),
        ("euclid", MSO_EVAL): lambda: solve_euclidean_mso(cnf, extras),
    }
    if (kind, engine) not in table:
        raise ValueError(f"unknown engine {engine!r}")
    return table[(kind, engine)]()


# ---------------------------------------------------------------------------
# differential testing

CLASSES = (
    "general",
    "reflexive",
    "euclid",
    "euclid,reflexive",
    "euclid,symmetric",
    "euclid,transitive",
)


@dataclass
class Disagreement:
    case_id: str
    cls: str
    verdicts: dict
    cnf: tuple
    minimized: tuple


@dataclass
class DifferentialReport:
    cases: int = 0
    checks: int = 0
    disagreements: list = field(default_factory=list)
    verdict_counts: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.disagreements


def engine_verdicts(cnf, cls: str, with_oracle: bool = True) -> dict:
    kind, extras = parse_class(cls)
    out = {
        DIRECT: solve(cnf, cls, DIRECT).satisfiable,
        MSO_EVAL: solve(cnf, cls, MSO_EVAL).satisfiable,
    }
    if with_oracle:
        out[ORACLE] = solve_oracle(cnf, frame_of(kind, extras)).satisfiable
    return out


def consistent(verdicts: dict) -> bool:
    """Engines agree; an oracle unknown only has to avoid contradicting SAT."""
    exact = {verdicts[DIRECT], verdicts[MSO_EVAL]}
    if len(exact) != 1:
        return False
    oracle = verdicts.get(ORACLE)
    if oracle is None:
        return True
    return oracle == verdicts[DIRECT]


def minimize(cnf: tuple, still_bad) -> tuple:
    """Greedy clause removal while the disagreement persists."""
    current = list(cnf)
    changed = True
    while changed and len(current) > 1:
        changed = False
        for i in range(len(current)):
            trial = tuple(current[:i] + current[i + 1 :])
            if still_bad(trial):
                current = list(trial)
                changed = True
                break
    return tuple(current)


def cross_check(cases, classes=CLASSES, with_oracle: bool = True) -> DifferentialReport:
    """cases: iterable of (case id, normalized CNF)."""
    report = DifferentialReport()
    for case_id, cnf in cases:
        report.cases += 1
        for cls in classes:
            verdicts = engine_verdicts(cnf, cls, with_oracle)
            report.checks += 1
            key = (cls, verdicts[DIRECT])
            report.verdict_counts[key] = report.verdict_counts.get(key, 0) + 1
            if not consistent(verdicts):
                small = minimize(cnf, lambda c, cls=cls: not consistent(engine_verdicts(c, cls, with_oracle)))
                report.disagreements.append(Disagreement(case_id, cls, verdicts, cnf, small))
    return report
