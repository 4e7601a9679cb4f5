"""Kripke models, model checking, frame classes and a bounded model finder."""

from __future__ import annotations

import itertools
import logging
import re
import threading
import time
from dataclasses import dataclass, field
from typing import Union

from pysat.solvers import Cadical195, Glucose4

from . import formula as F

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class KripkeModel:
    world_count: int
    rel: frozenset  # of (i, j)
    val: dict = field(default_factory=dict)  # variable -> frozenset of worlds
    root: int = 0

    def __post_init__(self):
        for a, b in self.rel:
            if not (0 <= a < self.world_count and 0 <= b < self.world_count):
                raise ValueError(f"relation pair {(a, b)} out of range")
        if not 0 <= self.root < max(self.world_count, 1):
            raise ValueError("root out of range")

    def successors(self, w: int) -> list[int]:
        return sorted(b for a, b in self.rel if a == w)

    def holds(self, var: str, w: int) -> bool:
        return w in self.val.get(var, ())

    def restrict_to_reachable(self) -> "KripkeModel":
        """Generated submodel of the root, renumbered in discovery order."""
        succ: dict = {}
        for a, b in sorted(self.rel):
            succ.setdefault(a, []).append(b)
        order = [self.root]
        index = {self.root: 0}
        for w in order:
            for v in succ.get(w, ()):
                if v not in index:
                    index[v] = len(order)
                    order.append(v)
        rel = frozenset((index[a], index[b]) for a, b in self.rel if a in index and b in index)
        val = {q: frozenset(index[w] for w in ws if w in index) for q, ws in self.val.items()}
        return KripkeModel(len(order), rel, val, 0)


def model_to_json(m: KripkeModel) -> dict:
    return {
        "worlds": m.world_count,
        "root": m.root,
        "rel": sorted([a, b] for a, b in m.rel),
        "val": {q: sorted(ws) for q, ws in sorted(m.val.items())},
    }


def model_from_json(data: dict) -> KripkeModel:
    return KripkeModel(
        int(data["worlds"]),
        frozenset((int(a), int(b)) for a, b in data.get("rel", [])),
        {q: frozenset(int(w) for w in ws) for q, ws in data.get("val", {}).items()},
        int(data.get("root", 0)),
    )


# ---------------------------------------------------------------------------
# model checking


class _Checker:
    def __init__(self, m: KripkeModel):
        self.m = m
        self.full = (1 << m.world_count) - 1
        self.succ = [0] * m.world_count
        for a, b in m.rel:
            self.succ[a] |= 1 << b
        self.warned: set = set()

    def var(self, q: str) -> int:
        if q not in self.m.val and q not in self.warned:
            self.warned.add(q)
            log.debug("variable %s has no valuation entry; taken as false", q)
        out = 0
        for w in self.m.val.get(q, ()):
            out |= 1 << w
        return out

    def box(self, inner: int) -> int:
        return sum(1 << w for w in range(self.m.world_count) if self.succ[w] & ~inner == 0)

    def dia(self, inner: int) -> int:
        return sum(1 << w for w in range(self.m.world_count) if self.succ[w] & inner)

    def formula(self, f) -> int:
        if isinstance(f, F.Var):
            return self.var(f.name)
        if isinstance(f, F.Bottom):
            return 0
        if isinstance(f, F.Not):
            return self.full & ~self.formula(f.child)
        if isinstance(f, F.Or):
            return self.formula(f.left) | self.formula(f.right)
        if isinstance(f, F.And):
            return self.formula(f.left) & self.formula(f.right)
        if isinstance(f, F.Box):
            return self.box(self.formula(f.child))
        if isinstance(f, F.Dia):
            return self.dia(self.formula(f.child))
        raise TypeError(f"not a modal formula: {f!r}")

    def cnf(self, cnf) -> int:
        out = self.full
        for clause in cnf:
            out &= self.clause(clause)
        return out

    def clause(self, clause) -> int:
        out = 0
        for lit in clause:
            out |= self.literal(lit)
        return out

    def literal(self, lit) -> int:
        if isinstance(lit, F.Pos):
            return self.var(lit.var)
        if isinstance(lit, F.Neg):
            return self.full & ~self.var(lit.var)
        if isinstance(lit, F.BoxClause):
            return self.box(self.clause(lit.clause))
        if isinstance(lit, F.BoxBottom):
            return self.box(0)
        if isinstance(lit, F.DiaCnf):
            return self.dia(self.cnf(lit.cnf))
        if isinstance(lit, F.BotLit):
            return 0
        raise TypeError(f"not a literal: {lit!r}")


def worlds_satisfying(m: KripkeModel, f) -> frozenset:
    c = _Checker(m)
    mask = c.cnf(f) if isinstance(f, tuple) else c.formula(f)
    return frozenset(w for w in range(m.world_count) if mask >> w & 1)


def model_check(m: KripkeModel, w: int, f) -> bool:
    if not 0 <= w < m.world_count:
        raise ValueError(f"world {w} out of range")
    return w in worlds_satisfying(m, f)


# ---------------------------------------------------------------------------
# frame classes


@dataclass(frozen=True)
class FrameClass:
    reflexive: bool = False
    symmetric: bool = False
    transitive: bool = False
    euclidean: bool = False

    @property
    def name(self) -> str:
        flags = [n for n in ("reflexive", "symmetric", "transitive", "euclidean") if getattr(self, n)]
        return "+".join(flags) or "general"


GENERAL = FrameClass()
REFLEXIVE = FrameClass(reflexive=True)
TRANSITIVE = FrameClass(transitive=True)
EUCLIDEAN = FrameClass(euclidean=True)


def frame_check(m: KripkeModel, c: FrameClass) -> bool:
    n, rel = m.world_count, m.rel
    if c.reflexive and any((w, w) not in rel for w in range(n)):
        return False
    if c.symmetric and any((b, a) not in rel for a, b in rel):
        return False
    succ: dict = {}
    for a, b in rel:
        succ.setdefault(a, set()).add(b)
    if c.transitive:
        for a, b in rel:
            if not succ.get(b, set()) <= succ[a]:
                return False
    if c.euclidean:
        for a, outs in succ.items():
            for b in outs:
                if not outs <= succ.get(b, set()):
                    return False
    return True


# ---------------------------------------------------------------------------
# bounded satisfiability


@dataclass(frozen=True)
class Sat:
    model: KripkeModel
    world: int = 0


@dataclass(frozen=True)
class NoModelUpTo:
    max_worlds: int


BoundedVerdict = Union[Sat, NoModelUpTo]


class BudgetExhausted(RuntimeError):
    pass


def sufficient_bound_general(f) -> int:
    """World count that suffices for a model in arbitrary frames, if any exists."""
    cnf = f if isinstance(f, tuple) else F.to_cnf(f)
    cnf = F.normalize(cnf)
    if isinstance(cnf, F.TrivialUnsat):
        return 1
    d = max(F.count_dia(cnf), 1)
    return sum(d**i for i in range(F.modal_depth(cnf) + 1))


def _nnf_of(f):
    """Shared NNF view of a formula or CNF (tagged tuples as in formula.to_nnf)."""
    if not isinstance(f, tuple):
        return F.to_nnf(f)

    def clause(c):
        items = [lit(l) for l in c]
        if not items:
            return ("bot",)
        out = items[0]
        for x in items[1:]:
            out = ("or", out, x)
        return out

    def cnf(c):
        if not c:
            return ("top",)
        out = clause(c[0])
        for x in c[1:]:
            out = ("and", out, clause(x))
        return out

    def lit(l):
        if isinstance(l, F.Pos):
            return ("var", l.var)
        if isinstance(l, F.Neg):
            return ("nvar", l.var)
        if isinstance(l, F.BoxClause):
            return ("box", clause(l.clause))
        if isinstance(l, F.BoxBottom):
            return ("box", ("bot",))
        if isinstance(l, F.DiaCnf):
            return ("dia", cnf(l.cnf))
        if isinstance(l, F.BotLit):
            return ("bot",)
        raise TypeError(f"not a literal: {l!r}")

    return cnf(f)


def _nnf_vars(node, out: set) -> set:
    if node[0] in ("var", "nvar"):
        out.add(node[1])
    else:
        for child in node[1:]:
            _nnf_vars(child, out)
    return out


class _Dag:
    """An NNF tree interned into numbered nodes, with and/or flattened to n-ary."""

    def __init__(self):
        self.nodes: list = []
        self.ids: dict = {}

    def add(self, node) -> int:
        tag = node[0]
        if tag in ("var", "nvar"):
            key = (tag, node[1])
        elif tag in ("bot", "top"):
            key = (tag,)
        elif tag in ("and", "or"):
            kids: list = []
            stack = [node]
            while stack:
                cur = stack.pop()
                if cur[0] == tag:
                    stack.extend(reversed(cur[1:]))
                else:
                    kid = self.add(cur)
                    if kid not in kids:
                        kids.append(kid)
            key = (tag, tuple(kids))
        else:
            key = (tag, self.add(node[1]))
        got = self.ids.get(key)
        if got is None:
            got = self.ids[key] = len(self.nodes)
            self.nodes.append(key)
        return got


class _Encoder:
    """Propositional encoding of "f holds at world 0 of an n-world model".

    Every subformula occurrence is positive in NNF, so one-directional
    definitions (node true at w implies its meaning at w) are enough.
    """

    def __init__(self, n: int, c: FrameClass, dag: _Dag | None = None):
        self.n = n
        self.next = 1
        self.clauses: list[list[int]] = []
        self.r = [[self.fresh() for _ in range(n)] for _ in range(n)]
        self.v: dict = {}
        self.memo: dict = {}
        self.dag = dag or _Dag()
        self.frame(c)

    def fresh(self) -> int:
        self.next += 1
        return self.next - 1

    def val(self, q: str, w: int) -> int:
        key = (q, w)
        if key not in self.v:
            self.v[key] = self.fresh()
        return self.v[key]

    def frame(self, c: FrameClass) -> None:
        n, r = self.n, self.r
        for i in range(n):
            if c.reflexive:
                self.clauses.append([r[i][i]])
            for j in range(n):
                if c.symmetric and i < j:
                    self.clauses.append([-r[i][j], r[j][i]])
                    self.clauses.append([-r[j][i], r[i][j]])
                for k in range(n):
                    if c.transitive:
                        self.clauses.append([-r[i][j], -r[j][k], r[i][k]])
                    if c.euclidean and j <= k:
                        self.clauses.append([-r[i][j], -r[i][k], r[j][k]])
                        if j != k:
                            self.clauses.append([-r[i][j], -r[i][k], r[k][j]])

    def node(self, node, w: int) -> int:
        """A solver literal that implies node holds at w (node: NNF tuple or DAG id)."""
        if not isinstance(node, int):
            node = self.dag.add(node)
        return self._lit(node, w)

    def _lit(self, i: int, w: int) -> int:
        key = self.dag.nodes[i]
        tag = key[0]
        if tag == "var":
            return self.val(key[1], w)
        if tag == "nvar":
            return -self.val(key[1], w)
        memo = (i, w)
        if memo in self.memo:
            return self.memo[memo]
        t = self.fresh()
        self.memo[memo] = t
        out = self.clauses
        if tag == "bot":
            out.append([-t])
        elif tag == "top":
            pass
        elif tag == "and":
            for kid in key[1]:
                out.append([-t, self._lit(kid, w)])
        elif tag == "or":
            out.append([-t] + [self._lit(kid, w) for kid in key[1]])
        elif tag == "box":
            dead = self.dag.nodes[key[1]][0] == "bot"
            for u in range(self.n):
                if dead:
                    out.append([-t, -self.r[w][u]])
                else:
                    out.append([-t, -self.r[w][u], self._lit(key[1], u)])
        elif tag == "dia":
            picks = []
            for u in range(self.n):
                s = self.fresh()
                picks.append(s)
                out.append([-s, self.r[w][u]])
                out.append([-s, self._lit(key[1], u)])
            out.append([-t] + picks)
        else:
            raise ValueError(f"bad NNF node {key!r}")
        return t


def _decode(enc: _Encoder, model: list[int], names: list[str]) -> KripkeModel:
    truth = {abs(l): l > 0 for l in model}
    n = enc.n
    rel = frozenset((i, j) for i in range(n) for j in range(n) if truth.get(enc.r[i][j], False))
    val = {q: frozenset(w for w in range(n) if truth.get(enc.v.get((q, w), 0), False)) for q in names}
    return KripkeModel(n, rel, val, 0)


def _verified(f, c: FrameClass, m: KripkeModel) -> Sat:
    m = m.restrict_to_reachable()
    if not (model_check(m, 0, f) and frame_check(m, c)):
        raise AssertionError("bounded model finder produced an invalid model")
    return Sat(m, 0)


def bounded_sat(
    f,
    c: FrameClass,
    max_worlds: int,
    time_budget: float | None = None,
    method: str = "sat",
) -> BoundedVerdict:
    """Search every model with at most max_worlds worlds in frame class c.

    ``method="sat"`` hands the search to a SAT solver; ``method="enumerate"``
    walks world counts, relation bitmasks (pruned by the frame class) and
    valuation bitmasks in that order.  Both are exhaustive; the first is the
    one that scales.  Any model found is re-checked before it is returned.
    """
    if max_worlds < 1:
        raise ValueError("max_worlds must be at least 1")
    if isinstance(f, tuple):
        norm = F.normalize(f)
        if isinstance(norm, F.TrivialUnsat):
            return NoModelUpTo(max_worlds)
    if method == "enumerate":
        return _enumerate(f, c, max_worlds, time_budget)
    if method != "sat":
        raise ValueError(f"unknown method {method!r}")
    root = _nnf_of(f)
    names = sorted(_nnf_vars(root, set()), key=_natural_key)
    dag = _Dag()
    root = dag.add(root)
    deadline = None if time_budget is None else time.monotonic() + time_budget
    # Worlds other than the root may be renumbered freely, so they are
    # searched in lexicographic order of their valuations.  Smaller models
    # are covered by padding with unreachable worlds (looped when the class
    # is reflexive), which every supported class tolerates.
    if _root_sees_all(c) and max_worlds > 1:
        # In a transitive class a root-generated model whose root has a
        # successor pads instead with bisimilar copies of that successor, so
        # the root may be taken to see every other world.  Dead-end roots
        # live in one-world models, checked first.
        got = _sat_call(dag, root, names, f, c, 1, False, deadline)
        if isinstance(got, Sat):
            return got
        got = _sat_call(dag, root, names, f, c, max_worlds, True, deadline)
        return NoModelUpTo(max_worlds) if isinstance(got, NoModelUpTo) else got
    return _sat_call(dag, root, names, f, c, max_worlds, False, deadline)


def _natural_key(name: str) -> list:
    # d_2 before d_10; on indexed families this order solves far faster
    return [(0, int(t), "") if t.isdigit() else (1, 0, t) for t in re.split(r"(\d+)", name)]


def _root_sees_all(c: FrameClass) -> bool:
    return c.transitive and not c.symmetric and not c.euclidean


def _sorted_worlds(enc: "_Encoder", names: list) -> None:
    """Valuation of world a is lexicographically at most that of world a+1 (a >= 1)."""
    for a in range(1, enc.n - 1):
        eq = None
        for q in names:
            x, y = enc.val(q, a), enc.val(q, a + 1)
            pre = [] if eq is None else [-eq]
            enc.clauses.append(pre + [-x, y])
            nxt = enc.fresh()
            enc.clauses.append(pre + [-x, -y, nxt])
            enc.clauses.append(pre + [x, y, nxt])
            eq = nxt


def _sat_call(dag: _Dag, root: int, names, f, c: FrameClass, n: int, root_sees_all: bool, deadline) -> BoundedVerdict:
    enc = _Encoder(n, c, dag)
    enc.clauses.append([enc.node(root, 0)])
    if root_sees_all:
        enc.clauses.extend([enc.r[0][j]] for j in range(1, n))
    for q in names:
        for w in range(n):
            enc.val(q, w)
    _sorted_worlds(enc, names)
    if deadline is None:
        with Cadical195(bootstrap_with=enc.clauses) as solver:
            found = solver.solve()
            model = solver.get_model() if found else None
    else:
        with Glucose4(bootstrap_with=enc.clauses) as solver:
            timer = threading.Timer(max(0.0, deadline - time.monotonic()), solver.interrupt)
            timer.start()
            try:
                found = solver.solve_limited(expect_interrupt=True)
            finally:
                timer.cancel()
            if found is None:
                raise BudgetExhausted("no verdict within the time budget")
            model = solver.get_model() if found else None
    if not found:
        return NoModelUpTo(n)
    return _verified(f, c, _decode(enc, model, names))


def _enumerate(f, c: FrameClass, max_worlds: int, time_budget: float | None) -> BoundedVerdict:
    names = sorted(_nnf_vars(_nnf_of(f), set()))
    start = time.monotonic()
    for n in range(1, max_worlds + 1):
        pairs = [(i, j) for i in range(n) for j in range(n)]
        for rmask in range(1 << len(pairs)):
            rel = frozenset(p for k, p in enumerate(pairs) if rmask >> k & 1)
            frame = KripkeModel(n, rel)
            if not frame_check(frame, c):
                continue
            slots = list(itertools.product(names, range(n)))
            for vmask in range(1 << len(slots)):
                if time_budget is not None and time.monotonic() - start > time_budget:
                    raise BudgetExhausted(f"no verdict within {time_budget}s")
                val = {q: set() for q in names}
                for k, (q, w) in enumerate(slots):
                    if vmask >> k & 1:
                        val[q].add(w)
                m = KripkeModel(n, rel, {q: frozenset(ws) for q, ws in val.items()})
                if model_check(m, 0, f):
                    return _verified(f, c, m)
    return NoModelUpTo(max_worlds)


# ---------------------------------------------------------------------------
# witness constructions


def tree_model(node) -> KripkeModel:
    """Model from a nested (true variables, [children]) tree; root first."""
    rel, val = set(), {}
    worlds: list = []

    def walk(t) -> int:
        w = len(worlds)
        worlds.append(t[0])
        for child in t[1]:
            rel.add((w, walk(child)))
        return w

    walk(node)
    for w, trues in enumerate(worlds):
        for q in trues:
            val.setdefault(q, set()).add(w)
    return KripkeModel(len(worlds), frozenset(rel), {q: frozenset(ws) for q, ws in val.items()})


@dataclass(frozen=True)
class EuclidAssignment:
    """Valuations chosen while deciding a Euclidean formula.

    ``clusters`` holds one list per diamond demand of the root: the demand
    world first, then one world per diamond made true inside that cluster.
    ``link`` says how the root attaches: ``demand`` (root sees only the
    demand worlds), ``all`` (root sees every non-root world), ``cluster``
    (root belongs to the equivalence class) or ``none`` (no successors).
    """

    root_vars: frozenset
    clusters: tuple = ()
    link: str = "demand"


def build_euclid_witness(a: EuclidAssignment) -> KripkeModel:
    if a.link not in ("demand", "all", "cluster", "none"):
        raise ValueError(f"malformed witness link {a.link!r}")
    if a.link == "none" and a.clusters:
        raise ValueError("a world without successors cannot have diamond demands")
    worlds = [a.root_vars]
    demand_worlds = []
    for cluster in a.clusters:
        if not cluster:
            raise ValueError("malformed witness: empty cluster")
        demand_worlds.append(len(worlds))
        worlds.extend(cluster)
    n = len(worlds)
    others = range(1, n)
    rel = {(i, j) for i in others for j in others}
    if a.link == "demand":
        rel |= {(0, j) for j in demand_worlds}
    elif a.link == "all":
        rel |= {(0, j) for j in others}
    elif a.link == "cluster":
        rel = {(i, j) for i in range(n) for j in range(n)}
    val: dict = {}
    for w, trues in enumerate(worlds):
        for q in trues:
            val.setdefault(q, set()).add(w)
    return KripkeModel(n, frozenset(rel), {q: frozenset(ws) for q, ws in val.items()})
