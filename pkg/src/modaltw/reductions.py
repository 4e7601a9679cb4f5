"""From list colouring to partitioned weighted SAT to transitive modal satisfiability.

NLCP: colour each vertex from its list, properly, using colour c exactly
tg(c) times.  p-PW-SAT: satisfy a CNF setting exactly tg(p) variables of
partition p to true.  φ_F: a depth-2 modal CNF satisfiable in a transitive
model iff the p-PW-SAT instance is a yes-instance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Optional

import networkx as nx

from . import decomposition as D
from . import formula as F
from . import kripke as K

SEARCH_CAP = 1 << 20

FAMILIES = (
    "F",
    "determined",
    "depth",
    "setCounter",
    "incCounter",
    "targetMet",
    "determined'",
    "countInit",
    "depth'",
    "countMonotone",
)


# ---------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class NlcpInstance:
    n_vertices: int
    edges: tuple  # pairs of vertex indices 0..n-1
    lists: tuple  # frozenset of colours per vertex
    tg: tuple  # sorted (colour, target) pairs

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(sorted(tuple(sorted(e)) for e in self.edges)))
        object.__setattr__(self, "lists", tuple(frozenset(l) for l in self.lists))
        tg = dict(self.tg)
        object.__setattr__(self, "tg", tuple(sorted(tg.items())))
        if len(self.lists) != self.n_vertices:
            raise ValueError("one colour list per vertex is required")
        if any(not l for l in self.lists):
            raise ValueError("colour lists must be nonempty")
        for u, v in self.edges:
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices) or u == v:
                raise ValueError(f"bad edge ({u}, {v})")
        if set(tg) != self.colors:
            raise ValueError("targets must be given for exactly the colours in the lists")
        if any(t < 0 for t in tg.values()):
            raise ValueError("targets must be nonnegative")

    @property
    def colors(self) -> frozenset:
        return frozenset().union(*self.lists) if self.lists else frozenset()

    @property
    def target(self) -> dict:
        return dict(self.tg)

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n_vertices))
        g.add_edges_from(self.edges)
        return g


@dataclass(frozen=True)
class PwSatInstance:
    cnf: tuple  # propositional clauses
    variables: tuple  # q_1..q_n in index order
    part: tuple  # partition index per variable, aligned with variables
    k: int
    tg: tuple  # target per partition 1..k

    def __post_init__(self):
        if len(self.part) != len(self.variables):
            raise ValueError("one partition index per variable is required")
        if len(self.tg) != self.k:
            raise ValueError("one target per partition is required")
        if any(not 1 <= p <= self.k for p in self.part):
            raise ValueError("partition index out of range")
        for p in range(1, self.k + 1):
            if not 0 <= self.tg[p - 1] <= self.n_of_part[p]:
                raise ValueError(f"target {self.tg[p - 1]} out of range for partition {p}")
        known = set(self.variables)
        for c in self.cnf:
            for lit in c:
                if not isinstance(lit, (F.Pos, F.Neg)):
                    raise ValueError("p-PW-SAT formulas are propositional")
                if lit.var not in known:
                    raise ValueError(f"unknown variable {lit.var}")

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def n_of_part(self) -> dict:
        out = {p: 0 for p in range(1, self.k + 1)}
        for p in self.part:
            out[p] += 1
        return out

    def part_of(self, q: str) -> int:
        return self.part[self.variables.index(q)]

    def target(self, p: int) -> int:
        return self.tg[p - 1]

    def variable_key(self, q) -> int:
        return self.variables.index(q)

    def members(self, p: int) -> list:
        return [q for q, pp in zip(self.variables, self.part) if pp == p]


# ---------------------------------------------------------------------------
# brute-force oracles


def nlcp_witness(inst: NlcpInstance) -> Optional[dict]:
    space = 1
    for l in inst.lists:
        space *= len(l)
    if space > SEARCH_CAP:
        raise ValueError(f"search space {space} exceeds cap")
    target = inst.target
    for colours in itertools.product(*(sorted(l) for l in inst.lists)):
        if any(colours[u] == colours[v] for u, v in inst.edges):
            continue
        counts = {c: 0 for c in target}
        for c in colours:
            counts[c] += 1
        if counts == target:
            return dict(enumerate(colours))
    return None


def brute_nlcp(inst: NlcpInstance) -> bool:
    return nlcp_witness(inst) is not None


def pwsat_witness(inst: PwSatInstance) -> Optional[dict]:
    """Enumerate only assignments that meet every target exactly."""
    groups = [inst.members(p) for p in range(1, inst.k + 1)]
    space = 1
    for p, g in enumerate(groups, start=1):
        space *= comb(len(g), inst.target(p))
    if space > SEARCH_CAP:
        raise ValueError(f"search space {space} exceeds cap")
    choices = [itertools.combinations(g, inst.target(p)) for p, g in enumerate(groups, start=1)]
    for pick in itertools.product(*choices):
        true = set().union(*pick) if pick else set()
        if all(
            any((lit.var in true) == isinstance(lit, F.Pos) for lit in clause) for clause in inst.cnf
        ):
            return {q: q in true for q in inst.variables}
    return None


def brute_pwsat(inst: PwSatInstance) -> bool:
    return pwsat_witness(inst) is not None


# ---------------------------------------------------------------------------
# NLCP to p-PW-SAT


def colour_var(v: int, c: int) -> str:
    return f"q{v}_{c}"


def nlcp_to_pwsat(inst: NlcpInstance, pd: D.PathDecomposition):
    """CNF over q_v^c with atLeast, atMost and proper clauses; bags expand v to its q_v^c."""
    report = D.validate(inst.graph(), pd)
    if not report.valid:
        raise ValueError(f"decomposition of the NLCP graph is {report.summary()}")
    colours = sorted(inst.colors)
    pidx = {c: i + 1 for i, c in enumerate(colours)}
    variables, part = [], []
    for v in range(inst.n_vertices):
        for c in sorted(inst.lists[v]):
            variables.append(colour_var(v, c))
            part.append(pidx[c])
    clauses = []
    for v in range(inst.n_vertices):
        clauses.append(tuple(F.Pos(colour_var(v, c)) for c in sorted(inst.lists[v])))
    for v in range(inst.n_vertices):
        for a, b in itertools.combinations(sorted(inst.lists[v]), 2):
            clauses.append((F.Neg(colour_var(v, a)), F.Neg(colour_var(v, b))))
    for u, v in inst.edges:
        for c in sorted(inst.lists[u] & inst.lists[v]):
            clauses.append((F.Neg(colour_var(u, c)), F.Neg(colour_var(v, c))))
    target = inst.target
    pw = PwSatInstance(
        cnf=tuple(clauses),
        variables=tuple(variables),
        part=tuple(part),
        k=len(colours),
        tg=tuple(target[c] for c in colours),
    )
    bags = tuple(
        frozenset(colour_var(v, c) for v in bag for c in inst.lists[v]) for bag in pd.bags
    )
    return pw, D.PathDecomposition(bags)


def pwsat_primal_graph(inst: PwSatInstance) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(inst.variables)
    for clause in inst.cnf:
        names = sorted({lit.var for lit in clause})
        g.add_edges_from(itertools.combinations(names, 2))
    return g


# ---------------------------------------------------------------------------
# p-PW-SAT to φ_F


@dataclass(frozen=True)
class AuxNames:
    prefix: str = ""

    def depth(self, i: int) -> str:
        return f"{self.prefix}d_{i}"

    def up_t(self, p: int) -> str:
        return f"{self.prefix}tu_{p}"

    def up_f(self, p: int) -> str:
        return f"{self.prefix}fu_{p}"

    def tr(self, p: int, j: int) -> str:
        return f"{self.prefix}tr_{p}_{j}"

    def fl(self, p: int, j: int) -> str:
        return f"{self.prefix}fl_{p}_{j}"


def _aux_names(inst: PwSatInstance) -> AuxNames:
    taken = set(inst.variables)
    prefix = ""
    while True:
        names = AuxNames(prefix)
        probe = [names.depth(i) for i in range(inst.n + 2)]
        for p in range(1, inst.k + 1):
            probe += [names.up_t(p), names.up_f(p)]
            probe += [names.tr(p, j) for j in range(inst.n_of_part[p] + 1)]
            probe += [names.fl(p, j) for j in range(inst.n_of_part[p] + 1)]
        if not taken.intersection(probe):
            return names
        prefix += "x"


@dataclass(frozen=True)
class PhiFOutput:
    cnf: tuple
    var_order: tuple
    families: tuple  # family tag per top clause
    names: AuxNames
    aux_vars: dict = field(default_factory=dict, compare=False, hash=False)

    def family(self, tag: str) -> tuple:
        return tuple(c for c, t in zip(self.cnf, self.families) if t == tag)


def _p(x):
    return F.Pos(x)


def _n(x):
    return F.Neg(x)


def _box(*lits):
    return F.BoxClause(tuple(lits))


def _dia(*clauses):
    return F.DiaCnf(tuple(tuple(c) for c in clauses))


def pwsat_to_modal(inst: PwSatInstance, pd: D.PathDecomposition) -> PhiFOutput:
    if inst.n < 1 or inst.k < 1:
        raise ValueError("need at least one variable and one partition")
    order = D.first_introduction_order(pd, inst.variable_key)
    if sorted(order, key=inst.variable_key) != list(inst.variables):
        raise ValueError("decomposition bags must cover exactly the instance variables")
    if not D.is_continuous(pd, order):
        raise ValueError("decomposition is not continuous")
    nm = _aux_names(inst)
    n, k = inst.n, inst.k
    q = {i + 1: v for i, v in enumerate(order)}
    part = {i: inst.part_of(q[i]) for i in q}
    npart = inst.n_of_part
    d = nm.depth
    out: list = []

    def emit(tag, *clauses):
        for c in clauses:
            out.append((tuple(c), tag))

    emit("F", *inst.cnf)
    for i in range(1, n + 1):
        emit("determined", (_n(q[i]), _box(_p(q[i]))), (_p(q[i]), _box(_n(q[i]))))

    emit("depth", (_dia((_p(d(1)),), (_n(d(2)),)),))
    for i in range(1, n):
        emit("depth", (_box(_n(d(i)), _p(d(i + 1)), _dia((_p(d(i + 1)),), (_n(d(i + 2)),))),))

    emit(
        "setCounter",
        (_n(q[1]), _p(nm.up_t(part[1]))),
        (_p(q[1]), _p(nm.up_f(part[1]))),
    )
    for i in range(2, n + 1):
        emit(
            "setCounter",
            (_box(_n(d(i - 1)), _p(d(i)), _n(q[i]), _p(nm.up_t(part[i]))),),
            (_box(_n(d(i - 1)), _p(d(i)), _p(q[i]), _p(nm.up_f(part[i]))),),
        )

    emit(
        "incCounter",
        (_n(nm.up_t(part[1])), _box(_p(nm.tr(part[1], 1)))),
        (_n(nm.up_f(part[1])), _box(_p(nm.fl(part[1], 1)))),
    )
    for p in range(1, k + 1):
        for j in range(npart[p]):
            emit(
                "incCounter",
                (_box(_n(nm.up_t(p)), _n(nm.tr(p, j)), _box(_p(nm.tr(p, j + 1)))),),
                (_box(_n(nm.up_f(p)), _n(nm.fl(p, j)), _box(_p(nm.fl(p, j + 1)))),),
            )

    for p in range(1, k + 1):
        t = inst.target(p)
        emit("targetMet", (_box(_n(d(n)), _p(nm.tr(p, t))),))
        if t + 1 <= npart[p]:
            emit("targetMet", (_box(_n(d(n)), _n(nm.tr(p, t + 1))),))
        emit("targetMet", (_box(_n(d(n)), _p(nm.fl(p, npart[p] - t))),))
        if t > 0:
            emit("targetMet", (_box(_n(d(n)), _n(nm.fl(p, npart[p] - t + 1))),))

    for p in range(1, k + 1):
        emit(
            "determined'",
            (_n(nm.tr(p, 0)), _box(_p(nm.tr(p, 0)))),
            (_n(nm.fl(p, 0)), _box(_p(nm.fl(p, 0)))),
        )

    emit("countInit", (_p(d(0)),), (_n(d(1)),))
    for p in range(1, k + 1):
        if npart[p] >= 1:
            emit("countInit", (_n(nm.tr(p, 1)),), (_n(nm.fl(p, 1)),))
        emit("countInit", (_p(nm.tr(p, 0)),), (_p(nm.fl(p, 0)),))

    for p in range(1, k + 1):
        for j in range(npart[p] + 1):
            emit(
                "depth'",
                (_box(_n(nm.tr(p, j)), _box(_p(nm.tr(p, j)))),),
                (_box(_n(nm.fl(p, j)), _box(_p(nm.fl(p, j)))),),
            )

    for i in range(1, n + 1):
        emit("countMonotone", (_box(_n(d(i)), _p(d(i - 1))),))
    for p in range(1, k + 1):
        for j in range(2, npart[p] + 1):
            emit(
                "countMonotone",
                (_box(_n(nm.tr(p, j)), _p(nm.tr(p, j - 1))),),
                (_box(_n(nm.fl(p, j)), _p(nm.fl(p, j - 1))),),
            )

    aux = {
        "partition_indicators": [nm.up_t(p) for p in range(1, k + 1)]
        + [nm.up_f(p) for p in range(1, k + 1)],
        "counters": [nm.tr(p, j) for p in range(1, k + 1) for j in range(npart[p] + 1)]
        + [nm.fl(p, j) for p in range(1, k + 1) for j in range(npart[p] + 1)],
        "depth_indicators": [d(i) for i in range(n + 2)],
    }
    cnf = tuple(c for c, _ in out)
    if F.normalize(cnf) != cnf:
        raise AssertionError("φ_F must already be normalized")
    return PhiFOutput(cnf, tuple(order), tuple(t for _, t in out), nm, aux)


# ---------------------------------------------------------------------------
# the chain model and the counter pattern


def _counts(inst: PwSatInstance, order, assignment: dict, i: int) -> dict:
    """(true count, false count) per partition over q_1..q_i."""
    out = {p: [0, 0] for p in range(1, inst.k + 1)}
    for v in order[:i]:
        out[inst.part_of(v)][0 if assignment[v] else 1] += 1
    return out


def _satisfies(inst: PwSatInstance, assignment: dict) -> bool:
    if any(q not in assignment for q in inst.variables):
        return False
    for clause in inst.cnf:
        if not any(assignment[l.var] == isinstance(l, F.Pos) for l in clause):
            return False
    return all(
        sum(assignment[q] for q in inst.members(p)) == inst.target(p) for p in range(1, inst.k + 1)
    )


def build_chain_model(inst: PwSatInstance, phi: PhiFOutput, assignment: dict) -> K.KripkeModel:
    """Worlds w_0..w_n, each seeing all later ones, valued as in the soundness argument."""
    nm, order, n = phi.names, phi.var_order, inst.n
    if n < 1:
        raise ValueError("the chain model needs at least one variable")
    if not _satisfies(inst, assignment):
        raise ValueError("assignment does not satisfy F with the partition targets")
    val: dict = {}

    def put(name, w):
        val.setdefault(name, set()).add(w)

    for w in range(n + 1):
        for v in order:
            if assignment[v]:
                put(v, w)
        for j in range(w + 1):
            put(nm.depth(j), w)
        counts = _counts(inst, order, assignment, w)
        for p, (t, f) in counts.items():
            for j in range(t + 1):
                put(nm.tr(p, j), w)
            for j in range(f + 1):
                put(nm.fl(p, j), w)
        if w < n:
            nxt = order[w]
            p = inst.part_of(nxt)
            put(nm.up_t(p) if assignment[nxt] else nm.up_f(p), w)
    rel = frozenset((a, b) for a in range(n + 1) for b in range(a + 1, n + 1))
    return K.KripkeModel(n + 1, rel, {x: frozenset(ws) for x, ws in val.items()}, 0)


def find_chain(model: K.KripkeModel, phi: PhiFOutput, n: int, root: Optional[int] = None) -> Optional[list]:
    """Worlds w_0..w_n with w_i a successor of w_(i-1) satisfying d_i and not d_(i+1)."""
    nm = phi.names
    root = model.root if root is None else root

    def at(i, w):
        return w in model.val.get(nm.depth(i), ()) and w not in model.val.get(nm.depth(i + 1), ())

    def extend(chain):
        if len(chain) == n + 1:
            return chain
        i = len(chain)
        for w in sorted(model.successors(chain[-1])):
            if at(i, w) and w not in chain:
                got = extend(chain + [w])
                if got:
                    return got
        return None

    return extend([root])


def true_prefix(model: K.KripkeModel, w: int, names: list) -> int:
    """Largest j with names[0..j] all true at w, or -1."""
    j = -1
    for x in names:
        if w not in model.val.get(x, ()):
            break
        j += 1
    return j


@dataclass
class CounterCheck:
    ok: bool
    chain: Optional[list]
    mismatches: list = field(default_factory=list)


def check_counters(model: K.KripkeModel, inst: PwSatInstance, phi: PhiFOutput, exact: bool = True) -> CounterCheck:
    """Counter pattern along the depth chain w_0..w_n from the root.

    With ``exact`` the true-prefix of each counter family at w_i must equal
    the running count over q_1..q_i (the shape of the constructed chain
    model).  Otherwise only the guaranteed part is checked: counters 0..count
    are all true, which is what every model of φ_F has to satisfy.
    """
    nm, order = phi.names, phi.var_order
    chain = find_chain(model, phi, inst.n)
    if chain is None:
        return CounterCheck(False, None, ["no depth-indicator chain from the root"])
    w0 = chain[0]
    assignment = {v: w0 in model.val.get(v, ()) for v in order}
    problems = []
    for i, w in enumerate(chain):
        counts = _counts(inst, order, assignment, i)
        for p, (t, f) in counts.items():
            m = inst.n_of_part[p]
            for label, family, want in (("tr", nm.tr, t), ("fl", nm.fl, f)):
                got = true_prefix(model, w, [family(p, j) for j in range(m + 1)])
                if got < want or (exact and got != want):
                    problems.append(f"w{i} {label}_{p}: prefix {got}, expected {want}")
    return CounterCheck(not problems, chain, problems)


# ---------------------------------------------------------------------------
# the whole pipeline on one instance

PASS, FAIL, VACUOUS = "pass", "fail", "vacuous"


@dataclass
class PipelineReport:
    nlcp_yes: bool
    pwsat_yes: bool
    checks: dict  # letter -> (status, detail)
    n_pwsat_vars: int = 0
    layout_width: Optional[int] = None
    layout_bound: Optional[int] = None
    phi_clauses: int = 0

    @property
    def ok(self) -> bool:
        return all(status != FAIL for status, _ in self.checks.values())

    def failures(self) -> list:
        return [f"({k}) {detail}" for k, (status, detail) in sorted(self.checks.items()) if status == FAIL]


def prepare_pipeline(inst: NlcpInstance, pd: Optional[D.PathDecomposition] = None):
    """NLCP instance to (p-PW-SAT instance, continuous primal decomposition, φ_F)."""
    if pd is None:
        pd = D.exact_path_decomposition(inst.graph())
    pw, ppd = nlcp_to_pwsat(inst, pd)
    order = D.first_introduction_order(ppd, pw.variable_key)
    ppd = D.enforce_continuity(ppd, order, pw.variable_key)
    return pw, ppd, pwsat_to_modal(pw, ppd)


def verify_pipeline(
    inst: NlcpInstance,
    pd: Optional[D.PathDecomposition] = None,
    time_budget: Optional[float] = None,
) -> PipelineReport:
    checks: dict = {}
    nlcp_yes = brute_nlcp(inst)
    pw, ppd, phi = prepare_pipeline(inst, pd)
    witness = pwsat_witness(pw)
    pw_yes = witness is not None
    checks["a"] = (PASS, "") if nlcp_yes == pw_yes else (FAIL, f"NLCP {nlcp_yes} vs p-PW-SAT {pw_yes}")

    if pw_yes:
        model = build_chain_model(pw, phi, witness)
        sat = K.model_check(model, 0, phi.cnf)
        trans = K.frame_check(model, K.TRANSITIVE)
        checks["b"] = (PASS, "") if sat and trans else (FAIL, f"model check {sat}, transitive {trans}")
        cc = check_counters(model, pw, phi)
        checks["e"] = (PASS, "") if cc.ok else (FAIL, "; ".join(cc.mismatches))
        checks["c"] = (VACUOUS, "yes-instance")
    else:
        checks["b"] = (VACUOUS, "no-instance")
        got = K.bounded_sat(phi.cnf, K.TRANSITIVE, pw.n + 1, time_budget)
        if isinstance(got, K.NoModelUpTo):
            checks["c"] = (PASS, f"no transitive model with at most {pw.n + 1} worlds (bounded evidence)")
            checks["e"] = (VACUOUS, "no model found")
        else:
            checks["c"] = (FAIL, f"found a transitive model with {got.model.world_count} worlds")
            cc = check_counters(got.model, pw, phi, exact=False)
            checks["e"] = (PASS, "") if cc.ok else (FAIL, "; ".join(cc.mismatches))

    s = _structure(phi)
    layout = D.build_phiF_path_decomposition(ppd, pw, phi, s)
    rep = D.validate(s, layout.decomposition)
    w = rep.width
    if rep.valid and w <= layout.bound:
        checks["d"] = (PASS, f"width {w} <= {layout.bound}")
    else:
        checks["d"] = (FAIL, f"{rep.summary()}, bound {layout.bound}")
    return PipelineReport(nlcp_yes, pw_yes, checks, pw.n, w, layout.bound, len(phi.cnf))


def _structure(phi: PhiFOutput):
    from .incidence import build_structure, LEVEL_MODE

    return build_structure(phi.cnf, LEVEL_MODE)


# ---------------------------------------------------------------------------
# exhaustive tiny NLCP instances


def _automorphisms(n: int, edges: frozenset) -> list:
    es = {frozenset(e) for e in edges}
    return [
        perm
        for perm in itertools.permutations(range(n))
        if {frozenset((perm[u], perm[v])) for u, v in edges} == es
    ]


def _act(perm, cmap, lists):
    """Vertex v's list moves to perm[v], colours renamed by cmap."""
    out = [None] * len(lists)
    for v, l in enumerate(lists):
        out[perm[v]] = frozenset(cmap[c] for c in l)
    return tuple(out)


def _list_key(lists) -> tuple:
    return tuple(tuple(sorted(l)) for l in lists)


def nlcp_corpus(max_vertices: int = 4, palette=(1, 2, 3), max_total: int = 4, up_to_isomorphism: bool = True):
    """Every instance with ≤ max_vertices vertices, lists over the palette, targets summing to ≤ max_total.

    Targets are limited to tg(c) ≤ number of lists containing c, as the
    p-PW-SAT side requires.  With up_to_isomorphism, one representative per
    class under vertex and colour renaming is kept: graphs come from the
    atlas of unlabeled graphs, lists are reduced under graph automorphisms
    times colour permutations, and targets under what fixes the lists.
    """
    palette = tuple(palette)
    subsets = [frozenset(s) for r in range(1, len(palette) + 1) for s in itertools.combinations(palette, r)]
    cmaps = [dict(zip(palette, cp)) for cp in itertools.permutations(palette)]
    if up_to_isomorphism:
        graphs = [
            (g.number_of_nodes(), frozenset(tuple(sorted(e)) for e in g.edges))
            for g in nx.graph_atlas_g()
            if 1 <= g.number_of_nodes() <= max_vertices
        ]
    else:
        graphs = []
        for n in range(1, max_vertices + 1):
            pairs = list(itertools.combinations(range(n), 2))
            for mask in range(1 << len(pairs)):
                graphs.append((n, frozenset(p for i, p in enumerate(pairs) if mask >> i & 1)))
    for n, edges in graphs:
        group = [(perm, cm) for perm in _automorphisms(n, edges) for cm in cmaps] if up_to_isomorphism else []
        for lists in itertools.product(subsets, repeat=n):
            stab = None
            if up_to_isomorphism:
                key = _list_key(lists)
                if any(_list_key(_act(perm, cm, lists)) < key for perm, cm in group):
                    continue
                stab = [cm for perm, cm in group if _act(perm, cm, lists) == lists]
            colours = sorted(frozenset().union(*lists))
            caps = [sum(1 for l in lists if c in l) for c in colours]
            for targets in itertools.product(*(range(cap + 1) for cap in caps)):
                if sum(targets) > max_total:
                    continue
                tg = tuple(zip(colours, targets))
                if stab is not None:
                    if any(tuple(sorted((cm[c], t) for c, t in tg)) < tg for cm in stab):
                        continue
                yield NlcpInstance(n, tuple(edges), lists, tg)


# ---------------------------------------------------------------------------
# JSON


def nlcp_to_json(inst: NlcpInstance) -> dict:
    return {
        "vertices": inst.n_vertices,
        "edges": [list(e) for e in inst.edges],
        "lists": [sorted(l) for l in inst.lists],
        "tg": {str(c): t for c, t in inst.tg},
    }


def nlcp_from_json(data: dict) -> NlcpInstance:
    return NlcpInstance(
        int(data["vertices"]),
        tuple(tuple(e) for e in data["edges"]),
        tuple(frozenset(l) for l in data["lists"]),
        tuple((int(c), int(t)) for c, t in data["tg"].items()),
    )


def pwsat_to_json(inst: PwSatInstance) -> dict:
    index = {q: i + 1 for i, q in enumerate(inst.variables)}
    return {
        "clauses": [[index[l.var] if isinstance(l, F.Pos) else -index[l.var] for l in c] for c in inst.cnf],
        "part": list(inst.part),
        "tg": {str(p): inst.tg[p - 1] for p in range(1, inst.k + 1)},
        "variables": list(inst.variables),
    }


def pwsat_from_json(data: dict) -> PwSatInstance:
    part = tuple(int(p) for p in data["part"])
    names = tuple(data.get("variables") or [f"q{i}" for i in range(1, len(part) + 1)])
    tgd = {int(p): int(t) for p, t in data["tg"].items()}
    k = max([*part, *tgd]) if part or tgd else 0
    clauses = []
    for c in data["clauses"]:
        lits = []
        for x in c:
            x = int(x)
            if x == 0 or abs(x) > len(names):
                raise ValueError(f"literal {x} out of range")
            lits.append(F.Pos(names[x - 1]) if x > 0 else F.Neg(names[-x - 1]))
        clauses.append(tuple(lits))
    return PwSatInstance(tuple(clauses), names, part, k, tuple(tgd.get(p, 0) for p in range(1, k + 1)))


def phi_to_json(phi: PhiFOutput) -> dict:
    return {
        "modalDepth": F.modal_depth(phi.cnf),
        "varOrder": list(phi.var_order),
        "auxVars": phi.aux_vars,
        "clauses": [
            {"family": tag, "text": F.render_cnf((c,))} for c, tag in zip(phi.cnf, phi.families)
        ],
        "cnf": F.cnf_to_json(phi.cnf),
    }
