"""Tree and path decompositions: checking, computing, and the φ_F layout.

Bags hold vertex labels of whatever graph is being decomposed: element ids
for incidence structures, variable names for primal graphs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Optional

import networkx as nx

from .incidence import IncidenceStructure, build_structure, gaifman_graph, LEVEL_MODE

DEFAULT_EXACT_CAP = 12


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple
    tree_edges: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "bags", tuple(frozenset(b) for b in self.bags))
        object.__setattr__(self, "tree_edges", frozenset(tuple(sorted(e)) for e in self.tree_edges))


@dataclass(frozen=True)
class PathDecomposition:
    bags: tuple

    def __post_init__(self):
        object.__setattr__(self, "bags", tuple(frozenset(b) for b in self.bags))

    @property
    def tree_edges(self) -> frozenset:
        return frozenset((i, i + 1) for i in range(len(self.bags) - 1))

    def as_tree(self) -> TreeDecomposition:
        return TreeDecomposition(self.bags, self.tree_edges)


@dataclass
class ValidationReport:
    valid: bool
    width: Optional[int]
    uncovered_elements: list = field(default_factory=list)
    disconnected_elements: list = field(default_factory=list)
    uncovered_edges: list = field(default_factory=list)
    tree_problems: list = field(default_factory=list)

    def summary(self) -> str:
        if self.valid:
            return f"valid, width {self.width}"
        parts = []
        if self.tree_problems:
            parts.append("; ".join(self.tree_problems))
        if self.uncovered_elements:
            parts.append(f"uncovered elements {self.uncovered_elements}")
        if self.disconnected_elements:
            parts.append(f"disconnected occurrence sets {self.disconnected_elements}")
        if self.uncovered_edges:
            parts.append(f"uncovered edges {self.uncovered_edges}")
        return "invalid: " + ", ".join(parts)


def width(d) -> int:
    if not d.bags:
        raise ValueError("a decomposition needs at least one bag")
    return max(len(b) for b in d.bags) - 1


def _as_graph(target) -> nx.Graph:
    if isinstance(target, IncidenceStructure):
        return gaifman_graph(target)
    if isinstance(target, nx.Graph):
        return target
    raise TypeError(f"cannot decompose {type(target).__name__}")


def _vertices_edges(target) -> tuple[list, list]:
    if isinstance(target, IncidenceStructure):
        edges = {tuple(sorted(e)) for e in target.oc | target.negoc}
        return list(range(target.size)), sorted(edges)
    g = _as_graph(target)
    return sorted(g.nodes, key=repr), sorted(g.edges, key=repr)


def validate(target, d) -> ValidationReport:
    """Check a decomposition against a graph or an incidence structure."""
    vertices, edges = _vertices_edges(target)
    tree_edges = d.tree_edges
    n = len(d.bags)
    for a, b in tree_edges:
        if not (0 <= a < n and 0 <= b < n):
            raise IndexError(f"tree edge ({a}, {b}) names a missing bag")
    report = ValidationReport(valid=True, width=None)
    tree = nx.Graph()
    tree.add_nodes_from(range(n))
    tree.add_edges_from(tree_edges)
    if n == 0:
        report.tree_problems.append("no bags")
    elif not nx.is_tree(tree):
        report.tree_problems.append("bags do not form a tree")
    where: dict = {}
    for i, bag in enumerate(d.bags):
        for x in bag:
            where.setdefault(x, set()).add(i)
    # Inside a tree, k bags are connected iff k - 1 tree edges join them.
    inner: dict = {}
    for a, b in tree_edges:
        for x in set(d.bags[a]) & set(d.bags[b]):
            inner[x] = inner.get(x, 0) + 1
    for v in vertices:
        occ = where.get(v)
        if not occ:
            report.uncovered_elements.append(v)
        elif not report.tree_problems and inner.get(v, 0) != len(occ) - 1:
            report.disconnected_elements.append(v)
    for u, v in edges:
        if u == v:
            continue
        if not (where.get(u, set()) & where.get(v, set())):
            report.uncovered_edges.append((u, v))
    report.valid = not (
        report.tree_problems
        or report.uncovered_elements
        or report.disconnected_elements
        or report.uncovered_edges
    )
    if n:
        report.width = width(d)
    return report


# ---------------------------------------------------------------------------
# elimination orders


def _key(v) -> tuple:
    return (type(v).__name__, repr(v))


def decomposition_from_elimination(g: nx.Graph, order: list) -> TreeDecomposition:
    """Standard bags {v} ∪ later neighbours; each bag hangs off its first later neighbour."""
    if not order:
        return TreeDecomposition((frozenset(),))
    pos = {v: i for i, v in enumerate(order)}
    h = nx.Graph(g)
    bags, parents = [], []
    for v in order:
        later = set(h.neighbors(v))
        bags.append(frozenset({v} | later))
        parents.append(min((pos[u] for u in later), default=None))
        for a, b in itertools.combinations(later, 2):
            h.add_edge(a, b)
        h.remove_node(v)
    edges = set()
    for i, p in enumerate(parents):
        if p is not None:
            edges.add((i, p))
        elif i + 1 < len(order):
            edges.add((i, i + 1))
    return TreeDecomposition(tuple(bags), frozenset(edges))


def elimination_width(g: nx.Graph, order: list) -> int:
    h = nx.Graph(g)
    best = -1
    for v in order:
        nbrs = list(h.neighbors(v))
        best = max(best, len(nbrs))
        for a, b in itertools.combinations(nbrs, 2):
            h.add_edge(a, b)
        h.remove_node(v)
    return best


def minfill_heuristic(g: nx.Graph) -> TreeDecomposition:
    h = nx.Graph(g)
    order = []
    while h.number_of_nodes():
        def cost(v):
            nbrs = list(h.neighbors(v))
            fill = sum(1 for a, b in itertools.combinations(nbrs, 2) if not h.has_edge(a, b))
            return (fill, len(nbrs), _key(v))

        v = min(h.nodes, key=cost)
        nbrs = list(h.neighbors(v))
        for a, b in itertools.combinations(nbrs, 2):
            h.add_edge(a, b)
        h.remove_node(v)
        order.append(v)
    return decomposition_from_elimination(g, order)


def _check_cap(g: nx.Graph, cap: int):
    if g.number_of_nodes() > cap:
        raise ValueError(f"graph has {g.number_of_nodes()} vertices, cap is {cap}")


def exact_small(g: nx.Graph, cap: int = DEFAULT_EXACT_CAP) -> TreeDecomposition:
    """Width-minimal tree decomposition by dynamic programming over vertex subsets.

    TW(S) = min over v in S of max(TW(S - v), |Q(S - v, v)|), where Q(S, v)
    is the set of vertices outside S ∪ {v} reachable from v through S.
    """
    _check_cap(g, cap)
    nodes = sorted(g.nodes, key=_key)
    n = len(nodes)
    idx = {v: i for i, v in enumerate(nodes)}
    adj = [0] * n
    for u, v in g.edges:
        if u != v:
            adj[idx[u]] |= 1 << idx[v]
            adj[idx[v]] |= 1 << idx[u]

    def q_size(s: int, v: int) -> int:
        seen, stack, out = 1 << v, [v], 0
        while stack:
            x = stack.pop()
            nb = adj[x] & ~seen
            seen |= nb
            out |= nb & ~s
            inside = nb & s
            while inside:
                low = inside & -inside
                stack.append(low.bit_length() - 1)
                inside ^= low
        return bin(out).count("1")

    tw = {0: -1}
    choice = {}
    for size in range(1, n + 1):
        for combo in itertools.combinations(range(n), size):
            s = 0
            for i in combo:
                s |= 1 << i
            best, arg = None, None
            for v in combo:
                rest = s & ~(1 << v)
                val = max(tw[rest], q_size(rest, v))
                if best is None or val < best:
                    best, arg = val, v
            tw[s], choice[s] = best, arg
    order, s = [], (1 << n) - 1
    while s:
        v = choice[s]
        order.append(nodes[v])
        s &= ~(1 << v)
    order.reverse()
    return decomposition_from_elimination(g, order)


def treewidth_bruteforce(g: nx.Graph) -> int:
    """Minimum over all elimination orders; used as an oracle for exact_small."""
    nodes = list(g.nodes)
    if not nodes:
        return -1
    return min(elimination_width(g, list(p)) for p in itertools.permutations(nodes))


# ---------------------------------------------------------------------------
# path decompositions from vertex orders


def path_decomposition_from_order(g: nx.Graph, order: list) -> PathDecomposition:
    """Bag i holds the i-th vertex and every earlier vertex with a neighbour at or after i."""
    if not order:
        return PathDecomposition((frozenset(),))
    pos = {v: i for i, v in enumerate(order)}
    last = {v: max([pos[v]] + [pos[u] for u in g.neighbors(v)]) for v in order}
    bags = [frozenset(u for u in order[: i + 1] if last[u] >= i) for i in range(len(order))]
    return PathDecomposition(tuple(bags))


def exact_path_decomposition(g: nx.Graph, cap: int = DEFAULT_EXACT_CAP) -> PathDecomposition:
    """Minimum-width path decomposition via vertex separation over subsets."""
    _check_cap(g, cap)
    nodes = sorted(g.nodes, key=_key)
    n = len(nodes)
    idx = {v: i for i, v in enumerate(nodes)}
    adj = [0] * n
    for u, v in g.edges:
        if u != v:
            adj[idx[u]] |= 1 << idx[v]
            adj[idx[v]] |= 1 << idx[u]

    def boundary(s: int) -> int:
        return sum(1 for i in range(n) if s >> i & 1 and adj[i] & ~s)

    best = {0: 0}
    choice = {}
    for size in range(1, n + 1):
        for combo in itertools.combinations(range(n), size):
            s = 0
            for i in combo:
                s |= 1 << i
            b, arg = None, None
            for v in combo:
                rest = s & ~(1 << v)
                val = max(best[rest], boundary(rest) + 1)
                if b is None or val < b:
                    b, arg = val, v
            best[s], choice[s] = b, arg
    order, s = [], (1 << n) - 1
    while s:
        v = choice[s]
        order.append(nodes[v])
        s &= ~(1 << v)
    order.reverse()
    return path_decomposition_from_order(g, order)


def pathwidth_bruteforce(g: nx.Graph) -> int:
    nodes = list(g.nodes)
    if not nodes:
        return -1
    return min(width(path_decomposition_from_order(g, list(p))) for p in itertools.permutations(nodes))


# ---------------------------------------------------------------------------
# variable order and continuity


def first_introduction_order(pd: PathDecomposition, key: Optional[Callable] = None) -> list:
    """Variables in the order bags introduce them; ties inside a bag broken by key."""
    key = key or _key
    seen, order = set(), []
    for bag in pd.bags:
        fresh = sorted(bag - seen, key=key)
        order.extend(fresh)
        seen |= bag
    return order


def _spans(pd: PathDecomposition) -> dict:
    spans: dict = {}
    for i, bag in enumerate(pd.bags):
        for x in bag:
            lo, hi = spans.get(x, (i, i))
            spans[x] = (min(lo, i), max(hi, i))
    return spans


def is_continuous(pd: PathDecomposition, order: list) -> bool:
    spans = _spans(pd)
    for a, b in zip(order, order[1:]):
        if spans[b][0] > spans[a][1] + 1:
            return False
    return True


def enforce_continuity(pd: PathDecomposition, order: list, key: Optional[Callable] = None) -> PathDecomposition:
    """Drop the subset bags between the last q_i bag and the first q_(i+1) bag."""
    if first_introduction_order(pd, key) != list(order):
        raise ValueError("variable order is not the first-introduction order of the decomposition")
    bags = [b for b in pd.bags]
    i = 0
    while i < len(order) - 1:
        cur = PathDecomposition(tuple(bags))
        spans = _spans(cur)
        last_a = spans[order[i]][1]
        first_b = spans[order[i + 1]][0]
        if first_b > last_a + 1:
            for j in range(last_a + 1, first_b):
                if not bags[j] <= bags[last_a]:
                    raise AssertionError("a bag between two introductions is not a subset")
            del bags[last_a + 1 : first_b]
        i += 1
    return PathDecomposition(tuple(bags))


# ---------------------------------------------------------------------------
# the φ_F path decomposition


@dataclass(frozen=True)
class PhiFLayout:
    decomposition: PathDecomposition
    base_bags: tuple  # bags over variable names, before augmentation
    placements: tuple  # (top clause index, base bag index)
    pw: int
    k: int

    @property
    def bound(self) -> int:
        return 4 * self.pw + 2 * self.k + 5


def build_phiF_path_decomposition(pd: PathDecomposition, inst, phi, structure=None) -> PhiFLayout:
    """Path decomposition of S(φ_F) following the counter-friendly layout.

    Every bag that holds q_i also gets d_(i-1), d_i, d_(i+1) and all partition
    indicators; one path per counter family follows the last bag; each
    clause of φ_F is then hung, with its literals and inner clauses, on a
    copy of the first bag holding its variables.
    """
    key = inst.variable_key
    order = first_introduction_order(pd, key)
    if list(order) != list(phi.var_order):
        raise ValueError("decomposition order differs from the φ_F variable order")
    if not is_continuous(pd, order):
        raise ValueError("decomposition is not continuous")
    names = phi.names
    pw = max(len(b) for b in pd.bags)
    position = {q: i + 1 for i, q in enumerate(order)}
    n = len(order)
    bags = [b for b in pd.bags if b]
    last_qn = max(i for i, b in enumerate(bags) if order[-1] in b)
    bags = bags[: last_qn + 1]
    indicators = frozenset(names.up_t(p) for p in range(1, inst.k + 1)) | frozenset(
        names.up_f(p) for p in range(1, inst.k + 1)
    )
    base = []
    for bag in bags:
        extra = set(indicators)
        for q in bag:
            i = position[q]
            extra |= {names.depth(i - 1), names.depth(i), names.depth(i + 1)}
        base.append(frozenset(bag) | extra)
    head = indicators | {names.depth(n)}
    for p in range(1, inst.k + 1):
        for counter in (names.tr, names.fl):
            m = inst.n_of_part[p]
            if m == 0:
                base.append(head | {counter(p, 0)})
            for j in range(1, m + 1):
                base.append(head | {counter(p, j - 1), counter(p, j)})

    s = structure if structure is not None else build_structure(phi.cnf, LEVEL_MODE)
    var_id = {e.name: e.id for e in s.elements if e.kind == "var"}
    kind = {e.id: e.kind for e in s.elements}
    succ: dict = {}
    for a, b in s.oc | s.negoc:
        succ.setdefault(a, set()).add(b)

    copies: dict = {}
    placements = []
    for ci, top in enumerate(s.top_clauses):
        nonvar, vars_, stack = {top}, set(), [top]
        while stack:
            x = stack.pop()
            for y in succ.get(x, ()):
                if kind[y] == "var":
                    vars_.add(s.elements[y].name)
                elif y not in nonvar:
                    nonvar.add(y)
                    stack.append(y)
        host = next((i for i, b in enumerate(base) if vars_ <= b), None)
        if host is None:
            raise AssertionError(f"no bag holds the variables of clause {ci}")
        placements.append((ci, host))
        copies.setdefault(host, []).append(frozenset(nonvar))

    out = []
    for i, bag in enumerate(base):
        ids = frozenset(var_id[v] for v in bag if v in var_id)
        for fresh in copies.get(i, ()):
            out.append(ids | fresh)
        out.append(ids)
    return PhiFLayout(PathDecomposition(tuple(out)), tuple(base), tuple(placements), pw, inst.k)


# ---------------------------------------------------------------------------
# JSON


def decomposition_to_json(d) -> dict:
    out = {"bags": [sorted(b, key=_key) for b in d.bags]}
    if isinstance(d, TreeDecomposition):
        out["treeEdges"] = sorted([list(e) for e in d.tree_edges])
    return out


def decomposition_from_json(data: dict):
    bags = tuple(frozenset(b) for b in data["bags"])
    if "treeEdges" in data:
        return TreeDecomposition(bags, frozenset(tuple(e) for e in data["treeEdges"]))
    return PathDecomposition(bags)
