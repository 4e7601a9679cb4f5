"""Incidence structures of modal CNFs and the graphs derived from them.

Elements get ids in preorder: a clause first, then its literals left to
right, descending into the clause under a box and the clauses of a diamond
as they are met.  A variable gets its id at its first occurrence.
"""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from .formula import (
    BoxBottom,
    BoxClause,
    DiaCnf,
    ModalCnf,
    Neg,
    Pos,
    TrivialUnsat,
    modal_depth,
)

LEVEL_MODE = "level"
PV_MODE = "pv"


@dataclass(frozen=True)
class Element:
    id: int
    kind: str  # var | clause | box | dia | boxbot
    name: str = ""
    path: tuple = ()


@dataclass(frozen=True)
class IncidenceStructure:
    elements: tuple
    oc: frozenset
    negoc: frozenset
    cl: frozenset
    lt: frozenset
    u: frozenset
    bbox: frozenset
    ddia: frozenset
    mode: str
    md: int
    lv: tuple | None = None
    pv: frozenset | None = None
    hl: frozenset | None = None
    top_clauses: tuple = ()

    @property
    def size(self) -> int:
        return len(self.elements)

    def var_id(self, name: str) -> int:
        for e in self.elements:
            if e.kind == "var" and e.name == name:
                return e.id
        raise KeyError(name)

    def by_path(self, path: tuple) -> int:
        for e in self.elements:
            if e.kind != "var" and e.path == path:
                return e.id
        raise KeyError(path)

    def successors(self, x: int) -> list[int]:
        return sorted(b for a, b in self.oc if a == x)

    def unary(self) -> dict[str, frozenset]:
        out = {"Cl": self.cl, "Lt": self.lt, "U": self.u, "BBox": self.bbox, "DDia": self.ddia}
        if self.mode == LEVEL_MODE:
            for i, ids in enumerate(self.lv):
                out[f"Lv{i}"] = ids
        else:
            out["Pv"] = self.pv
            out["Hl"] = self.hl
        return out

    def binary(self) -> dict[str, frozenset]:
        return {"Oc": self.oc, "NegOc": self.negoc}


class _Builder:
    def __init__(self, md: int):
        self.md = md
        self.elements: list[Element] = []
        self.var_ids: dict[str, int] = {}
        self.oc: set = set()
        self.negoc: set = set()
        self.level_of: dict[int, set] = {}

    def new(self, kind: str, path: tuple, level: int, name: str = "") -> int:
        eid = len(self.elements)
        self.elements.append(Element(eid, kind, name, path))
        self.level_of[eid] = {level}
        return eid

    def var(self, name: str, level: int) -> int:
        if name not in self.var_ids:
            eid = len(self.elements)
            self.elements.append(Element(eid, "var", name))
            self.var_ids[name] = eid
            self.level_of[eid] = set()
        eid = self.var_ids[name]
        self.level_of[eid].add(level)
        return eid

    def clause(self, clause, path: tuple, level: int) -> int:
        cid = self.new("clause", path, level)
        for j, lit in enumerate(clause):
            lp = path + (j,)
            if isinstance(lit, Pos):
                self.oc.add((cid, self.var(lit.var, level)))
            elif isinstance(lit, Neg):
                self.negoc.add((cid, self.var(lit.var, level)))
            elif isinstance(lit, BoxClause):
                bid = self.new("box", lp, level)
                self.oc.add((cid, bid))
                self.oc.add((bid, self.clause(lit.clause, lp + (0,), level - 1)))
            elif isinstance(lit, BoxBottom):
                self.oc.add((cid, self.new("boxbot", lp, level)))
            elif isinstance(lit, DiaCnf):
                did = self.new("dia", lp, level)
                self.oc.add((cid, did))
                for k, inner in enumerate(lit.cnf):
                    self.oc.add((did, self.clause(inner, lp + (k,), level - 1)))
            else:
                raise ValueError(f"literal {lit!r} is not allowed in a normalized CNF")
        return cid


def build_structure(cnf: ModalCnf, mode: str = LEVEL_MODE) -> IncidenceStructure:
    if isinstance(cnf, TrivialUnsat):
        raise ValueError("trivially unsatisfiable input has no structure")
    if mode not in (LEVEL_MODE, PV_MODE):
        raise ValueError(f"unknown mode {mode!r}")
    md = modal_depth(cnf)
    b = _Builder(md)
    tops = tuple(b.clause(c, (i,), md) for i, c in enumerate(cnf))
    kinds = {e.id: e.kind for e in b.elements}

    def of(*ks):
        return frozenset(i for i, k in kinds.items() if k in ks)

    common = dict(
        elements=tuple(b.elements),
        oc=frozenset(b.oc),
        negoc=frozenset(b.negoc),
        cl=of("clause"),
        lt=of("var", "box", "dia", "boxbot"),
        u=of("boxbot"),
        bbox=of("box", "boxbot"),
        ddia=of("dia"),
        mode=mode,
        md=md,
        top_clauses=tops,
    )
    if mode == LEVEL_MODE:
        lv = tuple(
            frozenset(e for e, levels in b.level_of.items() if i in levels) for i in range(md + 1)
        )
        return IncidenceStructure(lv=lv, **common)
    return IncidenceStructure(pv=of("var"), hl=frozenset(kinds) - of("var"), **common)


def structure_to_json(s: IncidenceStructure) -> dict:
    out = {
        "elements": [
            {"id": e.id, "kind": e.kind, **({"name": e.name} if e.kind == "var" else {})}
            for e in s.elements
        ],
        "oc": sorted([a, b] for a, b in s.oc),
        "negoc": sorted([a, b] for a, b in s.negoc),
        "unary": {
            "Cl": sorted(s.cl),
            "Lt": sorted(s.lt),
            "U": sorted(s.u),
            "BBox": sorted(s.bbox),
            "DDia": sorted(s.ddia),
        },
    }
    if s.mode == LEVEL_MODE:
        out["lv"] = [sorted(ids) for ids in s.lv]
    else:
        out["Pv"] = sorted(s.pv)
        out["Hl"] = sorted(s.hl)
    return out


def gaifman_graph(s: IncidenceStructure) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(e.id for e in s.elements)
    g.add_edges_from((a, b) for a, b in s.oc | s.negoc if a != b)
    return g


def primal_graph(cnf: ModalCnf) -> nx.Graph:
    """Variables as vertices, an edge whenever two share a clause."""
    g = nx.Graph()
    for clause in cnf:
        names = []
        for lit in clause:
            if not isinstance(lit, (Pos, Neg)):
                raise ValueError("primal graphs are defined for propositional CNFs only")
            names.append(lit.var)
        g.add_nodes_from(names)
        for i, a in enumerate(names):
            for b in names[i + 1 :]:
                if a != b:
                    g.add_edge(a, b)
    return g


def is_acyclic(s: IncidenceStructure) -> bool:
    g = nx.DiGraph()
    g.add_nodes_from(e.id for e in s.elements)
    g.add_edges_from(s.oc)
    return nx.is_directed_acyclic_graph(g)


def reachable(s: IncidenceStructure, x: int) -> frozenset:
    """Elements reachable from x along one or more oc edges."""
    succ: dict[int, list] = {}
    for a, b in s.oc:
        succ.setdefault(a, []).append(b)
    seen: set = set()
    stack = list(succ.get(x, ()))
    while stack:
        y = stack.pop()
        if y not in seen:
            seen.add(y)
            stack.extend(succ.get(y, ()))
    return frozenset(seen)
