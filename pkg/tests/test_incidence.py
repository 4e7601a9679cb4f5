import pytest
from hypothesis import given

from modaltw import formula as F
from modaltw import incidence as I
from modaltw.corpus import FIG1_TEXT

from strategies import cnfs


@pytest.fixture(scope="module")
def fig1():
    return I.build_structure(F.prepare(FIG1_TEXT))


def test_fig1_relations(fig1, fig1_labels):
    e = fig1_labels["labels"]
    assert (e["e1"], e["e9"]) in fig1.oc
    assert (e["e1"], e["q"]) in fig1.negoc
    assert (e["e4"], e["e10"]) in fig1.oc
    assert (e["e10"], e["e7"]) in fig1.oc
    assert (e["e10"], e["e8"]) in fig1.oc
    assert (e["e9"], e["e5"]) in fig1.oc
    assert e["r"] in fig1.lv[0] and e["r"] in fig1.lv[1]


def test_fig1_labels_match_kinds(fig1, fig1_labels):
    for label, i in fig1_labels["labels"].items():
        el = fig1.elements[i]
        if label.startswith("e"):
            assert el.kind != "var"
        else:
            assert el.kind == "var" and el.name == label


def test_single_variable():
    s = I.build_structure(F.prepare("q"))
    assert [e.kind for e in s.elements] == ["clause", "var"]
    assert s.oc == {(0, 1)}
    assert s.lv[0] == {0, 1}


def test_pv_mode(fig1):
    s = I.build_structure(F.prepare(FIG1_TEXT), I.PV_MODE)
    assert s.lv is None
    assert s.pv == {e.id for e in s.elements if e.kind == "var"}
    assert s.hl == {e.id for e in s.elements if e.kind != "var"}


def test_boxbottom_element():
    s = I.build_structure(F.prepare("[]false & <>q"))
    bb = [e.id for e in s.elements if e.kind == "boxbot"]
    assert len(bb) == 1 and bb[0] in s.u and bb[0] in s.bbox
    assert not any(a == bb[0] for a, _ in s.oc)


def test_gaifman_graph(fig1):
    g = I.gaifman_graph(fig1)
    assert g.number_of_nodes() == fig1.size
    assert {frozenset(e) for e in g.edges} == {frozenset(p) for p in fig1.oc | fig1.negoc}
    g1 = I.gaifman_graph(I.build_structure(F.prepare("q")))
    assert (g1.number_of_nodes(), g1.number_of_edges()) == (2, 1)


def test_primal_graph():
    g = I.primal_graph(F.prepare("(q1 | q2) & (q2 | q3)"))
    assert {frozenset(e) for e in g.edges} == {frozenset({"q1", "q2"}), frozenset({"q2", "q3"})}
    g = I.primal_graph(F.prepare("q"))
    assert list(g.nodes) == ["q"] and g.number_of_edges() == 0
    with pytest.raises(ValueError):
        I.primal_graph(F.prepare("<>q"))


def test_json_shape(fig1):
    data = I.structure_to_json(fig1)
    assert set(data) >= {"elements", "oc", "negoc", "unary", "lv"}
    assert set(data["unary"]) == {"Cl", "Lt", "U", "BBox", "DDia"}
    pv = I.structure_to_json(I.build_structure(F.prepare("q"), I.PV_MODE))
    assert "lv" not in pv and {"Pv", "Hl"} <= set(pv)


def _count_occurrences(cnf):
    clauses = lits = 0
    for clause in cnf:
        clauses += 1
        for lit in clause:
            if isinstance(lit, F.BoxClause):
                lits += 1
                c, l = _count_occurrences((lit.clause,))
                clauses, lits = clauses + c, lits + l
            elif isinstance(lit, F.BoxBottom):
                lits += 1
            elif isinstance(lit, F.DiaCnf):
                lits += 1
                c, l = _count_occurrences(lit.cnf)
                clauses, lits = clauses + c, lits + l
    return clauses, lits


@given(cnfs())
def test_structure_invariants(cnf):
    cnf = F.normalize(cnf)
    if isinstance(cnf, F.TrivialUnsat):
        return
    s = I.build_structure(cnf)
    kinds = {e.id: e.kind for e in s.elements}
    clauses, lits = _count_occurrences(cnf)
    assert s.size == len(F.cnf_variables(cnf)) + clauses + lits
    assert I.is_acyclic(s)
    assert s.cl == {i for i, k in kinds.items() if k == "clause"}
    assert s.lt == {i for i, k in kinds.items() if k != "clause"}
    assert s.u <= s.bbox and not (s.bbox & s.ddia)
    for a, b in s.negoc:
        assert kinds[a] == "clause" and kinds[b] == "var"
    for a, b in s.oc:
        if kinds[a] == "clause":
            assert kinds[b] != "clause"
        else:
            assert kinds[a] in ("box", "dia") and kinds[b] == "clause"
    for i, k in kinds.items():
        outs = [b for a, b in s.oc if a == i]
        if k == "box":
            assert len(outs) == 1
        if k == "dia":
            assert outs
        if k == "boxbot":
            assert not outs
    ann = F.assign_levels(cnf)
    for i, k in kinds.items():
        levels = {l for l, ids in enumerate(s.lv) if i in ids}
        if k == "var":
            assert levels == ann.var_levels[s.elements[i].name]
        else:
            assert len(levels) == 1
