import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modaltw import decomposition as D
from modaltw import formula as F
from modaltw import incidence as I
from modaltw import reductions as R
from modaltw.corpus import FIG1_TEXT


def small_graphs(max_n=8):
    return st.integers(1, max_n).flatmap(
        lambda n: st.sets(
            st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] < e[1]),
            max_size=n * (n - 1) // 2,
        ).map(lambda edges, n=n: _graph(n, edges))
    )


def _graph(n, edges):
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(edges)
    return g


P3 = nx.path_graph(["a", "b", "c"])


def test_validate_path_graph():
    rep = D.validate(P3, D.PathDecomposition(({"a", "b"}, {"b", "c"})))
    assert rep.valid and rep.width == 1
    bad = D.validate(P3, D.PathDecomposition(({"a", "b"}, {"c"})))
    assert not bad.valid and bad.uncovered_edges == [("b", "c")]


def test_validate_reports_each_condition():
    rep = D.validate(P3, D.PathDecomposition(({"a", "b"}, {"c"}, {"b", "c"}, {"a"})))
    assert not rep.valid
    assert rep.disconnected_elements == ["a", "b"]
    missing = D.validate(P3, D.PathDecomposition(({"a", "b"},)))
    assert missing.uncovered_elements == ["c"]
    with pytest.raises(IndexError):
        D.validate(P3, D.TreeDecomposition(({"a", "b", "c"},), {(0, 3)}))
    cyc = D.validate(P3, D.TreeDecomposition(({"a", "b", "c"},) * 3, {(0, 1), (1, 2), (0, 2)}))
    assert cyc.tree_problems


def test_width():
    assert D.width(D.PathDecomposition(({"a", "b", "c"},))) == 2
    assert D.width(D.PathDecomposition(({"a"}, {"a", "b"}))) == 1
    with pytest.raises(ValueError):
        D.width(D.PathDecomposition(()))


def test_fig1_minfill_valid():
    s = I.build_structure(F.prepare(FIG1_TEXT))
    td = D.minfill_heuristic(I.gaifman_graph(s))
    rep = D.validate(s, td)
    assert rep.valid and rep.width >= 1 and rep.width == D.width(td)


def test_minfill_examples():
    assert D.width(D.minfill_heuristic(nx.balanced_tree(2, 3))) == 1
    for k in range(2, 7):
        assert D.width(D.minfill_heuristic(nx.complete_graph(k))) == k - 1


def test_exact_small_examples():
    assert D.width(D.exact_small(nx.cycle_graph(4))) == 2
    assert D.width(D.exact_small(nx.path_graph(5))) == 1
    with pytest.raises(ValueError):
        D.exact_small(nx.path_graph(13))


def test_petersen_subgraphs():
    pet = nx.petersen_graph()
    rng = random.Random(7)
    for _ in range(4):
        nodes = rng.sample(sorted(pet.nodes), 8)
        g = nx.convert_node_labels_to_integers(pet.subgraph(nodes).copy())
        td = D.exact_small(g)
        assert D.validate(g, td).valid
        assert D.width(td) == D.treewidth_bruteforce(g)


@settings(max_examples=40)
@given(small_graphs(7))
def test_exact_vs_heuristic_vs_brute(g):
    exact = D.exact_small(g)
    heur = D.minfill_heuristic(g)
    assert D.validate(g, exact).valid and D.validate(g, heur).valid
    assert D.width(exact) <= D.width(heur)
    assert D.width(exact) == D.treewidth_bruteforce(g)


@settings(max_examples=30)
@given(small_graphs(6))
def test_exact_pathwidth(g):
    pd = D.exact_path_decomposition(g)
    assert D.validate(g, pd).valid
    assert D.width(pd) == D.pathwidth_bruteforce(g)


@settings(max_examples=60)
@given(small_graphs(6), st.randoms(use_true_random=False))
def test_enforce_continuity_property(g, rng):
    order = list(g.nodes)
    rng.shuffle(order)
    bags = list(D.path_decomposition_from_order(g, order).bags)
    # pad with redundant subset bags
    for _ in range(3):
        i = rng.randrange(len(bags))
        shared = bags[i] & bags[i + 1] if i + 1 < len(bags) else frozenset()
        sub = shared | frozenset(x for x in bags[i] if rng.random() < 0.5)
        bags.insert(i + 1, sub)
    pd = D.PathDecomposition(tuple(bags))
    assert D.validate(g, pd).valid
    intro = D.first_introduction_order(pd)
    out = D.enforce_continuity(pd, intro)
    assert D.validate(g, out).valid
    assert D.width(out) <= D.width(pd)
    assert D.is_continuous(out, intro)
    assert D.first_introduction_order(out) == intro


def test_enforce_continuity_examples():
    pd = D.PathDecomposition(({"a", "b"}, {"b", "c"}))
    assert D.enforce_continuity(pd, ["a", "b", "c"]) == pd
    gap = D.PathDecomposition(({"a", "b"}, {"a"}, set(), {"c"}))
    assert D.enforce_continuity(gap, ["a", "b", "c"]).bags == (frozenset("ab"), frozenset("c"))
    with pytest.raises(ValueError):
        D.enforce_continuity(pd, ["c", "b", "a"])


def _pwsat(clauses, parts, tg):
    names = sorted({abs(x) for c in clauses for x in c} | set(range(1, len(parts) + 1)))
    variables = tuple(f"q{i}" for i in names)
    cnf = tuple(tuple(F.Pos(f"q{x}") if x > 0 else F.Neg(f"q{-x}") for x in c) for c in clauses)
    return R.PwSatInstance(cnf, variables, tuple(parts), max(parts), tuple(tg))


def _layout(inst):
    pd = D.exact_path_decomposition(R.pwsat_primal_graph(inst))
    order = D.first_introduction_order(pd, inst.variable_key)
    pd = D.enforce_continuity(pd, order, inst.variable_key)
    phi = R.pwsat_to_modal(inst, pd)
    return pd, phi, D.build_phiF_path_decomposition(pd, inst, phi)


def test_phiF_layout_pw2_k2():
    inst = _pwsat([(1, 2), (-1, 3)], [1, 2, 2], [1, 1])
    pd, phi, lay = _layout(inst)
    assert lay.pw == 2 and lay.k == 2 and lay.bound == 17
    s = I.build_structure(phi.cnf)
    rep = D.validate(s, lay.decomposition)
    assert rep.valid and rep.width <= 17


def test_phiF_layout_single_variable():
    inst = _pwsat([(1,)], [1], [1])
    _, phi, lay = _layout(inst)
    rep = D.validate(I.build_structure(phi.cnf), lay.decomposition)
    assert rep.valid and rep.width <= 4 * 1 + 2 + 5


def test_phiF_layout_depth_counters_with_q():
    inst = _pwsat([(1, 2), (2, 3)], [1, 1, 1], [2])
    _, phi, lay = _layout(inst)
    for i, q in enumerate(phi.var_order, start=1):
        want = {q, phi.names.depth(i - 1), phi.names.depth(i), phi.names.depth(i + 1)}
        assert any(want <= b for b in lay.base_bags)


def test_phiF_layout_rejects_discontinuous():
    inst = _pwsat([(1,), (2,)], [1, 1], [1])
    good = D.PathDecomposition(({"q1"}, {"q2"}))
    phi = R.pwsat_to_modal(inst, good)
    bad = D.PathDecomposition(({"q1"}, set(), {"q2"}))
    with pytest.raises(ValueError):
        D.build_phiF_path_decomposition(bad, inst, phi)


def test_json_round_trip():
    td = D.TreeDecomposition(({0, 1}, {1, 2}), {(0, 1)})
    assert D.decomposition_from_json(D.decomposition_to_json(td)) == td
    pd = D.PathDecomposition(({0, 1}, {1, 2}))
    data = D.decomposition_to_json(pd)
    assert "treeEdges" not in data and D.decomposition_from_json(data) == pd
