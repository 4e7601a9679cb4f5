import random

import pytest

from modaltw import formula as F
from modaltw import incidence as I
from modaltw import mso as M
from modaltw import mso_reference as ref
from modaltw.corpus import FIG1_TEXT, CorpusSpec, generate

x, y = "x", "y"


def S(text, mode=I.LEVEL_MODE):
    return I.build_structure(F.prepare(text), mode)


def S_cnf(cnf, mode=I.LEVEL_MODE):
    return I.build_structure(F.normalize(cnf), mode)


def test_trivial_sentences():
    assert M.evaluate(S("q"), M.ExistsSO("X", M.ForallFO(x, M.Mem(x, "X"))))
    assert not M.evaluate(S(FIG1_TEXT), M.ForallFO(x, M.R("Oc", x, x)))
    assert M.stats(M.Eq(x, x)).node_count == 1


def test_errors():
    with pytest.raises(M.MsoError):
        M.evaluate(S("q"), M.R("Oc", x, y))
    with pytest.raises(M.MsoError):
        M.evaluate(S("q"), M.ForallFO(x, M.R("Nope", x)))
    with pytest.raises(M.MsoError):
        M.evaluate(S("q"), M.ForallFO(x, M.Rel("Oc", (x, x, x))))


def test_size_guard(monkeypatch):
    big = S(" & ".join(f"(a{i} | b{i})" for i in range(5)))
    three = M.ExistsSO("X", M.ExistsSO("Y", M.ExistsSO("Z", M.ForallFO(x, M.Mem(x, "X")))))
    with pytest.raises(M.SizeGuardError):
        M.evaluate(big, three, size_guard=4)
    monkeypatch.setenv("MODALTW_SIZE_GUARD", "off")
    assert M.size_guard_from_env() is None
    monkeypatch.setenv("MODALTW_SIZE_GUARD", "x")
    with pytest.raises(ValueError):
        M.size_guard_from_env()


def test_reach_on_chain():
    s = S("[]q")  # clause -> box -> clause -> q
    kinds = [e.kind for e in s.elements]
    a = kinds.index("clause")
    reach = I.reachable(s, a)
    f = M.build_reach()
    assert M.evaluate(s, f, {"x": a, "X": set(reach)})
    assert not M.evaluate(s, f, {"x": a, "X": set(list(reach)[:1])})
    leaf = kinds.index("var")
    assert M.evaluate(s, f, {"x": leaf, "X": set()})


def test_reach_matches_traversal_on_corpus():
    f = M.build_reach()
    for _, cnf in generate(CorpusSpec(seed=4, count=20)):
        s = I.build_structure(cnf)
        for e in s.elements:
            assert M.evaluate(s, f, {"x": e.id, "X": set(I.reachable(s, e.id))})


def test_xi_examples():
    assert M.evaluate(S("q"), M.build_xi_sentence(0))
    assert not M.evaluate(S("q & ~q"), M.build_xi_sentence(0))
    assert M.evaluate(S(FIG1_TEXT), M.build_xi_sentence(1))
    assert not M.evaluate(S("[]false & <>q"), M.build_xi_sentence(1))


def test_zeta_examples():
    assert not M.evaluate(S("[]false"), M.build_zeta_sentence(1))
    assert M.evaluate(S("q"), M.build_zeta_sentence(0))
    assert not M.evaluate(S("<>q & []~q"), M.build_zeta_sentence(1))


def test_chi_examples():
    pv = lambda t: S(t, I.PV_MODE)
    assert M.evaluate(pv("[]false"), M.build_chi_family(M.PLAIN))
    assert not M.evaluate(pv("[]false"), M.build_chi_family(M.REFLEXIVE_E))
    assert M.evaluate(pv("<>q & <>~q"), M.build_chi_family(M.PLAIN))
    with pytest.raises(ValueError):
        M.build_chi_family("bogus")


def test_xi_size_affine():
    sizes = [M.stats(M.build_xi_sentence(md)).node_count for md in range(7)]
    steps = {b - a for a, b in zip(sizes, sizes[1:])}
    assert len(steps) == 1


def test_chi_sizes_have_no_depth_parameter():
    assert all(M.stats(M.build_chi_family(v)).node_count > 1 for v in M.CHI_VARIANTS)


def test_dump_is_stable():
    assert M.dump(M.build_xi_sentence(1)) == M.dump(M.build_xi_sentence(1))
    assert M.dump(M.ForallFO(x, M.R("Oc", x, x))) == "all x.Oc(x,x)"


# -- differential check against the substitution evaluator -------------------

UNARY = ("Cl", "Lt", "U", "BBox", "DDia")
BINARY = ("Oc", "NegOc")


def _random_formula(rng, budget, fo, so, so_left):
    """A formula over the bound variables fo/so using at most budget nodes."""
    atoms = []
    if fo:
        atoms += ["unary", "binary", "eq"]
        if so:
            atoms.append("mem")
    choices = list(atoms) if budget <= 2 else atoms + ["not", "and", "or", "implies", "iff", "fo"]
    if budget > 2 and so_left:
        choices += ["so", "so"]
    if not choices:
        choices = ["fo"]
    kind = rng.choice(choices)
    if kind == "unary":
        return M.R(rng.choice(UNARY), rng.choice(fo)), 1
    if kind == "binary":
        return M.R(rng.choice(BINARY), rng.choice(fo), rng.choice(fo)), 1
    if kind == "eq":
        return M.Eq(rng.choice(fo), rng.choice(fo)), 1
    if kind == "mem":
        return M.Mem(rng.choice(fo), rng.choice(so)), 1
    if kind == "not":
        f, n = _random_formula(rng, budget - 1, fo, so, so_left)
        return M.Not(f), n + 1
    if kind in ("and", "or", "implies", "iff"):
        left, n1 = _random_formula(rng, (budget - 1) // 2, fo, so, so_left)
        right, n2 = _random_formula(rng, budget - 1 - n1, fo, so, so_left)
        cls = {"and": M.And, "or": M.Or, "implies": M.Implies, "iff": M.Iff}[kind]
        return cls(left, right), n1 + n2 + 1
    if kind == "fo":
        v = f"x{len(fo)}"
        body, n = _random_formula(rng, budget - 1, fo + [v], so, so_left)
        return rng.choice([M.ExistsFO, M.ForallFO])(v, body), n + 1
    v = f"X{len(so)}"
    body, n = _random_formula(rng, budget - 1, fo, so + [v], so_left - 1)
    return rng.choice([M.ExistsSO, M.ForallSO])(v, body), n + 1


def test_evaluator_matches_reference():
    rng = random.Random(11)
    spec = CorpusSpec(seed=11, count=60, n_vars=2, max_depth=1, max_clauses=2, max_literals=2)
    structures = [I.build_structure(c) for _, c in generate(spec)]
    structures = [s for s in structures if s.size <= 8]
    checked = 0
    while checked < 200:
        s = rng.choice(structures)
        f, n = _random_formula(rng, 12, [], [], 2)
        if n > 12 or M.stats(f).so_quantifier_count > 2:
            continue
        assert not any(M.free_vars(f))
        assert M.evaluate(s, f, size_guard=None) == ref.holds(s, f), M.dump(f)
        checked += 1


def test_sentences_match_reference_on_small_structures():
    for text in ("q", "q & ~q", "<>q", "[]false & <>q", "q | []r"):
        s = S(text)
        f = M.build_xi_sentence(s.md)
        assert M.evaluate(s, f) == ref.holds(s, f)
