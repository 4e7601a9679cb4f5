import pytest
from hypothesis import given, settings

from modaltw import formula as F
from modaltw import kripke as K
from modaltw import solvers as S
from modaltw.corpus import EDGE_CASES, FIG1_TEXT, FIG2_TEXT, CorpusSpec, generate

from strategies import cnfs

P = F.prepare


def test_general_examples():
    assert not S.solve_general(P("q & ~q")).satisfiable
    v = S.solve_general(P(FIG1_TEXT))
    assert v.satisfiable and v.witness.world_count <= 3
    assert not S.solve_general(P("[]false & <>q")).satisfiable
    assert S.solve_general_mso(P("q")).satisfiable


def test_reflexive_examples():
    assert not S.solve_reflexive(P("[]false")).satisfiable
    v = S.solve_reflexive(P("q & []q"))
    assert v.satisfiable and K.frame_check(v.witness, K.REFLEXIVE)
    assert not S.solve_reflexive(P("<>q & []~q")).satisfiable
    assert not S.solve_reflexive_mso(P("<>q & []~q")).satisfiable


def test_euclidean_examples():
    assert S.solve_euclidean(P("[]false")).satisfiable
    assert not S.solve_euclidean(P("[]false"), ("reflexive",)).satisfiable
    v = S.solve_euclidean(P("<>q & <>~q"))
    assert v.satisfiable and v.witness.world_count == 3
    assert K.frame_check(v.witness, K.EUCLIDEAN)


def test_euclid_variant_table():
    assert S.euclid_variant(()) == "plain"
    assert S.euclid_variant(("reflexive",)) == "reflexive"
    assert S.euclid_variant(("reflexive", "transitive")) == "reflexive"
    assert S.euclid_variant(("symmetric",)) == "symmetric"
    assert S.euclid_variant(("transitive",)) == "transitive"
    assert S.euclid_variant(("symmetric", "transitive")) == "symmetric"
    with pytest.raises(ValueError):
        S.euclid_variant(("serial",))


def test_parse_class():
    assert S.parse_class("general") == ("general", ())
    assert S.parse_class("euclid,transitive,reflexive") == ("euclid", ("reflexive", "transitive"))
    with pytest.raises(ValueError):
        S.parse_class("k45")


def test_oracle_labels():
    assert S.solve_oracle(P("q & ~q"), K.GENERAL).satisfiable is False
    assert S.solve_oracle(P("q & ~q"), K.REFLEXIVE).satisfiable is None
    assert S.solve(P("<>q"), "transitive-bounded", "oracle").satisfiable
    with pytest.raises(ValueError):
        S.solve(P("q"), "transitive-bounded", "direct")


def test_edge_cases_consistent():
    cases = [(f"e{i}", P(t)) for i, t in enumerate(EDGE_CASES)]
    cases = [(i, c) for i, c in cases if not isinstance(c, F.TrivialUnsat)]
    report = S.cross_check(cases)
    assert report.ok, report.disagreements


def test_singleton_corpus():
    report = S.cross_check([("q", P("q"))])
    assert report.ok and report.cases == 1 and report.checks == len(S.CLASSES)


def test_figures_all_classes():
    for text in (FIG1_TEXT, FIG2_TEXT):
        for cls in S.CLASSES:
            v = S.engine_verdicts(P(text), cls)
            assert S.consistent(v), (text, cls, v)


def test_minimize_drops_irrelevant_clauses():
    cnf = P("q & r & ~q & s")
    bad = lambda c: ((F.Pos("q"),) in c) and ((F.Neg("q"),) in c)
    assert set(S.minimize(cnf, bad)) == {(F.Pos("q"),), (F.Neg("q"),)}


def test_consistent_rules():
    assert S.consistent({"direct": True, "mso": True, "oracle": None})
    assert not S.consistent({"direct": True, "mso": False})
    assert not S.consistent({"direct": False, "mso": False, "oracle": True})


def _solvers(cnf):
    yield S.solve_general(cnf), K.GENERAL
    yield S.solve_reflexive(cnf), K.REFLEXIVE
    for extras in ((), ("reflexive",), ("symmetric",), ("transitive",)):
        yield S.solve_euclidean(cnf, extras), S.euclid_frame(extras)


@settings(max_examples=50)
@given(cnfs(depth=2, max_clauses=4))
def test_witness_soundness(cnf):
    cnf = F.normalize(cnf)
    if isinstance(cnf, F.TrivialUnsat):
        return
    for verdict, frame in _solvers(cnf):
        if verdict.satisfiable:
            assert verdict.witness is not None
            assert K.model_check(verdict.witness, verdict.witness.root, cnf)
            assert K.frame_check(verdict.witness, frame)


@settings(max_examples=50)
@given(cnfs(depth=2, max_clauses=4))
def test_monotone_sanity(cnf):
    cnf = F.normalize(cnf)
    if isinstance(cnf, F.TrivialUnsat) or len(cnf) < 2:
        return
    full = [v.satisfiable for v, _ in _solvers(cnf)]
    for i in range(len(cnf)):
        smaller = cnf[:i] + cnf[i + 1 :]
        for before, (after, _) in zip(full, _solvers(smaller)):
            if before:
                assert after.satisfiable


def test_small_random_cross_check():
    report = S.cross_check(generate(CorpusSpec(seed=9, count=40)))
    assert report.ok, [d.minimized for d in report.disagreements]
