import itertools

import pytest
from hypothesis import given, settings

from modaltw import formula as F
from modaltw import kripke as K
from modaltw import solvers as S
from modaltw.corpus import FIG1_TEXT, CorpusSpec, generate

from strategies import cnfs

BOXBOT = F.prepare("[]false")


def classes():
    for bits in itertools.product([False, True], repeat=4):
        yield K.FrameClass(*bits)


def test_model_check_box_bottom():
    assert K.model_check(K.KripkeModel(1, frozenset()), 0, BOXBOT)
    assert not K.model_check(K.KripkeModel(1, frozenset({(0, 0)})), 0, BOXBOT)


def test_model_check_unknown_variable_is_false():
    m = K.KripkeModel(1, frozenset())
    assert not K.model_check(m, 0, F.prepare("zz"))
    assert K.model_check(m, 0, F.parse_formula("~zz"))


def test_frame_check_examples():
    full = K.KripkeModel(3, frozenset(itertools.product(range(3), repeat=2)))
    assert K.frame_check(full, K.FrameClass(True, True, True, True))
    empty = K.KripkeModel(3, frozenset())
    assert K.frame_check(empty, K.FrameClass(False, True, True, True))
    assert not K.frame_check(empty, K.REFLEXIVE)
    chain = K.KripkeModel(3, frozenset({(0, 1), (1, 2), (0, 2)}))
    assert K.frame_check(chain, K.TRANSITIVE)
    assert not K.frame_check(chain, K.EUCLIDEAN)


def test_bounded_sat_examples():
    got = K.bounded_sat(F.prepare("q"), K.GENERAL, 1)
    assert isinstance(got, K.Sat)
    for c in classes():
        assert K.bounded_sat(F.prepare("q & ~q"), c, 3) == K.NoModelUpTo(3)
    fig1 = F.prepare(FIG1_TEXT)
    bound = K.sufficient_bound_general(fig1)
    assert isinstance(K.bounded_sat(fig1, K.GENERAL, bound), K.Sat)
    assert S.solve_general(fig1).satisfiable


def test_bounded_sat_rejects_zero_worlds():
    with pytest.raises(ValueError):
        K.bounded_sat(F.prepare("q"), K.GENERAL, 0)


def test_budget_exhausted_is_distinct():
    with pytest.raises(K.BudgetExhausted):
        K.bounded_sat(F.prepare("q & ~q"), K.GENERAL, 3, time_budget=-1, method="enumerate")
    # a budget that is never hit still yields a verdict
    assert K.bounded_sat(F.prepare("q & ~q"), K.GENERAL, 3, time_budget=60) == K.NoModelUpTo(3)


def test_sufficient_bound_examples():
    assert K.sufficient_bound_general(F.prepare("q | r")) == 1
    assert K.sufficient_bound_general(F.prepare("<>q")) == 2
    assert K.sufficient_bound_general(F.prepare(FIG1_TEXT)) == 3


def test_sat_encoding_matches_enumeration():
    cases = generate(CorpusSpec(seed=21, count=40, n_vars=2, max_depth=2, max_clauses=2))
    for _, cnf in cases:
        for c in classes():
            for n in (1, 2, 3):
                a = K.bounded_sat(cnf, c, n)
                b = K.bounded_sat(cnf, c, n, method="enumerate")
                assert isinstance(a, K.Sat) == isinstance(b, K.Sat), (F.render_cnf(cnf), c, n)


@settings(max_examples=40)
@given(cnfs(depth=2, max_clauses=3))
def test_sat_witnesses_are_checked(cnf):
    cnf = F.normalize(cnf)
    if isinstance(cnf, F.TrivialUnsat):
        return
    for c in (K.GENERAL, K.REFLEXIVE, K.TRANSITIVE, K.EUCLIDEAN):
        got = K.bounded_sat(cnf, c, 3)
        if isinstance(got, K.Sat):
            assert K.model_check(got.model, got.world, cnf)
            assert K.frame_check(got.model, c)


def test_euclid_witness_constructions():
    cnf = F.prepare("<>q")
    a = S.euclid_assignment(cnf)
    m = K.build_euclid_witness(a)
    assert m.world_count == 2 and K.model_check(m, 0, cnf)
    assert K.frame_check(m, K.EUCLIDEAN)
    total = K.build_euclid_witness(K.EuclidAssignment(frozenset({"q"}), ((frozenset(),),), "cluster"))
    assert total.rel == frozenset(itertools.product(range(2), repeat=2))
    single = K.build_euclid_witness(K.EuclidAssignment(frozenset(), (), "none"))
    assert single.world_count == 1 and K.frame_check(single, K.EUCLIDEAN)
    with pytest.raises(ValueError):
        K.build_euclid_witness(K.EuclidAssignment(frozenset(), (), "sideways"))


def test_model_json_round_trip():
    m = K.KripkeModel(2, frozenset({(0, 1)}), {"q": frozenset({1})})
    assert K.model_from_json(K.model_to_json(m)) == m


def test_restrict_to_reachable():
    m = K.KripkeModel(3, frozenset({(0, 2)}), {"q": frozenset({1, 2})})
    r = m.restrict_to_reachable()
    assert r.world_count == 2 and r.val["q"] == {1}
