import pytest
from hypothesis import given, settings

from modaltw import formula as F
from modaltw import kripke as K
from modaltw.corpus import FIG1_TEXT

from strategies import cnfs, formulas

q, r, s = F.Var("q"), F.Var("r"), F.Var("s")


def test_parse_fig1_first_conjunct():
    assert F.parse_formula("~q | [] (r | ~s)") == F.Or(F.Not(q), F.Box(F.Or(r, F.Not(s))))


def test_parse_constants():
    assert F.parse_formula("false") == F.Bottom()
    assert F.parse_formula("<> false") == F.Dia(F.Bottom())


def test_precedence_and_associativity():
    assert F.parse_formula("q | r & s") == F.Or(q, F.And(r, s))
    assert F.parse_formula("q & r & s") == F.And(F.And(q, r), s)
    assert F.parse_formula("~[]q") == F.Not(F.Box(q))


@pytest.mark.parametrize("text", ["q |", "(q", "q $ r", "[q", ""])
def test_syntax_errors(text):
    with pytest.raises(F.FormulaSyntaxError):
        F.parse_formula(text)


def test_syntax_error_position():
    with pytest.raises(F.FormulaSyntaxError) as info:
        F.parse_formula("q &\n  r $")
    assert (info.value.line, info.value.column) == (2, 5)


def test_modal_depth():
    assert F.modal_depth(F.parse_formula(FIG1_TEXT)) == 1
    assert F.modal_depth(q) == 0
    assert F.modal_depth(F.Box(F.Box(q))) == 2


def test_to_cnf_examples():
    assert F.to_cnf(F.Not(F.Or(q, r))) == ((F.Neg("q"),), (F.Neg("r"),))
    assert F.to_cnf(F.Dia(q)) == ((F.DiaCnf(((F.Pos("q"),),)),),)


def test_to_cnf_size_cap():
    big = F.parse_formula(" & ".join(f"(a{i} | b{i})" for i in range(12)))
    blow = F.Or(big, big)
    with pytest.raises(F.CnfSizeError):
        F.to_cnf(F.Or(blow, blow), cap=1000)


def test_normalize_examples():
    assert F.normalize(((F.Pos("q"), F.BotLit()),)) == ((F.Pos("q"),),)
    dia_bot = F.DiaCnf(((F.BotLit(),),))
    assert F.normalize(((F.Pos("q"), dia_bot),)) == ((F.Pos("q"),),)
    assert isinstance(F.normalize(((F.BotLit(),),)), F.TrivialUnsat)
    assert F.normalize(((F.BoxClause((F.BotLit(),)),),)) == ((F.BoxBottom(),),)


def test_levels_fig1():
    cnf = F.prepare(FIG1_TEXT)
    ann = F.assign_levels(cnf)
    assert len([p for p in ann.clauses_at(1) if len(p) == 1]) == 4
    assert ann.var_levels["r"] == {0, 1}


def test_levels_propositional():
    ann = F.assign_levels(F.prepare("(q | r) & ~s"))
    assert set(ann.clause_levels.values()) == {0}
    assert set(ann.literal_levels.values()) == {0}


@given(formulas())
def test_render_parse_fixed_point(f):
    text = F.render(f)
    again = F.render(F.parse_formula(text))
    assert again == text
    assert F.render(F.parse_formula(again)) == again


@given(formulas())
def test_cnf_preserves_depth(f):
    assert F.modal_depth(F.to_cnf(f)) == F.modal_depth(f)


@given(cnfs())
def test_normalize_idempotent(cnf):
    once = F.normalize(cnf)
    if not isinstance(once, F.TrivialUnsat):
        assert F.normalize(once) == once


@given(cnfs())
def test_normalized_invariants(cnf):
    norm = F.normalize(cnf)
    if isinstance(norm, F.TrivialUnsat):
        return
    for lit in F.iter_literals(norm):
        assert not isinstance(lit, F.BotLit)
        if isinstance(lit, F.DiaCnf):
            assert lit.cnf


@settings(max_examples=40)
@given(formulas(max_leaves=6))
def test_cnf_equisatisfiable_by_oracle(f):
    cnf = F.to_cnf(f)
    a = isinstance(K.bounded_sat(f, K.GENERAL, 3), K.Sat)
    b = isinstance(K.bounded_sat(cnf, K.GENERAL, 3), K.Sat)
    assert a == b


def test_cnf_json_round_trip():
    cnf = F.prepare(FIG1_TEXT)
    assert F.cnf_from_json(F.cnf_to_json(cnf)) == cnf
    assert F.cnf_to_json(((F.BoxBottom(),),)) == [[{"boxbot": True}]]
