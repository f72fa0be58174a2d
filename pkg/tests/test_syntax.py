import random

import pytest
from hypothesis import given, strategies as st

from mvlaws.algebra import get_algebra
from mvlaws.generators import random_formula, random_term
from mvlaws.syntax import (Atom, Forall, Op, ParseError, Vocabulary, free_variables, is_fully_modal,
                           parse_formula, parse_modal, parse_term, quantifier_depth, s5_translate, to_text,
                           witness_sentences)

V = Vocabulary.parse("P/1,R/2")


def test_parse_basic():
    f = parse_formula("forall x. (P(x) | not P(x))")
    assert f == Forall("x", Op("or", (Atom("P", ("x",)), Op("not", (Atom("P", ("x",)),)))))
    assert to_text(f) == "forall x. (P(x) | not P(x))"


def test_free_variable_in_sentence_mode():
    with pytest.raises(ParseError, match="free variable x"):
        parse_formula("exists y. R(x,y)", sentence=True)


def test_pow_expands_to_strong_conjunction():
    f = parse_formula("forall x. oplus(pow(P(x),3), not P(x))", algebra=get_algebra("L4"))
    body = f.body
    assert body.name == "oplus"
    assert body.args[0].name == "odot" and body.args[0].args[0].name == "odot"


def test_connective_outside_signature():
    with pytest.raises(ParseError, match="not in the algebra signature"):
        parse_formula("forall x. oplus(P(x), P(x))", algebra=get_algebra("L3[and,or,not]"))


def test_arity_mismatch():
    with pytest.raises(ParseError, match="arity mismatch"):
        parse_formula("R(x)", vocab=V)


def test_unknown_connective():
    with pytest.raises(ParseError, match="unknown connective 'foo'"):
        parse_formula("foo(P(x))")


def test_error_position():
    with pytest.raises(ParseError) as exc:
        parse_formula("forall x. (P(x)")
    assert exc.value.pos == 15


@pytest.mark.parametrize("text,expected", [
    ("R(x,y)", ("x", "y")),
    ("forall x. R(x,y)", ("y",)),
    ("forall x. exists y. R(x,y)", ()),
])
def test_free_variables(text, expected):
    assert free_variables(parse_formula(text)) == expected


def test_s5_translation():
    box = parse_modal("box (p | not p)")
    assert is_fully_modal(box)
    assert to_text(s5_translate(box)) == "forall w. (P(w) | not P(w))"
    assert to_text(s5_translate(parse_modal("dia p"))) == "exists w. P(w)"
    bare = parse_modal("p")
    assert not is_fully_modal(bare)
    assert free_variables(s5_translate(bare)) == ("w",)


def test_witness_sentences():
    u, e = witness_sentences(parse_term("v"))
    assert (to_text(u), to_text(e)) == ("forall x1. R(x1)", "exists x1. R(x1)")
    u, e = witness_sentences(parse_term("v | not v"))
    assert to_text(u) == "forall x1. (R(x1) | not R(x1))"
    u, _ = witness_sentences(parse_term("v1 & v2"))
    assert quantifier_depth(u) == 2


def test_special_forms_round_trip():
    for text in ["#1/2", "forall x. x ~ x", "forall x. ge(P(x), 1/2)", "forall x. P^1/2(x)"]:
        f = parse_formula(text)
        assert parse_formula(to_text(f)) == f


@given(st.integers(0, 10**9))
def test_round_trip_random_formulas(seed):
    rng = random.Random(seed)
    conn = get_algebra("L4").signature
    f = random_formula(rng, 4, V, conn, scope=("x",), constants=("0", "1/3"), identity=True)
    assert parse_formula(to_text(f)) == f


def test_round_trip_thousand_formulas():
    rng = random.Random(7)
    conn = get_algebra("L4").signature
    for _ in range(1000):
        f = random_formula(rng, 5, V, conn, scope=("x", "y"), identity=True)
        assert parse_formula(to_text(f), vocab=Vocabulary(V.relations, True)) == f


@given(st.integers(0, 10**9))
def test_term_round_trip(seed):
    t = random_term(random.Random(seed), 4, ("v1", "v2"), get_algebra("L3").signature)
    assert parse_term(to_text(t)) == t


def test_vocabulary_parse():
    assert V.max_arity == 2
    assert V.arity("R") == 2
