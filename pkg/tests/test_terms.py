import pytest
from hypothesis import given, strategies as st

from lawvere.catalogue import boole_presentation
from lawvere.dsl import ParseError, format_presentation, parse_presentation, parse_term
from lawvere.terms import (App, Signature, TermError, Var, substitute, term_depth, term_size,
                           var_set)

x1, x2, x3 = Var(1), Var(2), Var(3)


def and_(a, b):
    return App("and", [a, b])


def not_(a):
    return App("not", [a])


def test_substitute_examples():
    t = App("f", [x1, x2])
    assert substitute(x1, [t]) == t
    assert substitute(and_(x1, x2), [x2, x1]) == and_(x2, x1)
    assert substitute(not_(x1), [and_(x1, x2)]) == not_(and_(x1, x2))


def test_substitute_out_of_range():
    with pytest.raises((TermError, IndexError)):
        substitute(x3, [x1])


def test_size_and_depth():
    assert (term_size(x1), term_depth(x1)) == (1, 0)
    t = and_(x1, not_(x2))
    assert (term_size(t), term_depth(t)) == (4, 2)
    assert (term_size(App("0")), term_depth(App("0"))) == (1, 1)


def test_terms_are_immutable_and_hashable():
    t = and_(x1, x2)
    with pytest.raises(AttributeError):
        t.op = "or"
    assert len({t, and_(x1, x2), and_(x2, x1)}) == 2


def test_signature_rejects_duplicates():
    with pytest.raises(TermError):
        Signature((("f", 1), ("f", 2)))


def test_parse_empty_theory():
    p = parse_presentation("theory E; end")
    assert p.name == "E"
    assert len(p.signature) == 0 and p.equations == ()


BOOLE_SRC = format_presentation(boole_presentation())


def test_parse_boole():
    p = parse_presentation(BOOLE_SRC)
    assert len(p.signature) == 5
    assert len(p.equations) == 10
    assert p == boole_presentation()


def test_round_trip():
    p = parse_presentation(BOOLE_SRC)
    assert parse_presentation(format_presentation(p)) == p


def test_arity_mismatch_is_reported_with_position():
    src = "theory B;\nop and/2;\neq 1: and(x1) = x1;\nend"
    with pytest.raises(ParseError) as err:
        parse_presentation(src)
    assert "arity" in err.value.message
    assert err.value.line == 3


def test_duplicate_operation():
    with pytest.raises(ParseError):
        parse_presentation("theory B; op f/1; op f/2; end")


def test_variable_outside_context():
    with pytest.raises(ParseError):
        parse_presentation("theory B; op f/1; eq 1: f(x2) = x1; end")


def test_comments_and_constants():
    p = parse_presentation("# header\ntheory P; op e/0; op m/2;\n"
                           "eq 1: m(e(), x1) = x1; # unit\nend\n")
    assert p.equations[0].left == App("m", [App("e"), x1])


def test_parse_term():
    sig = boole_presentation().signature
    assert parse_term("and(x1,not(x2))", sig, 2) == and_(x1, not_(x2))
    with pytest.raises(ParseError):
        parse_term("and(x1,x2) x1", sig, 2)


# -- properties ------------------------------------------------------------

OPS = {"f": 2, "g": 1, "c": 0}


def terms(n):
    leaves = st.sampled_from([Var(i) for i in range(1, n + 1)] + [App("c")])
    return st.recursive(
        leaves,
        lambda kids: st.one_of(st.builds(lambda a, b: App("f", [a, b]), kids, kids),
                               st.builds(lambda a: App("g", [a]), kids)),
        max_leaves=12)


@given(terms(3))
def test_identity_substitution(t):
    assert substitute(t, [x1, x2, x3]) == t


@given(terms(3), st.lists(terms(2), min_size=3, max_size=3), st.lists(terms(2), min_size=2,
                                                                         max_size=2))
def test_substitution_associative(t, e1, e2):
    lhs = substitute(substitute(t, e1), e2)
    rhs = substitute(t, [substitute(s, e2) for s in e1])
    assert lhs == rhs


@given(terms(3))
def test_variables_stay_in_context(t):
    assert var_set(t) <= {1, 2, 3}
    assert term_size(t) >= term_depth(t)
