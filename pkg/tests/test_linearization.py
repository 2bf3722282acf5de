import pytest
from hypothesis import given, settings, strategies as st

from lawvere.catalogue import boole_theory, cantor_theory, rings_theory, sets_theory
from lawvere.groups import named_group
from lawvere.linearization import (bounded_homs, detect_trivial_ring, group_ring,
                                   group_ring_multiply, group_ring_theory, leavitt_critical_pairs,
                                   leavitt_normalize, leavitt_normalizer, leavitt_presentation,
                                   linearize, replay_triviality, verify_rank_iso)
from lawvere.ncpoly import NCPoly, parse_ncpoly
from lawvere.terms import App, Var
from lawvere.theory import check_theory_morphism

x1, x2 = Var(1), Var(2)


def w(*letters):
    return NCPoly.word(letters)


def test_presentation_sizes():
    p = leavitt_presentation(2)
    assert (len(p.generators), len(p.relations)) == (4, 5)
    p = leavitt_presentation(3)
    assert (len(p.generators), len(p.relations)) == (6, 10)
    with pytest.raises(ValueError):
        leavitt_presentation(1)


def test_leavitt_rules():
    assert leavitt_normalize(2, w("C1", "R1")) == NCPoly.const(1)
    assert leavitt_normalize(2, w("C1", "R2")) == NCPoly.const(0)
    assert leavitt_normalize(2, w("R2", "C2")) == NCPoly.const(1) - w("R1", "C1")


@pytest.mark.parametrize("a", [2, 3, 5])
def test_rank_iso(a):
    proof = verify_rank_iso(a)
    assert proof.ok
    assert proof.row_times_column == NCPoly.const(1)


@pytest.mark.parametrize("a", [2, 3])
def test_overlaps_resolve(a):
    pairs = leavitt_critical_pairs(a)
    assert pairs and all(ok for *_, ok in pairs)


def test_relations_hold_after_normalizing():
    for a in (2, 3):
        N = leavitt_normalizer(a)
        for lhs, rhs in leavitt_presentation(a).relations:
            assert N(lhs) == N(rhs)


def test_parse_ncpoly():
    assert parse_ncpoly("R1*C1 - 2") == w("R1", "C1") - NCPoly.const(2)


LETTERS = ["R1", "R2", "C1", "C2"]
polys = st.dictionaries(st.lists(st.sampled_from(LETTERS), max_size=5).map(tuple),
                        st.integers(-3, 3), max_size=5).map(NCPoly)


@settings(max_examples=150, deadline=None)
@given(polys, polys)
def test_normalizer_idempotent_and_linear(p, q):
    N = leavitt_normalizer(2)
    assert N(N(p)) == N(p)
    assert N(p + q) == N(p) + N(q)
    assert N(N(p) * N(q)) == N(p * q)


def test_linearization_morphism_valid():
    for T in (sets_theory(), cantor_theory(2), boole_theory()):
        K, L = linearize(T)
        assert check_theory_morphism(L).valid


def test_linearized_cantor_is_leavitt_module():
    K, L = linearize(cantor_theory(2))
    T = K.combined
    mu = App(K.maps[1]["mu"], [x1, x2])
    nu1 = App(K.maps[1]["nu1"], [mu])
    assert T.equal(nu1, x1, 2)
    assert not T.equal(x1, App(K.maps[0]["zero"]), 1)


def test_boole_linearizes_to_zero():
    v = detect_trivial_ring(boole_theory())
    assert v.trivial
    assert v.steps[-1].left == x1 and v.steps[-1].rule == "transitivity"
    assert replay_triviality(boole_theory(), v)


def test_rings_linearize_to_zero():
    v = detect_trivial_ring(rings_theory())
    assert v.trivial and replay_triviality(rings_theory(), v)


def test_sets_not_shown_trivial():
    v = detect_trivial_ring(sets_theory())
    assert not v.trivial
    assert not replay_triviality(sets_theory(), v)


def test_tampered_derivation_rejected():
    v = detect_trivial_ring(boole_theory())
    v.steps[5].rule = "axiom"
    assert not replay_triviality(boole_theory(), v)


def test_group_rings():
    triv = group_ring(named_group("C1"))
    assert len(triv.generators) == 1
    C2 = named_group("C2")
    t = (0, 1)
    assert group_ring_multiply(C2, t, t) == (1, 0)
    T = group_ring_theory(C2)
    for B in (0, 1, 2):
        assert len(bounded_homs(T, 1, 1, B)) == (2 * B + 1) ** 2
