import random

import pytest
from hypothesis import given, settings, strategies as st

from lawvere.catalogue import (ab_theory, boole_theory, cantor_theory, groups_theory,
                               groups_trs_theory, gsets_theory, sets_theory)
from lawvere.groups import named_group
from lawvere.terms import App, Var
from lawvere.theory import (FMor, TheoryMorphism, check_theory_morphism, compose, coproduct,
                            hom_count, hom_enumerate, identity, initial_morphism, injection,
                            is_iso, random_fmor, symmetry, theory_morphisms_equal,
                            verify_inverse)

x1, x2 = Var(1), Var(2)


def test_identities():
    E = sets_theory()
    assert identity(E, 3).components == (x1, x2, Var(3))
    assert identity(boole_theory(), 0).components == ()
    assert identity(cantor_theory(2), 1).components == (x1,)


def test_composition_in_sets():
    E = sets_theory()
    f = E.fmor([x2], 2)          # T1 -> T2
    g = E.fmor([x1, x1], 1)      # T2 -> T1
    assert compose(g, f).components == (x1,)
    assert compose(identity(E, 2), f) == f


def test_cantor_composite_is_identity():
    C = cantor_theory(2)
    f = C.fmor([App("mu", [x1, x2])], 2)
    g = C.fmor([App("nu1", [x1]), App("nu2", [x1])], 1)
    assert compose(g, f) == identity(C, 1)
    assert compose(f, g) == identity(C, 2)


def test_coproducts_and_symmetry():
    E = sets_theory()
    assert coproduct(identity(E, 1), identity(E, 1)) == identity(E, 2)
    s = symmetry(E, 1, 1)
    assert s.components == (x2, x1)
    assert compose(s, s) == identity(E, 2)
    B = boole_theory()
    inj = injection(B, 1, 1, "left")
    assert (inj.src, inj.dst, inj.components) == (1, 2, (x1,))


def test_arity_mismatch():
    E = sets_theory()
    with pytest.raises(ValueError):
        compose(identity(E, 2), identity(E, 3))


def test_iso_search():
    C = cantor_theory(2)
    f = C.fmor([App("mu", [x1, x2])], 2)
    inv = is_iso(f, size_bound=3)
    assert inv is not None and verify_inverse(f, inv)
    assert inv == C.fmor([App("nu1", [x1]), App("nu2", [x1])], 1)
    E = sets_theory()
    assert is_iso(identity(E, 2)) == identity(E, 2)
    assert is_iso(E.fmor([x1, x1], 1)) is None


def test_hom_counts_in_sets():
    E = sets_theory()
    for m in range(4):
        for n in range(1, 4):
            assert hom_count(E, m, n) == n ** m
    assert len(hom_enumerate(E, 2, 2)) == 4


def test_boole_free_model_sizes():
    B = boole_theory()
    assert hom_count(B, 1, 0) == 2
    assert hom_count(B, 1, 1) == 4
    assert hom_count(B, 1, 2) == 16


def test_theory_morphisms():
    E, G, A, B = sets_theory(), groups_theory(), ab_theory(), boole_theory()
    assert check_theory_morphism(initial_morphism(B, E)).valid
    ident = {"mul": App("add", [x1, x2]), "inv": App("neg", [x1]), "e": App("zero")}
    assert check_theory_morphism(TheoryMorphism(G, A, ident)).valid
    bad = TheoryMorphism(A, B, {"add": App("and", [x1, x2]), "neg": x1, "zero": App("1")})
    verdict = check_theory_morphism(bad)
    assert not verdict.valid
    assert verdict.equation is not None


def test_morphism_equality():
    C2 = gsets_theory(named_group("C2"))
    ops = [op for op, _ in C2.signature.operations]
    L1 = TheoryMorphism(C2, C2, {op: App(op, [x1]) for op in ops})
    Gr = named_group("C2")
    inv = {f"g{a}": App(f"g{Gr.inverse(a)}", [x1]) for a in Gr.elements()}
    L2 = TheoryMorphism(C2, C2, inv)
    assert check_theory_morphism(L2).valid
    assert theory_morphisms_equal(L1, L2)

    G = groups_theory()
    idm = TheoryMorphism(G, G, {"mul": App("mul", [x1, x2]), "inv": App("inv", [x1]),
                                "e": App("e")})
    opp = TheoryMorphism(G, G, {"mul": App("mul", [x2, x1]), "inv": App("inv", [x1]),
                                "e": App("e")})
    assert check_theory_morphism(opp).valid
    assert not theory_morphisms_equal(idm, opp)


def test_missing_operation_image():
    with pytest.raises(ValueError):
        TheoryMorphism(groups_theory(), ab_theory(), {"mul": App("add", [x1, x2])})


def test_group_backends_agree():
    words, trs = groups_theory(), groups_trs_theory()
    rng = random.Random(3)
    for _ in range(100):
        f = random_fmor(words, 2, 2, rng)
        g = random_fmor(words, 2, 2, rng)
        same_words = f == g
        tf = trs.fmor(list(f.components), 2)
        tg = trs.fmor(list(g.components), 2)
        assert same_words == (tf == tg)


THEORIES = [sets_theory, boole_theory, lambda: cantor_theory(2), groups_theory, ab_theory,
            lambda: gsets_theory(named_group("C3"))]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(THEORIES), st.integers(0, 2 ** 31), st.lists(st.integers(1, 3),
                                                                       min_size=4, max_size=4))
def test_category_laws(make, seed, ar):
    T = make()
    rng = random.Random(seed)
    a, b, c, d = ar
    f, g, h = random_fmor(T, a, b, rng), random_fmor(T, b, c, rng), random_fmor(T, c, d, rng)
    assert compose(h, compose(g, f)) == compose(compose(h, g), f)
    assert compose(identity(T, b), f) == f == compose(f, identity(T, a))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(THEORIES), st.integers(0, 2 ** 31))
def test_coproduct_functorial(make, seed):
    T = make()
    rng = random.Random(seed)
    f1, g1 = random_fmor(T, 1, 2, rng), random_fmor(T, 2, 1, rng)
    f2, g2 = random_fmor(T, 2, 1, rng), random_fmor(T, 1, 2, rng)
    lhs = compose(coproduct(g1, g2), coproduct(f1, f2))
    rhs = coproduct(compose(g1, f1), compose(g2, f2))
    assert lhs == rhs
