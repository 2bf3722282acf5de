import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lawvere.catalogue import (boole_theory, cantor_theory, groups_theory, gsets_theory,
                               sets_theory)
from lawvere.groups import named_group
from lawvere.models import (FiniteModel, abelian_group_objects, check_model, count_homs_bruteforce,
                            count_models, enumerate_models, free_model, hom_models,
                            models_up_to_iso, product_model, terminal_model)

BOOL2 = {"0": 0, "1": 1, "and": [[0, 0], [0, 1]], "or": [[0, 1], [1, 1]], "not": [1, 0]}


def boole2():
    return FiniteModel(boole_theory(), 2, BOOL2)


def test_two_element_boolean_algebra():
    assert check_model(boole_theory(), BOOL2, 2).valid


def test_broken_tables_report_equation():
    bad = dict(BOOL2, **{"not": [0, 1]})
    v = check_model(boole_theory(), bad, 2)
    assert not v.valid
    assert "violated" in v.to_json()
    with pytest.raises(ValueError):
        FiniteModel(boole_theory(), 2, bad)


def test_no_boolean_algebra_of_size_three():
    assert count_models(boole_theory(), 3) == 0


def test_terminal_model_always_valid():
    for T in (sets_theory(), boole_theory(), cantor_theory(2), groups_theory()):
        assert terminal_model(T).size == 1


def test_counts():
    assert count_models(gsets_theory(named_group("C2")), 2) == 2
    # labelled Boolean algebras on 4 points: 4! / |Aut(2^2)|
    assert count_models(boole_theory(), 4) == 24 // 2
    assert count_models(cantor_theory(2), 1) == 1
    assert count_models(cantor_theory(2), 2) == 0
    # labelled groups of order 4: Z4 gives 4!/2, the Klein group 4!/6
    assert count_models(groups_theory(), 4) == 12 + 4


def test_iso_classes():
    assert len(models_up_to_iso(enumerate_models(groups_theory(), 4))) == 2
    assert len(models_up_to_iso(enumerate_models(boole_theory(), 4))) == 1


def test_homs_between_points_and_orbits():
    T = gsets_theory(named_group("C2"))
    pt = terminal_model(T)
    assert len(hom_models(pt, pt)) == 1
    regular = FiniteModel(T, 2, {"g0": [0, 1], "g1": [1, 0]})
    assert len(hom_models(regular, pt)) == 1
    assert len(hom_models(pt, regular)) == 0


def test_products():
    B = boole_theory()
    M = boole2()
    MM = product_model(M, M)
    assert MM.size == 4 and check_model(B, MM.tables, 4).valid
    assert len(models_up_to_iso([MM] + enumerate_models(B, 4))) == 1
    P = product_model(M, terminal_model(B))
    assert len(models_up_to_iso([P, M])) == 1


def test_product_against_bruteforce():
    T = gsets_theory(named_group("C2"))
    two = FiniteModel(T, 2, {"g0": [0, 1], "g1": [1, 0]})
    three = FiniteModel(T, 3, {"g0": [0, 1, 2], "g1": [1, 0, 2]})
    P = product_model(two, three)
    for a, b in itertools.product(range(2), range(3)):
        for op in ("g0", "g1"):
            want = two.op(op, a) * 3 + three.op(op, b)
            assert P.op(op, a * 3 + b) == want


def test_hom_enumeration_matches_bruteforce():
    for T, k in ((boole_theory(), 4), (gsets_theory(named_group("C2")), 3)):
        models = enumerate_models(T, k)
        for M in models[:3]:
            for N in models[:3]:
                assert len(hom_models(M, N)) == count_homs_bruteforce(M, N)


def test_freeness():
    for T in (boole_theory(), gsets_theory(named_group("C2"))):
        for r in (1, 2):
            F, gens = free_model(T, r)
            for k in (1, 2, 4):
                for M in enumerate_models(T, k)[:4]:
                    assert len(hom_models(F, M)) == M.size ** r


def test_abelian_objects():
    assert len(abelian_group_objects(boole_theory(), 1)) == 1
    assert abelian_group_objects(boole_theory(), 2) == []
    assert abelian_group_objects(boole_theory(), 4) == []
    # in sets: the abelian group tables on 3 labelled points (Z3 with any zero): 3!/2
    assert len(abelian_group_objects(sets_theory(), 3)) == 3
    found = abelian_group_objects(groups_theory(), 4)
    assert len(found) == 16
    for w in found:
        mul = w.base.tables["mul"]
        assert np.array_equal(mul, mul.T)
        assert np.array_equal(w.add, mul)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_normal_forms_sound_in_models(seed):
    import random
    from lawvere.theory import random_term
    T = cantor_theory(2)
    rng = random.Random(seed)
    t = random_term(T, 2, rng, max_depth=4)
    nf = T.normalize(t, 2)
    M = terminal_model(T)
    assert np.array_equal(M.evaluate(t, 2), M.evaluate(nf, 2))
    for B in enumerate_models(boole_theory(), 4):
        tt = random_term(boole_theory(), 2, rng)
        assert np.array_equal(B.evaluate(tt, 2), B.evaluate(boole_theory().normalize(tt, 2), 2))
