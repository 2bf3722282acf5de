import itertools
import random

import pytest

from lawvere.catalogue import (ab_theory, boole_theory, cantor_theory, groups_theory,
                               gsets_theory, sets_theory)
from lawvere.groups import direct_product, named_group
from lawvere.kronecker import (BilinearWitness, bilinear_on_morphisms, check_bilinear_axioms,
                               is_commutative_theory, iterated_pairings, kronecker,
                               kronecker_many, times_left, times_right, triple_orders)
from lawvere.models import count_models
from lawvere.terms import Var
from lawvere.theory import identity, random_fmor

x = [None] + [Var(i) for i in range(1, 10)]


def test_unit_adds_nothing():
    for T in (boole_theory(), groups_theory(), cantor_theory(2)):
        K = kronecker(sets_theory(), T)
        assert len(K.combined.signature) == len(T.signature)
        assert len(K.combined.presentation.equations) == len(T.presentation.equations)
        assert all(v.valid for v in K.check_embeddings())


def test_commutation_equations_added():
    K = kronecker(boole_theory(), gsets_theory(named_group("C2")))
    S, T = K.factors
    expected = len(S.presentation.equations) + len(T.presentation.equations) + \
        len(S.signature) * len(T.signature)
    assert len(K.combined.presentation.equations) == expected
    assert all(v.valid for v in K.check_embeddings())


def test_times_left_and_right():
    E = sets_theory()
    f = E.fmor([x[1], x[1]], 1)
    assert times_left(1, f) == f
    assert times_left(2, identity(E, 1)) == identity(E, 2)
    assert times_left(2, f).components == (x[1], x[1], x[2], x[2])
    assert times_right(f, 2).components == (x[1], x[2], x[1], x[2])


def set_map(f):
    return [c.index - 1 for c in f.components]


def test_pairing_is_product_of_set_maps():
    E = sets_theory()
    K = kronecker(E, E)
    W = BilinearWitness(K)
    rng = random.Random(1)
    for _ in range(30):
        m, m2, n, n2 = (rng.randint(1, 3) for _ in range(4))
        f, g = random_fmor(E, m, m2, rng), random_fmor(E, n, n2, rng)
        P = bilinear_on_morphisms(W, f, g)
        phi, psi = set_map(f), set_map(g)
        want = [phi[i] * n2 + psi[j] for i in range(m) for j in range(n)]
        assert set_map(P) == want


def test_bilinear_axioms_small():
    rep = check_bilinear_axioms(BilinearWitness(kronecker(sets_theory(), sets_theory())), 30, 3)
    assert rep.ok and rep.pairs_checked == 30
    K = kronecker(boole_theory(), gsets_theory(named_group("C2")))
    assert check_bilinear_axioms(BilinearWitness(K), 20, 2, seed=4).ok


def test_triple_orders_agree():
    K = kronecker_many([sets_theory(), boole_theory(), gsets_theory(named_group("C2"))])
    rng = random.Random(7)
    for _ in range(5):
        fs = [random_fmor(T, rng.randint(1, 2), rng.randint(1, 2), rng) for T in K.factors]
        orders = list(triple_orders(K, *fs).values())
        assert all(o == orders[0] for o in orders)
        left, right = iterated_pairings(K, *fs)
        assert left == right == orders[0]


def brute_force_actions(G, k):
    """Count maps G x k -> k satisfying the action axioms, one generator at a time."""
    gens = G.generators()
    count = 0
    for images in itertools.product(itertools.permutations(range(k)), repeat=len(gens)):
        act = {G.identity: tuple(range(k))}
        todo = [G.identity]
        consistent = True
        while todo and consistent:
            a = todo.pop()
            for g, p in zip(gens, images):
                b = G.mul[g][a]
                img = tuple(p[act[a][i]] for i in range(k))
                if b not in act:
                    act[b] = img
                    todo.append(b)
                elif act[b] != img:
                    consistent = False
        if consistent and all(act[G.mul[a][b]] == tuple(act[a][act[b][i]] for i in range(k))
                              for a in G.elements() for b in G.elements()):
            count += 1
    return count


@pytest.mark.parametrize("g,h", [("C2", "C2"), ("C2", "C3")])
def test_gsets_product_counts(g, h):
    G, H = named_group(g), named_group(h)
    K = kronecker(gsets_theory(G), gsets_theory(H))
    for k in (1, 2, 3):
        assert count_models(K.combined, k) == brute_force_actions(direct_product(G, H), k)


def test_commutativity_verdicts():
    assert is_commutative_theory(sets_theory()).verdict == "commutative"
    assert is_commutative_theory(ab_theory()).verdict == "commutative"
    v = is_commutative_theory(groups_theory())
    assert v.verdict == "non-commutative"
    assert v.witness["kind"] == "finite-model" and v.witness["size"] <= 6
    v = is_commutative_theory(boole_theory())
    assert v.verdict == "non-commutative" and v.witness["size"] <= 6
