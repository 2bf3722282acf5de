import pytest

from lawvere.catalogue import (ab_theory, boole_theory, cantor_theory, groups_theory,
                               gsets_theory, modr_theory, sets_theory, user_theory)
from lawvere.dsl import parse_presentation
from lawvere.groups import named_group
from lawvere.kzero import (CyclicMap, NotCommutative, assembly_pi0, aut_group,
                           classify_generator_map, k0, k0_pushforward, k0_ring,
                           verify_certificate)
from lawvere.terms import App, Var
from lawvere.theory import TheoryMorphism, initial_morphism, verify_inverse

x1, x2 = Var(1), Var(2)


def test_sets_infinite_cyclic():
    cert = k0(sets_theory())
    assert cert.status == "infinite" and cert.group == "Z"
    assert cert.invariant.size >= 2
    assert verify_certificate(cert)


def test_boole_infinite_cyclic():
    cert = k0(boole_theory())
    assert cert.group == "Z"
    assert cert.invariant.size == 2 ** 2   # the free algebra on one generator
    assert verify_certificate(cert)


@pytest.mark.parametrize("a", [2, 3])
def test_cantor_torsion(a):
    cert = k0(cantor_theory(a))
    assert cert.status == "finite" and cert.order == a - 1
    u, v = cert.witness
    assert (u.src, u.dst) == (1, a)
    assert verify_inverse(u, v)
    assert verify_certificate(cert)


def test_certificate_json():
    data = k0(cantor_theory(3)).to_json()
    assert data["group"] == "Z/2"
    assert set(data["torsion_witness"]) == {"u", "v"}


def test_inconclusive_when_bounds_too_small():
    src = ("theory Three; op m/3; op p1/1; op p2/1; op p3/1;\n"
           "eq 3: p1(m(x1,x2,x3)) = x1;\neq 3: p2(m(x1,x2,x3)) = x2;\n"
           "eq 3: p3(m(x1,x2,x3)) = x3;\neq 1: m(p1(x1),p2(x1),p3(x1)) = x1;\nend")
    T = user_theory(parse_presentation(src))
    assert not k0(T, arity_bound=2).conclusive
    cert = k0(T, arity_bound=3)
    assert cert.order == 2


def test_generator_map_kinds():
    assert classify_generator_map(0, 0) == "iso"
    assert classify_generator_map(0, 1) == "zero"
    assert classify_generator_map(0, 4) == "surjective-not-injective"
    assert classify_generator_map(2, 2) == "iso"
    assert not CyclicMap(2, 0).well_defined
    assert CyclicMap(6, 3).well_defined
    assert not CyclicMap(3, 2).well_defined


def test_assembly():
    assert assembly_pi0(sets_theory()).map.kind == "iso"
    rep = assembly_pi0(boole_theory())
    assert rep.map.kind == "zero" and rep.target.order == 1
    rep = assembly_pi0(cantor_theory(2))
    assert rep.map.kind == "iso" and rep.map.status == "ok"


def test_pushforwards():
    E = sets_theory()
    for T, kind in ((boole_theory(), "iso"), (cantor_theory(2), "zero")):
        rep = k0_pushforward(initial_morphism(T, E))
        assert rep.map.kind == kind
        assert rep.map.checks["generator_to_generator"]
        assert rep.to_json()["surjective"]
    L = TheoryMorphism(groups_theory(), ab_theory(),
                       {"mul": App("add", [x1, x2]), "inv": App("neg", [x1]),
                        "e": App("zero")})
    assert k0_pushforward(L).map.kind == "iso"


def test_rings():
    for T in (ab_theory(), sets_theory(), gsets_theory(named_group("C2"))):
        R = k0_ring(T)
        assert R.order == 0 and R.multiply(1, 1) == 1
    with pytest.raises(NotCommutative):
        k0_ring(groups_theory())


def test_automorphisms():
    assert aut_group(sets_theory(), 3).order == 6
    assert aut_group(boole_theory(), 1).order == 2
    assert aut_group(gsets_theory(named_group("C3")), 1).order == 3
    G = aut_group(modr_theory(2), 2)
    assert G.order == 6 and G.closed and not G.group.is_abelian()
    with pytest.raises(ValueError):
        aut_group(groups_theory(), 1)
