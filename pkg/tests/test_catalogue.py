import pytest

from lawvere.catalogue import (CATALOGUE_NAMES, load_group, load_theory, user_theory)
from lawvere.dsl import parse_presentation
from lawvere.groups import count_actions, named_group
from lawvere.terms import App, Var
from lawvere.theory import hom_count

x1, x2 = Var(1), Var(2)


@pytest.mark.parametrize("name", CATALOGUE_NAMES)
def test_every_catalogue_name_loads(name):
    T = load_theory(name)
    assert T.presentation.equations or name == "E" or name == "Permutations"
    for eq in T.presentation.equations:
        n = eq.context
        assert T.equal(eq.left, eq.right, n), (name, str(eq))


def test_unknown_names():
    with pytest.raises(ValueError):
        load_theory("Nope")
    with pytest.raises(ValueError):
        load_group("Q8")


def test_group_words():
    G = load_theory("Groups")
    t = App("inv", [App("mul", [x1, x2])])
    assert G.normalize(t, 2) == App("mul", [App("inv", [x2]), App("inv", [x1])])
    assert not G.equal(App("mul", [x1, x2]), App("mul", [x2, x1]), 2)


def test_ab_and_mod():
    A = load_theory("Ab")
    assert A.equal(App("add", [x1, x2]), App("add", [x2, x1]), 2)
    M = load_theory("Mod:3")
    three = App("add", [App("add", [x1, x1]), x1])
    assert M.equal(three, App("zero"), 1)
    assert hom_count(M, 1, 2) == 9


def test_gsets_free_models():
    T = load_theory("GSets:S3")
    assert hom_count(T, 1, 2) == 12
    assert hom_count(T, 2, 1) == 36


def test_group_catalogue():
    assert named_group("C2xC3").order == 6
    assert not named_group("S3").is_abelian()
    assert [count_actions(named_group("C2"), k) for k in range(1, 5)] == [1, 2, 4, 10]


def test_user_theory_completes():
    p = parse_presentation("theory Mon; op e/0; op m/2;\n"
                           "eq 1: m(e(), x1) = x1;\neq 2: m(x1, e()) = x1;\n"
                           "eq 3: m(m(x1, x2), x3) = m(x1, m(x2, x3));\nend")
    T = user_theory(p)
    assert T.params["completion"] == "success"
    lhs = App("m", [App("m", [x1, App("e")]), x2])
    assert T.normalize(lhs, 2) == App("m", [x1, x2])


def test_user_theory_uncertified_when_completion_fails():
    p = parse_presentation("theory C; op f/2; eq 2: f(x1, x2) = f(x2, x1); end")
    T = user_theory(p)
    assert T.params["completion"] == "unorientable"
    assert not T.backend.certified
