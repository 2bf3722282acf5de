"""Built-in theories and their decision procedures.

Presentation choices (none are canonical):

* Boole: ``0, 1, and, or, not`` with commutativity and associativity of
  ``and``/``or``, both absorption laws, both distributive laws and the two
  complement laws.
* Cantor_a: ``mu`` of arity a and unary ``nu1..nua`` with
  ``nu_i(mu(x1..xa)) = x_i`` and ``mu(nu1(x1), .., nua(x1)) = x1``.
* GSets(G): one unary operation ``g<a>`` per group element, with
  ``g<e>(x1) = x1`` and ``g<a>(g<b>(x1)) = g<ab>(x1)``.
"""

from __future__ import annotations

import functools
import json
import os

from .backends import (GSetBackend, ModuleBackend, ReducedWordBackend, SetBackend,
                       TRSBackend, TruthTableBackend, FreeRingBackend, Backend)
from .dsl import parse_presentation
from .groups import FiniteGroup, group_from_json, named_group
from .rewrite import KBO, RewriteRule, RewriteSystem, complete, CompletionFailure
from .terms import App, Presentation, Var, presentation
from .theory import Theory

x1, x2, x3 = Var(1), Var(2), Var(3)


def _op(name, *args):
    return App(name, args)


@functools.lru_cache(maxsize=None)
def sets_theory() -> Theory:
    return Theory(presentation("E", [], []), SetBackend(), kind="E")


def boole_presentation() -> Presentation:
    a, o, n = "and", "or", "not"
    eqs = [
        (2, _op(a, x1, x2), _op(a, x2, x1)),
        (2, _op(o, x1, x2), _op(o, x2, x1)),
        (3, _op(a, _op(a, x1, x2), x3), _op(a, x1, _op(a, x2, x3))),
        (3, _op(o, _op(o, x1, x2), x3), _op(o, x1, _op(o, x2, x3))),
        (2, _op(a, x1, _op(o, x1, x2)), x1),
        (2, _op(o, x1, _op(a, x1, x2)), x1),
        (3, _op(a, x1, _op(o, x2, x3)), _op(o, _op(a, x1, x2), _op(a, x1, x3))),
        (3, _op(o, x1, _op(a, x2, x3)), _op(a, _op(o, x1, x2), _op(o, x1, x3))),
        (1, _op(a, x1, _op(n, x1)), _op("0")),
        (1, _op(o, x1, _op(n, x1)), _op("1")),
    ]
    return presentation("Boole", [("0", 0), ("1", 0), ("and", 2), ("or", 2), ("not", 1)], eqs)


@functools.lru_cache(maxsize=None)
def boole_theory() -> Theory:
    return Theory(boole_presentation(), TruthTableBackend(), kind="Boole")


def cantor_presentation(a: int) -> Presentation:
    if a < 2:
        raise ValueError("Cantor algebras need arity a >= 2")
    xs = [Var(i) for i in range(1, a + 1)]
    ops = [("mu", a)] + [(f"nu{i}", 1) for i in range(1, a + 1)]
    eqs = [(a, _op(f"nu{i}", App("mu", xs)), Var(i)) for i in range(1, a + 1)]
    eqs.append((1, App("mu", [_op(f"nu{i}", x1) for i in range(1, a + 1)]), x1))
    return presentation(f"Cantor{a}", ops, eqs)


def cantor_rules(a: int) -> RewriteSystem:
    """The completed system: both defining equations oriented left to right."""
    res = complete(cantor_presentation(a))
    if not res.ok:
        raise CompletionFailure(res)
    return res.system


@functools.lru_cache(maxsize=None)
def cantor_theory(a: int) -> Theory:
    return Theory(cantor_presentation(a), TRSBackend(cantor_rules(a)), kind="Cantor",
                  params={"a": a})


def groups_presentation() -> Presentation:
    m, i, e = "mul", "inv", "e"
    eqs = [
        (3, _op(m, _op(m, x1, x2), x3), _op(m, x1, _op(m, x2, x3))),
        (1, _op(m, _op(e), x1), x1),
        (1, _op(m, x1, _op(e)), x1),
        (1, _op(m, _op(i, x1), x1), _op(e)),
        (1, _op(m, x1, _op(i, x1)), _op(e)),
    ]
    return presentation("Groups", [("mul", 2), ("inv", 1), ("e", 0)], eqs)


def group_kbo() -> KBO:
    """Weights and precedence orienting the standard completed group system."""
    sig = groups_presentation().signature
    return KBO(sig, weights={"mul": 0, "inv": 0, "e": 1}, precedence=["e", "mul", "inv"])


def group_rules() -> RewriteSystem:
    """The ten-rule completed system for groups (right-nested normal forms)."""
    m, i, e = "mul", "inv", "e"
    E = _op(e)
    pairs = [
        (_op(m, E, x1), x1),
        (_op(m, x1, E), x1),
        (_op(m, _op(i, x1), x1), E),
        (_op(m, x1, _op(i, x1)), E),
        (_op(m, _op(i, x1), _op(m, x1, x2)), x2),
        (_op(m, x1, _op(m, _op(i, x1), x2)), x2),
        (_op(i, E), E),
        (_op(i, _op(i, x1)), x1),
        (_op(m, _op(m, x1, x2), x3), _op(m, x1, _op(m, x2, x3))),
        (_op(i, _op(m, x1, x2)), _op(m, _op(i, x2), _op(i, x1))),
    ]
    return RewriteSystem([RewriteRule(l, r) for l, r in pairs])


@functools.lru_cache(maxsize=None)
def groups_theory() -> Theory:
    return Theory(groups_presentation(), ReducedWordBackend(), kind="Groups")


def groups_trs_theory() -> Theory:
    """Groups decided by the completed rewrite system instead of reduced words."""
    return Theory(groups_presentation(), TRSBackend(group_rules()), kind="Groups")


def _add_chain(t, k):
    out = t
    for _ in range(k - 1):
        out = _op("add", out, t)
    return out


def ab_presentation(modulus=0) -> Presentation:
    a, n, z = "add", "neg", "zero"
    eqs = [
        (3, _op(a, _op(a, x1, x2), x3), _op(a, x1, _op(a, x2, x3))),
        (2, _op(a, x1, x2), _op(a, x2, x1)),
        (1, _op(a, _op(z), x1), x1),
        (1, _op(a, _op(n, x1), x1), _op(z)),
    ]
    name = "Ab"
    if modulus:
        eqs.append((1, _add_chain(x1, modulus), _op(z)) if modulus > 1 else (1, x1, _op(z)))
        name = f"Mod{modulus}"
    return presentation(name, [(a, 2), (n, 1), (z, 0)], eqs)


@functools.lru_cache(maxsize=None)
def ab_theory() -> Theory:
    return Theory(ab_presentation(), ModuleBackend(0), kind="Ab", params={"modulus": 0})


@functools.lru_cache(maxsize=None)
def modr_theory(k: int) -> Theory:
    """Modules over Z/k (k = 0 gives abelian groups)."""
    if k == 0:
        return ab_theory()
    if k < 1:
        raise ValueError("modulus must be positive")
    return Theory(ab_presentation(k), ModuleBackend(k), kind="Ab", params={"modulus": k})


def gsets_presentation(G: FiniteGroup) -> Presentation:
    names = [f"g{a}" for a in G.elements()]
    e = G.identity
    eqs = [(1, _op(names[e], x1), x1)]
    for a in G.elements():
        for b in G.elements():
            eqs.append((1, _op(names[a], _op(names[b], x1)), _op(names[G.mul[a][b]], x1)))
    return presentation(f"GSets_{G.name}", [(nm, 1) for nm in names], eqs)


_GSETS_CACHE: dict = {}


def gsets_theory(G: FiniteGroup) -> Theory:
    key = (G.mul, G.name)
    T = _GSETS_CACHE.get(key)
    if T is None:
        T = Theory(gsets_presentation(G), GSetBackend(G), kind="GSets", params={"group": G})
        _GSETS_CACHE[key] = T
    return T


def rings_presentation() -> Presentation:
    a, n, z, m, o = "add", "neg", "zero", "mul", "one"
    eqs = list(ab_presentation().equations)
    eqs = [(e.context, e.left, e.right) for e in eqs]
    eqs += [
        (3, _op(m, _op(m, x1, x2), x3), _op(m, x1, _op(m, x2, x3))),
        (1, _op(m, _op(o), x1), x1),
        (1, _op(m, x1, _op(o)), x1),
        (3, _op(m, x1, _op(a, x2, x3)), _op(a, _op(m, x1, x2), _op(m, x1, x3))),
        (3, _op(m, _op(a, x1, x2), x3), _op(a, _op(m, x1, x3), _op(m, x2, x3))),
    ]
    return presentation("Rings", [(a, 2), (n, 1), (z, 0), (m, 2), (o, 0)], eqs)


@functools.lru_cache(maxsize=None)
def rings_theory() -> Theory:
    return Theory(rings_presentation(), FreeRingBackend(), kind="Rings")


class PermutationBackend(Backend):
    """Free Z-sets: ``s^k x_{i+1}`` has key ``(i, k)``; ``t`` is the inverse of ``s``."""
    kind = "ReducedWord"

    def gen(self, i, n):
        return (i, 0)

    def apply(self, op, args, n):
        i, k = args[0]
        return (i, k + (1 if op == "s" else -1))

    def subst(self, key, m, env, n):
        i, k = key
        j, c = env[i]
        return (j, k + c)

    def term(self, key, n):
        i, k = key
        out = Var(i + 1)
        for _ in range(abs(k)):
            out = _op("s" if k > 0 else "t", out)
        return out


@functools.lru_cache(maxsize=None)
def permutations_theory() -> Theory:
    """Sets with a bijection: G-sets for the infinite cyclic group."""
    p = presentation("Permutations", [("s", 1), ("t", 1)],
                     [(1, _op("s", _op("t", x1)), x1), (1, _op("t", _op("s", x1)), x1)])
    return Theory(p, PermutationBackend(), kind="Permutations")


def user_theory(p: Presentation, order: KBO = None, **bounds) -> Theory:
    """A theory from a presentation, decided by bounded completion.

    If completion does not succeed the partial system is kept but marked
    uncertified: equal normal forms still prove equality, distinct ones do not.
    """
    res = complete(p, order=order, **bounds)
    if res.ok:
        backend = TRSBackend(res.system, certified=True)
    else:
        rules = [res.records[i].rule for i in res.active]
        backend = TRSBackend(RewriteSystem(rules), certified=False)
    T = Theory(p, backend, kind="user", params={"completion": res.status})
    T.completion = res
    return T


def load_group(spec: str) -> FiniteGroup:
    if os.path.exists(spec):
        with open(spec, encoding="utf-8") as fh:
            return group_from_json(json.load(fh))
    return named_group(spec)


def load_theory(name: str, **bounds) -> Theory:
    """Catalogue name (``E``, ``Boole``, ``Cantor:a``, ``Groups``, ``Ab``, ``Mod:k``,
    ``GSets:<group>``, ``Rings``, ``Permutations``) or a path to a ``.thy`` file."""
    if name.endswith(".thy") or (os.path.exists(name) and not name.startswith("GSets")):
        with open(name, encoding="utf-8") as fh:
            return user_theory(parse_presentation(fh.read()), **bounds)
    head, _, arg = name.partition(":")
    if head == "E" and not arg:
        return sets_theory()
    if head == "Boole" and not arg:
        return boole_theory()
    if head == "Groups" and not arg:
        return groups_theory()
    if head == "Ab" and not arg:
        return ab_theory()
    if head == "Rings" and not arg:
        return rings_theory()
    if head == "Permutations" and not arg:
        return permutations_theory()
    if head == "Cantor" and arg.isdigit():
        return cantor_theory(int(arg))
    if head == "Mod" and arg.isdigit():
        return modr_theory(int(arg))
    if head == "GSets" and arg:
        return gsets_theory(load_group(arg))
    raise ValueError(f"unknown theory {name!r}")


CATALOGUE_NAMES = ["E", "Boole", "Cantor:2", "Cantor:3", "Groups", "Ab", "Mod:2", "Mod:3",
                   "GSets:C2", "GSets:C3", "GSets:S3", "Rings", "Permutations"]
