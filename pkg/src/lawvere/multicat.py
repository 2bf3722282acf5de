"""Arity-capped multicategories: M1, the underlying multicategory of F_T, coherence checks.

All checks run in a finite window (objects and arities up to a cap) and say so
in their reports.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from .backends import ActionProductBackend, RenamedBackend
from .kronecker import (_both_composites, iterated_pairings, kronecker, kronecker_many,
                        triple_orders)
from .terms import App, Var
from .theory import (FMor, HomCapExceeded, Theory, TheoryMorphism, can_random, compose,
                     coproduct_many, hom_count, hom_enumerate, identity, permutation,
                     random_fmor)

DEFAULT_HOM_LIMIT = 2000


class BoundedMulticategory:
    """Objects, hom oracle ``hom(sources, target)``, composition and identities, up to a cap."""

    def __init__(self, name, objects, hom: Callable, compose: Callable, identity: Callable,
                 basepoint, arity_cap: int):
        self.name = name
        self.objects = list(objects)
        self.hom = hom
        self.compose = compose
        self.identity = identity
        self.basepoint = basepoint
        self.arity_cap = arity_cap

    def signatures(self, max_arity=None):
        """Every (sources, target) with at most ``max_arity`` sources."""
        top = self.arity_cap if max_arity is None else max_arity
        for n in range(top + 1):
            for src in itertools.product(self.objects, repeat=n):
                for d in self.objects:
                    yield src, d

    def check_axioms(self, max_arity=2, hom_limit=DEFAULT_HOM_LIMIT, samples=50, seed=0):
        """Unit and associativity laws on all (or sampled) composable data within the window."""
        rng = random.Random(seed)
        rep = CheckReport(f"{self.name} multicategory axioms", window=f"arity <= {max_arity}")

        def pick(homset, k):
            if isinstance(homset, SampledHom) or len(homset) > k:
                return [choice(homset) for _ in range(k)]
            return homset

        def choice(homset):
            if isinstance(homset, SampledHom):
                return homset.sample(rng)
            return homset[rng.randrange(len(homset))]

        for src, d in self.signatures(max_arity):
            homs = self.hom(src, d)
            for f in pick(homs, samples):
                rep.count()
                if self.compose(self.identity(d), [f]) != f:
                    rep.fail("left unit", f"{src}->{d}")
                if self.compose(f, [self.identity(c) for c in src]) != f:
                    rep.fail("right unit", f"{src}->{d}")
                # one level of associativity: choose inner and innermost operations
                for _ in range(2 if src else 0):
                    inner, inner_src = [], []
                    for c in src:
                        k = rng.randint(0, max(0, max_arity - 1))
                        s = tuple(rng.choice(self.objects) for _ in range(k))
                        hs = self.hom(s, c)
                        if not hs:
                            break
                        inner.append(choice(hs))
                        inner_src.append(s)
                    else:
                        innermost = []
                        for s in inner_src:
                            row = []
                            for c in s:
                                hs = self.hom((c,), c)
                                row.append(choice(hs))
                            innermost.append(row)
                        flat = [h for row in innermost for h in row]
                        a = self.compose(self.compose(f, inner), flat)
                        b = self.compose(f, [self.compose(g, row)
                                             for g, row in zip(inner, innermost)])
                        rep.count()
                        if a != b:
                            rep.fail("associativity", f"{src}->{d}")
                if isinstance(homs, SampledHom) or len(homs) > samples:
                    rep.sampled = True
        return rep


class SampledHom:
    """A hom-set too large to list: its size (None when infinite) and a sampler."""

    def __init__(self, size, sampler):
        self.size = size
        self.sampler = sampler

    def __len__(self):
        if self.size is None:
            raise TypeError("infinite hom-set has no length")
        return self.size

    def __bool__(self):
        return self.size is None or self.size > 0

    def sample(self, rng):
        return self.sampler(rng)


@dataclass
class CheckReport:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)
    window: str = ""
    sampled: bool = False

    def count(self, k=1):
        self.checked += k

    def fail(self, kind, detail):
        self.failures.append({"check": kind, "detail": detail})

    @property
    def ok(self):
        return not self.failures

    def to_json(self):
        return {"check": self.name, "window": self.window, "checked": self.checked,
                "mode": "sampled" if self.sampled else "exhaustive",
                "failures": len(self.failures), "failure_details": self.failures[:10]}


# -- M1 --------------------------------------------------------------------

POINT = "*"


def _m1_hom(src, d):
    ones = sum(1 for c in src if c == 1)
    if (d == 0 and ones == 0) or (d == 1 and ones == 1):
        return [POINT]
    return []


def _m1_compose(f, gs):
    if f != POINT or any(g != POINT for g in gs):
        raise ValueError("not a morphism of M1")
    return POINT


def m1(arity_cap=4) -> BoundedMulticategory:
    """Two objects 0 and 1: strings of 0's map uniquely to 0, strings with exactly one 1 map
    uniquely to 1, and every other morphism set is empty."""
    return BoundedMulticategory("M1", [0, 1], _m1_hom, _m1_compose, lambda c: POINT, 0, arity_cap)


def check_m1(arity_cap=3) -> CheckReport:
    """Based-multicategory axioms of M1, including that composites land in nonempty sets."""
    M = m1(arity_cap)
    rep = M.check_axioms(max_arity=arity_cap)
    rep.name = "M1 axioms"
    for src, d in M.signatures(arity_cap):
        if not M.hom(src, d):
            continue
        for choice in itertools.product(*[
                [s for k in range(arity_cap + 1 - len(src)) for s in itertools.product([0, 1], repeat=k)
                 if M.hom(s, c)] for c in src]):
            rep.count()
            flat = tuple(c for s in choice for c in s)
            if not M.hom(flat, d):
                rep.fail("closure", f"{src}->{d} after {choice}")
    if M.hom((), 0) != [POINT]:
        rep.fail("basepoint", "no nullary morphism into the basepoint")
    return rep


# -- underlying multicategory of F_T ---------------------------------------

def underlying(T: Theory, arity_cap=3, size_bound=None,
               hom_limit=DEFAULT_HOM_LIMIT) -> BoundedMulticategory:
    """Objects 0..cap; ``hom((c_1..c_n); d) = F_T(c_1 + .. + c_n, d)``; basepoint 0.

    Hom-sets larger than ``hom_limit`` are returned as samplers.
    """
    cache = {}

    def hom(src, d):
        key = (sum(src), d)
        if key not in cache:
            m = key[0]
            sampler = lambda rng: random_fmor(T, m, d, rng)
            if size_bound is None and not T.finite:
                cache[key] = SampledHom(None, sampler) if m == 0 or can_random(T, d) else []
            else:
                try:
                    cache[key] = hom_enumerate(T, m, d, size_bound, hom_limit)
                except HomCapExceeded as exc:
                    cache[key] = SampledHom(exc.count, sampler)
        return cache[key]

    def comp(f, gs):
        if not gs:
            return f
        return compose(f, coproduct_many(list(gs), T))

    return BoundedMulticategory(f"U F_{T.name}", range(arity_cap + 1), hom, comp,
                                lambda c: identity(T, c), 0, arity_cap)


def _window_homs(T: Theory, m, n, rng, hom_limit, samples):
    """All of F_T(m, n) when small, else seeded samples; second value tells which."""
    if T.finite:
        try:
            if hom_count(T, m, n) <= hom_limit:
                return hom_enumerate(T, m, n), False
        except ValueError:
            pass
    if m > 0 and not can_random(T, n):
        return [], False
    return [random_fmor(T, m, n, rng) for _ in range(samples)], True


def _action(T: Theory, k: int, pos: int, c: int) -> FMor:
    """The M1-action of ((0,..,1,..,0); 1) on (0,..,c,..,0): the copairing T_{0+..+c+..+0} -> T_c."""
    parts = [identity(T, 0)] * k
    parts[pos] = identity(T, c)
    keys = []
    for p in parts:
        keys += list(p.keys)
    return FMor(T, c, c, keys)


def check_m1_module(T: Theory, arity_cap=3, hom_limit=DEFAULT_HOM_LIMIT, samples=20,
                    seed=0) -> CheckReport:
    """The unit-map action of M1 on U F_T: identity, naturality and associativity."""
    rng = random.Random(seed)
    rep = CheckReport(f"M1-module structure on U F_{T.name}", window=f"objects, arities <= {arity_cap}")
    for c in range(arity_cap + 1):
        rep.count()
        if _action(T, 1, 0, c) != identity(T, c):
            rep.fail("unit", f"identity of 1 does not act trivially on {c}")
    for k in range(1, arity_cap + 1):
        for pos in range(k):
            for c in range(arity_cap + 1):
                a_c = _action(T, k, pos, c)
                for d in range(arity_cap + 1):
                    a_d = _action(T, k, pos, d)
                    fs, sampled = _window_homs(T, c, d, rng, hom_limit, samples)
                    rep.sampled |= sampled
                    for f in fs:
                        rep.count()
                        # (id_0, .., f, .., id_0) then act  ==  act then f
                        tuple_map = coproduct_many(
                            [identity(T, 0)] * pos + [f] + [identity(T, 0)] * (k - pos - 1), T)
                        if compose(a_d, tuple_map) != compose(f, a_c):
                            rep.fail("naturality", f"k={k} pos={pos} {f}")
    # associativity: composite in M1 acts as the composite of actions
    for k in range(1, arity_cap + 1):
        for pos in range(k):
            for j in range(1, arity_cap + 1):
                for pos2 in range(j):
                    for c in range(arity_cap + 1):
                        rep.count()
                        inner = _action(T, j, pos2, c)
                        outer = _action(T, k, pos, c)
                        whole = _action(T, k + j - 1, pos + pos2, c)
                        if compose(outer, inner) != whole:
                            rep.fail("associativity", f"k={k} pos={pos} j={j} pos2={pos2} c={c}")
    return rep


# -- coherence diagrams ----------------------------------------------------

def check_unit_coherence(T: Theory, arity_cap=3, hom_limit=DEFAULT_HOM_LIMIT, samples=20,
                         seed=0) -> CheckReport:
    """Left unit square: P(id_1, f) = f in E⊗T, and P(id_1, id_n) is the identity."""
    from .catalogue import sets_theory
    rng = random.Random(seed)
    E = sets_theory()
    W = kronecker(E, T)
    emb = W.embeddings[1]
    rep = CheckReport(f"unit square for {T.name}", window=f"arities <= {arity_cap}")
    one = identity(E, 1)
    for n in range(arity_cap + 1):
        # (0,..,1,..,0) -> 1 in U F_E has sources summing to 1, so it is id_1 here
        rep.count()
        a, b = _both_composites(W, one, identity(T, n))
        if a != b or a != identity(W.combined, n):
            rep.fail("basepoint form", f"P(id_1, id_{n}) is not the identity")
    for m in range(arity_cap + 1):
        for n in range(arity_cap + 1):
            fs, sampled = _window_homs(T, m, n, rng, hom_limit, samples)
            rep.sampled |= sampled
            for f in fs:
                rep.count()
                a, b = _both_composites(W, one, f)
                if a != b or a != emb.push(f):
                    rep.fail("unit", f"P(id_1, {f}) differs from {f}")
    return rep


def _swap_morphism(W_st, W_ts) -> TheoryMorphism:
    """S⊗T -> T⊗S renaming each operation to its counterpart."""
    S, T = W_st.factors
    assign = {}
    for theory, mp_st, mp_ts in ((S, W_st.maps[0], W_ts.maps[1]), (T, W_st.maps[1], W_ts.maps[0])):
        for op, ar in theory.signature.operations:
            assign[mp_st[op]] = App(mp_ts[op], [Var(i + 1) for i in range(ar)])
    key_map = None
    b1, b2 = W_st.combined.backend, W_ts.combined.backend
    if _core(b1) == _core(b2) and all(
            _op_meaning(b1, o) is not None and _op_meaning(b1, o) == _op_meaning(b2, t.op)
            for o, t in assign.items()):
        key_map = _same_key           # both sides run the same decision procedure
    return TheoryMorphism(W_st.combined, W_ts.combined, assign, name="swap", key_map=key_map)


def _same_key(k):
    return k


def _core(b):
    """Identity of the underlying decision procedure, ignoring operation names."""
    if isinstance(b, RenamedBackend):
        return ("renamed", _core(b.base))
    if isinstance(b, ActionProductBackend):
        return ("action", _core(b.base), b.group.mul)
    return (type(b).__name__, repr(sorted(b.describe().items())))


def _op_meaning(b, op):
    if isinstance(b, RenamedBackend):
        inner = b.mapping.get(op)
        return None if inner is None else ("renamed", _op_meaning(b.base, inner))
    if isinstance(b, ActionProductBackend):
        if op in b.base_ops:
            return ("base", _op_meaning(b.base, b.base_ops[op]))
        if op in b.group_ops:
            return ("act", b.group_ops[op])
        return None
    return op


def transpose(T: Theory, m: int, n: int) -> FMor:
    """Permutation of T_{mn} taking pair (i, j) of m x n to pair (j, i) of n x m."""
    return permutation(T, [j * m + i for i in range(m) for j in range(n)])


def check_symmetry_square(S: Theory, T: Theory, arity_cap=3, hom_limit=DEFAULT_HOM_LIMIT,
                          samples=20, seed=0) -> CheckReport:
    """P_{S,T}(f, g) corresponds to P_{T,S}(g, f) under the swap and the grid transposes."""
    rng = random.Random(seed)
    W_st, W_ts = kronecker(S, T), kronecker(T, S)
    tau = _swap_morphism(W_st, W_ts)
    K = W_ts.combined
    rep = CheckReport(f"symmetry square for {S.name}, {T.name}", window=f"arities <= {arity_cap}")

    def check(f, g):
        rep.count()
        a, b = _both_composites(W_st, f, g)
        c, d = _both_composites(W_ts, g, f)
        if a != b or c != d:
            rep.fail("square", f"{f}, {g}")
            return
        m, m2, n, n2 = f.src, f.dst, g.src, g.dst
        lhs = tau.push(a)
        rhs = compose(transpose(K, n2, m2), compose(c, transpose(K, m, n)))
        if lhs != rhs:
            rep.fail("symmetry", f"{f}, {g}")

    for m in range(arity_cap + 1):
        for m2 in range(arity_cap + 1):
            fs, s1 = _window_homs(S, m, m2, rng, hom_limit, samples)
            for n in range(1, arity_cap + 1):
                for f in fs:
                    check(f, identity(T, n))
            gs, s2 = _window_homs(T, m, m2, rng, hom_limit, samples)
            for n in range(1, arity_cap + 1):
                for g in gs:
                    check(identity(S, n), g)
            rep.sampled |= s1 or s2
    for _ in range(samples):
        f = _random_window(S, arity_cap, rng)
        g = _random_window(T, arity_cap, rng)
        if f is not None and g is not None:
            check(f, g)
    rep.sampled = True if samples else rep.sampled
    return rep


def _random_window(T: Theory, cap, rng) -> Optional[FMor]:
    for _ in range(20):
        m, n = rng.randint(0, cap), rng.randint(0, cap)
        if m == 0 or can_random(T, n):
            return random_fmor(T, m, n, rng)
    return None


def check_associativity(S: Theory, T: Theory, V: Theory, arity_cap=2, samples=50,
                        seed=0) -> CheckReport:
    """All six orders of applying f, g, h and both iterated pairings agree in S⊗T⊗V."""
    rng = random.Random(seed)
    W = kronecker_many([S, T, V])
    rep = CheckReport(f"associativity for {S.name}, {T.name}, {V.name}",
                      window=f"arities <= {arity_cap}", sampled=True)
    for _ in range(samples):
        f = _random_window(S, arity_cap, rng)
        g = _random_window(T, arity_cap, rng)
        h = _random_window(V, arity_cap, rng)
        if f is None or g is None or h is None:
            continue
        rep.count()
        orders = triple_orders(W, f, g, h)
        left, right = iterated_pairings(W, f, g, h)
        ref = orders["fgh"]
        bad = [k for k, v in orders.items() if v != ref]
        if bad:
            rep.fail("interchange", f"orders {bad} differ for {f}, {g}, {h}")
        if left != ref or right != ref:
            rep.fail("iterated pairing", f"{f}, {g}, {h}")
    return rep


@dataclass
class CoherenceReport:
    theories: list
    sections: list

    @property
    def failures(self):
        return sum(len(s.failures) for s in self.sections)

    @property
    def ok(self):
        return self.failures == 0

    def to_json(self):
        return {"theories": self.theories, "diagram_failures": self.failures,
                "note": "finite-window checks: objects and arities bounded by the cap",
                "sections": [s.to_json() for s in self.sections]}


def check_coherence(S: Theory, T: Theory, V: Optional[Theory] = None, arity_cap=3,
                    samples=50, seed=0, hom_limit=DEFAULT_HOM_LIMIT) -> CoherenceReport:
    """Unit squares, the symmetry square and associativity (V defaults to E)."""
    from .catalogue import sets_theory
    third = V if V is not None else sets_theory()
    sections = [
        check_m1(arity_cap),
        check_m1_module(S, arity_cap, hom_limit, min(samples, 20), seed),
        check_m1_module(T, arity_cap, hom_limit, min(samples, 20), seed),
        check_unit_coherence(S, arity_cap, hom_limit, min(samples, 20), seed),
        check_unit_coherence(T, arity_cap, hom_limit, min(samples, 20), seed),
        check_symmetry_square(S, T, arity_cap, hom_limit, min(samples, 20), seed),
        check_associativity(S, T, third, min(arity_cap, 2), samples, seed),
    ]
    names = [S.name, T.name] + ([V.name] if V is not None else [])
    return CoherenceReport(names, sections)
