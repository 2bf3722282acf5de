"""The category F_T of finitely generated free models.

Objects are arities.  A morphism ``T_m -> T_n`` is an m-tuple of elements of
the free model on n generators; composition is substitution.  Elements are
held as backend keys, canonical terms are produced on demand.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .backends import Backend
from .terms import App, Equation, Presentation, Term, Var, term_size, var_set

DEFAULT_HOM_CAP = 100_000


class HomCapExceeded(RuntimeError):
    def __init__(self, count, cap):
        super().__init__(f"hom-set of size {count} exceeds cap {cap}")
        self.count = count
        self.cap = cap


class Theory:
    """A presentation together with a backend deciding its word problem."""

    def __init__(self, presentation: Presentation, backend: Backend, kind="user", params=None):
        self.presentation = presentation
        self.backend = backend
        self.kind = kind
        self.params = dict(params or {})
        self._tables: dict[int, ElementTable] = {}

    @property
    def name(self):
        return self.presentation.name

    @property
    def signature(self):
        return self.presentation.signature

    @property
    def arity(self):
        return self.presentation.signature.arity

    @property
    def finite(self):
        """Free models are finite (hom-sets can be listed)."""
        return self.backend.finite

    def key(self, t: Term, n: int):
        self.signature.check_term(t, n)
        return self.backend.key_of(t, n)

    def normalize(self, t: Term, n: int) -> Term:
        return self.backend.term(self.key(t, n), n)

    def equal(self, s: Term, t: Term, n: int) -> bool:
        return self.backend.equal(self.key(s, n), self.key(t, n))

    def fmor(self, components: Sequence[Term], n: int) -> "FMor":
        return FMor(self, len(components), n, tuple(self.key(c, n) for c in components))

    def __repr__(self):
        return f"Theory({self.name})"


class FMor:
    """A morphism ``T_src -> T_dst`` given by ``src`` elements of the free model on ``dst``."""
    __slots__ = ("theory", "src", "dst", "keys", "_components")

    def __init__(self, theory: Theory, src: int, dst: int, keys):
        keys = tuple(keys)
        if len(keys) != src:
            raise ValueError(f"expected {src} components, got {len(keys)}")
        self.theory = theory
        self.src = src
        self.dst = dst
        self.keys = keys
        self._components = None

    @property
    def components(self) -> tuple:
        if self._components is None:
            b = self.theory.backend
            self._components = tuple(b.term(k, self.dst) for k in self.keys)
        return self._components

    def __eq__(self, other):
        if not isinstance(other, FMor):
            return NotImplemented
        if other.theory is not self.theory or (self.src, self.dst) != (other.src, other.dst):
            return False
        eq = self.theory.backend.equal
        return all(eq(a, b) for a, b in zip(self.keys, other.keys))

    def __hash__(self):
        return hash((self.src, self.dst, self.keys))

    def __repr__(self):
        comps = ", ".join(str(c) for c in self.components)
        return f"FMor(T{self.src}->T{self.dst}: ({comps}))"

    def to_json(self):
        return {"src": self.src, "dst": self.dst,
                "components": [str(c) for c in self.components]}


def _check_same(*fs):
    t = fs[0].theory
    for f in fs[1:]:
        if f.theory is not t:
            raise ValueError("morphisms belong to different theories")
    return t


def gens(T: Theory, n: int, start=0, count=None):
    count = n - start if count is None else count
    return [T.backend.gen(start + i, n) for i in range(count)]


def identity(T: Theory, n: int) -> FMor:
    return FMor(T, n, n, gens(T, n))


def compose(g: FMor, f: FMor) -> FMor:
    """``g`` after ``f``: component i is f_i with x_j replaced by g_j."""
    T = _check_same(g, f)
    if f.dst != g.src:
        raise ValueError(f"arity mismatch: T{f.src}->T{f.dst} then T{g.src}->T{g.dst}")
    b = T.backend
    return FMor(T, f.src, g.dst, [b.subst(k, f.dst, g.keys, g.dst) for k in f.keys])


def reindex(f: FMor, env_keys, n: int) -> FMor:
    """Substitute keys over ``n`` for the target generators of ``f``."""
    b = f.theory.backend
    return FMor(f.theory, f.src, n, [b.subst(k, f.dst, env_keys, n) for k in f.keys])


def coproduct(f: FMor, g: FMor) -> FMor:
    T = _check_same(f, g)
    n = f.dst + g.dst
    left = reindex(f, gens(T, n, 0, f.dst), n)
    right = reindex(g, gens(T, n, f.dst, g.dst), n)
    return FMor(T, f.src + g.src, n, left.keys + right.keys)


def coproduct_many(fs: Sequence[FMor], T: Optional[Theory] = None) -> FMor:
    if not fs:
        return identity(T, 0)
    out = fs[0]
    for f in fs[1:]:
        out = coproduct(out, f)
    return out


def injection(T: Theory, n: int, m: int, side="left") -> FMor:
    """``T_n -> T_{n+m}`` (left) or ``T_m -> T_{n+m}`` (right)."""
    if side == "left":
        return FMor(T, n, n + m, gens(T, n + m, 0, n))
    if side == "right":
        return FMor(T, m, n + m, gens(T, n + m, n, m))
    raise ValueError("side must be 'left' or 'right'")


def symmetry(T: Theory, n: int, m: int) -> FMor:
    """Block swap ``T_{n+m} -> T_{m+n}``."""
    keys = [T.backend.gen(m + i, n + m) for i in range(n)]
    keys += [T.backend.gen(i, n + m) for i in range(m)]
    return FMor(T, n + m, n + m, keys)


def permutation(T: Theory, perm: Sequence[int]) -> FMor:
    """Component i is the generator ``perm[i]`` (0-based)."""
    n = len(perm)
    return FMor(T, n, n, [T.backend.gen(p, n) for p in perm])


# -- enumeration -----------------------------------------------------------

class ElementTable:
    """Distinct elements of the free model on n generators, by increasing term size.

    Within one size elements appear in order of operation declaration, then
    argument sizes, then argument order.  ``recipes[i]`` is ``("var", j)`` or
    ``(op, arg_indices)`` and rebuilds the representative.
    """

    def __init__(self, theory: Theory, n: int):
        self.theory = theory
        self.n = n
        self.keys: list = []
        self.sizes: list[int] = []
        self.recipes: list[tuple] = []
        self.index: dict = {}
        self.levels: list[list[int]] = [[]]
        self.built = 0

    def _add(self, key, size, recipe):
        if key in self.index:
            return
        self.index[key] = len(self.keys)
        self.keys.append(key)
        self.sizes.append(size)
        self.recipes.append(recipe)
        self.levels[size].append(len(self.keys) - 1)

    def grow(self, bound: int):
        b = self.theory.backend
        ops = self.theory.signature.operations
        n = self.n
        while self.built < bound:
            s = self.built + 1
            self.levels.append([])
            if s == 1:
                for j in range(n):
                    self._add(b.gen(j, n), 1, ("var", j))
                for name, ar in ops:
                    if ar == 0:
                        self._add(b.apply(name, [], n), 1, (name, ()))
            else:
                for name, ar in ops:
                    if ar == 0:
                        continue
                    for parts in _compositions(s - 1, ar):
                        pools = [self.levels[p] for p in parts]
                        if any(not pl for pl in pools):
                            continue
                        for args in itertools.product(*pools):
                            key = b.apply(name, [self.keys[a] for a in args], n)
                            self._add(key, s, (name, args))
            self.built = s
        return self

    def upto(self, bound: int) -> int:
        """Number of elements of size at most ``bound``."""
        self.grow(bound)
        return sum(len(self.levels[s]) for s in range(1, bound + 1))

    def term(self, i: int) -> Term:
        op, args = self.recipes[i]
        if op == "var":
            return Var(args + 1)
        return App(op, [self.term(a) for a in args])

    def evaluate(self, env, m: int, bound: int) -> list:
        """Values of the first ``upto(bound)`` elements at ``env`` (keys over m)."""
        count = self.upto(bound)
        b = self.theory.backend
        vals = []
        for i in range(count):
            op, args = self.recipes[i]
            if op == "var":
                vals.append(env[args])
            else:
                vals.append(b.apply(op, [vals[a] for a in args], m))
        return vals


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def element_table(T: Theory, n: int) -> ElementTable:
    tab = T._tables.get(n)
    if tab is None:
        tab = T._tables[n] = ElementTable(T, n)
    return tab


def elements(T: Theory, n: int, size_bound=None) -> list:
    """Keys of distinct elements of T_n; all of them when ``size_bound`` is None."""
    if size_bound is None:
        els = T.backend.elements(n)
        if els is None:
            raise ValueError(f"{T.name}: free model on {n} generators is infinite; give a size bound")
        return els
    tab = element_table(T, n)
    return tab.keys[:tab.upto(size_bound)]


def elements_by_size(T: Theory, n: int, size_bound: int) -> list:
    """(canonical term, size of smallest representative) pairs."""
    tab = element_table(T, n)
    count = tab.upto(size_bound)
    return [(T.backend.term(tab.keys[i], n), tab.sizes[i]) for i in range(count)]


def hom_count(T: Theory, m: int, n: int, size_bound=None) -> int:
    return len(elements(T, n, size_bound)) ** m


def hom_enumerate(T: Theory, m: int, n: int, size_bound=None, cap=DEFAULT_HOM_CAP) -> list:
    """All morphisms ``T_m -> T_n`` with components of size at most ``size_bound``."""
    els = elements(T, n, size_bound)
    count = len(els) ** m
    if count > cap:
        raise HomCapExceeded(count, cap)
    return [FMor(T, m, n, keys) for keys in itertools.product(els, repeat=m)]


# -- isomorphisms ----------------------------------------------------------

@dataclass
class IsoSearch:
    morphism: FMor
    inverse: Optional[FMor]
    candidates: list = field(default_factory=list)   # per component count
    exhaustive: bool = True                          # candidates were the whole hom-set

    @property
    def found(self):
        return self.inverse is not None


def _evaluate_all(T, m, env, n, size_bound):
    """Values at ``env`` of every candidate element of T_m (keys over n)."""
    if size_bound is None:
        els = elements(T, m, None)
        b = T.backend
        return els, [b.subst(k, m, env, n) for k in els]
    tab = element_table(T, m)
    count = tab.upto(size_bound)
    return tab.keys[:count], tab.evaluate(env, n, size_bound)


def search_inverse(f: FMor, size_bound=None, cap=DEFAULT_HOM_CAP) -> IsoSearch:
    """Look for g with ``g∘f = id`` and ``f∘g = id``.

    The condition ``f∘g = id`` splits into one condition per component of g,
    so candidates are filtered separately before the combined check.
    """
    T = f.theory
    b = T.backend
    m, n = f.src, f.dst
    cand_keys, values = _evaluate_all(T, m, f.keys, n, size_bound)
    per = [[] for _ in range(n)]
    targets = {}
    for j in range(n):
        targets.setdefault(b.gen(j, n), []).append(j)
    for k, v in zip(cand_keys, values):
        for j in targets.get(v, ()):
            per[j].append(k)
    counts = [len(p) for p in per]
    exhaustive = size_bound is None
    if any(c == 0 for c in counts):
        return IsoSearch(f, None, counts, exhaustive)
    total = 1
    for c in counts:
        total *= c
    if total > cap:
        raise HomCapExceeded(total, cap)
    ident = identity(T, m)
    for keys in itertools.product(*per):
        g = FMor(T, n, m, keys)
        if compose(g, f) == ident:
            return IsoSearch(f, g, counts, exhaustive)
    return IsoSearch(f, None, counts, exhaustive)


def is_iso(f: FMor, size_bound=None, cap=DEFAULT_HOM_CAP) -> Optional[FMor]:
    """The inverse of ``f`` if one is found within the bound, else None.

    Raises HomCapExceeded when the candidate space is larger than ``cap``.
    """
    return search_inverse(f, size_bound, cap).inverse


def verify_inverse(f: FMor, g: FMor) -> bool:
    return (compose(g, f) == identity(f.theory, f.src)
            and compose(f, g) == identity(f.theory, f.dst))


# -- random data -----------------------------------------------------------

def random_term(T: Theory, n: int, rng: random.Random, max_depth=3) -> Term:
    ops = T.signature.operations
    consts = [o for o, a in ops if a == 0]
    nonconst = [(o, a) for o, a in ops if a > 0]

    def build(d):
        leaf = d <= 0 or not nonconst or rng.random() < 0.3
        if leaf:
            pool = n + len(consts)
            if pool == 0:
                raise ValueError("no closed terms available")
            i = rng.randrange(pool)
            return Var(i + 1) if i < n else App(consts[i - n])
        op, ar = nonconst[rng.randrange(len(nonconst))]
        return App(op, [build(d - 1) for _ in range(ar)])
    return build(max_depth)


def random_fmor(T: Theory, m: int, n: int, rng: random.Random, max_depth=3) -> FMor:
    """A random morphism; finite theories sample uniformly from the hom-set."""
    if T.finite:
        els = T.backend.elements(n)
        return FMor(T, m, n, [els[rng.randrange(len(els))] for _ in range(m)])
    return FMor(T, m, n, [T.backend.key_of(random_term(T, n, rng, max_depth), n)
                          for _ in range(m)])


def can_random(T: Theory, n: int) -> bool:
    """Whether the free model on n generators has any element at all."""
    return n > 0 or any(a == 0 for _, a in T.signature.operations)


# -- theory morphisms ------------------------------------------------------

class TheoryMorphism:
    """Sends each source operation of arity k to a target term over context k."""

    def __init__(self, source: Theory, target: Theory, assignment: dict, name=None,
                 key_map=None):
        self.key_map = key_map
        self.source = source
        self.target = target
        self.assignment = dict(assignment)
        self.name = name or f"{source.name}->{target.name}"
        for op, ar in source.signature.operations:
            if op not in self.assignment:
                raise ValueError(f"no image for operation {op!r}")
            target.signature.check_term(self.assignment[op], ar)
        extra = set(self.assignment) - set(source.arity)
        if extra:
            raise ValueError(f"unknown source operations {sorted(extra)}")
        self._akeys = {}

    def _akey(self, op):
        hit = self._akeys.get(op)
        if hit is None:
            ar = self.source.arity[op]
            hit = self._akeys[op] = self.target.backend.key_of(self.assignment[op], ar)
        return hit

    def translate_term(self, t: Term, n: int):
        """Target key of the image of the source term ``t`` over context n."""
        tb = self.target.backend
        memo = {}

        def ev(s):
            if isinstance(s, Var):
                return tb.gen(s.index - 1, n)
            hit = memo.get(s)
            if hit is None:
                args = [ev(a) for a in s.args]
                hit = tb.subst(self._akey(s.op), len(args), args, n)
                memo[s] = hit
            return hit
        return ev(t)

    def push(self, f: FMor) -> FMor:
        if f.theory is not self.source:
            raise ValueError("morphism is not in the source theory")
        if self.key_map is not None:
            return FMor(self.target, f.src, f.dst, [self.key_map(k) for k in f.keys])
        return FMor(self.target, f.src, f.dst,
                    [self.translate_term(c, f.dst) for c in f.components])

    def to_json(self):
        return {"source": self.source.name, "target": self.target.name,
                "assignment": {k: str(v) for k, v in self.assignment.items()}}


@dataclass
class MorphismVerdict:
    valid: bool
    equation: Optional[Equation] = None
    left: Optional[Term] = None
    right: Optional[Term] = None

    def to_json(self):
        out = {"valid": self.valid}
        if self.equation is not None:
            out["violated"] = str(self.equation)
            out["left"] = str(self.left)
            out["right"] = str(self.right)
        return out


def check_theory_morphism(L: TheoryMorphism) -> MorphismVerdict:
    tb = L.target.backend
    for eq in L.source.presentation.equations:
        a = L.translate_term(eq.left, eq.context)
        b = L.translate_term(eq.right, eq.context)
        if not tb.equal(a, b):
            return MorphismVerdict(False, eq, tb.term(a, eq.context), tb.term(b, eq.context))
    return MorphismVerdict(True)


def theory_morphisms_equal(L1: TheoryMorphism, L2: TheoryMorphism) -> bool:
    if L1.source is not L2.source or L1.target is not L2.target:
        raise ValueError("morphisms have different source or target")
    tb = L1.target.backend
    return all(tb.equal(L1._akey(op), L2._akey(op)) for op in L1.source.arity)


def initial_morphism(T: Theory, E: Theory) -> TheoryMorphism:
    """The unique morphism from the theory of sets."""
    return TheoryMorphism(E, T, {})


def uses_all_generators(key_term: Term, n: int) -> bool:
    return var_set(key_term) >= set(range(1, n + 1))


def first_occurrence_ordered(t: Term) -> bool:
    """Variables first appear in the order x1, x2, ... in a pre-order walk."""
    nxt = 1
    stack = [t]
    seen = set()
    while stack:
        s = stack.pop()
        if isinstance(s, Var):
            if s.index not in seen:
                if s.index != nxt:
                    return False
                seen.add(s.index)
                nxt += 1
        else:
            stack.extend(reversed(s.args))
    return True


__all__ = [
    "Theory", "FMor", "HomCapExceeded", "identity", "compose", "coproduct", "coproduct_many",
    "injection", "symmetry", "permutation", "hom_enumerate", "hom_count", "elements",
    "elements_by_size", "element_table", "ElementTable", "is_iso", "search_inverse",
    "IsoSearch", "verify_inverse", "random_term", "random_fmor", "TheoryMorphism",
    "MorphismVerdict", "check_theory_morphism", "theory_morphisms_equal", "term_size",
]
