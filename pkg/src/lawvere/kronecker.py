"""Kronecker products of theories and the bilinear functor F_S x F_T -> F_{S⊗T}.

The generator of ``(S⊗T)_{mn}`` indexed by the pair (i, j) with i < m, j < n
is ``x_{i*n + j + 1}``.  With this convention the left distributivity map
``(m+m')n = mn + m'n`` is literally the identity, while the right one is
the block permutation returned by :func:`right_distributivity`.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .backends import (ActionProductBackend, Backend, ModuleBackend, RenamedBackend,
                       SetBackend, TRSBackend, TrivialBackend)
from .rewrite import RewriteSystem, complete
from .terms import App, Equation, Presentation, Signature, Term, Var, rename_ops
from .theory import (FMor, Theory, TheoryMorphism, check_theory_morphism, compose,
                     coproduct, identity, permutation, random_fmor, reindex, gens)


# -- presentations ---------------------------------------------------------

def commutation_equation(f: str, m: int, g: str, n: int) -> Equation:
    """``f(g(row 1), .., g(row m)) = g(f(col 1), .., f(col n))`` over m*n variables."""
    def x(i, j):
        return Var(i * n + j + 1)
    lhs = App(f, [App(g, [x(i, j) for j in range(n)]) for i in range(m)])
    rhs = App(g, [App(f, [x(i, j) for i in range(m)]) for j in range(n)])
    return Equation(lhs, rhs, m * n)


def _rename_eq(eq: Equation, mapping) -> Equation:
    return Equation(rename_ops(eq.left, mapping), rename_ops(eq.right, mapping), eq.context)


def _name_maps(factors: Sequence[Theory], prefixes):
    names = [f.signature.names for f in factors]
    flat = [nm for ns in names for nm in ns]
    clash = len(flat) != len(set(flat))
    maps = []
    for i, ns in enumerate(names):
        maps.append({nm: (prefixes[i] + nm if clash else nm) for nm in ns})
    return maps


def combined_presentation(factors: Sequence[Theory], maps, name) -> Presentation:
    ops = []
    eqs = []
    for T, mp in zip(factors, maps):
        ops += [(mp[o], a) for o, a in T.signature.operations]
        eqs += [_rename_eq(e, mp) for e in T.presentation.equations]
    for (i, S), (j, T) in itertools.combinations(enumerate(factors), 2):
        for f, m in S.signature.operations:
            for g, n in T.signature.operations:
                eqs.append(commutation_equation(maps[i][f], m, maps[j][g], n))
    return Presentation(name, Signature(tuple(ops)), tuple(eqs))


# -- backend synthesis -----------------------------------------------------

def _leaves(T: Theory, mapping):
    """Flatten nested Kronecker factors into (leaf theory, leaf-op -> outer name) pairs."""
    if T.kind == "Kronecker":
        out = []
        for leaf, inner in T.params["leaves"]:
            out.append((leaf, {o: mapping[c] for o, c in inner.items()}))
        return out
    return [(T, mapping)]


def _abelian_modulus(T: Theory):
    if T.kind == "Ab":
        return T.params.get("modulus", 0)
    if T.kind == "Groups":
        return 0
    return None


def _to_module_names(T: Theory, mp):
    if T.kind == "Groups":
        canon = {"mul": "add", "inv": "neg", "e": "zero"}
    else:
        canon = {"add": "add", "neg": "neg", "zero": "zero"}
    return {mp[o]: canon[o] for o in T.arity}


def _has_constant(T):
    return any(a == 0 for _, a in T.signature.operations)


def synthesize_backend(leaves, presentation: Presentation, completion_bounds=None):
    """A decision procedure for the product of the given leaf theories.

    Returns (backend, note).  Known identifications are used where they
    apply; otherwise the combined presentation is completed.
    """
    leaves = [(T, mp) for T, mp in leaves if T.signature.operations]
    if not leaves:
        return SetBackend(), "no operations: theory of sets"
    if len(leaves) == 1:
        T, mp = leaves[0]
        return RenamedBackend(T.backend, {mp[o]: o for o in T.arity}), f"renamed {T.name}"
    for k, (T, mp) in enumerate(leaves):
        if T.kind == "GSets":
            rest = leaves[:k] + leaves[k + 1:]
            base, note = synthesize_backend(rest, presentation, completion_bounds)
            G = T.params["group"]
            group_ops = {mp[nm]: a for a, nm in enumerate(T.backend.names)}
            base_names = [nm for L, m2 in rest for nm in m2.values()]
            backend = ActionProductBackend(base, {nm: nm for nm in base_names}, G, group_ops)
            return backend, f"{G.name}-action on ({note})"
    if len(leaves) == 2:
        (S, ms), (T, mt) = leaves
        ks, kt = _abelian_modulus(S), _abelian_modulus(T)
        if ks is not None and kt is not None:
            k = math.gcd(ks, kt)
            mapping = _to_module_names(S, ms)
            mapping.update(_to_module_names(T, mt))
            ring = f"Z/{k}" if k else "Z"
            return (RenamedBackend(ModuleBackend(k), mapping),
                    f"both operation sets collapse to one {ring}-module structure")
        for A, ma, B, mb in ((S, ms, T, mt), (T, mt, S, ms)):
            if A.kind in ("Boole", "Rings") and _has_constant(B):
                const = next(ma[o] for o, a in A.signature.operations if a == 0)
                return TrivialBackend(const), (f"constants of {A.name} are forced equal by "
                                               f"a constant of {B.name}: trivial theory")
        for A, ma, B, mb in ((S, ms, T, mt), (T, mt, S, ms)):
            k = _abelian_modulus(A)
            if k is not None and A.kind == "Ab" and B.kind == "Cantor":
                from .linearization import LeavittModuleBackend
                a = B.params["a"]
                mapping = {ma[o]: o for o in A.arity}
                mapping.update({mb[o]: o for o in B.arity})
                return (RenamedBackend(LeavittModuleBackend(a, k), mapping),
                        f"free modules over the Leavitt algebra L_{a}")
    bounds = dict(completion_bounds or {})
    res = complete(presentation, **bounds)
    if res.ok:
        return TRSBackend(res.system), "completed rewrite system"
    rules = [res.records[i].rule for i in res.active]
    return TRSBackend(RewriteSystem(rules), certified=False), f"partial rewrite system ({res.status})"


# -- the Kronecker product -------------------------------------------------

class KroneckerTheory:
    """``S1 ⊗ ... ⊗ Sk`` with embeddings of every factor."""

    def __init__(self, factors: Sequence[Theory], name=None, completion_bounds=None):
        self.factors = list(factors)
        k = len(self.factors)
        prefixes = ["l_", "r_"] if k == 2 else [f"t{i + 1}_" for i in range(k)]
        self.maps = _name_maps(self.factors, prefixes)
        name = name or "_x_".join(f.name for f in self.factors)
        p = combined_presentation(self.factors, self.maps, name)
        leaves = []
        for T, mp in zip(self.factors, self.maps):
            leaves += _leaves(T, mp)
        backend, note = synthesize_backend(leaves, p, completion_bounds)
        self.note = note
        self.combined = Theory(p, backend, kind="Kronecker",
                               params={"factors": self.factors, "leaves": leaves})
        self.combined.kronecker = self
        self.embeddings = [TheoryMorphism(T, self.combined,
                                          {o: App(mp[o], [Var(i + 1) for i in range(a)])
                                           for o, a in T.signature.operations},
                                          name=f"{T.name}->{name}")
                           for T, mp in zip(self.factors, self.maps)]

    @property
    def left(self):
        return self.factors[0]

    @property
    def right(self):
        return self.factors[-1]

    def check_embeddings(self):
        return [check_theory_morphism(L) for L in self.embeddings]

    def describe(self):
        return {"theory": self.combined.name,
                "factors": [f.name for f in self.factors],
                "operations": [f"{o}/{a}" for o, a in self.combined.signature.operations],
                "equations": len(self.combined.presentation.equations),
                "backend": self.combined.backend.describe() | {"identification": self.note}}


def kronecker(S: Theory, T: Theory, **kw) -> KroneckerTheory:
    return KroneckerTheory([S, T], **kw)


def kronecker_many(factors: Sequence[Theory], **kw) -> KroneckerTheory:
    return KroneckerTheory(factors, **kw)


# -- r x f and the bilinear map -------------------------------------------

def times_left(r: int, f: FMor) -> FMor:
    """r-fold block sum of f: component ``k*s + i`` is f_i on the k-th target block."""
    T = f.theory
    s, t = f.src, f.dst
    N = r * t
    keys = []
    for k in range(r):
        keys += reindex(f, gens(T, N, k * t, t), N).keys
    return FMor(T, r * s, N, keys)


def times_right(f: FMor, r: int) -> FMor:
    """Interleaved r-fold sum: component ``i*r + k`` is f_i with x_j -> x_{j*r + k}."""
    T = f.theory
    s, t = f.src, f.dst
    N = t * r
    b = T.backend
    keys = [None] * (s * r)
    for k in range(r):
        env = [b.gen(j * r + k, N) for j in range(t)]
        for i, key in enumerate(f.keys):
            keys[i * r + k] = b.subst(key, t, env, N)
    return FMor(T, s * r, N, keys)


def right_distributivity(T: Theory, m: int, n: int, n2: int) -> FMor:
    """Permutation of ``T_{m(n+n2)}`` taking pair order to the block order ``mn + mn2``.

    Component p (in block order) is the generator of the same pair in
    row-major order on ``m x (n+n2)``.
    """
    w = n + n2
    perm = []
    for i in range(m):
        for j in range(n):
            perm.append(i * w + j)
    for i in range(m):
        for j in range(n2):
            perm.append(i * w + n + j)
    return permutation(T, perm)


def _inverse_perm(T, p: FMor):
    n = p.src
    idx = [None] * n
    for pos, key in enumerate(p.keys):
        j = next(j for j in range(n) if T.backend.gen(j, n) == key)
        idx[j] = pos
    return permutation(T, idx)


@dataclass
class BilinearWitness:
    """The bilinear map P(m, n) = mn for a two-factor Kronecker product."""
    kron: KroneckerTheory

    def objects(self, m, n):
        return m * n

    def delta_left(self, m, m2, n):
        return identity(self.kron.combined, (m + m2) * n)

    def delta_right(self, m, n, n2):
        return right_distributivity(self.kron.combined, m, n, n2)

    def on_morphisms(self, f: FMor, g: FMor) -> FMor:
        return bilinear_on_morphisms(self, f, g)


class SquareViolation(AssertionError):
    pass


def _both_composites(kron: KroneckerTheory, f: FMor, g: FMor, pos=(0, 1)):
    S_emb, T_emb = kron.embeddings[pos[0]], kron.embeddings[pos[1]]
    F = S_emb.push(f)
    G = T_emb.push(g)
    m, m2 = f.src, f.dst
    n, n2 = g.src, g.dst
    a = compose(times_right(F, n2), times_left(m, G))
    b = compose(times_left(m2, G), times_right(F, n))
    return a, b


def bilinear_on_morphisms(W, f: FMor, g: FMor, check=True) -> FMor:
    """``P(f, g) : T_{mn} -> T_{m'n'}``; both composites of the commuting square are compared."""
    kron = W.kron if isinstance(W, BilinearWitness) else W
    a, b = _both_composites(kron, f, g)
    if check and a != b:
        raise SquareViolation(f"P({f}, {g}) composites differ: {a} vs {b}")
    return a


# -- axiom checks ----------------------------------------------------------

@dataclass
class BilinearReport:
    pairs_checked: int = 0
    square_failures: int = 0
    delta_failures: int = 0
    monoidality_failures: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not (self.square_failures or self.delta_failures or self.monoidality_failures)

    def to_json(self):
        return {"pairs_checked": self.pairs_checked,
                "square_failures": self.square_failures,
                "delta_failures": self.delta_failures,
                "monoidality_failures": self.monoidality_failures,
                "failures": self.failures[:10]}


def _sample_fmor(T: Theory, rng, arity_bound, src=None, dst=None):
    from .theory import can_random
    for _ in range(100):
        m = rng.randint(0, arity_bound) if src is None else src
        n = rng.randint(0, arity_bound) if dst is None else dst
        if m == 0 or can_random(T, n):
            return random_fmor(T, m, n, rng)
    raise ValueError(f"cannot sample morphisms of {T.name}")


def check_bilinear_axioms(W, sample_count=100, arity_bound=3, seed=0) -> BilinearReport:
    """Sampled checks of the bilinear structure.

    (a) the commuting square defining P(f, g);
    (b) distributivity: delta maps are identities on objects, natural in
        both variables, and compatible with each other;
    (c) one-variable strong monoidality: P(-, g) and P(f, -) preserve
        composition and identities, send sums to sums through the delta
        maps, and restrict along the unit to the block sums r x f.
    """
    kron = W.kron if isinstance(W, BilinearWitness) else W
    W = W if isinstance(W, BilinearWitness) else BilinearWitness(kron)
    S, T = kron.factors
    K = kron.combined
    rng = random.Random(seed)
    rep = BilinearReport()

    def fail(kind, msg):
        setattr(rep, kind, getattr(rep, kind) + 1)
        rep.failures.append({"axiom": kind, "detail": msg})

    def P(f, g):
        a, b = _both_composites(kron, f, g)
        return a, b

    for _ in range(sample_count):
        f = _sample_fmor(S, rng, arity_bound)
        g = _sample_fmor(T, rng, arity_bound)
        rep.pairs_checked += 1
        a, b = P(f, g)
        if a != b:
            fail("square_failures", f"square for {f} and {g}")
        pfg = a
        # (b) distributivity
        f2 = _sample_fmor(S, rng, arity_bound)
        g2 = _sample_fmor(T, rng, arity_bound)
        if (f.src + f2.src) * g.src != f.src * g.src + f2.src * g.src:
            fail("delta_failures", "left distributivity on objects")
        lhs = P(coproduct(f, f2), g)[0]
        rhs = coproduct(pfg, P(f2, g)[0])
        if lhs != rhs:
            fail("delta_failures", f"left naturality for {f}, {f2}, {g}")
        m, M = f.src, f.dst
        d_src = W.delta_right(m, g.src, g2.src)
        d_tgt = W.delta_right(M, g.dst, g2.dst)
        lhs = compose(P(f, coproduct(g, g2))[0], d_src)
        rhs = compose(d_tgt, coproduct(pfg, P(f, g2)[0]))
        if lhs != rhs:
            fail("delta_failures", f"right naturality for {f}, {g}, {g2}")
        # compatibility: both routes from (m+m')(n+n') to the four-block sum agree
        m2, n, n2 = f2.src, g.src, g2.src
        route1 = compose(W.delta_right(m + m2, n, n2),
                         coproduct(W.delta_left(m, m2, n), W.delta_left(m, m2, n2)))
        route2 = compose(W.delta_left(m, m2, n + n2),
                         compose(coproduct(W.delta_right(m, n, n2), W.delta_right(m2, n, n2)),
                                 _middle_swap(K, m * n, m * n2, m2 * n, m2 * n2)))
        if route1 != route2:
            fail("delta_failures", f"compatibility at ({m}+{m2})({n}+{n2})")
        # (c) strong monoidality of each partial functor
        f3 = _sample_fmor(S, rng, arity_bound, src=f.dst)
        if P(compose(f3, f), identity(T, g.src))[0] != compose(
                P(f3, identity(T, g.src))[0], P(f, identity(T, g.src))[0]):
            fail("monoidality_failures", f"P(-, id) on {f3} after {f}")
        g3 = _sample_fmor(T, rng, arity_bound, src=g.dst)
        if P(identity(S, f.src), compose(g3, g))[0] != compose(
                P(identity(S, f.src), g3)[0], P(identity(S, f.src), g)[0]):
            fail("monoidality_failures", f"P(id, -) on {g3} after {g}")
        if P(identity(S, f.src), identity(T, g.src))[0] != identity(K, f.src * g.src):
            fail("monoidality_failures", "P(id, id) is not the identity")
        if P(identity(S, 1), g)[0] != kron.embeddings[1].push(g):
            fail("monoidality_failures", f"unit: P(id_1, {g}) is not {g}")
        if P(identity(S, f.src), g)[0] != times_left(f.src, kron.embeddings[1].push(g)):
            fail("monoidality_failures", f"P(id_{f.src}, g) differs from the block sum")
        if P(f, identity(T, g.src))[0] != times_right(kron.embeddings[0].push(f), g.src):
            fail("monoidality_failures", f"P(f, id_{g.src}) differs from the interleaved sum")
    return rep


def _middle_swap(T: Theory, a, b, c, d) -> FMor:
    """Permutation reordering blocks (a, b, c, d) as (a, c, b, d)."""
    starts = [0, a, a + b, a + b + c]
    perm = list(range(starts[0], starts[0] + a)) + list(range(starts[2], starts[2] + c)) + \
        list(range(starts[1], starts[1] + b)) + list(range(starts[3], starts[3] + d))
    return permutation(T, perm)


# -- triple products -------------------------------------------------------

def triple_factors(W: KroneckerTheory, f: FMor, g: FMor, h: FMor):
    """The three one-variable morphisms of the flat product of three theories."""
    F, G, H = (W.embeddings[i].push(x) for i, x in enumerate((f, g, h)))
    return F, G, H


def triple_orders(W: KroneckerTheory, f: FMor, g: FMor, h: FMor) -> dict:
    """P(f, g, h) computed by applying the three factors in each of the six orders."""
    F, G, H = triple_factors(W, f, g, h)
    dims = {0: [f.src, f.dst], 1: [g.src, g.dst], 2: [h.src, h.dst]}
    out = {}
    for order in itertools.permutations(range(3)):
        state = [dims[0][0], dims[1][0], dims[2][0]]
        acc = None
        for i in order:
            l, m, n = state
            if i == 0:
                step = times_right(F, m * n)
            elif i == 1:
                step = times_left(l, times_right(G, n))
            else:
                step = times_left(l * m, H)
            acc = step if acc is None else compose(step, acc)
            state[i] = dims[i][1]
        out["".join("fgh"[i] for i in order)] = acc
    return out


def iterated_pairings(W: KroneckerTheory, f: FMor, g: FMor, h: FMor):
    """P(P(f, g), h) and P(f, P(g, h)) realized in the flat triple product."""
    F, G, H = triple_factors(W, f, g, h)
    l, l2 = f.src, f.dst
    m, m2 = g.src, g.dst
    n, n2 = h.src, h.dst
    fg = compose(times_right(F, m2), times_left(l, G))            # T_{lm} -> T_{l'm'}
    left = compose(times_right(fg, n2), times_left(l * m, H))
    gh = compose(times_right(G, n2), times_left(m, H))            # T_{mn} -> T_{m'n'}
    right = compose(times_right(F, m2 * n2), times_left(l, gh))
    return left, right


# -- commutative theories --------------------------------------------------

@dataclass
class CommutativityVerdict:
    verdict: str                     # "commutative" | "non-commutative" | "inconclusive"
    derivations: list = field(default_factory=list)
    witness: Optional[dict] = None
    message: str = ""

    def to_json(self):
        return {"verdict": self.verdict, "derivations": self.derivations,
                "witness": self.witness, "message": self.message}


def self_commutation_equations(T: Theory):
    ops = T.signature.operations
    return [((f, m), (g, n), commutation_equation(f, m, g, n))
            for (f, m), (g, n) in itertools.product(ops, repeat=2)]


def is_commutative_theory(T: Theory, proof_budget=10_000, model_size_bound=6,
                          model_cap=2_000_000, node_limit=20_000) -> CommutativityVerdict:
    """Decide whether every operation is a homomorphism for every operation.

    Each commutation equation is decided by the backend.  A failure is
    confirmed by a finite model and an assignment violating it, searched by
    increasing carrier size.
    """
    from .backends import Inconclusive
    from .models import find_violation
    from .rewrite import BudgetExhausted

    failing = []
    derivations = []
    undecided = []
    b = T.backend
    trs = getattr(b, "trs", None)
    saved = trs.step_budget if trs is not None else None
    try:
        if trs is not None:
            trs.step_budget = proof_budget
        decided = []
        for (f, m), (g, n), eq in self_commutation_equations(T):
            try:
                lk = b.key_of(eq.left, eq.context)
                rk = b.key_of(eq.right, eq.context)
                decided.append((eq, lk, rk, b.equal(lk, rk)))
            except (Inconclusive, BudgetExhausted):
                undecided.append(eq)
    finally:
        if trs is not None:
            trs.step_budget = saved
    for eq, lk, rk, same in decided:
        if same:
            derivations.append({"equation": str(eq),
                                "normal_form": str(b.term(lk, eq.context)),
                                "decided_by": b.kind})
        else:
            failing.append(eq)
    if not failing and not undecided:
        return CommutativityVerdict("commutative", derivations)
    candidates = failing + undecided
    wit = find_violation(T, candidates, model_size_bound, cap=model_cap, node_limit=node_limit)
    if wit is not None:
        wit["kind"] = "finite-model"
        return CommutativityVerdict("non-commutative", derivations, wit)
    if failing and getattr(b, "certified", True):
        # the free model on the equation's variables is itself a separating model
        eq = failing[0]
        wit = {"kind": "free-model", "equation": str(eq), "size": None,
               "left_normal_form": str(b.term(b.key_of(eq.left, eq.context), eq.context)),
               "right_normal_form": str(b.term(b.key_of(eq.right, eq.context), eq.context))}
        return CommutativityVerdict("non-commutative", derivations, wit,
                                    f"no finite witness of size <= {model_size_bound}; "
                                    "the decided free model separates the two sides")
    msg = (f"{len(failing)} commutation equation(s) fail in free models but no violating "
           f"model of size <= {model_size_bound} was found")
    return CommutativityVerdict("inconclusive", derivations, None, msg)
