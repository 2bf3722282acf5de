"""Linearization Z⊗T, ring presentations, Leavitt algebras, trivial-ring detection."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .backends import Backend
from .kronecker import KroneckerTheory, commutation_equation, kronecker
from .ncpoly import NCPoly, format_ncpoly
from .terms import App, Equation, Term, Var, rename_ops, substitute
from .theory import FMor, Theory, element_table


# -- ring presentations ----------------------------------------------------

@dataclass
class RingPresentation:
    generators: list
    relations: list                     # (lhs NCPoly, rhs NCPoly)
    unital: bool = True
    name: str = ""

    def to_json(self):
        return {"name": self.name, "generators": list(self.generators), "unital": self.unital,
                "relations": [f"{format_ncpoly(l)} = {format_ncpoly(r)}"
                              for l, r in self.relations]}


def leavitt_generators(a: int):
    return [f"R{i}" for i in range(1, a + 1)] + [f"C{i}" for i in range(1, a + 1)]


def leavitt_presentation(a: int) -> RingPresentation:
    """Generators R1..Ra, C1..Ca; relations C_i R_j = delta_ij and sum_i R_i C_i = 1."""
    if a < 2:
        raise ValueError("Leavitt algebras need a >= 2")
    rels = []
    for i in range(1, a + 1):
        for j in range(1, a + 1):
            rels.append((NCPoly.word((f"C{i}", f"R{j}")), NCPoly.const(1 if i == j else 0)))
    total = NCPoly()
    for i in range(1, a + 1):
        total = total + NCPoly.word((f"R{i}", f"C{i}"))
    rels.append((total, NCPoly.const(1)))
    return RingPresentation(leavitt_generators(a), rels, True, f"L{a}")


def _reduce_mod(p: NCPoly, modulus: int) -> NCPoly:
    if not modulus:
        return p
    return NCPoly({w: c % modulus for w, c in p.terms.items()})


class LeavittNormalizer:
    """Word rewriting ``C_i R_j -> delta_ij`` and ``R_a C_a -> 1 - sum_{i<a} R_i C_i``.

    Applied to the leftmost redex of each monomial; results are cached per word.
    """

    def __init__(self, a: int, modulus=0):
        self.a = a
        self.modulus = modulus
        self.last_R, self.last_C = f"R{a}", f"C{a}"
        self.sum_rhs = [((f"R{i}", f"C{i}"), -1) for i in range(1, a)]
        self._cache = {}

    def _redex(self, w):
        for p in range(len(w) - 1):
            x, y = w[p], w[p + 1]
            if x[0] == "C" and y[0] == "R":
                return p, (((), 1),) if x[1:] == y[1:] else ()
            if x == self.last_R and y == self.last_C:
                return p, (((), 1),) + tuple(self.sum_rhs)
        return None

    def word(self, w) -> NCPoly:
        hit = self._cache.get(w)
        if hit is not None:
            return hit
        r = self._redex(w)
        if r is None:
            out = NCPoly({w: 1})
        else:
            p, rhs = r
            pre, post = w[:p], w[p + 2:]
            acc = {}
            for mid, c in rhs:
                for w2, c2 in self.word(pre + mid + post).terms.items():
                    acc[w2] = acc.get(w2, 0) + c * c2
            out = NCPoly(acc)
        out = _reduce_mod(out, self.modulus)
        self._cache[w] = out
        return out

    def __call__(self, p: NCPoly) -> NCPoly:
        acc = {}
        for w, c in p.terms.items():
            for w2, c2 in self.word(w).terms.items():
                acc[w2] = acc.get(w2, 0) + c * c2
        return _reduce_mod(NCPoly(acc), self.modulus)

    def is_normal(self, w) -> bool:
        return self._redex(w) is None


_NORMALIZERS: dict = {}


def leavitt_normalizer(a: int, modulus=0) -> LeavittNormalizer:
    key = (a, modulus)
    if key not in _NORMALIZERS:
        _NORMALIZERS[key] = LeavittNormalizer(a, modulus)
    return _NORMALIZERS[key]


def leavitt_normalize(a: int, p: NCPoly) -> NCPoly:
    return leavitt_normalizer(a)(p)


def leavitt_critical_pairs(a: int) -> list:
    """Overlaps of the two-letter rules and whether each resolves.

    Returns a list of (overlap word, route 1, route 2, joinable).
    """
    N = leavitt_normalizer(a)
    lhs = [(f"C{i}", f"R{j}") for i in range(1, a + 1) for j in range(1, a + 1)]
    lhs.append((f"R{a}", f"C{a}"))

    def rhs(pair):
        if pair[0][0] == "C":
            return NCPoly.const(1 if pair[0][1:] == pair[1][1:] else 0)
        out = NCPoly.const(1)
        for i in range(1, a):
            out = out - NCPoly.word((f"R{i}", f"C{i}"))
        return out

    out = []
    for l1 in lhs:
        for l2 in lhs:
            if l1[1] != l2[0]:
                continue
            word = (l1[0], l1[1], l2[1])
            r1 = N(rhs(l1) * NCPoly.gen(l2[1]))
            r2 = N(NCPoly.gen(l1[0]) * rhs(l2))
            out.append((word, r1, r2, r1 == r2))
    return out


@dataclass
class RankIsoProof:
    a: int
    row_times_column: NCPoly               # sum_i R_i C_i
    column_times_row: list                 # entries C_i R_j
    ok: bool

    def to_json(self):
        return {"a": self.a,
                "R.C^t": format_ncpoly(self.row_times_column),
                "C_i.R_j": [[format_ncpoly(p) for p in row] for row in self.column_times_row],
                "verified": self.ok}


class NormalizationMismatch(AssertionError):
    pass


def verify_rank_iso(a: int) -> RankIsoProof:
    """Free L_a-modules of rank 1 and rank a are isomorphic: R C^t = [1] and (C_i R_j) = I."""
    N = leavitt_normalizer(a)
    row = NCPoly()
    for i in range(1, a + 1):
        row = row + NCPoly.word((f"R{i}", f"C{i}"))
    row = N(row)
    mat = [[N(NCPoly.word((f"C{i}", f"R{j}"))) for j in range(1, a + 1)]
           for i in range(1, a + 1)]
    ok = row == NCPoly.const(1) and all(
        mat[i][j] == NCPoly.const(1 if i == j else 0) for i in range(a) for j in range(a))
    proof = RankIsoProof(a, row, mat, ok)
    if not ok:
        raise NormalizationMismatch(f"rank isomorphism fails for a={a}: {proof.to_json()}")
    return proof


class LeavittModuleBackend(Backend):
    """Free modules over L_a: an element over n generators is a tuple of n normal forms.

    ``mu(m_1..m_a) = sum_i R_i m_i`` and ``nu_i(m) = C_i m`` (left action).
    """
    kind = "LeavittModule"

    def __init__(self, a: int, modulus=0):
        self.a = a
        self.modulus = modulus
        self.N = leavitt_normalizer(a, modulus)
        self.R = [NCPoly.gen(f"R{i}") for i in range(1, a + 1)]
        self.C = [NCPoly.gen(f"C{i}") for i in range(1, a + 1)]

    def gen(self, i, n):
        return tuple(NCPoly.const(1) if j == i else NCPoly() for j in range(n))

    def _scale(self, p, v):
        return tuple(self.N(p * c) for c in v)

    def _add(self, u, v):
        return tuple(_reduce_mod(x + y, self.modulus) for x, y in zip(u, v))

    def apply(self, op, args, n):
        if op == "add":
            return self._add(args[0], args[1])
        if op == "neg":
            return tuple(_reduce_mod(-x, self.modulus) for x in args[0])
        if op == "zero":
            return tuple(NCPoly() for _ in range(n))
        if op == "mu":
            out = tuple(NCPoly() for _ in range(n))
            for r, m in zip(self.R, args):
                out = self._add(out, self._scale(r, m))
            return out
        if op.startswith("nu"):
            return self._scale(self.C[int(op[2:]) - 1], args[0])
        raise KeyError(op)

    def subst(self, key, m, env, n):
        out = tuple(NCPoly() for _ in range(n))
        for p, v in zip(key, env):
            if not p.is_zero():
                out = self._add(out, self._scale(p, v))
        return out

    def term(self, key, n):
        summands = []
        for j, p in enumerate(key):
            for word, c in p.terms.items():
                t = Var(j + 1)
                for letter in reversed(word):
                    idx = int(letter[1:])
                    if letter[0] == "C":
                        t = App(f"nu{idx}", [t])
                    else:
                        t = App("mu", [t if i == idx else App("zero") for i in range(1, self.a + 1)])
                lit = t if c > 0 else App("neg", [t])
                summands.extend([lit] * abs(c))
        if not summands:
            return App("zero")
        out = summands[0]
        for s in summands[1:]:
            out = App("add", [out, s])
        return out

    def describe(self):
        return {"kind": self.kind, "a": self.a,
                "ring": f"L_{self.a}" + (f" over Z/{self.modulus}" if self.modulus else "")}


# -- group rings -----------------------------------------------------------

def group_ring(G) -> RingPresentation:
    """Generators g0..g{n-1}; relations g_a g_b = g_ab and g_e = 1."""
    names = [f"g{a}" for a in G.elements()]
    rels = [(NCPoly.gen(names[G.identity]), NCPoly.const(1))]
    for a in G.elements():
        for b in G.elements():
            rels.append((NCPoly.word((names[a], names[b])), NCPoly.gen(names[G.mul[a][b]])))
    return RingPresentation(names, rels, True, f"Z[{G.name}]")


def group_ring_multiply(G, u, v):
    """Product of coefficient vectors (indexed by group elements) in ZG."""
    out = [0] * G.order
    for a, x in enumerate(u):
        if x:
            for b, y in enumerate(v):
                if y:
                    out[G.mul[a][b]] += x * y
    return tuple(out)


def group_ring_theory(G) -> Theory:
    """Z⊗GSets(G): modules over ZG, decided by coefficient vectors over the group basis."""
    from .catalogue import gsets_theory
    K, _ = linearize(gsets_theory(G))
    return K.combined


def bounded_homs(T: Theory, m: int, n: int, bound: int) -> list:
    """Morphisms T_m -> T_n of a linearized G-set theory with coordinates in [-bound, bound].

    Each candidate is written as a term (sums of translates of generators),
    decided by the backend and deduplicated, so the count is over distinct
    morphisms rather than coefficient tuples.
    """
    K = T.kronecker
    ab_map, g_map = K.maps
    G = K.factors[1].params["group"]
    names = [g_map[f"g{h}"] for h in G.elements()]
    cells = [(j, h) for j in range(n) for h in G.elements()]
    seen = set()
    comps = []
    for coeffs in itertools.product(range(-bound, bound + 1), repeat=len(cells)):
        parts = []
        for c, (j, h) in zip(coeffs, cells):
            x = App(names[h], [Var(j + 1)])
            lit = x if c > 0 else App(ab_map["neg"], [x])
            parts.extend([lit] * abs(c))
        t = App(ab_map["zero"])
        for s in parts:
            t = App(ab_map["add"], [t, s])
        key = T.key(t, n)
        if key not in seen:
            seen.add(key)
            comps.append(key)
    return [FMor(T, m, n, ks) for ks in itertools.product(comps, repeat=m)]


# -- linearization ---------------------------------------------------------

def linearize(T: Theory):
    """``Z⊗T`` and the linearization morphism ``T -> Z⊗T``."""
    from .catalogue import ab_theory
    K = kronecker(ab_theory(), T)
    return K, K.embeddings[1]


@dataclass
class DerivationStep:
    left: Term
    right: Term
    rule: str              # "axiom" | "theorem" | "congruence" | "symmetry" | "transitivity"
    detail: dict = field(default_factory=dict)

    def to_json(self):
        return {"claim": f"{self.left} = {self.right}", "rule": self.rule,
                "detail": {k: (str(v) if not isinstance(v, (int, list)) else v)
                           for k, v in self.detail.items()}}


@dataclass
class TrivialityVerdict:
    trivial: bool
    theory: str
    steps: list = field(default_factory=list)
    message: str = ""

    def to_json(self):
        return {"theory": self.theory, "trivial": self.trivial, "message": self.message,
                "derivation": [s.to_json() for s in self.steps]}


def detect_trivial_ring(T: Theory, budget=5) -> TrivialityVerdict:
    """Search a derivation of ``x1 = zero`` in Z⊗T.

    Looks for two constants c, d of T that differ in T and a binary T-term
    u with ``u(c, x) = x`` and ``u(d, x) = d``.  The commutation of the zero
    constant with c and d forces ``c = d``, hence
    ``x = u(c, x) = u(d, x) = d = zero``.  ``budget`` bounds the size of u.
    """
    K, _ = linearize(T)
    ab_map, t_map = K.maps
    zero = App(ab_map["zero"])
    consts = [o for o, a in T.signature.operations if a == 0]
    b = T.backend
    name = f"Z⊗{T.name}"
    pairs = [(c, d) for c in consts for d in consts if c != d]
    if not pairs:
        return TrivialityVerdict(False, name, message="T has fewer than two constants")
    tab = element_table(T, 2)
    count = tab.upto(budget)
    x = Var(1)
    for c, d in pairs:
        kc = b.apply(c, [], 1)
        kd = b.apply(d, [], 1)
        if b.equal(kc, kd):
            continue
        env_c = [kc, b.gen(0, 1)]
        env_d = [kd, b.gen(0, 1)]
        for i in range(count):
            u = tab.keys[i]
            if b.equal(b.subst(u, 2, env_c, 1), b.gen(0, 1)) and \
                    b.equal(b.subst(u, 2, env_d, 1), kd):
                u_term = rename_ops(tab.term(i), t_map)
                C, D = App(t_map[c]), App(t_map[d])
                steps = _triviality_steps(zero, C, D, u_term, x)
                return TrivialityVerdict(True, name, steps,
                                         f"u(x1, x2) = {u_term} separates constants {c} and {d}")
    return TrivialityVerdict(False, name,
                             message=f"no separating term of size <= {budget} found")


def _triviality_steps(zero, C, D, u, x):
    uc = substitute(u, [C, x])
    ud = substitute(u, [D, x])
    return [
        DerivationStep(zero, C, "axiom", {"equation": "commutation of zero with " + C.op}),
        DerivationStep(zero, D, "axiom", {"equation": "commutation of zero with " + D.op}),
        DerivationStep(C, zero, "symmetry", {"from": [0]}),
        DerivationStep(C, D, "transitivity", {"from": [2, 1]}),
        DerivationStep(x, uc, "theorem", {"context": 1}),
        DerivationStep(uc, ud, "congruence", {"from": [3], "term": u}),
        DerivationStep(ud, D, "theorem", {"context": 1}),
        DerivationStep(x, ud, "transitivity", {"from": [4, 5]}),
        DerivationStep(x, D, "transitivity", {"from": [7, 6]}),
        DerivationStep(D, zero, "symmetry", {"from": [1]}),
        DerivationStep(x, zero, "transitivity", {"from": [8, 9]}),
    ]


def replay_triviality(T: Theory, verdict: TrivialityVerdict) -> bool:
    """Re-check every derivation step against the presentation of Z⊗T and T's backend."""
    if not verdict.trivial:
        return False
    K, _ = linearize(T)
    ab_map, t_map = K.maps
    back = {v: k for k, v in t_map.items()}
    eqs = {(e.left, e.right) for e in K.combined.presentation.equations}
    b = T.backend
    steps = verdict.steps
    for i, st in enumerate(steps):
        refs = st.detail.get("from", [])
        if any(r >= i for r in refs):
            return False
        if st.rule == "axiom":
            if (st.left, st.right) not in eqs and (st.right, st.left) not in eqs:
                return False
        elif st.rule == "symmetry":
            s = steps[refs[0]]
            if (s.right, s.left) != (st.left, st.right):
                return False
        elif st.rule == "transitivity":
            s1, s2 = steps[refs[0]], steps[refs[1]]
            if s1.right != s2.left or (s1.left, s2.right) != (st.left, st.right):
                return False
        elif st.rule == "theorem":
            n = st.detail.get("context", 1)
            try:
                l = rename_ops(st.left, back)
                r = rename_ops(st.right, back)
                if not T.equal(l, r, n):
                    return False
            except Exception:
                return False
        elif st.rule == "congruence":
            s = steps[refs[0]]
            u = st.detail["term"]
            if substitute(u, [s.left, Var(1)]) != st.left or \
                    substitute(u, [s.right, Var(1)]) != st.right:
                return False
        else:
            return False
    last = steps[-1]
    return isinstance(last.left, Var) and last.left.index == 1 and \
        last.right == App(ab_map["zero"])
