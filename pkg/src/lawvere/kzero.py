"""K0 of a theory with certificates, the assembly map at pi_0, pushforwards, automorphisms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .backends import RenamedBackend, ReducedWordBackend, TRSBackend
from .groups import FiniteGroup
from .models import FiniteModel, SearchTooLarge, check_model, free_model, iter_models
from .theory import (FMor, HomCapExceeded, Theory, TheoryMorphism, compose, element_table,
                     elements, first_occurrence_ordered, hom_enumerate, identity,
                     search_inverse, uses_all_generators, verify_inverse)

INFINITE = 0


def order_name(order):
    if order is None:
        return "unknown"
    return "Z" if order == INFINITE else f"Z/{order}"


@dataclass
class K0Certificate:
    """``status`` is ``infinite``, ``finite`` or ``inconclusive``; ``order`` 0 means Z."""
    theory: Theory
    status: str
    order: Optional[int] = None
    witness: Optional[tuple] = None           # (u: T1 -> T_{1+d}, v inverse)
    invariant: Optional[FiniteModel] = None
    bounds: dict = field(default_factory=dict)
    minimality: str = ""
    searched: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def conclusive(self):
        return self.status != "inconclusive"

    @property
    def group(self):
        return order_name(self.order) if self.conclusive else "unknown"

    def to_json(self):
        out = {"theory": self.theory.name, "status": self.status, "group": self.group,
               "generator": "[T1]", "bounds": self.bounds}
        if self.order is not None:
            out["order"] = "infinite" if self.order == INFINITE else self.order
        if self.witness is not None:
            u, v = self.witness
            out["torsion_witness"] = {"u": u.to_json(), "v": v.to_json()}
        if self.invariant is not None:
            k = self.invariant.size
            out["separating_invariant"] = {
                "model": self.invariant.to_json(),
                "hom_counts": {str(m): k ** m for m in range(0, 4)},
            }
        if self.minimality:
            out["minimality"] = self.minimality
        if self.searched:
            out["searched"] = self.searched
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _base_backend(b):
    while isinstance(b, RenamedBackend):
        b = b.base
    return b


def _rename_invariant(T: Theory) -> bool:
    """Canonical forms commute with renaming variables (rewriting and reduced words)."""
    return isinstance(_base_backend(T.backend), (TRSBackend, ReducedWordBackend))


def is_degenerate(T: Theory) -> bool:
    """x1 equals a constant in T_1, so every model is a point."""
    if not T.finite:
        return False
    els = T.backend.elements(1)
    return els is not None and len(els) == 1 and bool(T.backend.elements(0))


def find_iso(T: Theory, m: int, term_bound: int, cap=100_000):
    """An iso ``T_1 -> T_m`` with all terms of size <= term_bound, or None.

    Returns (u, v, info).  Candidates u are pruned to terms using every
    generator and, when canonical forms are renaming-invariant, to terms whose
    variables first occur in order; both prunings keep at least one
    representative of every iso class of candidates.
    """
    b = T.backend
    degenerate = is_degenerate(T)
    ordered = _rename_invariant(T)
    if T.finite and term_bound is None:
        keys = elements(T, m, None)
    else:
        tab = element_table(T, m)
        keys = tab.keys[:tab.upto(term_bound)]
    tried = 0
    for key in keys:
        if not degenerate:
            t = b.term(key, m)
            if not uses_all_generators(t, m) or (ordered and not first_occurrence_ordered(t)):
                continue
        tried += 1
        u = FMor(T, 1, m, (key,))
        try:
            res = search_inverse(u, None if (T.finite and term_bound is None) else term_bound, cap)
        except HomCapExceeded:
            continue
        if res.found:
            return u, res.inverse, {"m": m, "candidates": tried}
    return None, None, {"m": m, "candidates": tried}


def find_separating_model(T: Theory, cap=4, node_limit=10_000) -> Optional[FiniteModel]:
    """A model with at least two elements, preferring the free model on one generator."""
    if T.finite:
        els = T.backend.elements(1)
        if els is not None and len(els) >= 2 and len(els) <= 256:
            M, _ = free_model(T, 1)
            return M
        if is_degenerate(T):
            return None
    for k in range(2, cap + 1):
        try:
            for M in iter_models(T, k, node_limit=node_limit):
                return M
        except SearchTooLarge:
            continue
    return None


def k0(T: Theory, term_bound=6, arity_bound=6, cap=4, node_limit=10_000,
       witness=None) -> K0Certificate:
    """The cyclic group K0(T) generated by [T1], with evidence.

    ``witness`` optionally supplies an iso pair (u, v) found elsewhere (e.g.
    pushed along a theory morphism); it is verified and the smaller orders are
    then searched with ``term_bound``.
    """
    bounds = {"term_bound": term_bound, "arity_bound": arity_bound, "model_cap": cap}
    if witness is None:
        M = find_separating_model(T, cap, node_limit)
        if M is not None:
            return K0Certificate(T, "infinite", INFINITE, invariant=M, bounds=bounds,
                                 minimality="exact")
    searched = []
    top = arity_bound
    if witness is not None:
        u, v = witness
        if not verify_inverse(u, v):
            raise ValueError("supplied witness is not an isomorphism")
        top = u.dst - 1
    for m in range(2, top + 1):
        u, v, info = find_iso(T, m, term_bound)
        searched.append(info)
        if u is not None:
            return K0Certificate(T, "finite", m - 1, (u, v), bounds=bounds,
                                 minimality=_minimality(searched, term_bound, m), searched=searched)
    if witness is not None:
        u, v = witness
        return K0Certificate(T, "finite", u.dst - 1, (u, v), bounds=bounds,
                             minimality=_minimality(searched, term_bound), searched=searched,
                             notes=["witness supplied and verified"])
    return K0Certificate(T, "inconclusive", bounds=bounds, searched=searched,
                         notes=["no finite model with two or more elements and no iso "
                                "T1 -> Tm found within bounds"])


def _minimality(searched, term_bound, found_m=None):
    smaller = [s["m"] for s in searched if s["m"] != found_m]
    if found_m == 2:
        return "exact: order 1 is the least possible"
    if not smaller:
        return "search-bounded: smaller orders not searched"
    return f"search-bounded: no iso T1 -> Tm for m in {smaller} with terms of size <= {term_bound}"


def verify_certificate(cert: K0Certificate) -> bool:
    """Re-check the evidence carried by a certificate."""
    T = cert.theory
    if cert.status == "finite":
        u, v = cert.witness
        return (u.theory is T and u.src == 1 and u.dst == cert.order + 1
                and verify_inverse(u, v))
    if cert.status == "infinite":
        M = cert.invariant
        return M.size >= 2 and check_model(T, M.tables, M.size).valid
    return True


def k0_linearized(T: Theory, source: Optional[K0Certificate] = None, term_bound=3,
                  arity_bound=6, cap=4) -> K0Certificate:
    """K0(Z⊗T), reusing the torsion witness of T pushed along the linearization."""
    from .linearization import linearize
    K, lin = linearize(T)
    Z = K.combined
    if source is None:
        source = k0(T)
    if source.status == "finite":
        u, v = source.witness
        cert = k0(Z, term_bound=term_bound, arity_bound=arity_bound, cap=cap,
                  witness=(lin.push(u), lin.push(v)))
        cert.notes.append(f"torsion witness of {T.name} pushed along the linearization")
        return cert
    return k0(Z, term_bound=term_bound, arity_bound=arity_bound, cap=cap)


# -- maps between cyclic groups ------------------------------------------

@dataclass
class CyclicMap:
    """Homomorphism of cyclic groups sending the generator to ``image`` times the generator."""
    source: Optional[int]
    target: Optional[int]
    image: int = 1
    kind: str = ""
    checks: dict = field(default_factory=dict)
    status: str = "ok"

    @property
    def well_defined(self):
        if self.source is None or self.target is None:
            return False
        if self.target == INFINITE:
            return self.source == INFINITE or self.image == 0
        if self.source == INFINITE:
            return True
        return (self.source * self.image) % self.target == 0

    def to_json(self):
        return {"source": order_name(self.source), "target": order_name(self.target),
                "generator_image": self.image, "kind": self.kind, "status": self.status,
                "well_defined": self.well_defined, "checks": self.checks}


def classify_generator_map(n, d) -> str:
    """Kind of the map Z/n -> Z/d (0 meaning Z) sending generator to generator."""
    if d == 1:
        return "zero" if n != 1 else "iso"
    if n == d:
        return "iso"
    return "surjective-not-injective"


def _from_certs(src: K0Certificate, tgt: K0Certificate) -> CyclicMap:
    if not (src.conclusive and tgt.conclusive):
        return CyclicMap(src.order, tgt.order, 1, "unknown", status="inconclusive")
    f = CyclicMap(src.order, tgt.order, 1, classify_generator_map(src.order, tgt.order))
    if not f.well_defined:
        f.status = "inconsistent"
    return f


@dataclass
class AssemblyReport:
    theory: str
    map: CyclicMap
    source: K0Certificate
    ab: K0Certificate
    target: K0Certificate

    def to_json(self):
        return {"theory": self.theory,
                "map": self.map.to_json(),
                "description": f"Z ⊗ {self.source.group} -> {self.target.group}",
                "k0_ab": self.ab.to_json(),
                "k0_source": self.source.to_json(),
                "k0_target": self.target.to_json()}


def assembly_pi0(T: Theory, term_bound=6, arity_bound=6) -> AssemblyReport:
    """K0(Ab) ⊗ K0(T) -> K0(Z⊗T), [Ab_1]⊗[T_1] -> [(Z⊗T)_1].

    K0(Ab) is certified infinite cyclic, so the source is K0(T) itself.
    """
    from .catalogue import ab_theory
    ab = k0(ab_theory())
    src = k0(T, term_bound, arity_bound)
    tgt = k0_linearized(T, src)
    f = _from_certs(src, tgt)
    if ab.order != INFINITE:
        f.status = "inconsistent"
    f.checks["source_certificate"] = verify_certificate(src)
    f.checks["target_certificate"] = verify_certificate(tgt)
    f.checks["ab_certificate"] = verify_certificate(ab)
    f.checks["multiplication_of_generators"] = "1 * [T1] -> [(Z⊗T)1]"
    return AssemblyReport(T.name, f, src, ab, tgt)


@dataclass
class PushforwardReport:
    morphism: TheoryMorphism
    map: CyclicMap
    source: K0Certificate
    target: K0Certificate

    def to_json(self):
        return {"morphism": self.morphism.to_json(), "map": self.map.to_json(),
                "surjective": self.map.status == "ok",
                "k0_source": self.source.to_json(), "k0_target": self.target.to_json()}


def k0_pushforward(L: TheoryMorphism, term_bound=6, arity_bound=6) -> PushforwardReport:
    """The induced map K0(S) -> K0(T): [S_1] -> [T_1], hence surjective.

    When K0(S) is finite the pushed torsion witness is verified in T, which
    shows the target order divides the source order.
    """
    src = k0(L.source, term_bound, arity_bound)
    tgt = k0(L.target, term_bound, arity_bound)
    f = _from_certs(src, tgt)
    f.checks["generator_to_generator"] = L.push(identity(L.source, 1)) == identity(L.target, 1)
    if src.status == "finite":
        u, v = src.witness
        f.checks["pushed_witness_is_iso"] = verify_inverse(L.push(u), L.push(v))
        if not f.checks["pushed_witness_is_iso"]:
            f.status = "inconsistent"
    if f.status == "ok" and not f.checks["generator_to_generator"]:
        f.status = "inconsistent"
    return PushforwardReport(L, f, src, tgt)


# -- ring structure and automorphisms -------------------------------------

class NotCommutative(ValueError):
    pass


@dataclass
class K0Ring:
    theory: str
    order: int
    unit: int = 1
    table: Optional[list] = None

    def multiply(self, a: int, b: int) -> int:
        """[T_a][T_b] = [T_ab]."""
        return a * b if self.order == INFINITE else (a * b) % self.order

    def to_json(self):
        out = {"theory": self.theory, "additive_group": order_name(self.order),
               "unit": "[T1]", "product": "[Tm]*[Tn] = [Tmn]",
               "generator_squared": f"{self.multiply(1, 1)}*[T1]"}
        if self.table is not None:
            out["table"] = self.table
        return out


def k0_ring(T: Theory, term_bound=6, arity_bound=6) -> K0Ring:
    from .kronecker import is_commutative_theory
    verdict = is_commutative_theory(T)
    if verdict.verdict != "commutative":
        raise NotCommutative(f"{T.name} is {verdict.verdict}; K0 carries no ring structure here")
    cert = k0(T, term_bound, arity_bound)
    if not cert.conclusive:
        raise ValueError(f"K0({T.name}) not determined within bounds")
    R = K0Ring(T.name, cert.order)
    if cert.order != INFINITE:
        R.table = [[R.multiply(a, b) for b in range(cert.order)] for a in range(cert.order)]
    return R


@dataclass
class AutGroup:
    theory: str
    n: int
    elements: list
    group: Optional[FiniteGroup]
    closed: bool
    exhaustive: bool

    @property
    def order(self):
        return len(self.elements)

    def to_json(self):
        out = {"theory": self.theory, "n": self.n, "order": self.order,
               "closed": self.closed, "exhaustive": self.exhaustive,
               "elements": [e.to_json()["components"] for e in self.elements]}
        if self.group is not None:
            out["table"] = [list(r) for r in self.group.mul]
        return out


def aut_group(T: Theory, n: int, bound=None, cap=100_000) -> AutGroup:
    """Invertible endomorphisms of T_n among those with components of size <= bound."""
    exhaustive = bound is None
    if exhaustive and not T.finite:
        raise ValueError(f"{T.name} has infinite hom-sets; give a size bound")
    ends = hom_enumerate(T, n, n, bound, cap)
    index = {f.keys: i for i, f in enumerate(ends)}
    ident = identity(T, n)
    inv = {}
    for i, f in enumerate(ends):
        if i in inv:
            continue
        for j, g in enumerate(ends):
            if compose(g, f) == ident and compose(f, g) == ident:
                inv[i], inv[j] = j, i
                break
    auts = sorted(inv)
    pos = {i: p for p, i in enumerate(auts)}
    mul = []
    closed = True
    for a in auts:
        row = []
        for b in auts:
            k = index.get(compose(ends[a], ends[b]).keys)   # a after b
            if k is None or k not in pos:
                closed = False
                row.append(-1)
            else:
                row.append(pos[k])
        mul.append(row)
    group = FiniteGroup(tuple(tuple(r) for r in mul), f"Aut({T.name}_{n})") if closed else None
    return AutGroup(T.name, n, [ends[i] for i in auts], group, closed, exhaustive)
