"""Finite groups given by multiplication tables."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Optional, Sequence


@dataclass(frozen=True)
class FiniteGroup:
    """Group on ``{0..order-1}`` with ``mul[a][b] = a*b``; identity found from the table."""
    mul: tuple
    name: str = "G"

    def __post_init__(self):
        n = len(self.mul)
        object.__setattr__(self, "mul", tuple(tuple(int(v) for v in row) for row in self.mul))
        if any(len(row) != n for row in self.mul):
            raise ValueError("multiplication table must be square")
        if n == 0:
            raise ValueError("a group is non-empty")
        e = self._find_identity()
        if e is None:
            raise ValueError("table has no identity")
        for a, b, c in itertools.product(range(n), repeat=3):
            if self.mul[self.mul[a][b]][c] != self.mul[a][self.mul[b][c]]:
                raise ValueError("table is not associative")
        for a in range(n):
            if e not in self.mul[a]:
                raise ValueError(f"element {a} has no inverse")

    def _find_identity(self) -> Optional[int]:
        n = len(self.mul)
        for e in range(n):
            if all(self.mul[e][a] == a and self.mul[a][e] == a for a in range(n)):
                return e
        return None

    @property
    def order(self) -> int:
        return len(self.mul)

    @property
    def identity(self) -> int:
        return self._find_identity()

    def elements(self):
        return range(self.order)

    def inverse(self, a: int) -> int:
        e = self.identity
        return self.mul[a].index(e)

    def is_abelian(self) -> bool:
        n = self.order
        return all(self.mul[a][b] == self.mul[b][a] for a in range(n) for b in range(n))

    def generators(self) -> list[int]:
        """A small generating set, found greedily."""
        gens: list[int] = []
        span = {self.identity}
        for g in self.elements():
            if g not in span:
                gens.append(g)
                span = self.closure(gens)
        return gens

    def closure(self, gens: Sequence[int]) -> set[int]:
        span = {self.identity}
        frontier = [self.identity]
        while frontier:
            a = frontier.pop()
            for g in gens:
                b = self.mul[a][g]
                if b not in span:
                    span.add(b)
                    frontier.append(b)
        return span

    def to_json(self):
        return {"order": self.order, "mul": [list(r) for r in self.mul], "name": self.name}


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup(tuple(tuple((a + b) % n for b in range(n)) for a in range(n)), f"C{n}")


def symmetric_group(n: int) -> FiniteGroup:
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    # (p*q)(x) = p(q(x))
    mul = tuple(tuple(index[tuple(p[q[x]] for x in range(n))] for q in perms) for p in perms)
    return FiniteGroup(mul, f"S{n}")


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    """Elements ``(a, b)`` are numbered ``a * |H| + b``."""
    m = h.order
    size = g.order * m
    mul = tuple(tuple(g.mul[x // m][y // m] * m + h.mul[x % m][y % m] for y in range(size))
                for x in range(size))
    return FiniteGroup(mul, f"{g.name}x{h.name}")


def group_from_json(data) -> FiniteGroup:
    if isinstance(data, str):
        data = json.loads(data)
    mul = data["mul"]
    if "order" in data and data["order"] != len(mul):
        raise ValueError("order does not match table size")
    return FiniteGroup(tuple(tuple(r) for r in mul), data.get("name", "G"))


def named_group(spec: str) -> FiniteGroup:
    """``C<n>``, ``S<n>`` or ``C2xC3``-style products."""
    parts = spec.split("x")
    groups = []
    for p in parts:
        if p.startswith("C") and p[1:].isdigit():
            groups.append(cyclic_group(int(p[1:])))
        elif p.startswith("S") and p[1:].isdigit():
            groups.append(symmetric_group(int(p[1:])))
        else:
            raise ValueError(f"unknown group {p!r}")
    out = groups[0]
    for g in groups[1:]:
        out = direct_product(out, g)
    if len(groups) == 1:
        return out
    return FiniteGroup(out.mul, spec)


def count_actions(group: FiniteGroup, k: int) -> int:
    """Number of actions of ``group`` on ``{0..k-1}``.

    Brute force over images of a generating set in the symmetric group,
    keeping those assignments that extend to a homomorphism.
    """
    gens = group.generators()
    perms = list(itertools.permutations(range(k)))
    e = group.identity
    count = 0
    for images in itertools.product(perms, repeat=len(gens)):
        rho = {e: tuple(range(k))}
        frontier = [e]
        ok = True
        while frontier and ok:
            a = frontier.pop()
            for g, pg in zip(gens, images):
                b = group.mul[a][g]
                # rho(a*g) = rho(a) o rho(g)
                img = tuple(rho[a][pg[x]] for x in range(k))
                if b in rho:
                    if rho[b] != img:
                        ok = False
                        break
                else:
                    rho[b] = img
                    frontier.append(b)
        if ok:
            # homomorphism check on the full table
            ok = all(rho[group.mul[a][b]] == tuple(rho[a][rho[b][x]] for x in range(k))
                     for a in group.elements() for b in group.elements())
        count += ok
    return count
