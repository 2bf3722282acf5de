"""Integer noncommutative polynomials.

A polynomial is a finite map from words (tuples of generator names) to
nonzero integers.  Text form: ``3*R1.C2 - 1``; the empty word prints as ``1``.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping


class NCPoly:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[tuple, int] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple, int] = {}
        for w, c in items:
            w = tuple(w)
            acc[w] = acc.get(w, 0) + int(c)
        self.terms = {w: c for w, c in sorted(acc.items(), key=_word_key) if c != 0}
        self._hash = hash(tuple(self.terms.items()))

    @classmethod
    def const(cls, c: int) -> "NCPoly":
        return cls({(): c})

    @classmethod
    def gen(cls, name: str) -> "NCPoly":
        return cls({(name,): 1})

    @classmethod
    def word(cls, word, coeff=1) -> "NCPoly":
        return cls({tuple(word): coeff})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, int):
            other = NCPoly.const(other)
        return isinstance(other, NCPoly) and self.terms == other.terms

    def __hash__(self):
        return self._hash

    def __add__(self, other):
        if isinstance(other, int):
            other = NCPoly.const(other)
        return NCPoly(list(self.terms.items()) + list(other.terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return NCPoly({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = NCPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return NCPoly.const(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            return NCPoly({w: c * other for w, c in self.terms.items()})
        out = []
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                out.append((w1 + w2, c1 * c2))
        return NCPoly(out)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self * other
        return NotImplemented

    def degree(self):
        return max((len(w) for w in self.terms), default=-1)

    def __repr__(self):
        return f"NCPoly({format_ncpoly(self)!r})"

    def __str__(self):
        return format_ncpoly(self)


def _word_key(item):
    w = item[0]
    return (len(w), w)


def format_ncpoly(p: NCPoly) -> str:
    if not p.terms:
        return "0"
    parts = []
    for i, (w, c) in enumerate(p.terms.items()):
        mono = ".".join(w)
        if not w:
            body = str(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}*{mono}"
        if i == 0:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts)


_MONO = re.compile(r"\s*([+-])?\s*(?:(\d+)\s*(?:\*\s*)?)?([A-Za-z_][A-Za-z0-9_]*(?:\s*[.*]\s*[A-Za-z_][A-Za-z0-9_]*)*)?\s*")


def parse_ncpoly(text: str) -> NCPoly:
    text = text.strip()
    if text == "0":
        return NCPoly()
    pos = 0
    terms = []
    first = True
    while pos < len(text):
        m = _MONO.match(text, pos)
        if m is None or m.end() == pos or (m.group(2) is None and m.group(3) is None):
            raise ValueError(f"cannot parse polynomial at {text[pos:]!r}")
        sign, coeff, word = m.groups()
        if sign is None and not first:
            raise ValueError(f"missing operator before {text[pos:]!r}")
        c = int(coeff) if coeff else 1
        if sign == "-":
            c = -c
        w = tuple(s.strip() for s in re.split(r"[.*]", word)) if word else ()
        terms.append((w, c))
        pos = m.end()
        first = False
    return NCPoly(terms)
