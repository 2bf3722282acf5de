"""Word-problem backends.

A backend represents each element of the free model on ``n`` generators by a
hashable *key*; two terms are equal in the theory iff their keys are equal.
Every backend provides generators, operation application, substitution of
keys into keys (composition in the category of free models) and a canonical
term for each key.
"""

from __future__ import annotations

import itertools
from typing import Optional, Sequence

import numpy as np

from .ncpoly import NCPoly
from .rewrite import RewriteSystem
from .terms import App, Term, Var, rename_ops, substitute


class Inconclusive(RuntimeError):
    """The backend cannot decide the question (e.g. an uncertified TRS)."""


class Backend:
    kind = "abstract"
    finite = False

    def gen(self, i: int, n: int):
        raise NotImplementedError

    def apply(self, op: str, args: Sequence, n: int):
        raise NotImplementedError

    def term(self, key, n: int) -> Term:
        raise NotImplementedError

    def elements(self, n: int) -> Optional[list]:
        return None

    def equal(self, a, b) -> bool:
        return a == b

    def key_of(self, t: Term, n: int):
        memo = {}

        def ev(s):
            if isinstance(s, Var):
                if s.index > n:
                    raise ValueError(f"x{s.index} outside context {n}")
                return self.gen(s.index - 1, n)
            hit = memo.get(s)
            if hit is None:
                hit = self.apply(s.op, [ev(a) for a in s.args], n)
                memo[s] = hit
            return hit
        return ev(t)

    def subst(self, key, m: int, env: Sequence, n: int):
        """Evaluate the element ``key`` (over m generators) at ``env`` (keys over n)."""
        memo = {}

        def ev(s):
            if isinstance(s, Var):
                return env[s.index - 1]
            hit = memo.get(s)
            if hit is None:
                hit = self.apply(s.op, [ev(a) for a in s.args], n)
                memo[s] = hit
            return hit
        return ev(self.term(key, m))

    def describe(self) -> dict:
        return {"kind": self.kind}


class TRSBackend(Backend):
    """Normal forms of a rewrite system; keys are normal-form terms.

    When ``certified`` is false the system is not known to be confluent, so
    distinct normal forms do not prove inequality.
    """
    kind = "TRS"

    def __init__(self, trs: RewriteSystem, certified=True):
        self.trs = trs
        self.certified = certified

    def gen(self, i, n):
        return Var(i + 1)

    def apply(self, op, args, n):
        return self.trs.normalize(App(op, args))

    def term(self, key, n):
        return key

    def key_of(self, t, n):
        return self.trs.normalize(t)

    def subst(self, key, m, env, n):
        return self.trs.normalize(substitute(key, env))

    def equal(self, a, b):
        if a == b:
            return True
        if not self.certified:
            raise Inconclusive(f"uncertified rewrite system cannot separate {a} and {b}")
        return False

    def describe(self):
        return {"kind": self.kind, "rules": [str(r) for r in self.trs.rules],
                "certified": self.certified}


class SetBackend(TRSBackend):
    """The empty signature: the free model on n generators is the set of variables."""
    kind = "Sets"
    finite = True

    def __init__(self):
        super().__init__(RewriteSystem(()))

    def elements(self, n):
        return [Var(i) for i in range(1, n + 1)]

    def subst(self, key, m, env, n):
        return env[key.index - 1]


class TruthTableBackend(Backend):
    """Free Boolean algebras: an element is its truth table on the variables it depends on.

    A key is ``(support, table)``: ``support`` lists the 0-based generator
    indices the function really depends on, in increasing order, and
    ``table`` is the truth table over them as ``bytes`` of 0/1 values, the
    first support variable being the most significant bit.  Dropping the
    inessential variables makes keys canonical and keeps them small when a
    context has many generators but each element mentions few of them.
    """
    kind = "TruthTable"
    finite = True
    OPS = ("0", "1", "and", "or", "not")
    MAX_SUPPORT = 22

    def __init__(self, names=None):
        # names maps the canonical operation names onto this theory's names
        self.names = dict(zip(self.OPS, names or self.OPS))
        self.canon = {v: k for k, v in self.names.items()}

    @staticmethod
    def table(key) -> np.ndarray:
        return np.frombuffer(key[1], dtype=np.uint8)

    @staticmethod
    def _reduce(support, arr):
        """Canonical key of the function ``arr`` (shape ``(2,)*len(support)``)."""
        keep = []
        for j in range(len(support)):
            if not np.array_equal(np.take(arr, 0, axis=j), np.take(arr, 1, axis=j)):
                keep.append(j)
        if len(keep) < len(support):
            idx = tuple(slice(None) if j in keep else 0 for j in range(len(support)))
            arr = arr[idx]
            support = tuple(support[j] for j in keep)
        return tuple(support), np.ascontiguousarray(arr, dtype=np.uint8).tobytes()

    def _spread(self, key, support):
        """Values of ``key`` on every row of the cube over ``support`` (a superset)."""
        ks, _ = key
        k = len(support)
        arr = self.table(key).reshape((2,) * len(ks)) if ks else self.table(key)[0]
        if not ks:
            return np.full((2,) * k, arr, dtype=np.uint8)
        pos = [support.index(v) for v in ks]
        shape = [1] * k
        for p in pos:
            shape[p] = 2
        return np.broadcast_to(arr.reshape(shape), (2,) * k)

    def gen(self, i, n):
        return ((i,), b"\x00\x01")

    def _const(self, c):
        return ((), b"\x01" if c else b"\x00")

    def apply(self, op, args, n):
        op = self.canon.get(op, op)
        if op == "0":
            return self._const(0)
        if op == "1":
            return self._const(1)
        if op == "not":
            sup, tab = args[0]
            return sup, (1 - self.table(args[0])).astype(np.uint8).tobytes()
        support = tuple(sorted(set(args[0][0]) | set(args[1][0])))
        a, b = self._spread(args[0], support), self._spread(args[1], support)
        if op == "and":
            return self._reduce(support, a & b)
        if op == "or":
            return self._reduce(support, a | b)
        raise KeyError(op)

    def subst(self, key, m, env, n):
        ks, _ = key
        if not ks:
            return key
        support = tuple(sorted(set().union(*(env[v][0] for v in ks))))
        if len(support) > self.MAX_SUPPORT:
            raise OverflowError(f"Boolean function on {len(support)} variables is too large")
        idx = np.zeros((2,) * len(support), dtype=np.int64)
        for v in ks:
            idx = (idx << 1) | self._spread(env[v], support)
        return self._reduce(support, self.table(key)[idx])

    def elements(self, n):
        size = 1 << n
        if size > 16:
            raise OverflowError("free Boolean algebra too large to list")
        support = tuple(range(n))
        out = []
        for v in range(1 << size):
            bits = np.array([(v >> (size - 1 - r)) & 1 for r in range(size)], dtype=np.uint8)
            out.append(self._reduce(support, bits.reshape((2,) * n)))
        return out

    def operation_tables(self, n):
        """Operation tables of the free algebra, indexed like ``elements(n)``.

        Element ``v`` has the bits of ``v`` as its full truth table, so the
        operations are bitwise operations on the indices.
        """
        size = 1 << n
        if size > 16:
            raise OverflowError("free Boolean algebra too large to list")
        v = np.arange(1 << size, dtype=np.int64)
        full = (1 << size) - 1
        nm = self.names
        return {nm["0"]: np.array(0), nm["1"]: np.array(full),
                nm["and"]: np.bitwise_and.outer(v, v), nm["or"]: np.bitwise_or.outer(v, v),
                nm["not"]: full - v}

    def term(self, key, n):
        support, _ = key
        t = self.table(key)
        nm = self.names
        if not support:
            return App(nm["1"] if t[0] else nm["0"])
        xs = [Var(j + 1) for j in support]
        if len(support) == 1:
            return xs[0] if t[1] else App(nm["not"], [xs[0]])
        k = len(support)
        minterms = []
        for y in np.flatnonzero(t):
            lits = []
            for j in range(k):
                bit = (int(y) >> (k - 1 - j)) & 1
                lits.append(xs[j] if bit else App(nm["not"], [xs[j]]))
            m = lits[0]
            for lit in lits[1:]:
                m = App(nm["and"], [m, lit])
            minterms.append(m)
        out = minterms[0]
        for m in minterms[1:]:
            out = App(nm["or"], [out, m])
        return out

    def describe(self):
        return {"kind": self.kind}


def _reduce_word(word):
    out = []
    for letter in word:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


class ReducedWordBackend(Backend):
    """Free groups: keys are freely reduced words of letters ``±(i+1)``."""
    kind = "ReducedWord"

    def __init__(self, mul="mul", inv="inv", unit="e"):
        self.mul, self.inv, self.unit = mul, inv, unit

    def gen(self, i, n):
        return (i + 1,)

    def apply(self, op, args, n):
        if op == self.mul:
            return _reduce_word(args[0] + args[1])
        if op == self.inv:
            return tuple(-x for x in reversed(args[0]))
        if op == self.unit:
            return ()
        raise KeyError(op)

    def subst(self, key, m, env, n):
        out = []
        for letter in key:
            w = env[abs(letter) - 1]
            out.extend(w if letter > 0 else [-x for x in reversed(w)])
        return _reduce_word(out)

    def term(self, key, n):
        if not key:
            return App(self.unit)
        letters = [Var(x) if x > 0 else App(self.inv, [Var(-x)]) for x in key]
        out = letters[-1]
        for lt in reversed(letters[:-1]):
            out = App(self.mul, [lt, out])
        return out


class ModuleBackend(Backend):
    """Free modules over Z (modulus 0) or Z/k: keys are coefficient vectors."""
    kind = "Matrix"

    def __init__(self, modulus=0, add="add", neg="neg", zero="zero"):
        self.modulus = modulus
        self.add, self.neg, self.zero = add, neg, zero
        self.finite = modulus > 0

    def _norm(self, v):
        if self.modulus:
            return tuple(x % self.modulus for x in v)
        return tuple(v)

    def gen(self, i, n):
        return tuple(1 if j == i else 0 for j in range(n))

    def apply(self, op, args, n):
        if op == self.add:
            return self._norm(a + b for a, b in zip(args[0], args[1]))
        if op == self.neg:
            return self._norm(-a for a in args[0])
        if op == self.zero:
            return (0,) * n
        raise KeyError(op)

    def subst(self, key, m, env, n):
        acc = [0] * n
        for c, e in zip(key, env):
            if c:
                for j in range(n):
                    acc[j] += c * e[j]
        return self._norm(acc)

    def elements(self, n):
        if not self.modulus:
            return None
        return [tuple(v) for v in itertools.product(range(self.modulus), repeat=n)]

    def term(self, key, n):
        summands = []
        for i, c in enumerate(key):
            x = Var(i + 1)
            lit = x if c > 0 else App(self.neg, [x])
            summands.extend([lit] * abs(c))
        if not summands:
            return App(self.zero)
        out = summands[0]
        for s in summands[1:]:
            out = App(self.add, [out, s])
        return out

    def describe(self):
        return {"kind": self.kind, "ring": f"Z/{self.modulus}" if self.modulus else "Z"}


class GSetBackend(Backend):
    """Free G-sets: the element ``a * x_{i+1}`` has key ``(i, a)``.

    ``names[a]`` is the unary operation acting by group element ``a``.
    """
    kind = "GSetTuple"
    finite = True

    def __init__(self, group, names=None):
        self.group = group
        self.names = list(names or [f"g{a}" for a in group.elements()])
        self.index = {nm: a for a, nm in enumerate(self.names)}

    def gen(self, i, n):
        return (i, self.group.identity)

    def apply(self, op, args, n):
        b = self.index[op]
        i, a = args[0]
        return (i, self.group.mul[b][a])

    def subst(self, key, m, env, n):
        i, a = key
        j, c = env[i]
        return (j, self.group.mul[a][c])

    def elements(self, n):
        return [(i, a) for i in range(n) for a in self.group.elements()]

    def term(self, key, n):
        i, a = key
        x = Var(i + 1)
        if a == self.group.identity:
            return x
        return App(self.names[a], [x])

    def describe(self):
        return {"kind": self.kind, "group": self.group.name, "order": self.group.order}


class TrivialBackend(Backend):
    """Every free model is a point; ``constant`` names the canonical representative."""
    kind = "Trivial"
    finite = True

    def __init__(self, constant: str):
        self.constant = constant

    def gen(self, i, n):
        return ()

    def apply(self, op, args, n):
        return ()

    def subst(self, key, m, env, n):
        return ()

    def elements(self, n):
        return [()]

    def term(self, key, n):
        return App(self.constant)


class RenamedBackend(Backend):
    """Run ``base`` under different operation names (several names may share a base op)."""
    kind = "Renamed"

    def __init__(self, base: Backend, mapping: dict):
        self.base = base
        self.mapping = dict(mapping)
        self.back = {}
        for name, b in self.mapping.items():
            self.back.setdefault(b, name)
        self.finite = base.finite

    def gen(self, i, n):
        return self.base.gen(i, n)

    def apply(self, op, args, n):
        return self.base.apply(self.mapping[op], args, n)

    def subst(self, key, m, env, n):
        return self.base.subst(key, m, env, n)

    def elements(self, n):
        return self.base.elements(n)

    def equal(self, a, b):
        return self.base.equal(a, b)

    def term(self, key, n):
        return rename_ops(self.base.term(key, n), self.back)

    def describe(self):
        return {"kind": self.kind, "base": self.base.describe(), "mapping": self.mapping}


class ActionProductBackend(Backend):
    """Models of a base theory carrying a G-action by automorphisms.

    The free model on n generators is the free base model on ``n * |G|``
    generators ``h * x_i`` (index ``i * |G| + h``) with G permuting them.
    ``base_ops`` maps combined operation names to base operation names and
    ``group_ops`` maps the remaining unary names to group elements.
    """
    kind = "ActionProduct"

    def __init__(self, base: Backend, base_ops: dict, group, group_ops: dict):
        self.base = base
        self.base_ops = dict(base_ops)
        self.group = group
        self.group_ops = dict(group_ops)
        self.elem_name = {}
        for name, a in self.group_ops.items():
            self.elem_name.setdefault(a, name)
        self.back = {}
        for name, b in self.base_ops.items():
            self.back.setdefault(b, name)
        self.finite = base.finite
        self._perm_cache = {}

    def _size(self, n):
        return n * self.group.order

    def gen(self, i, n):
        g = self.group
        return self.base.gen(i * g.order + g.identity, self._size(n))

    def _act(self, b, key, n):
        g = self.group
        N = self._size(n)
        env = self._perm_cache.get((b, n))
        if env is None:
            env = [self.base.gen(i * g.order + g.mul[b][h], N)
                   for i in range(n) for h in g.elements()]
            self._perm_cache[(b, n)] = env
        return self.base.subst(key, N, env, N)

    def apply(self, op, args, n):
        if op in self.base_ops:
            return self.base.apply(self.base_ops[op], args, self._size(n))
        return self._act(self.group_ops[op], args[0], n)

    def subst(self, key, m, env, n):
        g = self.group
        images = []
        for j in range(m):
            for h in g.elements():
                images.append(env[j] if h == g.identity else self._act(h, env[j], n))
        return self.base.subst(key, self._size(m), images, self._size(n))

    def elements(self, n):
        return self.base.elements(self._size(n))

    def equal(self, a, b):
        return self.base.equal(a, b)

    def term(self, key, n):
        g = self.group
        t = rename_ops(self.base.term(key, self._size(n)), self.back)
        env = []
        for i in range(n):
            for h in g.elements():
                x = Var(i + 1)
                env.append(x if h == g.identity else App(self.elem_name[h], [x]))
        return substitute(t, env)

    def describe(self):
        return {"kind": self.kind, "base": self.base.describe(),
                "group": self.group.name, "order": self.group.order}


class FreeRingBackend(Backend):
    """Free unital rings: keys are integer noncommutative polynomials in x1..xn."""
    kind = "FreeRing"

    def __init__(self, add="add", neg="neg", zero="zero", mul="mul", one="one"):
        self.add, self.neg, self.zero, self.mul, self.one = add, neg, zero, mul, one

    def gen(self, i, n):
        return NCPoly.gen(f"x{i + 1}")

    def apply(self, op, args, n):
        if op == self.add:
            return args[0] + args[1]
        if op == self.neg:
            return -args[0]
        if op == self.zero:
            return NCPoly()
        if op == self.mul:
            return args[0] * args[1]
        if op == self.one:
            return NCPoly.const(1)
        raise KeyError(op)

    def subst(self, key, m, env, n):
        out = NCPoly()
        for word, c in key.terms.items():
            p = NCPoly.const(c)
            for letter in word:
                p = p * env[int(letter[1:]) - 1]
            out = out + p
        return out

    def term(self, key, n):
        summands = []
        for word, c in key.terms.items():
            if word:
                factors = [Var(int(w[1:])) for w in word]
                mono = factors[-1]
                for f in reversed(factors[:-1]):
                    mono = App(self.mul, [f, mono])
            else:
                mono = App(self.one)
            lit = mono if c > 0 else App(self.neg, [mono])
            summands.extend([lit] * abs(c))
        if not summands:
            return App(self.zero)
        out = summands[0]
        for s in summands[1:]:
            out = App(self.add, [out, s])
        return out
