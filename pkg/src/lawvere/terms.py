"""Terms, signatures, equations and presentations.

Variables are positional: ``Var(1)`` is x1.  A term over context ``n`` may
only mention x1..xn.  Terms are immutable and carry a cached structural hash,
so they can be used as dictionary keys by the rewriting and search code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence


class TermError(ValueError):
    pass


class Term:
    __slots__ = ()

    def is_var(self) -> bool:
        return False


class Var(Term):
    __slots__ = ("index", "_hash")

    def __init__(self, index: int):
        if index < 1:
            raise TermError(f"variable index must be positive, got {index}")
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "_hash", hash(("var", index)))

    def __setattr__(self, name, value):
        raise AttributeError("terms are immutable")

    def is_var(self):
        return True

    def __eq__(self, other):
        return isinstance(other, Var) and other.index == self.index

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Var({self.index})"

    def __str__(self):
        return f"x{self.index}"


class App(Term):
    __slots__ = ("op", "args", "_hash", "_size")

    def __init__(self, op: str, args: Sequence[Term] = ()):
        args = tuple(args)
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "_hash", hash((op, args)))
        object.__setattr__(self, "_size", 1 + sum(term_size(a) for a in args))

    def __setattr__(self, name, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, App) and other._hash == self._hash
                and other.op == self.op and other.args == self.args)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"App({self.op!r}, {list(self.args)!r})"

    def __str__(self):
        if not self.args:
            return self.op
        return f"{self.op}({','.join(str(a) for a in self.args)})"


def var(i: int) -> Var:
    return Var(i)


def app(op: str, *args: Term) -> App:
    return App(op, args)


def variables(n: int) -> list[Var]:
    return [Var(i) for i in range(1, n + 1)]


def term_size(t: Term) -> int:
    """Number of nodes; a variable has size 1."""
    if isinstance(t, Var):
        return 1
    return t._size


def term_depth(t: Term) -> int:
    # constants count depth 1, variables depth 0
    if isinstance(t, Var):
        return 0
    return 1 + max((term_depth(a) for a in t.args), default=0)


def max_var(t: Term) -> int:
    if isinstance(t, Var):
        return t.index
    return max((max_var(a) for a in t.args), default=0)


def var_set(t: Term) -> set[int]:
    out: set[int] = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Var):
            out.add(s.index)
        else:
            stack.extend(s.args)
    return out


def var_counts(t: Term) -> dict[int, int]:
    out: dict[int, int] = {}
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Var):
            out[s.index] = out.get(s.index, 0) + 1
        else:
            stack.extend(s.args)
    return out


def substitute(t: Term, env: Sequence[Term]) -> Term:
    """Replace x_i by ``env[i-1]`` simultaneously."""
    if isinstance(t, Var):
        if t.index > len(env):
            raise TermError(f"variable x{t.index} out of range for "
                            f"substitution of length {len(env)}")
        return env[t.index - 1]
    return App(t.op, [substitute(a, env) for a in t.args])


def substitute_map(t: Term, env: dict[int, Term]) -> Term:
    """Like :func:`substitute` but variables missing from ``env`` stay put."""
    if isinstance(t, Var):
        return env.get(t.index, t)
    return App(t.op, [substitute_map(a, env) for a in t.args])


def rename_ops(t: Term, mapping: dict[str, str]) -> Term:
    if isinstance(t, Var):
        return t
    return App(mapping.get(t.op, t.op), [rename_ops(a, mapping) for a in t.args])


def shift(t: Term, offset: int) -> Term:
    if offset == 0:
        return t
    if isinstance(t, Var):
        return Var(t.index + offset)
    return App(t.op, [shift(a, offset) for a in t.args])


def subterm(t: Term, pos: tuple[int, ...]) -> Term:
    for p in pos:
        t = t.args[p]
    return t


def replace_at(t: Term, pos: tuple[int, ...], new: Term) -> Term:
    if not pos:
        return new
    args = list(t.args)
    args[pos[0]] = replace_at(args[pos[0]], pos[1:], new)
    return App(t.op, args)


def positions(t: Term) -> Iterator[tuple[int, ...]]:
    """Non-variable positions, pre-order."""
    if isinstance(t, Var):
        return
    yield ()
    for i, a in enumerate(t.args):
        for p in positions(a):
            yield (i,) + p


@dataclass(frozen=True)
class Signature:
    operations: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        seen = set()
        for name, arity in self.operations:
            if name in seen:
                raise TermError(f"duplicate operation name {name!r}")
            if arity < 0:
                raise TermError(f"negative arity for {name!r}")
            seen.add(name)

    @property
    def arity(self) -> dict[str, int]:
        return dict(self.operations)

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.operations]

    def __contains__(self, name):
        return any(n == name for n, _ in self.operations)

    def __len__(self):
        return len(self.operations)

    def check_term(self, t: Term, n: int) -> None:
        ar = self.arity
        stack = [t]
        while stack:
            s = stack.pop()
            if isinstance(s, Var):
                if s.index > n:
                    raise TermError(f"variable x{s.index} outside context {n}")
                continue
            if s.op not in ar:
                raise TermError(f"unknown operation {s.op!r}")
            if ar[s.op] != len(s.args):
                raise TermError(f"arity mismatch: {s.op} expects {ar[s.op]} "
                                f"argument(s), got {len(s.args)}")
            stack.extend(s.args)


@dataclass(frozen=True)
class Equation:
    left: Term
    right: Term
    context: int

    def __str__(self):
        return f"{self.context}: {self.left} = {self.right}"


@dataclass(frozen=True)
class Presentation:
    name: str
    signature: Signature
    equations: tuple[Equation, ...] = field(default=())

    def __post_init__(self):
        for eq in self.equations:
            if eq.context < 0:
                raise TermError("negative context")
            self.signature.check_term(eq.left, eq.context)
            self.signature.check_term(eq.right, eq.context)

    @property
    def arity(self) -> dict[str, int]:
        return self.signature.arity


def presentation(name: str, ops: Sequence[tuple[str, int]],
                 equations: Sequence[tuple[int, Term, Term]] = ()) -> Presentation:
    """Convenience constructor: equations given as ``(context, lhs, rhs)``."""
    return Presentation(name, Signature(tuple(ops)),
                        tuple(Equation(l, r, n) for n, l, r in equations))
