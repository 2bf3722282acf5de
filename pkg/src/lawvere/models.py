"""Finite models: checking, enumeration, homomorphisms, abelian group objects.

Tables are numpy arrays: an operation of arity a on a carrier of size k is an
array of shape ``(k,) * a``.  Enumeration is a backtracking search over table
cells driven by ground instances of the equations; each instance watches one
unknown cell and forces a value once only the root cell of one side is
missing.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .terms import App, Equation, Term, Var

DEFAULT_INSTANCE_LIMIT = 2_000_000
DEFAULT_MODEL_CAP = 1_000_000
DEFAULT_NODE_LIMIT = None


class SearchTooLarge(RuntimeError):
    pass


class ModelCapExceeded(RuntimeError):
    pass


def _dtype(k):
    return np.uint8 if k <= 255 else np.int32


def evaluate(term: Term, tables: dict, k: int, n: int) -> np.ndarray:
    """Value of ``term`` at every assignment, as an array of shape ``(k,) * n``."""
    dt = _dtype(k)
    shape = (k,) * n
    axes = []
    for i in range(n):
        s = [1] * n
        s[i] = k
        axes.append(np.arange(k, dtype=dt).reshape(s))
    memo = {}

    def ev(t):
        if isinstance(t, Var):
            return axes[t.index - 1]
        hit = memo.get(t)
        if hit is None:
            tab = tables[t.op]
            if not t.args:
                hit = np.asarray(tab, dtype=dt).reshape((1,) * n)
            else:
                hit = tab[tuple(ev(a) for a in t.args)]
            memo[t] = hit
        return hit
    return np.broadcast_to(ev(term), shape)


@dataclass
class ModelVerdict:
    valid: bool
    equation: Optional[Equation] = None
    assignment: Optional[tuple] = None
    message: str = ""

    def __bool__(self):
        return self.valid

    def to_json(self):
        out = {"valid": self.valid}
        if self.equation is not None:
            out["violated"] = str(self.equation)
            out["assignment"] = list(self.assignment)
        if self.message:
            out["message"] = self.message
        return out


def _normalize_tables(T, tables, k):
    out = {}
    dt = _dtype(k)
    for op, ar in T.signature.operations:
        if op not in tables:
            raise ValueError(f"missing table for {op}")
        arr = np.asarray(tables[op])
        if arr.shape != (k,) * ar:
            raise ValueError(f"table for {op} has shape {arr.shape}, expected {(k,) * ar}")
        if arr.size and (arr.min() < 0 or arr.max() >= k):
            raise ValueError(f"table for {op} has values outside the carrier")
        out[op] = arr.astype(dt)
    return out


def check_equations(equations, tables, k, sample=None, seed=0) -> ModelVerdict:
    for eq in equations:
        c = eq.context
        if k == 0:
            if c == 0:
                # closed equation over an empty carrier: only meaningful with constants
                continue
            continue
        if sample is not None and k ** c > sample:
            rng = np.random.default_rng(seed)
            pts = rng.integers(0, k, size=(sample, c))
            left = _eval_rows(eq.left, tables, pts)
            right = _eval_rows(eq.right, tables, pts)
            bad = np.flatnonzero(left != right)
            if len(bad):
                return ModelVerdict(False, eq, tuple(int(v) for v in pts[bad[0]]))
            continue
        left = evaluate(eq.left, tables, k, c)
        right = evaluate(eq.right, tables, k, c)
        bad = np.argwhere(left != right)
        if len(bad):
            return ModelVerdict(False, eq, tuple(int(v) for v in bad[0]))
    return ModelVerdict(True)


def _eval_rows(t, tables, pts):
    """Value of ``t`` at each row of the assignment array ``pts``."""
    if isinstance(t, Var):
        return pts[:, t.index - 1]
    if not t.args:
        return np.full(len(pts), int(tables[t.op]))
    return tables[t.op][tuple(_eval_rows(a, tables, pts) for a in t.args)]


def check_model(T, tables: dict, k: Optional[int] = None) -> ModelVerdict:
    """Whether ``tables`` satisfy every equation of ``T`` at every assignment."""
    if k is None:
        k = _infer_size(T, tables)
    try:
        tabs = _normalize_tables(T, tables, k)
    except ValueError as exc:
        return ModelVerdict(False, message=str(exc))
    if k == 0 and any(a == 0 for _, a in T.signature.operations):
        return ModelVerdict(False, message="constants need a non-empty carrier")
    return check_equations(T.presentation.equations, tabs, k)


def _infer_size(T, tables):
    for op, ar in T.signature.operations:
        if ar > 0:
            return np.asarray(tables[op]).shape[0]
    raise ValueError("carrier size cannot be inferred; pass k")


class FiniteModel:
    """A carrier ``{0..k-1}`` with one table per operation, validated on construction."""

    def __init__(self, theory, k: int, tables: dict, validate=True, sample=None):
        self.theory = theory
        self.k = k
        self.tables = _normalize_tables(theory, tables, k)
        if validate:
            v = check_equations(theory.presentation.equations, self.tables, k, sample=sample)
            if not v.valid:
                raise ValueError(f"not a model: {v.equation} fails at {v.assignment}")

    @property
    def size(self):
        return self.k

    def op(self, name, *args):
        return int(self.tables[name][tuple(args)])

    def evaluate(self, t: Term, n: int) -> np.ndarray:
        return evaluate(t, self.tables, self.k, n)

    def signature_key(self):
        return tuple((op, self.tables[op].tobytes()) for op in sorted(self.tables))

    def __eq__(self, other):
        return (isinstance(other, FiniteModel) and other.k == self.k
                and self.signature_key() == other.signature_key())

    def __hash__(self):
        return hash((self.k, self.signature_key()))

    def to_json(self):
        return {"size": self.k,
                "tables": {op: self.tables[op].tolist() for op in self.theory.arity}}

    def __repr__(self):
        return f"FiniteModel({self.theory.name}, size={self.k})"


# -- enumeration -----------------------------------------------------------

def _ground(t: Term, vals, opid):
    if isinstance(t, Var):
        return vals[t.index - 1]
    return (opid[t.op], tuple(_ground(a, vals, opid) for a in t.args))


class _Search:
    def __init__(self, T, k, instance_limit=DEFAULT_INSTANCE_LIMIT, fixed=None,
                 node_limit=DEFAULT_NODE_LIMIT):
        self.T = T
        self.node_limit = node_limit
        self.nodes = 0
        self.k = k
        ops = T.signature.operations
        self.ops = ops
        self.opid = {o: i for i, (o, _) in enumerate(ops)}
        self.base = []
        total = 0
        for _, a in ops:
            self.base.append(total)
            total += k ** a
        self.ncells = total
        count = sum(k ** eq.context for eq in T.presentation.equations)
        if count > instance_limit:
            raise SearchTooLarge(f"{count} ground instances exceed limit {instance_limit}")
        seen = set()
        inst = []
        for eq in T.presentation.equations:
            for vals in itertools.product(range(k), repeat=eq.context):
                l = _ground(eq.left, vals, self.opid)
                r = _ground(eq.right, vals, self.opid)
                if l == r or (l, r) in seen or (r, l) in seen:
                    continue
                seen.add((l, r))
                inst.append((l, r))
        self.inst = inst
        self.vals = [-1] * total
        self.watch = [[] for _ in range(total)]
        self.trail = []          # ("v", cell) | ("w", cell)
        self.fixed = fixed or {}
        # branch on constants first, then by increasing arity
        self.order = sorted(range(total), key=lambda c: (self._arity_of(c), c))

    def _arity_of(self, cell):
        for (op, a), b in zip(self.ops, self.base):
            if b <= cell < b + self.k ** a:
                return a
        raise IndexError(cell)

    def _ev(self, t):
        """Value (>= 0) or ``-(cell + 1)`` of the first unknown cell."""
        if type(t) is int:
            return t
        op, args = t
        off = 0
        k = self.k
        for a in args:
            v = self._ev(a)
            if v < 0:
                return v
            off = off * k + v
        cell = self.base[op] + off
        v = self.vals[cell]
        return v if v >= 0 else -(cell + 1)

    def _status(self, t):
        """(value, blocked cell, blocked at root)."""
        if type(t) is int:
            return t, -1, False
        op, args = t
        off = 0
        k = self.k
        for a in args:
            v = self._ev(a)
            if v < 0:
                return -1, -v - 1, False
            off = off * k + v
        cell = self.base[op] + off
        v = self.vals[cell]
        if v >= 0:
            return v, -1, False
        return -1, cell, True

    def _assign(self, cell, v, queue):
        self.vals[cell] = v
        self.trail.append((0, cell))
        queue.append(cell)

    def _visit(self, cid, queue):
        l, r = self.inst[cid]
        lv, lc, lroot = self._status(l)
        rv, rc, rroot = self._status(r)
        if lv >= 0 and rv >= 0:
            return lv == rv
        if lv >= 0 and rroot:
            self._assign(rc, lv, queue)
            return True
        if rv >= 0 and lroot:
            self._assign(lc, rv, queue)
            return True
        cell = lc if lv < 0 else rc
        self.watch[cell].append(cid)
        self.trail.append((1, cell))
        return True

    def _propagate(self, queue):
        i = 0
        while i < len(queue):
            cell = queue[i]
            i += 1
            lst = self.watch[cell]
            for j in range(len(lst)):
                if not self._visit(lst[j], queue):
                    return False
        return True

    def _undo(self, mark):
        tr = self.trail
        while len(tr) > mark:
            kind, cell = tr.pop()
            if kind == 0:
                self.vals[cell] = -1
            else:
                self.watch[cell].pop()

    def models(self) -> Iterator[list]:
        queue = []
        for cell, v in self.fixed.items():
            self._assign(cell, v, queue)
        for cid in range(len(self.inst)):
            if not self._visit(cid, queue):
                return
        if not self._propagate(queue):
            return
        yield from self._branch(0)

    def _branch(self, start):
        vals = self.vals
        order = self.order
        pos = start
        while pos < self.ncells and vals[order[pos]] >= 0:
            pos += 1
        if pos == self.ncells:
            yield list(vals)
            return
        cell = order[pos]
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise SearchTooLarge(f"search tree exceeded {self.node_limit} nodes")
        for v in range(self.k):
            mark = len(self.trail)
            queue = []
            self._assign(cell, v, queue)
            if self._propagate(queue):
                yield from self._branch(pos + 1)
            self._undo(mark)

    def tables(self, vals):
        out = {}
        k = self.k
        for (op, a), b in zip(self.ops, self.base):
            arr = np.array(vals[b:b + k ** a], dtype=_dtype(k))
            out[op] = arr.reshape((k,) * a) if a else arr.reshape(())
        return out


def iter_models(T, k: int, instance_limit=DEFAULT_INSTANCE_LIMIT,
                node_limit=DEFAULT_NODE_LIMIT) -> Iterator[FiniteModel]:
    """All models on ``{0..k-1}`` in a deterministic order (lexicographic in the cells)."""
    if k == 0:
        if not any(a == 0 for _, a in T.signature.operations):
            yield FiniteModel(T, 0, {op: np.zeros((0,) * a, dtype=np.uint8)
                                     for op, a in T.signature.operations}, validate=False)
        return
    s = _Search(T, k, instance_limit, node_limit=node_limit)
    for vals in s.models():
        yield FiniteModel(T, k, s.tables(vals), validate=False)


def enumerate_models(T, k: int, cap=DEFAULT_MODEL_CAP, instance_limit=DEFAULT_INSTANCE_LIMIT):
    out = []
    for M in iter_models(T, k, instance_limit):
        out.append(M)
        if len(out) > cap:
            raise ModelCapExceeded(f"more than {cap} models of size {k}")
    return out


def count_models(T, k: int, cap=None, instance_limit=DEFAULT_INSTANCE_LIMIT) -> int:
    if k == 0:
        return sum(1 for _ in iter_models(T, 0))
    s = _Search(T, k, instance_limit)
    n = 0
    for _ in s.models():
        n += 1
        if cap is not None and n > cap:
            raise ModelCapExceeded(f"more than {cap} models of size {k}")
    return n


def relabel(M: FiniteModel, perm: Sequence[int]) -> FiniteModel:
    """The isomorphic model with element ``a`` renamed ``perm[a]``."""
    k = M.k
    perm = np.asarray(perm)
    inv = np.argsort(perm)
    tabs = {}
    for op, a in M.theory.signature.operations:
        t = M.tables[op]
        if a == 0:
            tabs[op] = perm[t]
        else:
            tabs[op] = perm[t[np.ix_(*([inv] * a))]]
    return FiniteModel(M.theory, k, tabs, validate=False)


def canonical_form(M: FiniteModel):
    best = None
    for perm in itertools.permutations(range(M.k)):
        key = relabel(M, perm).signature_key()
        if best is None or key < best:
            best = key
    return best


def models_up_to_iso(models: Sequence[FiniteModel]) -> list:
    seen = {}
    for M in models:
        key = canonical_form(M)
        seen.setdefault(key, M)
    return list(seen.values())


# -- homomorphisms ---------------------------------------------------------

def product_model(M: FiniteModel, N: FiniteModel) -> FiniteModel:
    """Componentwise operations on pairs; ``(a, b)`` is element ``a * |N| + b``."""
    if M.theory is not N.theory:
        raise ValueError("models of different theories")
    km, kn = M.k, N.k
    k = km * kn
    tabs = {}
    for op, ar in M.theory.signature.operations:
        if ar == 0:
            tabs[op] = np.array(int(M.tables[op]) * kn + int(N.tables[op]))
            continue
        idx = np.indices((k,) * ar)
        left = M.tables[op][tuple(i // kn for i in idx)].astype(np.int64)
        right = N.tables[op][tuple(i % kn for i in idx)].astype(np.int64)
        tabs[op] = left * kn + right
    return FiniteModel(M.theory, k, tabs, validate=False)


def terminal_model(T) -> FiniteModel:
    return FiniteModel(T, 1, {op: np.zeros((1,) * a, dtype=np.uint8)
                              for op, a in T.signature.operations})


def is_homomorphism(M: FiniteModel, N: FiniteModel, h) -> bool:
    h = np.asarray(h)
    for op, ar in M.theory.signature.operations:
        if ar == 0:
            if h[int(M.tables[op])] != int(N.tables[op]):
                return False
            continue
        if M.k == 0:
            continue
        lhs = h[M.tables[op]]
        rhs = N.tables[op][np.ix_(*([h] * ar))]
        if not np.array_equal(lhs, rhs):
            return False
    return True


def generating_recipes(M: FiniteModel):
    """A generating set of M and, for every element, how it is built.

    Returns (generators, order, recipes): ``recipes[e]`` is ``("gen", i)`` or
    ``(op, args)`` and elements in ``order`` only use earlier elements.
    """
    k = M.k
    known = np.zeros(k, dtype=bool)
    recipes = [None] * k
    order = []
    gens = []

    def add(e, rec):
        if not known[e]:
            known[e] = True
            recipes[e] = rec
            order.append(e)
            return True
        return False

    def close():
        changed = True
        while changed:
            changed = False
            for op, ar in M.theory.signature.operations:
                if ar == 0:
                    changed |= add(int(M.tables[op]), (op, ()))
                    continue
                ks = np.flatnonzero(known)
                if not len(ks):
                    continue
                sub = M.tables[op][np.ix_(*([ks] * ar))]
                flat = sub.ravel()
                new = ~known[flat]
                if not new.any():
                    continue
                for pos in np.flatnonzero(new):
                    e = int(flat[pos])
                    if known[e]:
                        continue
                    coords = np.unravel_index(pos, sub.shape)
                    add(e, (op, tuple(int(ks[c]) for c in coords)))
                    changed = True
    close()
    for e in range(k):
        if not known[e]:
            gens.append(e)
            add(e, ("gen", len(gens) - 1))
            close()
    return gens, order, recipes


def _homs_among(M: FiniteModel, N: FiniteModel, H: np.ndarray, screen=64) -> np.ndarray:
    """Rows of the candidate matrix ``H`` (one map ``M -> N`` per row) that are homomorphisms.

    Large tables are first screened on a fixed sample of argument tuples; the
    full check then runs only on rows that survive.
    """
    ok = np.ones(len(H), dtype=bool)
    ops = M.theory.signature.operations
    for op, ar in ops:
        if ar == 0:
            ok &= H[:, int(M.tables[op])] == int(N.tables[op])
    if M.k == 0:
        return ok
    rng = np.random.default_rng(0)
    for op, ar in ops:
        if ar == 0 or M.k ** ar <= screen or not ok.any():
            continue
        pts = rng.integers(0, M.k, size=(screen, ar))
        rows = np.flatnonzero(ok)
        sub = H[rows]
        lhs = sub[:, M.tables[op][tuple(pts.T)]]
        rhs = N.tables[op][tuple(sub[:, pts[:, j]] for j in range(ar))]
        ok[rows] = (lhs == rhs).all(axis=1)
    for op, ar in ops:
        if ar == 0 or not ok.any():
            continue
        rows = np.flatnonzero(ok)
        sub = H[rows]
        lhs = sub[:, M.tables[op]]                       # (rows, k, .., k)
        idx = []
        for j in range(ar):
            shape = [len(sub)] + [1] * ar
            shape[j + 1] = M.k
            idx.append(sub.reshape(shape))
        rhs = N.tables[op][tuple(idx)]
        ok[rows] = (lhs == rhs).reshape(len(sub), -1).all(axis=1)
    return ok


def hom_models(M: FiniteModel, N: FiniteModel, cap=DEFAULT_MODEL_CAP, generators=None) -> list:
    """All homomorphisms ``M -> N`` as arrays ``h`` with ``h[a]`` the image of ``a``.

    A homomorphism is fixed by its values on a generating set, so candidates
    are the extensions of all generator assignments; each is then checked.
    Candidates are processed in blocks, one row per generator assignment.
    """
    if M.theory is not N.theory:
        raise ValueError("models of different theories")
    gens, order, recipes = generating_recipes(M) if generators is None else generators
    out = []
    if N.k == 0 and M.k > 0:
        return out
    arity = max([a for _, a in M.theory.signature.operations] + [1])
    block = max(1, 2_000_000 // max(1, M.k ** arity))
    assignments = itertools.product(range(N.k), repeat=len(gens))
    while True:
        chunk = list(itertools.islice(assignments, block))
        if not chunk:
            break
        images = np.array(chunk, dtype=np.int64).reshape(len(chunk), len(gens))
        H = np.zeros((len(chunk), M.k), dtype=np.int64)
        for e in order:
            rec = recipes[e]
            if rec[0] == "gen":
                H[:, e] = images[:, rec[1]]
            else:
                op, args = rec
                H[:, e] = N.tables[op][tuple(H[:, a] for a in args)] if args \
                    else int(N.tables[op])
        for row in np.flatnonzero(_homs_among(M, N, H)):
            out.append(H[row].copy())
            if len(out) > cap:
                raise ModelCapExceeded(f"more than {cap} homomorphisms")
    return out


def count_homs_bruteforce(M: FiniteModel, N: FiniteModel) -> int:
    """Independent count over all maps (small carriers only)."""
    return sum(is_homomorphism(M, N, np.array(h))
               for h in itertools.product(range(N.k), repeat=M.k))


def free_model(T, r: int, sample=100_000) -> tuple:
    """The free model on r generators as a FiniteModel, plus the generator elements.

    Requires a backend listing the elements; equations are checked exhaustively
    when small and on a seeded sample of assignments otherwise.
    """
    b = T.backend
    els = b.elements(r)
    if els is None:
        raise ValueError(f"{T.name}: free model on {r} generators is infinite")
    index = {e: i for i, e in enumerate(els)}
    k = len(els)
    fast = getattr(b, "operation_tables", None)
    tabs = fast(r) if fast is not None else None
    if tabs is None:
        tabs = {}
        for op, ar in T.signature.operations:
            arr = np.zeros((k,) * ar, dtype=np.int64)
            for args in itertools.product(range(k), repeat=ar):
                arr[args] = index[b.apply(op, [els[a] for a in args], r)]
            tabs[op] = arr
    M = FiniteModel(T, k, tabs, sample=sample)
    gens = [index[b.gen(i, r)] for i in range(r)]
    return M, gens


def free_model_recipes(M: FiniteModel, gens: Sequence[int]):
    """Recipes building every element of a free model from its generators."""
    k = M.k
    known = np.zeros(k, dtype=bool)
    recipes = [None] * k
    order = []
    for i, g in enumerate(gens):
        if not known[g]:
            known[g] = True
            recipes[g] = ("gen", i)
            order.append(g)
    changed = True
    while changed:
        changed = False
        for op, ar in M.theory.signature.operations:
            if ar == 0:
                e = int(M.tables[op])
                if not known[e]:
                    known[e] = True
                    recipes[e] = (op, ())
                    order.append(e)
                    changed = True
                continue
            ks = np.flatnonzero(known)
            if not len(ks):
                continue
            sub = M.tables[op][np.ix_(*([ks] * ar))]
            flat = sub.ravel()
            for pos in np.flatnonzero(~known[flat]):
                e = int(flat[pos])
                if known[e]:
                    continue
                known[e] = True
                coords = np.unravel_index(pos, sub.shape)
                recipes[e] = (op, tuple(int(ks[c]) for c in coords))
                order.append(e)
                changed = True
    if not known.all():
        raise ValueError("the given elements do not generate the model")
    return list(range(len(gens))), order, recipes


# -- abelian group objects -------------------------------------------------

@dataclass
class AbelianObjectWitness:
    base: FiniteModel
    add: np.ndarray
    neg: np.ndarray
    zero: int

    def to_json(self):
        return {"base": self.base.to_json(), "add": self.add.tolist(),
                "neg": self.neg.tolist(), "zero": int(self.zero)}


def abelian_group_structures(k: int) -> list:
    """All abelian group tables (add, neg, zero) on ``{0..k-1}``."""
    from .catalogue import ab_theory
    return [(M.tables["add"], M.tables["neg"], int(M.tables["zero"]))
            for M in iter_models(ab_theory(), k)]


def is_group_object(M: FiniteModel, add, neg, zero) -> bool:
    """Whether add, neg and the constant zero are homomorphisms of T-models."""
    k = M.k
    add = np.asarray(add)
    neg = np.asarray(neg)
    for op, ar in M.theory.signature.operations:
        t = M.tables[op]
        if ar == 0:
            c = int(t)
            if add[c, c] != c or neg[c] != c or c != zero:
                return False
            continue
        if t[(zero,) * ar] != zero:
            return False
        if not np.array_equal(neg[t], t[np.ix_(*([neg] * ar))]):
            return False
        # add(f(x..), f(y..)) = f(add(x1,y1), ..)
        idx = np.indices((k,) * (2 * ar))
        xs, ys = idx[:ar], idx[ar:]
        lhs = add[t[tuple(xs)], t[tuple(ys)]]
        rhs = t[tuple(add[x, y] for x, y in zip(xs, ys))]
        if not np.array_equal(lhs, rhs):
            return False
    return True


def abelian_group_objects(T, k: int, cap=DEFAULT_MODEL_CAP) -> list:
    """Every (model, abelian group structure) pair on ``{0..k-1}`` whose
    operations are T-model homomorphisms."""
    structures = abelian_group_structures(k)
    out = []
    for M in iter_models(T, k):
        for add, neg, zero in structures:
            if is_group_object(M, add, neg, zero):
                out.append(AbelianObjectWitness(M, add, neg, zero))
                if len(out) > cap:
                    raise ModelCapExceeded(f"more than {cap} witnesses")
    return out


# -- counterexamples -------------------------------------------------------

def find_violation(T, equations: Sequence[Equation], size_bound=6, cap=DEFAULT_MODEL_CAP,
                   instance_limit=DEFAULT_INSTANCE_LIMIT, node_limit=200_000) -> Optional[dict]:
    """A finite model of T (smallest carrier first) and an assignment breaking one equation.

    Each carrier size gets at most ``node_limit`` search nodes; sizes whose
    search is cut off are skipped.
    """
    for k in range(1, size_bound + 1):
        try:
            it = iter_models(T, k, instance_limit, node_limit)
            for count, M in enumerate(it):
                if count > cap:
                    break
                for eq in equations:
                    v = check_equations([eq], M.tables, k)
                    if not v.valid:
                        return {"size": k, "model": M.to_json(), "equation": str(eq),
                                "assignment": list(v.assignment)}
        except SearchTooLarge:
            continue
    return None
