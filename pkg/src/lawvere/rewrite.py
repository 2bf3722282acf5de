"""Term rewriting: normalization, Knuth-Bendix ordering, bounded completion and
critical-pair diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .terms import (App, Presentation, Term, TermError, Var, max_var, positions,
                    replace_at, shift, substitute_map, subterm, term_size, var_counts,
                    var_set)

DEFAULT_STEP_BUDGET = 10_000


class BudgetExhausted(RuntimeError):
    """Normalization hit its step budget; the system may not terminate."""


# -- matching and unification ------------------------------------------------

def match(pattern: Term, t: Term, sub: Optional[dict] = None) -> Optional[dict]:
    sub = {} if sub is None else sub
    stack = [(pattern, t)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            bound = sub.get(p.index)
            if bound is None:
                sub[p.index] = s
            elif bound != s:
                return None
        elif isinstance(s, Var) or p.op != s.op:
            return None
        else:
            stack.extend(zip(p.args, s.args))
    return sub


def _walk(t, sub):
    while isinstance(t, Var) and t.index in sub:
        t = sub[t.index]
    return t


def _occurs(i, t, sub):
    t = _walk(t, sub)
    if isinstance(t, Var):
        return t.index == i
    return any(_occurs(i, a, sub) for a in t.args)


def _resolve(t, sub):
    t = _walk(t, sub)
    if isinstance(t, Var):
        return t
    return App(t.op, [_resolve(a, sub) for a in t.args])


def unify(s: Term, t: Term) -> Optional[dict]:
    """Most general unifier as an idempotent substitution, or None."""
    sub: dict[int, Term] = {}
    stack = [(s, t)]
    while stack:
        a, b = stack.pop()
        a, b = _walk(a, sub), _walk(b, sub)
        if a == b:
            continue
        if isinstance(a, Var):
            if _occurs(a.index, b, sub):
                return None
            sub[a.index] = b
        elif isinstance(b, Var):
            if _occurs(b.index, a, sub):
                return None
            sub[b.index] = a
        elif a.op != b.op or len(a.args) != len(b.args):
            return None
        else:
            stack.extend(zip(a.args, b.args))
    return {k: _resolve(v, sub) for k, v in sub.items()}


# -- Knuth-Bendix order ------------------------------------------------------

class KBO:
    """Knuth-Bendix order.

    ``weights`` default to 1 per symbol (variables weigh 1); ``precedence``
    lists operations from smallest to largest and defaults to declaration
    order.  Operations absent from the precedence are compared by name.
    """

    def __init__(self, signature, weights=None, precedence=None):
        self.arity = signature.arity
        self.weights = {name: 1 for name in self.arity}
        if weights:
            self.weights.update(weights)
        order = list(precedence) if precedence is not None else signature.names
        self.rank = {name: i for i, name in enumerate(order)}

    def weight(self, t):
        if isinstance(t, Var):
            return 1
        return self.weights.get(t.op, 1) + sum(self.weight(a) for a in t.args)

    def _prec_gt(self, f, g):
        rf, rg = self.rank.get(f), self.rank.get(g)
        if rf is not None and rg is not None:
            return rf > rg
        return f > g

    def greater(self, s: Term, t: Term) -> bool:
        if s == t or isinstance(s, Var):
            return False
        cs, ct = var_counts(s), var_counts(t)
        if any(cs.get(v, 0) < c for v, c in ct.items()):
            return False
        ws, wt = self.weight(s), self.weight(t)
        if ws != wt:
            return ws > wt
        if isinstance(t, Var):
            # s = f^k(t) with f unary of weight 0
            u = s
            while isinstance(u, App) and len(u.args) == 1:
                u = u.args[0]
            return u == t
        if s.op != t.op:
            return self._prec_gt(s.op, t.op)
        for a, b in zip(s.args, t.args):
            if a != b:
                return self.greater(a, b)
        return False


# -- rules and systems -------------------------------------------------------

@dataclass(frozen=True)
class RewriteRule:
    lhs: Term
    rhs: Term
    context: int = 0

    def __post_init__(self):
        if isinstance(self.lhs, Var):
            raise TermError("rule left-hand side must not be a variable")
        if not var_set(self.rhs) <= var_set(self.lhs):
            raise TermError(f"rule {self} introduces variables on the right")

    def __str__(self):
        return f"{self.lhs} -> {self.rhs}"


@dataclass(frozen=True)
class Step:
    rule: int
    position: tuple


class RewriteSystem:
    """Ordered rules applied leftmost-innermost."""

    def __init__(self, rules: Sequence[RewriteRule] = (), step_budget=DEFAULT_STEP_BUDGET):
        self.rules = tuple(rules)
        self.step_budget = step_budget
        self._by_head: dict[str, list[int]] = {}
        for i, r in enumerate(self.rules):
            self._by_head.setdefault(r.lhs.op, []).append(i)
        self._cache: dict[Term, Term] = {}

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def with_budget(self, budget):
        return RewriteSystem(self.rules, budget)

    def _root_step(self, t):
        for i in self._by_head.get(t.op, ()):
            r = self.rules[i]
            sub = match(r.lhs, t)
            if sub is not None:
                return i, substitute_map(r.rhs, sub)
        return None

    def normalize(self, t: Term, budget=None) -> Term:
        counter = [self.step_budget if budget is None else budget]
        return self._nf(t, counter)

    def _nf(self, t, counter):
        if isinstance(t, Var):
            return t
        hit = self._cache.get(t)
        if hit is not None:
            return hit
        orig = t
        while True:
            if isinstance(t, Var):
                break
            args = tuple(self._nf(a, counter) for a in t.args)
            if args != t.args:
                t = App(t.op, args)
            step = self._root_step(t)
            if step is None:
                break
            counter[0] -= 1
            if counter[0] < 0:
                raise BudgetExhausted(f"step budget exhausted normalizing {orig}")
            t = step[1]
        self._cache[orig] = t
        return t

    def normalize_traced(self, t: Term, budget=None) -> tuple[Term, list[Step]]:
        """Leftmost-innermost normalization recording every rewrite step."""
        budget = self.step_budget if budget is None else budget
        trace: list[Step] = []
        while True:
            found = self._find_innermost(t, ())
            if found is None:
                return t, trace
            pos, rule, result = found
            trace.append(Step(rule, pos))
            if len(trace) > budget:
                raise BudgetExhausted(f"step budget exhausted normalizing {t}")
            t = replace_at(t, pos, result)

    def _find_innermost(self, t, pos):
        if isinstance(t, Var):
            return None
        for i, a in enumerate(t.args):
            hit = self._find_innermost(a, pos + (i,))
            if hit is not None:
                return hit
        step = self._root_step(t)
        if step is not None:
            return pos, step[0], step[1]
        return None

    def is_normal(self, t: Term) -> bool:
        return self._find_innermost(t, ()) is None


def apply_step(rules: Sequence[RewriteRule], t: Term, step: Step) -> Term:
    r = rules[step.rule]
    s = subterm(t, step.position)
    sub = match(r.lhs, s)
    if sub is None:
        raise ValueError(f"rule {r} does not apply at {step.position} of {t}")
    return replace_at(t, step.position, substitute_map(r.rhs, sub))


# -- critical pairs ----------------------------------------------------------

@dataclass
class CriticalPair:
    rule1: int
    rule2: int
    position: tuple
    overlap: Term
    left: Term
    right: Term
    left_nf: Optional[Term] = None
    right_nf: Optional[Term] = None
    joinable: Optional[bool] = None

    def to_json(self):
        return {"rule1": self.rule1, "rule2": self.rule2,
                "position": list(self.position), "overlap": str(self.overlap),
                "left": str(self.left), "right": str(self.right),
                "left_nf": None if self.left_nf is None else str(self.left_nf),
                "right_nf": None if self.right_nf is None else str(self.right_nf),
                "joinable": self.joinable}


def _rename_apart(rule: RewriteRule, offset: int) -> RewriteRule:
    return RewriteRule(shift(rule.lhs, offset), shift(rule.rhs, offset),
                       rule.context + offset)


def critical_pairs_between(r1: RewriteRule, i1: int, r2: RewriteRule, i2: int):
    """Overlaps of r2's lhs into non-variable positions of r1's lhs."""
    off = max(max_var(r1.lhs), r1.context)
    r2 = _rename_apart(r2, off)
    out = []
    for pos in positions(r1.lhs):
        if i1 == i2 and pos == ():
            continue
        sub = unify(subterm(r1.lhs, pos), r2.lhs)
        if sub is None:
            continue
        overlap = substitute_map(r1.lhs, sub)
        left = substitute_map(r1.rhs, sub)
        right = replace_at(overlap, pos, substitute_map(r2.rhs, sub))
        out.append(CriticalPair(i1, i2, pos, overlap, left, right))
    return out


def critical_pairs(rules: Sequence[RewriteRule]):
    out = []
    for i, r1 in enumerate(rules):
        for j, r2 in enumerate(rules):
            out.extend(critical_pairs_between(r1, i, r2, j))
    return out


@dataclass
class ConfluenceReport:
    critical_pairs: list
    budget_exhausted: bool = False

    @property
    def locally_confluent(self) -> bool:
        return not self.budget_exhausted and all(cp.joinable for cp in self.critical_pairs)

    @property
    def non_joinable(self):
        return [cp for cp in self.critical_pairs if cp.joinable is False]

    def to_json(self):
        return {"locally_confluent": self.locally_confluent,
                "budget_exhausted": self.budget_exhausted,
                "critical_pairs": [cp.to_json() for cp in self.critical_pairs]}


def check_local_confluence(trs: RewriteSystem) -> ConfluenceReport:
    cps = critical_pairs(trs.rules)
    exhausted = False
    for cp in cps:
        try:
            cp.left_nf = trs.normalize(cp.left)
            cp.right_nf = trs.normalize(cp.right)
            cp.joinable = cp.left_nf == cp.right_nf
        except BudgetExhausted:
            exhausted = True
    return ConfluenceReport(cps, exhausted)


# -- bounded Knuth-Bendix completion -----------------------------------------

@dataclass
class _Eq:
    left: Term
    right: Term
    origin: tuple    # ("axiom", i) | ("cp", r1, r2, pos, overlap) | ("rule", rid)


@dataclass
class RuleRecord:
    """A rule produced by completion together with how it was obtained.

    ``source`` is the unoriented equation it came from; ``left_trace`` and
    ``right_trace`` rewrite the source sides (using earlier rules, by id) to
    the rule's two sides; ``flipped`` says the rule runs right-to-left.
    """
    id: int
    rule: RewriteRule
    source: _Eq
    left_trace: list
    right_trace: list
    flipped: bool


@dataclass
class CompletionResult:
    status: str                       # "success" | "unorientable" | "bound-exceeded" | "budget-exhausted"
    system: Optional[RewriteSystem]
    records: list
    active: list
    offending: Optional[tuple] = None
    message: str = ""

    @property
    def ok(self):
        return self.status == "success"

    def to_json(self):
        cps = []
        if self.system is not None:
            cps = [cp.to_json() for cp in check_local_confluence(self.system).critical_pairs]
        return {"status": self.status,
                "message": self.message,
                "rules": [str(r) for r in (self.system.rules if self.system else [])],
                "critical_pairs": cps,
                "offending": None if self.offending is None else [str(t) for t in self.offending]}


class CompletionFailure(RuntimeError):
    def __init__(self, result: CompletionResult):
        super().__init__(f"completion failed ({result.status}): {result.message}")
        self.result = result


def _nf_with(records, active_ids, t, budget):
    rules = [records[i].rule for i in active_ids]
    trs = RewriteSystem(rules, budget)
    nf, trace = trs.normalize_traced(t)
    return nf, [Step(active_ids[s.rule], s.position) for s in trace]


def complete(p: Presentation, max_rules=50, max_term_size=40, order: Optional[KBO] = None,
             step_budget=DEFAULT_STEP_BUDGET) -> CompletionResult:
    """Bounded Knuth-Bendix completion of ``p`` under ``order``."""
    order = order or KBO(p.signature)
    records: list[RuleRecord] = []
    active: list[int] = []
    pending = [_Eq(eq.left, eq.right, ("axiom", i)) for i, eq in enumerate(p.equations)]

    def fail(status, msg, pair=None):
        sys = RewriteSystem([records[i].rule for i in active], step_budget)
        return CompletionResult(status, None if status != "success" else sys, records,
                                list(active), pair, msg)

    while pending:
        eq = pending.pop(0)
        try:
            s, ts = _nf_with(records, active, eq.left, step_budget)
            t, tt = _nf_with(records, active, eq.right, step_budget)
        except BudgetExhausted as exc:
            return fail("budget-exhausted", str(exc), (eq.left, eq.right))
        if s == t:
            continue
        if order.greater(s, t):
            lhs, rhs, flipped, lt, rt = s, t, False, ts, tt
        elif order.greater(t, s):
            lhs, rhs, flipped, lt, rt = t, s, True, tt, ts
        else:
            return fail("unorientable", f"cannot orient {s} = {t}", (s, t))
        if term_size(lhs) > max_term_size or term_size(rhs) > max_term_size:
            return fail("bound-exceeded", f"term size bound {max_term_size} exceeded", (s, t))
        ctx = max(max_var(lhs), max_var(rhs))
        rid = len(records)
        new = RewriteRule(lhs, rhs, ctx)
        records.append(RuleRecord(rid, new, eq, ts if not flipped else tt,
                                  tt if not flipped else ts, flipped))
        # interreduce: rules whose lhs the new rule rewrites go back to the queue
        keep = []
        new_trs = RewriteSystem([new], step_budget)
        for i in active:
            r = records[i].rule
            if not new_trs.is_normal(r.lhs):
                pending.append(_Eq(r.lhs, r.rhs, ("rule", i)))
            else:
                keep.append(i)
        active = keep + [rid]
        if len(active) > max_rules:
            return fail("bound-exceeded", f"more than {max_rules} rules", (lhs, rhs))
        # rhs simplification is deferred: rules with reducible rhs are re-derived
        for i in list(active):
            r = records[i].rule
            others = [j for j in active if j != i]
            try:
                nf, _ = _nf_with(records, others, r.rhs, step_budget)
            except BudgetExhausted as exc:
                return fail("budget-exhausted", str(exc), (r.lhs, r.rhs))
            if nf != r.rhs:
                active.remove(i)
                pending.append(_Eq(r.lhs, r.rhs, ("rule", i)))
        for j in active:
            rj = records[j].rule
            for cp in critical_pairs_between(new, rid, rj, j) + (
                    critical_pairs_between(rj, j, new, rid) if j != rid else []):
                pending.append(_Eq(cp.left, cp.right,
                                   ("cp", cp.rule1, cp.rule2, cp.position, cp.overlap)))
    sys = RewriteSystem([records[i].rule for i in active], step_budget)
    return CompletionResult("success", sys, records, list(active))


def replay_completion(p: Presentation, result: CompletionResult) -> bool:
    """Re-check every recorded rule against the original equations.

    Each rule's source equation is rebuilt (axiom, critical-pair overlap, or an
    earlier rule), then the recorded rewrite traces must carry the source
    sides onto the rule sides.  Rules only use strictly earlier rules.
    """
    rules = [r.rule for r in result.records]
    for rec in result.records:
        src = rec.source
        kind = src.origin[0]
        if kind == "axiom":
            eq = p.equations[src.origin[1]]
            if (eq.left, eq.right) != (src.left, src.right):
                return False
        elif kind == "rule":
            rid = src.origin[1]
            if rid >= rec.id or (rules[rid].lhs, rules[rid].rhs) != (src.left, src.right):
                return False
        elif kind == "cp":
            _, r1, r2, pos, overlap = src.origin
            if r1 >= rec.id or r2 >= rec.id:
                return False
            try:
                left = apply_step(rules, overlap, Step(r1, ()))
                right = apply_step(rules, overlap, Step(r2, pos))
            except ValueError:
                return False
            if (left, right) != (src.left, src.right):
                return False
        else:
            return False
        a, b = (src.right, src.left) if rec.flipped else (src.left, src.right)
        for start, trace, goal in ((a, rec.left_trace, rec.rule.lhs),
                                   (b, rec.right_trace, rec.rule.rhs)):
            t = start
            for st in trace:
                if st.rule >= rec.id:
                    return False
                try:
                    t = apply_step(rules, t, st)
                except ValueError:
                    return False
            if t != goal:
                return False
    return True
