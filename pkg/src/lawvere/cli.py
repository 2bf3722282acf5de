"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 inconclusive or bound-limited, 3 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from importlib import metadata

from .backends import Inconclusive
from .catalogue import load_theory
from .dsl import ParseError, format_presentation, parse_term
from .rewrite import BudgetExhausted
from .terms import TermError

OK, FAILED, INCONCLUSIVE, USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


# -- argument helpers ------------------------------------------------------

def _theory(args, name):
    bounds = {"max_rules": args.kb_max_rules, "max_term_size": args.kb_max_term_size,
              "step_budget": args.trs_budget}
    try:
        T = load_theory(name, **bounds)
    except (ParseError, TermError) as exc:
        raise UsageError(f"{name}: {exc}") from exc
    except (ValueError, FileNotFoundError) as exc:
        raise UsageError(str(exc)) from exc
    trs = getattr(T.backend, "trs", None)
    if trs is not None:
        trs.step_budget = args.trs_budget
    return T


def _morphism(T, text):
    """``N: t1; t2; ...``: the morphism T_k -> T_N with the k listed components."""
    if ":" not in text:
        raise UsageError(f"morphism {text!r} must look like 'N: t1; t2'")
    head, _, body = text.partition(":")
    try:
        n = int(head.strip())
    except ValueError as exc:
        raise UsageError(f"bad target arity in {text!r}") from exc
    comps = [c.strip() for c in body.split(";") if c.strip()]
    try:
        return T.fmor([parse_term(c, T.signature, n) for c in comps], n)
    except (ParseError, TermError) as exc:
        raise UsageError(str(exc)) from exc


# -- subcommands -----------------------------------------------------------

def cmd_theory(args):
    from .kronecker import is_commutative_theory
    T = _theory(args, args.theory)
    res = {"name": T.name, "kind": T.kind,
           "operations": [f"{o}/{a}" for o, a in T.signature.operations],
           "equations": [str(e) for e in T.presentation.equations],
           "presentation": format_presentation(T.presentation),
           "backend": T.backend.describe()}
    code = OK
    comp = getattr(T, "completion", None)
    if comp is not None:
        res["completion"] = comp.to_json()
        if not comp.ok:
            code = INCONCLUSIVE
    if args.commutativity:
        v = is_commutative_theory(T)
        res["commutativity"] = v.to_json()
        if v.verdict == "inconclusive":
            code = INCONCLUSIVE
    return res, code


def cmd_normalize(args):
    T = _theory(args, args.theory)
    try:
        t = parse_term(args.term, T.signature, args.context)
    except (ParseError, TermError) as exc:
        raise UsageError(str(exc)) from exc
    nf = T.normalize(t, args.context)
    return {"term": str(t), "context": args.context, "normal_form": str(nf),
            "backend": T.backend.kind}, OK


def cmd_hom(args):
    from .theory import HomCapExceeded, hom_count, hom_enumerate
    T = _theory(args, args.theory)
    bound = args.size_bound
    if bound is None and not T.finite:
        raise UsageError(f"{T.name} has infinite hom-sets; pass --size-bound")
    count = hom_count(T, args.m, args.n, bound)
    res = {"theory": T.name, "source": args.m, "target": args.n, "size_bound": bound,
           "count": count, "exhaustive": bound is None}
    if not args.count_only:
        try:
            res["morphisms"] = [f.to_json()["components"]
                                for f in hom_enumerate(T, args.m, args.n, bound, args.cap)]
        except HomCapExceeded as exc:
            res["error"] = str(exc)
            return res, INCONCLUSIVE
    return res, OK


def cmd_compose(args):
    from .theory import compose
    T = _theory(args, args.theory)
    f = _morphism(T, args.f)
    g = _morphism(T, args.g)
    if f.dst != g.src:
        raise UsageError(f"cannot compose: f lands in T{f.dst}, g starts at T{g.src}")
    h = compose(g, f)
    return {"f": f.to_json(), "g": g.to_json(), "g_after_f": h.to_json()}, OK


def _bilinear(args, S, T):
    from .kronecker import check_bilinear_axioms, kronecker
    K = kronecker(S, T)
    rep = check_bilinear_axioms(K, args.samples, args.arity_bound, args.seed)
    return rep


def cmd_kron(args):
    from .kronecker import kronecker
    S, T = _theory(args, args.s), _theory(args, args.t)
    K = kronecker(S, T)
    res = {"kronecker": K.describe(),
           "presentation": format_presentation(K.combined.presentation),
           "embeddings_valid": [v.valid for v in K.check_embeddings()]}
    code = OK if all(res["embeddings_valid"]) else FAILED
    if args.check_bilinear:
        rep = _bilinear(args, S, T)
        res["bilinear"] = rep.to_json()
        if not rep.ok:
            code = FAILED
    return res, code


def cmd_check_bilinear(args):
    S, T = _theory(args, args.s), _theory(args, args.t)
    rep = _bilinear(args, S, T)
    return {"theories": [S.name, T.name], "samples": args.samples,
            "arity_bound": args.arity_bound, **rep.to_json()}, OK if rep.ok else FAILED


def cmd_models(args):
    from .models import count_models, enumerate_models, models_up_to_iso, ModelCapExceeded
    T = _theory(args, args.theory)
    res = {"theory": T.name, "size": args.size}
    try:
        if args.count_only and not args.up_to_iso:
            res["count"] = count_models(T, args.size)
            return res, OK
        models = enumerate_models(T, args.size)
    except ModelCapExceeded as exc:
        res["error"] = str(exc)
        return res, INCONCLUSIVE
    res["count"] = len(models)
    if args.up_to_iso:
        models = models_up_to_iso(models)
        res["count_up_to_iso"] = len(models)
    if not args.count_only:
        res["models"] = [M.to_json()["tables"] for M in models]
    return res, OK


def cmd_abelian_objects(args):
    from .models import abelian_group_objects
    T = _theory(args, args.theory)
    ws = abelian_group_objects(T, args.size)
    return {"theory": T.name, "size": args.size, "count": len(ws),
            "objects": [w.to_json() for w in ws]}, OK


def cmd_linearize(args):
    from .linearization import linearize
    T = _theory(args, args.theory)
    K, lin = linearize(T)
    return {"linearization": K.describe(), "morphism": lin.to_json(),
            "morphism_valid": K.check_embeddings()[1].valid}, OK


def cmd_trivial_ring(args):
    from .linearization import detect_trivial_ring, replay_triviality
    T = _theory(args, args.theory)
    v = detect_trivial_ring(T, args.budget)
    res = v.to_json()
    if not v.trivial:
        res["verdict"] = "not shown trivial"
        return res, INCONCLUSIVE
    res["verdict"] = "trivial"
    res["replayed"] = replay_triviality(T, v)
    return res, OK if res["replayed"] else FAILED


def cmd_leavitt(args):
    from .linearization import (NormalizationMismatch, leavitt_critical_pairs,
                                leavitt_normalize, leavitt_presentation, verify_rank_iso)
    from .ncpoly import format_ncpoly, parse_ncpoly
    if args.a < 2:
        raise UsageError("a must be at least 2")
    P = leavitt_presentation(args.a)
    cps = leavitt_critical_pairs(args.a)
    res = {"presentation": P.to_json(), "relation_count": len(P.relations),
           "critical_pairs": len(cps), "locally_confluent": all(c[3] for c in cps)}
    code = OK if res["locally_confluent"] else FAILED
    if args.normalize:
        try:
            p = parse_ncpoly(args.normalize)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        res["normal_form"] = format_ncpoly(leavitt_normalize(args.a, p))
    if args.verify_rank_iso:
        try:
            res["rank_iso"] = verify_rank_iso(args.a).to_json()
        except NormalizationMismatch as exc:
            res["rank_iso"] = {"verified": False, "error": str(exc)}
            code = FAILED
    return res, code


def cmd_k0(args):
    from .kzero import k0
    T = _theory(args, args.theory)
    cert = k0(T, args.term_bound, args.arity_bound, args.cap)
    return cert.to_json(), OK if cert.conclusive else INCONCLUSIVE


def cmd_assembly(args):
    from .kzero import assembly_pi0
    T = _theory(args, args.theory)
    rep = assembly_pi0(T, args.term_bound, args.arity_bound)
    status = rep.map.status
    return rep.to_json(), {"ok": OK, "inconclusive": INCONCLUSIVE}.get(status, FAILED)


def cmd_pushforward(args):
    from .kzero import k0_pushforward
    from .theory import TheoryMorphism, check_theory_morphism
    try:
        with open(args.file, encoding="utf-8") as fh:
            spec = json.load(fh)
        S = _theory(args, spec["source"])
        T = _theory(args, spec["target"])
        assign = {}
        for op, text in spec.get("assignment", {}).items():
            if op not in S.arity:
                raise UsageError(f"{op!r} is not an operation of {S.name}")
            assign[op] = parse_term(text, T.signature, S.arity[op])
        L = TheoryMorphism(S, T, assign)
    except (OSError, KeyError, json.JSONDecodeError, ParseError, TermError) as exc:
        raise UsageError(f"{args.file}: {exc}") from exc
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    verdict = check_theory_morphism(L)
    if not verdict.valid:
        return {"morphism": L.to_json(), "valid": verdict.to_json()}, FAILED
    rep = k0_pushforward(L, args.term_bound, args.arity_bound)
    status = rep.map.status
    return rep.to_json(), {"ok": OK, "inconclusive": INCONCLUSIVE}.get(status, FAILED)


def cmd_aut(args):
    from .kzero import aut_group
    from .theory import HomCapExceeded
    T = _theory(args, args.theory)
    if args.bound is None and not T.finite:
        raise UsageError(f"{T.name} has infinite hom-sets; pass --bound")
    try:
        A = aut_group(T, args.n, args.bound)
    except HomCapExceeded as exc:
        return {"theory": T.name, "n": args.n, "error": str(exc)}, INCONCLUSIVE
    return A.to_json(), OK if A.closed else INCONCLUSIVE


def cmd_check_coherence(args):
    from .multicat import check_coherence
    S, T = _theory(args, args.s), _theory(args, args.t)
    V = _theory(args, args.v) if args.v else None
    rep = check_coherence(S, T, V, args.cap, args.samples, args.seed)
    return rep.to_json(), OK if rep.ok else FAILED


# -- parser ----------------------------------------------------------------

_DEFAULTS = {"json": False, "seed": 0, "jobs": 1, "timing": False, "trs_budget": 10_000,
             "kb_max_rules": 50, "kb_max_term_size": 40}


def _common_flags(parser, default):
    """Global flags; ``default`` is SUPPRESS on subcommands so either position works."""
    d = (lambda k: argparse.SUPPRESS) if default is None else (lambda k: _DEFAULTS[k])
    parser.add_argument("--json", action="store_true", default=d("json"),
                        help="print the full JSON report")
    parser.add_argument("--seed", type=int, default=d("seed"))
    parser.add_argument("--jobs", type=int, default=d("jobs"),
                        help="worker count (computations are deterministic and run in order)")
    parser.add_argument("--timing", action="store_true", default=d("timing"),
                        help="include wall time in the report")
    parser.add_argument("--trs-budget", type=int, default=d("trs_budget"))
    parser.add_argument("--kb-max-rules", type=int, default=d("kb_max_rules"))
    parser.add_argument("--kb-max-term-size", type=int, default=d("kb_max_term_size"))


def build_parser():
    common = _Parser(add_help=False)
    _common_flags(common, None)

    p = _Parser(prog="lawvere", description="Lawvere theories: free models, Kronecker "
                "products, K0 certificates.")
    p.add_argument("--version", action="version", version=_version())
    _common_flags(p, True)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, fn, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("theory", cmd_theory, "describe a theory")
    sp.add_argument("theory")
    sp.add_argument("--commutativity", action="store_true")

    sp = add("normalize", cmd_normalize, "normal form of a term")
    sp.add_argument("theory")
    sp.add_argument("term")
    sp.add_argument("--context", type=int, default=1)

    sp = add("hom", cmd_hom, "enumerate F_T(m, n)")
    sp.add_argument("theory")
    sp.add_argument("m", type=int)
    sp.add_argument("n", type=int)
    sp.add_argument("--size-bound", type=int)
    sp.add_argument("--count-only", action="store_true")
    sp.add_argument("--cap", type=int, default=100_000)

    sp = add("compose", cmd_compose, "g after f, morphisms written 'N: t1; t2'")
    sp.add_argument("theory")
    sp.add_argument("f")
    sp.add_argument("g")

    for name, fn in (("kron", cmd_kron), ("check-bilinear", cmd_check_bilinear)):
        sp = add(name, fn, "Kronecker product" if name == "kron" else "bilinear functor axioms")
        sp.add_argument("s")
        sp.add_argument("t")
        if name == "kron":
            sp.add_argument("--check-bilinear", action="store_true")
        sp.add_argument("--samples", type=int, default=100)
        sp.add_argument("--arity-bound", type=int, default=3)

    sp = add("models", cmd_models, "finite models on {0..k-1}")
    sp.add_argument("theory")
    sp.add_argument("--size", type=int, required=True)
    sp.add_argument("--count-only", action="store_true")
    sp.add_argument("--up-to-iso", action="store_true")

    sp = add("abelian-objects", cmd_abelian_objects, "abelian group objects in T-models")
    sp.add_argument("theory")
    sp.add_argument("--size", type=int, required=True)

    sp = add("linearize", cmd_linearize, "the linearization Z⊗T")
    sp.add_argument("theory")

    sp = add("trivial-ring", cmd_trivial_ring, "derive that Z⊗T is trivial")
    sp.add_argument("theory")
    sp.add_argument("--budget", type=int, default=5)

    sp = add("leavitt", cmd_leavitt, "Leavitt algebra normal forms")
    sp.add_argument("a", type=int)
    sp.add_argument("--verify-rank-iso", action="store_true")
    sp.add_argument("--normalize", help="polynomial such as '3*R1.C2 - 1'")

    for name, fn in (("k0", cmd_k0), ("assembly", cmd_assembly)):
        sp = add(name, fn, "K0 certificate" if name == "k0" else "assembly map at pi_0")
        sp.add_argument("theory")
        sp.add_argument("--term-bound", type=int, default=6)
        sp.add_argument("--arity-bound", type=int, default=6)
        sp.add_argument("--cap", type=int, default=4)

    sp = add("pushforward", cmd_pushforward, "K0 map induced by a theory morphism")
    sp.add_argument("file")
    sp.add_argument("--term-bound", type=int, default=6)
    sp.add_argument("--arity-bound", type=int, default=6)

    sp = add("aut", cmd_aut, "automorphism group of T_n")
    sp.add_argument("theory")
    sp.add_argument("n", type=int)
    sp.add_argument("--bound", type=int)

    sp = add("check-coherence", cmd_check_coherence, "coherence diagrams in a finite window")
    sp.add_argument("s")
    sp.add_argument("t")
    sp.add_argument("v", nargs="?")
    sp.add_argument("--cap", type=int, default=3)
    sp.add_argument("--samples", type=int, default=50)
    return p


def _summary(command, result, code):
    status = {OK: "ok", FAILED: "FAILED", INCONCLUSIVE: "inconclusive"}[code]
    keys = ("group", "verdict", "count", "map", "diagram_failures", "normal_form",
            "g_after_f", "pairs_checked", "square_failures", "delta_failures",
            "monoidality_failures", "order", "rank_iso", "locally_confluent", "kronecker",
            "linearization", "trivial", "surjective", "name")
    lines = [f"{command}: {status}"]
    for k in keys:
        if k in result:
            v = result[k]
            if isinstance(v, dict):
                v = v.get("kind") or v.get("theory") or v.get("verified") or \
                    v.get("components") or json.dumps(v, sort_keys=True)[:200]
            lines.append(f"  {k}: {v}")
    return "\n".join(lines)


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("a subcommand is required")
        start = time.perf_counter()
        result, code = args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE
    except (Inconclusive, BudgetExhausted) as exc:
        result, code = {"error": str(exc)}, INCONCLUSIVE
        start = None
    report = {"command": args.command, "argv": list(argv if argv is not None else sys.argv[1:]),
              "version": _version(), "seed": args.seed, "exit_code": code, "result": result}
    if args.timing and start is not None:
        report["seconds"] = round(time.perf_counter() - start, 3)
    if args.json:
        out.write(json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    else:
        out.write(_summary(args.command, result, code) + "\n")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
