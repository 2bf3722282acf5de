"""Tensoring Boolean algebras with abelian groups kills everything.

The derivation below is found by search and then replayed step by step.
"""
from lawvere import (abelian_group_objects, assembly_pi0, boole_theory, detect_trivial_ring,
                     replay_triviality)

B = boole_theory()
for k in (1, 2, 4):
    print(f"abelian group objects on {k} points: {len(abelian_group_objects(B, k))}")

verdict = detect_trivial_ring(B)
print(verdict.message)
for i, step in enumerate(verdict.steps):
    print(f"  {i:2d}. {step.left} = {step.right}  [{step.rule}]")
print("replayed:", replay_triviality(B, verdict))

rep = assembly_pi0(B)
print(f"assembly: {rep.source.group} -> {rep.target.group} ({rep.map.kind})")
