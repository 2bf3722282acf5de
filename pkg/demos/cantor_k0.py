"""Cantor algebras: an isomorphism T1 = Ta makes K0 cyclic of order a - 1,
and linearizing gives modules over the Leavitt ring with the same K0."""
from lawvere import assembly_pi0, cantor_theory, k0, verify_rank_iso

for a in (2, 3, 4):
    cert = k0(cantor_theory(a))
    u, v = cert.witness
    print(f"Cantor{a}: K0 = {cert.group}")
    print(f"  u = {u.components[0]}")
    print(f"  v = {', '.join(str(c) for c in v.components)}")
    print(f"  {cert.minimality}")

for a in (2, 3):
    proof = verify_rank_iso(a)
    rep = assembly_pi0(cantor_theory(a))
    print(f"L{a}: R.C^t = {proof.row_times_column}; assembly {rep.map.kind} "
          f"{rep.source.group} -> {rep.target.group}")
