"""The Kronecker product of G-sets and H-sets has the (G x H)-sets as models."""
from lawvere import count_models, gsets_theory, kronecker, named_group
from lawvere.groups import count_actions, direct_product

for g, h in (("C2", "C2"), ("C2", "C3"), ("C3", "C3")):
    G, H = named_group(g), named_group(h)
    K = kronecker(gsets_theory(G), gsets_theory(H))
    P = direct_product(G, H)
    rows = [(k, count_models(K.combined, k), count_actions(P, k)) for k in range(1, 5)]
    print(f"{g} (x) {h}: " + "  ".join(f"|X|={k}: {a} vs {b}" for k, a, b in rows))
