"""Lawvere theories: free models, Kronecker products and K0."""

from .catalogue import (ab_theory, boole_theory, cantor_theory, groups_theory, gsets_theory,
                        load_theory, modr_theory, permutations_theory, rings_theory,
                        sets_theory, user_theory)
from .dsl import ParseError, format_presentation, parse_presentation, parse_term
from .groups import FiniteGroup, count_actions, cyclic_group, named_group, symmetric_group
from .kronecker import (KroneckerTheory, bilinear_on_morphisms, check_bilinear_axioms,
                        is_commutative_theory, kronecker, kronecker_many, times_left,
                        times_right)
from .kzero import (K0Certificate, aut_group, assembly_pi0, k0, k0_pushforward, k0_ring,
                    verify_certificate)
from .linearization import (detect_trivial_ring, group_ring, leavitt_normalize,
                            leavitt_presentation, linearize, replay_triviality,
                            verify_rank_iso)
from .models import (FiniteModel, abelian_group_objects, check_model, count_models,
                     enumerate_models, hom_models, product_model)
from .multicat import (check_coherence, check_m1_module, check_symmetry_square,
                       check_unit_coherence, m1, underlying)
from .ncpoly import NCPoly, format_ncpoly, parse_ncpoly
from .rewrite import KBO, RewriteRule, RewriteSystem, check_local_confluence, complete
from .terms import App, Equation, Presentation, Signature, Var, substitute, term_size
from .theory import (FMor, Theory, TheoryMorphism, check_theory_morphism, compose, coproduct,
                     hom_enumerate, identity, is_iso)
