"""Exact discrete constrained transport: order checks, irreducible pavings,
polar sets, relaxed transports and transport rays, all over the rationals."""

from .exactlp import Infeasible, LinearProgram, LPBuilder, Optimal, Unbounded, solve_lp, verify_certificate
from .ground import (DiscreteMeasure, GeneratorSet, GroundSet, Instance, build_generator_set,
                     evaluation_matrix, f_convex_hull_membership, growth_norm)
from .order import (InOrder, NotInOrder, TransportPlan, assemble_transport_lp, check_f_order,
                    maximal_support_plan, verify_order_certificate)
from .paving import (Paving, Polytope, build_apirc, build_paving, check_b_membership, component,
                     gleason_part, hull_equal, rint_intersects)
from .polar import PairSet, check_polar_theorem, is_trivially_polar, max_mass_on
from .raylocal import MetricInstance, kantorovich_potential, ray_mass_balance, transport_rays, w1_primal
from .scenarios import GridDomain, gen_classic, gen_grid_harmonic, gen_harmonic_polynomials

__all__ = [
    "DiscreteMeasure", "GeneratorSet", "GridDomain", "GroundSet", "InOrder", "Infeasible",
    "Instance", "LPBuilder", "LinearProgram", "MetricInstance", "NotInOrder", "Optimal",
    "PairSet", "Paving", "Polytope", "TransportPlan", "Unbounded", "assemble_transport_lp",
    "build_apirc", "build_generator_set", "build_paving", "check_b_membership", "check_f_order",
    "check_polar_theorem", "component", "evaluation_matrix", "f_convex_hull_membership",
    "gen_classic", "gen_grid_harmonic", "gen_harmonic_polynomials", "gleason_part",
    "growth_norm", "hull_equal", "is_trivially_polar", "kantorovich_potential",
    "max_mass_on", "maximal_support_plan", "ray_mass_balance", "rint_intersects", "solve_lp",
    "transport_rays", "verify_certificate", "verify_order_certificate", "w1_primal",
]
__version__ = "0.1.0"
