"""Scattering theory for the selfadjoint matrix Schrodinger operator on the
half line with general selfadjoint boundary conditions.

The public surface: boundary pairs and their canonical diagonal form,
piecewise-linear potential models with closed-form moment integrals, Jost and
regular solutions, the scattering matrix with its high-energy model, bound
states with multiplicities, and the integer phase-count identity.
"""

from ._backend import BACKEND_NAME
from ._integrator import DEFAULT_ATOL, DEFAULT_RTOL, IntegrationResult, integrate_system
from .boundary import (BoundaryPair, CanonicalBoundary, canonicalize,
                       dirichlet_pair, neumann_pair, pair_from_angles,
                       transform_pair, validate_pair)
from .jost import (JostEvaluation, RegularSolutionTrace, dagger_wronskian,
                   jost_at_origin, jost_matrix, jost_solution_on,
                   physical_solution, regular_solution)
from .potential import (MomentSet, PotentialModel, conjugate_potential,
                        evaluate, moments, piecewise_constant, sampled_grid,
                        validate_potential, zero_potential)
from .scattering import (AsymptoticModel, ScatteringSample, asymptotic_model,
                         model_J, model_f_origin, s0_reference, s_at_zero,
                         s_matrix)
from .spectrum import (BoundState, Contour, LevinsonReport,
                       default_kappa_max, derivative_identity_check,
                       detJ_imag_axis, detJ_smallk_order, find_bound_states,
                       levinson_dirichlet_convention, levinson_verify,
                       mu_from_s_zero, winding_number)

__all__ = [
    "BACKEND_NAME", "DEFAULT_ATOL", "DEFAULT_RTOL",
    "IntegrationResult", "integrate_system",
    "BoundaryPair", "CanonicalBoundary", "canonicalize", "dirichlet_pair",
    "neumann_pair", "pair_from_angles", "transform_pair", "validate_pair",
    "JostEvaluation", "RegularSolutionTrace", "dagger_wronskian",
    "jost_at_origin", "jost_matrix", "jost_solution_on", "physical_solution",
    "regular_solution",
    "MomentSet", "PotentialModel", "conjugate_potential", "evaluate",
    "moments", "piecewise_constant", "sampled_grid", "validate_potential",
    "zero_potential",
    "AsymptoticModel", "ScatteringSample", "asymptotic_model", "model_J",
    "model_f_origin", "s0_reference", "s_at_zero", "s_matrix",
    "BoundState", "Contour", "LevinsonReport", "default_kappa_max",
    "derivative_identity_check", "detJ_imag_axis", "detJ_smallk_order",
    "find_bound_states", "levinson_dirichlet_convention", "levinson_verify",
    "mu_from_s_zero", "winding_number",
]
__version__ = "0.1.0"
