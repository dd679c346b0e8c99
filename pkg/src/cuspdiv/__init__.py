"""cuspdiv: solutions of div u = f on external-cusp domains in weighted
Sobolev norms, with empirical verification of the weighted estimates, Hardy
and Korn inequalities, Muckenhoupt admissibility ranges and Stokes inf-sup
behavior."""

__version__ = "1.0.0"

from ._backend import backend_name
from .fields import (CompactSupport, ScalarField, VectorField, bump_field,
                     constant_field, coordinate_field, zero_extend)
from .geometry import (CuspDomain, LiftedDomain, Point, contains, cusp_map,
                       dist_to_cusp, lifted_integral_identity,
                       piola_pushforward)
from .quadrature import (QuadratureRule, fd_divergence, fd_gradient,
                         integrate, make_rule, project_mean_zero,
                         weighted_lp_norm)
from .weights import (PowerWeight, admissible_beta_interval, beta_hat,
                      integrability_witness, is_muckenhoupt_ap)
from .bogovskii import (BogovskiiSolver, BumpFunction, StarDomain,
                        bogovskii_eval, bump_eval, default_star_domain,
                        div_residual, kernel_r_interval, kernel_value)
from .divsolve import (DivSolveReport, HardyCheck, hardy_check,
                       pullback_density, solve_divergence_cusp)

__all__ = [
    "__version__", "backend_name",
    "CompactSupport", "ScalarField", "VectorField", "bump_field",
    "constant_field", "coordinate_field", "zero_extend",
    "CuspDomain", "LiftedDomain", "Point", "contains", "cusp_map",
    "dist_to_cusp", "lifted_integral_identity", "piola_pushforward",
    "QuadratureRule", "fd_divergence", "fd_gradient", "integrate",
    "make_rule", "project_mean_zero", "weighted_lp_norm",
    "PowerWeight", "admissible_beta_interval", "beta_hat",
    "integrability_witness", "is_muckenhoupt_ap",
    "BogovskiiSolver", "BumpFunction", "StarDomain", "bogovskii_eval",
    "bump_eval", "default_star_domain", "div_residual", "kernel_r_interval",
    "kernel_value",
    "DivSolveReport", "HardyCheck", "hardy_check", "pullback_density",
    "solve_divergence_cusp",
]
