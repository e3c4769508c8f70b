"""Split-form DG solver for the compressible Euler equations.

The package bundles a flux-differencing DG discretization on periodic
tensor-product meshes, a catalog of two-point volume fluxes, and a small lab
for the linearized density-wave problem.
"""

from .cases import Case, CaseSpec, initial_condition, integral_diagnostics, normalized_series
from .euler import GAMMA, cons_to_prim, prim_to_cons
from .fluxes import Flux, FluxScheme, SurfaceDissipation, two_point_flux
from .mesh import Mesh
from .sbp import SbpOperator, make_sbp_operator
from .solver import RunResult, SolverConfig, dg_rhs, run_simulation

__all__ = [
    "GAMMA",
    "Case",
    "CaseSpec",
    "Flux",
    "FluxScheme",
    "Mesh",
    "RunResult",
    "SbpOperator",
    "SolverConfig",
    "SurfaceDissipation",
    "cons_to_prim",
    "dg_rhs",
    "initial_condition",
    "integral_diagnostics",
    "make_sbp_operator",
    "normalized_series",
    "prim_to_cons",
    "run_simulation",
    "two_point_flux",
]
