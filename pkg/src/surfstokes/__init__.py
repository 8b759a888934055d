"""Taylor-Hood surface finite elements for the surface Stokes problem.

Modules: ``geometry`` (exact sphere/torus geometry), ``mesh`` (flat
triangulations and refinement), ``param_lift`` (degree-k parametric
surfaces), ``fe_space`` (Lagrange bases, quadrature, DOF maps),
``assembly`` (saddle-point system), ``solver`` (direct/MINRES solves and
spectra), ``mms`` (manufactured solutions and errors) and ``study``
(refinement sweeps and reports).
"""
__version__ = "0.1.0"

from .assembly import AssemblyConfig, SaddleSystem, assemble_system
from .geometry import Sphere, Torus, make_surface
from .mesh import build_base_mesh, refine, refine_to
from .mms import eval_errors, make_case
from .solver import a_condition, schur_spectrum, solve_direct, solve_minres
from .study import StudyConfig, compute_eoc, dof_overhead, emit_report, run_study

__all__ = [
    "AssemblyConfig",
    "SaddleSystem",
    "assemble_system",
    "Sphere",
    "Torus",
    "make_surface",
    "build_base_mesh",
    "refine",
    "refine_to",
    "eval_errors",
    "make_case",
    "a_condition",
    "schur_spectrum",
    "solve_direct",
    "solve_minres",
    "StudyConfig",
    "compute_eoc",
    "dof_overhead",
    "emit_report",
    "run_study",
]
