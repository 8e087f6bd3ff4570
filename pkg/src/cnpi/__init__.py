"""Crank-Nicolson / product-integration solver for Volterra integrodifferential
equations with tempered multi-term weakly singular kernels on graded meshes."""

from .errors import NotSPDError, ParameterError, SolverError
from .manufactured import ManufacturedCase, example1_case, example2_case, frac_int_power
from .mesh import GradedMesh, MeshHypothesisReport, build_graded_mesh, validate_mesh_hypotheses
from .operators import OperatorBundle, SpatialGrid, apply, solve_shifted
from .quadrature import (
    KernelSpec,
    PIWeightRow,
    discrete_fractional_integral,
    gamma_function,
    pi_weight,
    pi_weight_row,
    tempered_kernel,
)
from .stepper import ProblemSpec, SchemeState, energy, run, source_average, step_first, step_n, to_physical

__all__ = [
    "GradedMesh", "MeshHypothesisReport", "build_graded_mesh", "validate_mesh_hypotheses",
    "KernelSpec", "PIWeightRow", "gamma_function", "tempered_kernel", "pi_weight", "pi_weight_row",
    "discrete_fractional_integral", "SpatialGrid", "OperatorBundle", "apply", "solve_shifted",
    "ProblemSpec", "SchemeState", "source_average", "step_first", "step_n", "run", "to_physical",
    "energy", "ManufacturedCase", "frac_int_power", "example1_case", "example2_case",
    "ParameterError", "SolverError", "NotSPDError",
]
