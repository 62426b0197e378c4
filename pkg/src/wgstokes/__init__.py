"""Weak Galerkin Stokes solver on polytopal meshes.

Lowest-order velocity/pressure pair with an explicitly constructed
divergence-free velocity basis, a reduced symmetric positive definite
solve, and a saddle-point cross-check.
"""

from .mesh import Mesh, MeshError
from .meshio import load_mesh, save_mesh, export_vtk, MeshFileError
from .generators import (generate_rectangular, generate_triangular,
                         generate_mixed_polygonal, generate_hanging_node,
                         generate_hex)
from .wg import (DofLayout, WgField, PressureField, FormMatrices,
                 assemble_forms, project_velocity, project_pressure,
                 weak_gradient, weak_divergence, triple_bar_norm,
                 h1_discrete_norm, l2_interior_norm, l2_pressure_error)
from .divfree import (DivFreeBasis, build_divfree_basis, verify_basis,
                      kernel_residual, expected_dimension,
                      divfree_dimension_oracle)
from .solve import (SolverError, StokesSolution, solve_reduced, solve_saddle,
                    recover_pressure)
from .cases import get_case, case1, case2, case_smoke3d
from .convergence import run_convergence, solve_case, ConvergenceReport

__all__ = [
    "Mesh", "MeshError", "load_mesh", "save_mesh", "export_vtk",
    "MeshFileError", "generate_rectangular", "generate_triangular",
    "generate_mixed_polygonal", "generate_hanging_node", "generate_hex",
    "DofLayout", "WgField", "PressureField", "FormMatrices",
    "assemble_forms", "project_velocity", "project_pressure",
    "weak_gradient", "weak_divergence", "triple_bar_norm",
    "h1_discrete_norm", "l2_interior_norm", "l2_pressure_error",
    "DivFreeBasis", "build_divfree_basis", "verify_basis", "kernel_residual",
    "expected_dimension", "divfree_dimension_oracle",
    "SolverError", "StokesSolution", "solve_reduced", "solve_saddle",
    "recover_pressure", "get_case", "case1", "case2", "case_smoke3d",
    "run_convergence", "solve_case", "ConvergenceReport",
]
