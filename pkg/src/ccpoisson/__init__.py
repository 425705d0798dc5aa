"""Poisson solves on stretched tensor-product grids, second order and
compact-corrected fourth order, with a benchmark harness for convergence
studies."""

from .benchmark import (
    BenchmarkError,
    ErrorReport,
    GammaPoint,
    StudyResult,
    StudySpec,
    benchmark_config,
    compute_errors,
    convergence_order,
    gamma_sweep,
    problem_catalog,
    run_study,
    study_grid,
)
from .derivative import (
    SingularSystemError,
    TridiagonalSystem,
    classical_second_derivative,
    compact_second_derivative,
    field_second_derivatives,
    tdma_solve,
)
from .grid import Axis, AxisSpec, GridError, TensorGrid, build_axis, build_grid
from .solver import (
    DivergenceError,
    PoissonProblem,
    ScalarField,
    SolveReport,
    SolverConfig,
    SolverError,
    assemble_operator,
    compute_correction,
    export_field_binary,
    export_field_csv,
    gauss_seidel_solve,
    read_field_binary,
    solve_ccfdm,
    solve_fdm,
)
from .stencils import (
    ClassicalCoeffs,
    CompactBoundaryRow,
    CompactInteriorRow,
    DegenerateStencilError,
    StencilError,
    StencilSet,
    build_stencil_set,
    classical_coeffs,
    compact_boundary_coeffs,
    compact_interior_coeffs,
    moment_residuals,
    taylor_match,
)

__version__ = "0.1.0"
