"""rhdisk: a numerical solver for the boundary problem Re(conj(lambda) f) = phi
for analytic functions on the unit disk and on Jordan domains, with
nontangential boundary-limit verification."""

__version__ = "0.1.0"

from .boundary import (PiecewiseSpec, UnimodularTrace, hilbert_singular,
                       lusin_primitive, principal_arg)
from .core import (NullFamily, RHProblem, RHSolution, SolverOverflowError,
                   build_A, build_B, family_evaluator, null_generators, solve,
                   solve_family)
from .dirichlet import (ROUTE_DIRECT, ROUTE_GEHRING, HarmonicDiskFunction,
                        conjugate, hp_norm, solve_direct, solve_gehring)
from .jordan import (ComposedSolution, ConformalMap, JordanBoundary,
                     MapConvergenceError, boundary_from_radius, harmonic_measure,
                     harmonic_measure_quadrature, identity_map,
                     natural_parameter, polynomial_map, solve_jordan,
                     theodorsen_map, transport_problem)
from .spectral import (EVAL_CEILING, AnalyticDiskFunction, BoundaryTrace,
                       CircleGrid, FourierCoeffs, angular_derivative,
                       circle_trace, conjugate_spectrum, evaluate,
                       poisson_value, schwarz_extend, series_exp,
                       series_multiply, spectrum_to_trace, trace_to_spectrum)
from .verify import (ConvergenceReport, ResidualReport, StolzPath,
                     boundary_residual, nt_limit, path_points)

__all__ = [
    "__version__",
    "AnalyticDiskFunction", "BoundaryTrace", "CircleGrid", "ComposedSolution",
    "ConformalMap", "ConvergenceReport", "EVAL_CEILING", "FourierCoeffs",
    "HarmonicDiskFunction", "JordanBoundary", "MapConvergenceError",
    "NullFamily", "PiecewiseSpec", "RHProblem", "RHSolution", "ResidualReport",
    "ROUTE_DIRECT", "ROUTE_GEHRING", "SolverOverflowError", "StolzPath",
    "UnimodularTrace",
    "angular_derivative", "boundary_from_radius", "boundary_residual",
    "build_A", "build_B", "circle_trace", "conjugate", "conjugate_spectrum",
    "evaluate", "family_evaluator", "harmonic_measure",
    "harmonic_measure_quadrature", "hilbert_singular", "hp_norm",
    "identity_map", "lusin_primitive", "natural_parameter", "nt_limit",
    "null_generators", "path_points", "poisson_value", "polynomial_map",
    "principal_arg", "schwarz_extend", "series_exp",
    "series_multiply", "solve", "solve_direct", "solve_family",
    "solve_gehring", "solve_jordan", "spectrum_to_trace", "theodorsen_map",
    "trace_to_spectrum", "transport_problem",
]
