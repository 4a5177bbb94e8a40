"""Spectral study of locally linear embedding on domains with boundary.

The package builds the sparse LLE weight matrix on grid samples of the unit
interval and the unit disc, computes the scaled spectrum of I - W, and
independently computes the spectrum of the limiting degenerate second-order
operator by Frobenius series plus transcendental matching. The harness glues
the two routes together and compares them.
"""

from .sampling import Domain, PointCloud, NeighborhoodIndex, grid_interval, grid_disc, neighborhoods, supercriticality
from .lle_matrix import SolverMode, WeightMatrix, SpectrumResult, build_w, spectrum_lle, write_w, read_w
from .coefficients import CoefficientModel, build_model
from .frobenius import Kind, FrobeniusProblem, FrobeniusSolution, interval_problem, disc_problem, solve, eval_series, quasi_derivative
from .matching import AnalyticEigenpair, secular_interval, secular_disc, est1_residual, find_eigenvalues, eigenvalue_roots, rayleigh_quotient, gram_matrix
from .harness import ExperimentConfig, ComparisonReport, run_compare, run_verify

__version__ = "0.1.0"

__all__ = [
    "Domain",
    "PointCloud",
    "NeighborhoodIndex",
    "grid_interval",
    "grid_disc",
    "neighborhoods",
    "supercriticality",
    "SolverMode",
    "WeightMatrix",
    "SpectrumResult",
    "build_w",
    "spectrum_lle",
    "write_w",
    "read_w",
    "CoefficientModel",
    "build_model",
    "Kind",
    "FrobeniusProblem",
    "FrobeniusSolution",
    "interval_problem",
    "disc_problem",
    "solve",
    "eval_series",
    "quasi_derivative",
    "AnalyticEigenpair",
    "secular_interval",
    "secular_disc",
    "est1_residual",
    "find_eigenvalues",
    "eigenvalue_roots",
    "rayleigh_quotient",
    "gram_matrix",
    "ExperimentConfig",
    "ComparisonReport",
    "run_compare",
    "run_verify",
    "__version__",
]
