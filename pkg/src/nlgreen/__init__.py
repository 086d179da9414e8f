"""Nonlinear Green's functions and short-time convolution expansions for higher-order ODEs."""

from .analysis import Settings, er1, er2, leading_term_dominance, run_forced, table1_experiment
from .expansion import ExpansionCoefficients, fit_coefficients, short_time_partial_sum
from .greens import GreenFunction, build_green_from_homogeneous, check_generalized_homogeneity, wrap_closed_form
from .ivp import IvpConfig, integrate, solve_reference
from .models import Problem, boussinesq_reduced, kdv_reduced, quadratic_fourth, series_coefficients
from .quadrature import Grid, GridFunction, MollifiedDelta, convolve_weighted, weak_form_strength
from .special import complete_elliptic_k, jacobi_sn_cn_dn

__all__ = [
    "ExpansionCoefficients", "GreenFunction", "Grid", "GridFunction", "IvpConfig", "MollifiedDelta",
    "Problem", "Settings", "boussinesq_reduced", "build_green_from_homogeneous",
    "check_generalized_homogeneity", "complete_elliptic_k", "convolve_weighted", "er1", "er2",
    "fit_coefficients", "integrate", "jacobi_sn_cn_dn", "kdv_reduced", "leading_term_dominance",
    "quadratic_fourth", "run_forced", "series_coefficients", "short_time_partial_sum", "solve_reference",
    "table1_experiment", "weak_form_strength", "wrap_closed_form",
]
