"""
Sign Changes - moments of the number of sign changes in AR(1) segments.

Exact closed forms for short segments (dilogarithm evaluation of four-point
Gaussian orthant probabilities), a quasi-Monte Carlo orthant engine for longer
ones, the independent interval approximation and a seeded simulator.
"""

from sign_changes.domain import EstimateStatus, Method, ProbEstimate, Rho, SignPattern
from sign_changes.errors import ConvergenceError, DomainError, SignChangeError
from sign_changes.specfun import dilog, dilog_real_part_pair
from sign_changes.orthant import (
    QuadratureConfig, cheng_I, cheng_I_quadrature, f4, g4, orthant2, orthant3,
    orthant_closed, outlier_orthant, p11111, q_pattern_4of5, quadrature_J,
    special_J_closed,
)
from sign_changes.mvn import CorrelationMatrix, QMCConfig, ar1_matrix, orthant_qmc
from sign_changes.moments import (
    MomentReport, changes_distribution, mean_sign_changes, pattern_probability,
    variance_exact, variance_numeric,
)
from sign_changes.iia import (
    IIASequence, SeparationResult, iia_second_moment, iia_variance, model_curve,
    separation_search,
)
from sign_changes.mc import SimConfig, SimResult, simulate

__version__ = "0.1.0"
__all__ = [
    "EstimateStatus", "Method", "ProbEstimate", "Rho", "SignPattern",
    "ConvergenceError", "DomainError", "SignChangeError",
    "dilog", "dilog_real_part_pair",
    "QuadratureConfig", "cheng_I", "cheng_I_quadrature", "f4", "g4", "orthant2",
    "orthant3", "orthant_closed", "outlier_orthant", "p11111", "q_pattern_4of5",
    "quadrature_J", "special_J_closed",
    "CorrelationMatrix", "QMCConfig", "ar1_matrix", "orthant_qmc",
    "MomentReport", "changes_distribution", "mean_sign_changes",
    "pattern_probability", "variance_exact", "variance_numeric",
    "IIASequence", "SeparationResult", "iia_second_moment", "iia_variance",
    "model_curve", "separation_search",
    "SimConfig", "SimResult", "simulate",
]
