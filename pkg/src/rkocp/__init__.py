"""Implicit Runge-Kutta schemes for linear-quadratic parabolic optimal control.

Exact order-condition checks in Q(sqrt d), adjoint (costate) tableaux, a
coupled state/adjoint solver and convergence experiments against a closed-form
solution.
"""

from .exact import QuadNum
from .tableau import SCHEME_NAMES, Tableau, adjoint_tableau, compute_d, registry, registry_get
from .conditions import CONDITIONS, check_simplifying, classify, eval_condition, validate_registry
from .ocp import OcpProblem, heat_problem, scalar_problem, solve

__all__ = [
    "QuadNum",
    "Tableau",
    "SCHEME_NAMES",
    "registry",
    "registry_get",
    "adjoint_tableau",
    "compute_d",
    "CONDITIONS",
    "eval_condition",
    "classify",
    "check_simplifying",
    "validate_registry",
    "OcpProblem",
    "heat_problem",
    "scalar_problem",
    "solve",
]
