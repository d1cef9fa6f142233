"""Augmented Lagrangian solver and second-order certifier for nonlinear
semidefinite programs."""

from ._nlsdp import (
    InvalidInput,
    NumericalFailureError,
    Problem,
    StalePointError,
    alm_grad,
    alm_value,
    default_start,
    dist_cone,
    eig_sym,
    hadamard_problem,
    hessian_bundle_check,
    negated_toy_problem,
    pinv_sym,
    proj_cone,
    sigma_term,
    solve,
    strong_sosc_check,
    toy_problem,
)

__all__ = [
    "InvalidInput",
    "NumericalFailureError",
    "Problem",
    "StalePointError",
    "alm_grad",
    "alm_value",
    "default_start",
    "dist_cone",
    "eig_sym",
    "hadamard_problem",
    "hessian_bundle_check",
    "negated_toy_problem",
    "pinv_sym",
    "proj_cone",
    "sigma_term",
    "solve",
    "strong_sosc_check",
    "toy_problem",
]
