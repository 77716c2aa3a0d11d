"""FitzHugh-Nagumo on a strip: kernels, solvers and bound checks."""

from ._core import (
    ModelParams,
    KernelContext,
    Error,
    ParseError,
    ValidationError,
    DomainError,
    eval_K,
    eval_theta,
    eval_G,
    laplace_K_closed,
    laplace_theta_closed,
    steady_profile,
    solve_ie,
    solve_fd,
    verify,
    check_names,
)

__all__ = [
    "ModelParams",
    "KernelContext",
    "Error",
    "ParseError",
    "ValidationError",
    "DomainError",
    "eval_K",
    "eval_theta",
    "eval_G",
    "laplace_K_closed",
    "laplace_theta_closed",
    "steady_profile",
    "solve_ie",
    "solve_fd",
    "verify",
    "check_names",
]
