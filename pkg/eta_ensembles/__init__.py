"""Eigenvalue statistics of 2x2 eta-ensembles with Gaussian and Generalized Bessel weights."""

__version__ = "0.1.0"

__all__ = [
    "specfun",
    "numerics",
    "gaussian_ensemble",
    "bessel_ensemble",
    "matrix_sampling",
    "pipeline",
    "validation",
]
