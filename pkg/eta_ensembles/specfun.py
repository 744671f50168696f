"""Special functions behind every closed-form expression of the package.

Thin, domain-checked wrappers around :mod:`scipy.special`. All functions accept
scalars or numpy arrays and return a ``float`` for scalar input. Poles and
out-of-domain arguments raise; a non-finite result for an in-domain argument is
reported as :class:`~eta_ensembles.errors.NumericalOverflowError` instead of
leaking ``inf`` to the caller.
"""
from __future__ import annotations

import logging
import math
from typing import Union

import numpy as np
from numpy.typing import ArrayLike
from scipy import special

from .errors import DomainError, NumericalOverflowError, PoleError

logger = logging.getLogger(__name__)

Real = Union[float, np.ndarray]

GAMMA_OVERFLOW = 171.62
KUMMER_ASYMPTOTIC_SWITCH = 50.0
_ASYMPTOTIC_MAX_TERMS = 200


def _is_nonpositive_integer(value: float) -> bool:
    return value <= 0 and float(value).is_integer()


def _finish(value: np.ndarray, name: str) -> Real:
    if not np.all(np.isfinite(value)):
        raise NumericalOverflowError(f"{name} is not representable as a finite double")
    if value.ndim == 0:
        return float(value)
    return value


def gamma(z: ArrayLike) -> Real:
    z_arr = np.asarray(z, dtype=float)
    if np.any((z_arr <= 0) & (z_arr == np.floor(z_arr))):
        raise PoleError(f"Gamma has a pole at non-positive integers, got {z}")
    if np.any(z_arr > GAMMA_OVERFLOW):
        raise NumericalOverflowError(f"Gamma({z}) overflows")
    return _finish(special.gamma(z_arr), "Gamma")


def upper_incomplete_gamma(a: float, x: ArrayLike) -> Real:
    """Non-regularised upper incomplete Gamma function, also for -1 < a <= 0."""
    x_arr = np.asarray(x, dtype=float)
    if a <= -1:
        raise DomainError(f"upper incomplete Gamma implemented for a > -1, got a={a}")
    if np.any(x_arr < 0):
        raise DomainError("upper incomplete Gamma needs x >= 0")
    if a <= 0 and np.any(x_arr == 0):
        raise DomainError(f"Gamma({a}, 0) diverges for a <= 0")

    if a > 0:
        value = special.gamma(a) * special.gammaincc(a, x_arr)
    elif a == 0:
        value = special.exp1(x_arr)
    else:
        # one downward step of Gamma(a+1, x) = a Gamma(a, x) + x^a e^-x
        upper = special.gamma(a + 1.0) * special.gammaincc(a + 1.0, x_arr)
        value = (upper - np.power(x_arr, a) * np.exp(-x_arr)) / a
    return _finish(np.asarray(value), "upper incomplete Gamma")


def regularized_lower_gamma(a: float, x: ArrayLike) -> Real:
    if a <= 0:
        raise DomainError(f"regularised lower Gamma needs a > 0, got {a}")
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise DomainError("regularised lower Gamma needs x >= 0")
    return _finish(special.gammainc(a, x_arr), "regularised lower Gamma")


def kummer_1f1(a: float, b: float, z: ArrayLike) -> Real:
    """Kummer's confluent hypergeometric function M(a, b, z) for z >= 0."""
    _check_kummer_args(b, z)
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    scalar = np.ndim(z) == 0
    if _is_nonpositive_integer(a):
        out = special.hyp1f1(a, b, z_arr)
        return _finish(out[0] if scalar else out, "1F1")
    if np.any(z_arr > 700.0):
        raise NumericalOverflowError(f"1F1({a}, {b}, z) overflows for z > 700")
    out = np.empty_like(z_arr)
    direct = z_arr <= KUMMER_ASYMPTOTIC_SWITCH
    out[direct] = special.hyp1f1(a, b, z_arr[direct])
    if np.any(~direct):
        large = z_arr[~direct]
        out[~direct] = np.exp(large) * _kummer_scaled_asymptotic(a, b, large)
    return _finish(out[0] if scalar else out, "1F1")


def kummer_1f1_scaled(a: float, b: float, z: ArrayLike) -> Real:
    """exp(-z) * M(a, b, z), accurate for arbitrarily large z >= 0."""
    _check_kummer_args(b, z)
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    scalar = np.ndim(z) == 0
    out = np.empty_like(z_arr)
    direct = z_arr <= KUMMER_ASYMPTOTIC_SWITCH
    if _is_nonpositive_integer(a):
        direct[:] = True
    out[direct] = np.exp(-z_arr[direct]) * special.hyp1f1(a, b, z_arr[direct])
    if np.any(~direct):
        out[~direct] = _kummer_scaled_asymptotic(a, b, z_arr[~direct])
    return _finish(out[0] if scalar else out, "scaled 1F1")


def _check_kummer_args(b: float, z: ArrayLike) -> None:
    if _is_nonpositive_integer(b):
        raise PoleError(f"1F1 has a pole for b in {{0, -1, -2, ...}}, got b={b}")
    if np.any(np.asarray(z, dtype=float) < 0):
        raise DomainError("1F1 is only implemented for z >= 0")


def _kummer_scaled_asymptotic(a: float, b: float, z: np.ndarray) -> np.ndarray:
    # e^-z M(a,b,z) ~ Gamma(b)/Gamma(a) z^(a-b) sum_k (b-a)_k (1-a)_k / (k! z^k);
    # the exponentially small companion series is below double precision for z > 50.
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(_ASYMPTOTIC_MAX_TERMS):
        nxt = term * (b - a + k) * (1.0 - a + k) / ((k + 1.0) * z)
        if np.all(np.abs(nxt) >= np.abs(term)) and k > 0:
            break
        term = np.where(np.abs(nxt) < np.abs(term), nxt, 0.0)
        total = total + term
        if np.all(np.abs(term) <= 1e-16 * np.abs(total)):
            break
    prefactor = special.gamma(b) * special.rgamma(a)
    return prefactor * np.power(z, a - b) * total


def tricomi_u(a: float, b: float, z: ArrayLike) -> Real:
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr <= 0):
        raise DomainError("Tricomi U is only implemented for z > 0")
    return _finish(np.asarray(special.hyperu(a, b, z_arr)), "Tricomi U")


def bessel_k0(x: ArrayLike) -> Real:
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0):
        raise DomainError("K0 diverges at 0 and is undefined for negative arguments")
    return _finish(np.asarray(special.k0(x_arr)), "K0")


def bessel_k0_scaled(x: ArrayLike) -> Real:
    """exp(x) * K0(x)."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0):
        raise DomainError("K0 diverges at 0 and is undefined for negative arguments")
    return _finish(np.asarray(special.k0e(x_arr)), "scaled K0")


def erf(z: ArrayLike) -> Real:
    return _finish(np.asarray(special.erf(np.asarray(z, dtype=float))), "erf")


SQRT_PI = math.sqrt(math.pi)
