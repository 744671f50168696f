"""Gaussian-weight eta-ensemble: constants, entry marginals and spectral laws.

The entry density is ``C_eta exp(-Tr X^2 / 2) / [2 Tr X^2 - (Tr X)^2]^eta``
and the eigenvalue density ``K_eta exp(-(l1^2 + l2^2)/2) |l2 - l1|^(2 - 2 eta)``.
Eigenvalue-level formulas hold for every eta < 3/2, which covers the
level-attracting range 1 < eta < 3/2 and the enhanced-repulsion range eta < 0;
entry-level marginals are restricted to eta in [0, 1].
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy import special

from . import specfun
from .errors import DomainError, SingularPointError
from .models import EnsembleParams, HermitianEntries, NormConstants, SymmetryClass, WeightKind
from .numerics import Domain, QuadratureSpec, integrate, tabulate_cdf

logger = logging.getLogger(__name__)

Real = Union[float, np.ndarray]

ETA_MAX = 1.5
HALF_SWITCH = 1e-6
# beyond a/4 = 8 the two 1F1 terms of p3 cancel to more than four digits
P3_TRICOMI_SWITCH = 8.0
P1_HALF_WIDTH = 12.0
P1_SPEC = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-300, max_subdivisions=2000)
# closest approach to eta = 3/2 before the normalisation is treated as degenerate
POLE_GUARD = 1e-12


def _check_eigen_eta(eta: float) -> None:
    if not eta < ETA_MAX:
        raise DomainError(f"Gaussian weight needs eta < 3/2, got {eta}")
    if ETA_MAX - eta < POLE_GUARD:
        raise DomainError(f"eta={eta} is too close to 3/2: Gamma(3/2 - eta) diverges")


def _check_entry_eta(eta: float) -> None:
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"entry marginals are defined for eta in [0, 1], got {eta}")


def _out(value: np.ndarray) -> Real:
    return float(value) if np.ndim(value) == 0 else value


def norm_constants(eta: float) -> NormConstants:
    _check_eigen_eta(eta)
    g = specfun.gamma(1.5 - eta)
    scale = 2.0 ** (3.0 - 2.0 * eta) * g
    return NormConstants(
        c_eta=1.0 / (math.pi**1.5 * scale),
        k_eta=1.0 / (math.sqrt(math.pi) * scale),
    )


def jpd_entries(entries: HermitianEntries, eta: float) -> float:
    if not 0.0 <= eta < ETA_MAX:
        raise DomainError(f"entry density needs eta in [0, 3/2), got {eta}")
    vstar = entries.vstar
    if vstar == 0.0 and eta > 0:
        raise SingularPointError("entry density diverges where the eigenvalues coincide")
    c_eta = norm_constants(eta).c_eta
    return c_eta * math.exp(-0.5 * entries.trace2) / vstar**eta if eta > 0 else c_eta * math.exp(-0.5 * entries.trace2)


def marginal_p1(x: ArrayLike, eta: float, spec: QuadratureSpec = P1_SPEC) -> Real:
    """Marginal density of a diagonal entry, a convolution of Gamma(1-eta, y^2) with exp(-y^2)."""
    _check_entry_eta(eta)
    scale = 2.0 * specfun.SQRT_PI * specfun.gamma(1.5 - eta)
    xs = np.asarray(x, dtype=float)
    out = np.empty(xs.shape if xs.ndim else (1,))
    for idx, value in enumerate(np.atleast_1d(xs)):
        out.flat[idx] = _convolution(float(value), eta, spec) / scale
    return float(out[0]) if xs.ndim == 0 else out


def _convolution(x: float, eta: float, spec: QuadratureSpec) -> float:
    a = 1.0 - eta

    def integrand(w: float) -> float:
        return float(specfun.upper_incomplete_gamma(a, w * w)) * math.exp(-((x - w) ** 2))

    # the integrand is below exp(-x^2/2 - 2(w - x/2)^2); a window of 12 around
    # x/2 keeps everything above 1e-60 of the peak
    centre = 0.5 * x
    domain = Domain.finite(centre - P1_HALF_WIDTH, centre + P1_HALF_WIDTH)
    return integrate(integrand, domain, spec.with_points(0.0)).value


def marginal_p2(x: ArrayLike, y: ArrayLike, eta: float) -> Real:
    _check_entry_eta(eta)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d2 = 0.25 * (x - y) ** 2
    if eta == 1.0 and np.any(d2 == 0):
        raise SingularPointError("p2 diverges at x = y for eta = 1")
    scale = 4.0 * specfun.SQRT_PI * specfun.gamma(1.5 - eta)
    value = np.exp(-0.25 * (x + y) ** 2) * np.asarray(specfun.upper_incomplete_gamma(1.0 - eta, d2)) / scale
    return _out(value)


def marginal_p3(x: ArrayLike, y: ArrayLike, t: ArrayLike, eta: float) -> Real:
    """Marginal density of (x, y, t).

    Uses the 1F1 closed form for a/4 <= 8, Tricomi's U beyond (same function,
    no cancellation) and the K0 form within 1e-6 of eta = 1/2, where the
    Gamma poles of the closed form cancel.
    """
    _check_entry_eta(eta)
    x, y, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, t)))
    a = (x - y) ** 2 + 2.0 * t**2
    if eta >= 0.5 and np.any(a == 0):
        raise SingularPointError("p3 diverges at a = (x-y)^2 + 2t^2 = 0 for eta >= 1/2")
    gauss = np.exp(-0.5 * (x**2 + y**2 + t**2))

    if abs(eta - 0.5) < HALF_SWITCH:
        value = gauss * np.asarray(specfun.bessel_k0_scaled(a / 8.0)) / (math.pi**1.5 * 2.0**2.5)
        return _out(value)

    c_eta = norm_constants(eta).c_eta
    z = a / 4.0
    value = np.empty_like(a)
    small = z <= P3_TRICOMI_SWITCH
    if np.any(small):
        zs = z[small]
        term1 = (
            np.power(a[small], 0.5 - eta)
            * math.sqrt(math.pi / 2.0)
            * special.gamma(eta - 0.5)
            * special.rgamma(eta)
            * np.asarray(specfun.kummer_1f1(0.5, 1.5 - eta, zs))
        )
        term2 = 2.0 ** (0.5 - 2.0 * eta) * special.gamma(0.5 - eta) * np.asarray(specfun.kummer_1f1(eta, 0.5 + eta, zs))
        value[small] = term1 + term2
    if np.any(~small):
        al = a[~small]
        value[~small] = math.sqrt(math.pi / 2.0) * np.power(al, 0.5 - eta) * np.asarray(
            specfun.tricomi_u(0.5, 1.5 - eta, al / 4.0)
        )
    return _out(c_eta * gauss * value)


def jpd_eigen(lambda1: ArrayLike, lambda2: ArrayLike, eta: float) -> Real:
    _check_eigen_eta(eta)
    l1 = np.asarray(lambda1, dtype=float)
    l2 = np.asarray(lambda2, dtype=float)
    gap = np.abs(l2 - l1)
    if eta > 1.0 and np.any(gap == 0):
        raise SingularPointError("eigenvalue density diverges at coinciding eigenvalues for eta > 1")
    k_eta = norm_constants(eta).k_eta
    return _out(k_eta * np.exp(-0.5 * (l1**2 + l2**2)) * np.power(gap, 2.0 - 2.0 * eta))


def spectral_density_gaussian(lam: ArrayLike, eta: float) -> Real:
    _check_eigen_eta(eta)
    lam = np.asarray(lam, dtype=float)
    z = 0.5 * lam**2
    # exp(-lambda^2) 1F1(z) = exp(-lambda^2/2) [exp(-z) 1F1(z)]
    scaled = np.asarray(specfun.kummer_1f1_scaled(1.5 - eta, 0.5, z))
    value = np.exp(-z) * scaled / (2.0 ** (1.5 - eta) * specfun.SQRT_PI)
    return _out(value)


def spectral_density_closed_form(lam: ArrayLike, eta: float) -> Real:
    """Elementary densities at eta = 0 (GUE), 1/2 (GOE) and 1 (independent normals)."""
    lam = np.asarray(lam, dtype=float)
    if eta == 0.0:
        value = np.exp(-0.5 * lam**2) * (1.0 + lam**2) / (2.0 * math.sqrt(2.0 * math.pi))
    elif eta == 0.5:
        value = (
            np.exp(-(lam**2))
            * (2.0 + math.sqrt(2.0 * math.pi) * np.exp(0.5 * lam**2) * lam * np.asarray(specfun.erf(lam / math.sqrt(2.0))))
            / (4.0 * specfun.SQRT_PI)
        )
    elif eta == 1.0:
        value = np.exp(-0.5 * lam**2) / math.sqrt(2.0 * math.pi)
    else:
        raise DomainError(f"closed forms exist only for eta in {{0, 1/2, 1}}, got {eta}")
    return _out(value)


def gap_probability_gaussian(s: ArrayLike, eta: float) -> Real:
    _check_eigen_eta(eta)
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise DomainError("the raw spacing is non-negative")
    if eta > 1.0 and np.any(s == 0):
        raise SingularPointError("spacing density diverges at s = 0 for eta > 1")
    k_eta = norm_constants(eta).k_eta
    return _out(2.0 * specfun.SQRT_PI * k_eta * np.power(s, 2.0 - 2.0 * eta) * np.exp(-0.25 * s**2))


def spacing_cdf_gaussian(s: ArrayLike, eta: float) -> Real:
    """Exact spacing CDF: s^2/4 is Gamma(3/2 - eta) distributed."""
    _check_eigen_eta(eta)
    s = np.maximum(np.asarray(s, dtype=float), 0.0)
    return specfun.regularized_lower_gamma(1.5 - eta, 0.25 * s**2)


def p1_asymptotic(x: ArrayLike, eta: float, order: int = 1) -> Real:
    """Large-|x| behaviour of p1; meaningful for |x| >= 3.

    ``order=0`` is the leading term (x/2)^(-2 eta) exp(-x^2/2) / (2 sqrt2 Gamma(3/2 - eta)).
    ``order=1`` multiplies it by 1 + eta (2 eta - 3) / x^2, which collects the
    next term of Gamma(1 - eta, y^2) and the curvature of y^(-2 eta) across the
    Gaussian window around y = x/2; it is needed for percent accuracy at
    |x| = 10 once eta approaches 1.
    """
    _check_entry_eta(eta)
    if order not in (0, 1):
        raise DomainError(f"asymptotic order must be 0 or 1, got {order}")
    ax = np.abs(np.asarray(x, dtype=float))
    if eta > 0 and np.any(ax == 0):
        raise SingularPointError("the asymptotic form diverges at x = 0")
    value = np.power(ax / 2.0, -2.0 * eta) * np.exp(-0.5 * ax**2) / (2.0 * math.sqrt(2.0) * specfun.gamma(1.5 - eta))
    if order == 1 and eta > 0:
        value = value * (1.0 + eta * (2.0 * eta - 3.0) / ax**2)
    return _out(value)


def _twin_unitary_eta(eta_hat: float) -> float:
    if not eta_hat < 2.0:
        raise DomainError(f"real-symmetric model needs eta_hat < 2, got {eta_hat}")
    return 0.5 * (1.0 + eta_hat)


def jpd_eigen_real_twin(lambda1: ArrayLike, lambda2: ArrayLike, eta_hat: float) -> Real:
    """Eigenvalue density of the real-symmetric model, |l2 - l1|^(1 - eta_hat)."""
    k = norm_constants(_twin_unitary_eta(eta_hat)).k_eta
    l1 = np.asarray(lambda1, dtype=float)
    l2 = np.asarray(lambda2, dtype=float)
    gap = np.abs(l2 - l1)
    if eta_hat > 1.0 and np.any(gap == 0):
        raise SingularPointError("eigenvalue density diverges at coinciding eigenvalues for eta_hat > 1")
    return _out(k * np.exp(-0.5 * (l1**2 + l2**2)) * np.power(gap, 1.0 - eta_hat))


def gap_probability_real_twin(s: ArrayLike, eta_hat: float) -> Real:
    return gap_probability_gaussian(s, _twin_unitary_eta(eta_hat))


def jpd_entries_real(x: ArrayLike, y: ArrayLike, t: ArrayLike, eta_hat: float) -> Real:
    """Entry density of [[x, t], [t, y]] with exp(-Tr X^2/2) / [2 Tr X^2 - (Tr X)^2]^(eta_hat/2)."""
    k = norm_constants(_twin_unitary_eta(eta_hat)).k_eta
    x, y, t = (np.asarray(v, dtype=float) for v in (x, y, t))
    vstar = (x - y) ** 2 + 4.0 * t**2
    if eta_hat > 0 and np.any(vstar == 0):
        raise SingularPointError("real-symmetric entry density diverges at coinciding eigenvalues")
    # angular integration contributes pi/2 |l2 - l1|, hence C = 2K/pi
    value = 2.0 * k / math.pi * np.exp(-0.5 * (x**2 + y**2 + 2.0 * t**2)) * np.power(vstar, -0.5 * eta_hat)
    return _out(value)


def anti_eta_check(eta: float) -> Tuple[float, bool]:
    """Effective Dyson index and normalisability of the level-attracting range."""
    if not 1.0 < eta < ETA_MAX:
        raise DomainError(f"the level-attracting range is 1 < eta < 3/2, got {eta}")
    constants = norm_constants(eta)
    normalizable = math.isfinite(constants.k_eta) and constants.k_eta > 0
    return 2.0 - 2.0 * eta, normalizable


@dataclass(slots=True)
class GaussianEnsemble:
    """Evaluator bound to one parameter set; constants are computed once."""

    params: EnsembleParams
    constants: NormConstants = field(init=False)
    _unitary_eta: float = field(init=False)

    def __post_init__(self) -> None:
        if self.params.weight is not WeightKind.GAUSSIAN:
            raise DomainError("GaussianEnsemble needs a Gaussian weight")
        if self.params.symmetry is SymmetryClass.REAL_SYMMETRIC:
            self._unitary_eta = _twin_unitary_eta(self.params.eta)
        else:
            self._unitary_eta = self.params.eta
        self.constants = norm_constants(self._unitary_eta)

    @property
    def unitary_eta(self) -> float:
        return self._unitary_eta

    def density(self, lam: ArrayLike) -> Real:
        return spectral_density_gaussian(lam, self._unitary_eta)

    def gap(self, s: ArrayLike) -> Real:
        return gap_probability_gaussian(s, self._unitary_eta)

    def spacing_cdf(self) -> Callable[[np.ndarray], np.ndarray]:
        eta = self._unitary_eta
        return lambda s: np.asarray(spacing_cdf_gaussian(s, eta))

    def density_cdf(self) -> Callable[[np.ndarray], np.ndarray]:
        return tabulate_cdf(lambda lam: np.asarray(self.density(lam)), -12.0, 12.0, 48001)
