"""Generalized Bessel weight: a Poisson to Wigner crossover in the spacing law.

The weight factorises as phi(l1) phi(l2) with

    phi(x) = B * int_0^inf t^(-zeta) exp(-t/(8 alpha) - 2 alpha x^2 t^(-zeta)) dt,

zeta = 2 eta - 1, which is a Gaussian scale mixture in x. Every two-eigenvalue
integral therefore reduces to Gaussian integrals in the eigenvalues and a
mixing integral over (t1, t2); the gap law and its normalisation are computed
in that representation, with polar mixing coordinates t1 = R v, t2 = R (1 - v).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy import optimize

from . import specfun
from .errors import DomainError, FitError, SingularPointError
from .models import DensityCurve, EnsembleParams, SpectralPair, WeightKind
from .numerics import (
    Domain,
    QuadratureSpec,
    cdf_from_table,
    integrate,
    integrate_log_concave,
    symmetric_cdf_from_table,
)

logger = logging.getLogger(__name__)

Real = Union[float, np.ndarray]
Curve = Callable[[np.ndarray], np.ndarray]

MIXTURE_SPEC = QuadratureSpec(rel_tol=1e-11, abs_tol=1e-14, max_subdivisions=2000)
INNER_SPEC = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-14, max_subdivisions=2000)
OUTER_SPEC = QuadratureSpec(rel_tol=1e-8, abs_tol=1e-300, max_subdivisions=2000)
DENSITY_SPEC = QuadratureSpec(rel_tol=1e-8, abs_tol=1e-14, max_subdivisions=2000)
METHOD_TOLERANCE = 1e-4
EXP_CEILING = 700.0
# reference tables: geometric nodes below CLUSTER_EDGE, uniform above
CLUSTER_MIN = 1e-6
CLUSTER_EDGE = 0.5
CLUSTER_NODES = 40


class DensityMethod(str, Enum):
    REDUCED = "reduced"
    DIRECT = "direct"


@dataclass(slots=True, frozen=True)
class BesselWeightParams:
    eta: float
    alpha: float = 1.0
    # B_eta; cancels from every normalised observable
    b_norm: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.eta <= 1.0:
            raise DomainError(f"Generalized Bessel weight needs eta in [0, 1], got {self.eta}")
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if not self.b_norm > 0:
            raise DomainError(f"b_norm must be positive, got {self.b_norm}")

    @property
    def zeta(self) -> float:
        return 2.0 * self.eta - 1.0

    @property
    def beta(self) -> float:
        return 2.0 - 2.0 * self.eta

    @classmethod
    def from_ensemble(cls, params: EnsembleParams) -> "BesselWeightParams":
        if params.weight is not WeightKind.BESSEL:
            raise DomainError("parameters do not describe a Generalized Bessel weight")
        return cls(eta=params.eta, alpha=params.alpha)


def _exp(v: float) -> float:
    return math.exp(min(v, EXP_CEILING))


def _log_mixture_integral(power: float, kappa: float, zeta: float, alpha: float) -> float:
    """log of int_0^inf r^power exp(-r/(8 alpha) - kappa r^(-zeta)) dr.

    In u = log r the log-integrand is strictly concave, so the integral is
    taken with its peak factored out.
    """
    rate = 1.0 / (8.0 * alpha)
    lead = power + 1.0

    def log_f(u: float) -> float:
        return lead * u - rate * _exp(u) - kappa * _exp(-zeta * u)

    def slope(u: float) -> float:
        return lead - rate * _exp(u) + zeta * kappa * _exp(-zeta * u)

    peak, res = integrate_log_concave(log_f, slope, MIXTURE_SPEC, start=math.log(8.0 * alpha))
    return peak + math.log(res.value)


def _phi_scalar(x: float, p: BesselWeightParams) -> float:
    zeta, alpha = p.zeta, p.alpha
    x2 = x * x
    if x2 == 0.0:
        if zeta >= 1.0:
            raise SingularPointError("phi diverges at x = 0 for eta = 1")
        return p.b_norm * specfun.gamma(1.0 - zeta) * (8.0 * alpha) ** (1.0 - zeta)
    return p.b_norm * math.exp(_log_mixture_integral(-zeta, 2.0 * alpha * x2, zeta, alpha))


def phi(x: ArrayLike, p: BesselWeightParams) -> Real:
    xs = np.asarray(x, dtype=float)
    values = np.array([_phi_scalar(float(v), p) for v in np.atleast_1d(xs).ravel()])
    return float(values[0]) if xs.ndim == 0 else values.reshape(xs.shape)


def convolution_check(s: float, p: BesselWeightParams) -> float:
    """int phi(x) phi(s - x) dx by direct nested quadrature."""
    spec = DENSITY_SPEC.with_points(0.0, s) if s != 0 else DENSITY_SPEC.with_points(0.0)
    res = integrate(
        lambda x: _phi_scalar(x, p) * _phi_scalar(s - x, p),
        Domain.whole_line(),
        spec,
    )
    return res.value


def tail_coefficient(eta: float, alpha: float) -> float:
    """Saddle-point constant c of the gap tail exp(-c s^(1/eta)), eta in [1/2, 1]."""
    if not 0.5 <= eta <= 1.0:
        raise DomainError(f"the saddle-point tail holds for eta in [1/2, 1], got {eta}")
    zeta = 2.0 * eta - 1.0
    # zeta^0 is taken as 1 at eta = 1/2
    zeta_factor = 1.0 if zeta == 0 else zeta ** (-1.0 + 1.0 / (2.0 * eta))
    return eta * zeta_factor * (2.0 * alpha) ** (-1.0 + 1.0 / eta)


def gap_tail_bessel(s: ArrayLike, p: BesselWeightParams) -> Real:
    c = tail_coefficient(p.eta, p.alpha)
    value = np.exp(-c * np.power(np.asarray(s, dtype=float), 1.0 / p.eta))
    return float(value) if np.ndim(value) == 0 else value


def eigen_from_traces(s1: float, s2: float) -> SpectralPair:
    """Eigenvalues of a 2x2 Hermitian matrix from Tr X and Tr X^2."""
    disc = 2.0 * s2 - s1 * s1
    if disc < 0:
        if disc < -1e-12 * max(1.0, abs(s2)):
            raise DomainError(f"2 s2 - s1^2 = {disc} < 0: no Hermitian matrix has these traces")
        disc = 0.0
    root = math.sqrt(disc)
    return SpectralPair(lambda1=0.5 * (s1 - root), lambda2=0.5 * (s1 + root), spacing=root)


@dataclass(slots=True)
class BesselEnsemble:
    """Evaluator for one parameter set; the gap normalisation is computed eagerly."""

    params: BesselWeightParams
    z_gap: float = field(init=False)

    def __post_init__(self) -> None:
        self.z_gap = self._gap_normalisation()
        logger.debug("Bessel eta=%s alpha=%s: gap normalisation %.12g", self.params.eta, self.params.alpha, self.z_gap)

    @property
    def pair_normalisation(self) -> float:
        """int int phi(l1) phi(l2) |l2 - l1|^beta over R^2."""
        return 2.0 * self.z_gap

    def _gap_normalisation(self) -> float:
        p = self.params
        zeta, beta, alpha = p.zeta, p.beta, p.alpha
        half = 0.5 * beta

        def angular(v: float) -> float:
            return (v * (1.0 - v)) ** (-0.5 * zeta) * (v**zeta + (1.0 - v) ** zeta) ** half

        v_integral = 2.0 * integrate(angular, Domain.finite(0.0, 0.5), INNER_SPEC).value
        radial_power = 2.0 - zeta + zeta * half
        return (
            p.b_norm**2
            * specfun.gamma(1.0 - 0.5 * zeta)
            * 0.5
            * specfun.SQRT_PI
            * (2.0 * alpha) ** (-1.0 - half)
            * (8.0 * alpha) ** radial_power
            * specfun.gamma(radial_power)
            * v_integral
        )

    def _shift(self, s: float) -> float:
        if self.params.zeta < 0:
            return 0.0
        return tail_coefficient(self.params.eta, self.params.alpha) * s ** (1.0 / self.params.eta)

    def _pair_overlap(self, s: float, shift: float) -> float:
        """exp(shift) * int phi(l) phi(l + s) dl."""
        p = self.params
        zeta, alpha = p.zeta, p.alpha
        power = 1.0 - 1.5 * zeta

        def radial(v: float) -> float:
            s_plus = v**zeta + (1.0 - v) ** zeta
            kappa = 2.0 * alpha * s * s / s_plus
            inner = math.exp(_log_mixture_integral(power, kappa, zeta, alpha) + shift)
            s_minus = v ** (-zeta) + (1.0 - v) ** (-zeta)
            return (v * (1.0 - v)) ** (-zeta) * s_minus ** (-0.5) * inner

        outer = 2.0 * integrate(radial, Domain.finite(0.0, 0.5), OUTER_SPEC).value
        return p.b_norm**2 * specfun.SQRT_PI * (2.0 * alpha) ** (-0.5) * outer

    def gap(self, s: float) -> float:
        if s < 0:
            raise DomainError("the raw spacing is non-negative")
        if s == 0.0:
            return self.reduced_gap(0.0) if self.params.beta == 0 else 0.0
        return math.exp(self.log_gap(s))

    def reduced_gap(self, s: float) -> float:
        """P(s) / s^beta, which is finite and positive at s = 0."""
        if s < 0:
            raise DomainError("the raw spacing is non-negative")
        if s == 0.0:
            return self._pair_overlap(0.0, 0.0) / self.z_gap
        return math.exp(self.log_gap(s) - self.params.beta * math.log(s))

    def log_gap(self, s: float) -> float:
        if not s > 0:
            raise DomainError("log gap probability needs s > 0")
        shift = self._shift(s)
        overlap = self._pair_overlap(s, shift)
        if overlap <= 0:
            return -math.inf
        return self.params.beta * math.log(s) + math.log(overlap) - shift - math.log(self.z_gap)

    def phi(self, x: ArrayLike) -> Real:
        return phi(x, self.params)

    def _reduced_inner(self, lam: float) -> float:
        p = self.params
        zeta, alpha = p.zeta, p.alpha
        a = 1.0 - 0.5 * zeta
        z_scale = 2.0 * alpha * lam * lam

        def integrand(t: float) -> float:
            z = z_scale * t ** (-zeta)
            return math.exp(-0.5 * zeta * zeta * math.log(t) - t / (8.0 * alpha)) * specfun.kummer_1f1_scaled(a, 0.5, z)

        points: Tuple[float, ...] = (8.0 * alpha,)
        if zeta != 0 and z_scale > 0:
            points += (z_scale ** (1.0 / zeta),)
        res = integrate(integrand, Domain.half_line(0.0), INNER_SPEC.with_points(*points))
        return p.b_norm * specfun.gamma(a) * (2.0 * alpha) ** (-a) * res.value

    def _direct_inner(self, lam: float) -> float:
        beta = self.params.beta
        points = (0.0, lam) if lam != 0 else (0.0,)
        res = integrate(
            lambda y: _phi_scalar(y, self.params) * abs(lam - y) ** beta,
            Domain.whole_line(),
            DENSITY_SPEC.with_points(*points),
        )
        return res.value

    def spectral_density(self, lam: ArrayLike, method: DensityMethod = DensityMethod.DIRECT) -> Real:
        method = DensityMethod(method)
        inner = self._reduced_inner if method is DensityMethod.REDUCED else self._direct_inner
        lams = np.asarray(lam, dtype=float)
        out = np.empty(lams.size)
        for idx, value in enumerate(lams.ravel()):
            out[idx] = _phi_scalar(float(value), self.params) * inner(float(value)) / self.pair_normalisation
        return float(out[0]) if lams.ndim == 0 else out.reshape(lams.shape)

    def spacing_curve(self, s_max: float = 10.0, n: int = 97) -> DensityCurve:
        """P(s) on a grid clustered at s = 0, with P(s) / s^beta as the ``reduced`` column."""
        grid = np.concatenate(([0.0], _clustered_grid(s_max, n, CLUSTER_NODES // 2, 1e-3)))
        reduced = np.array([self.reduced_gap(float(s)) for s in grid])
        # numpy takes 0^0 = 1, which is P(0) at the Poisson end
        values = np.power(grid, self.params.beta) * reduced
        return DensityCurve(
            grid,
            values,
            "s",
            "P",
            meta={"z_gap": self.z_gap, "beta": self.params.beta},
            extra_columns={"reduced": reduced},
        )

    def density_curve(self, half_width: float = 8.0, n: int = 121) -> DensityCurve:
        """rho on positive abscissae clustered at 0, where it has a cusp or diverges; rho is even."""
        grid = _clustered_grid(half_width, n, CLUSTER_NODES, CLUSTER_MIN)
        values = np.asarray(self.spectral_density(grid, DensityMethod.REDUCED))
        return DensityCurve(grid, values, "lambda", "rho", meta={"method": DensityMethod.REDUCED.value})


def _clustered_grid(hi: float, n: int, n_head: int, lo: float) -> np.ndarray:
    head = np.geomspace(lo, CLUSTER_EDGE, n_head, endpoint=False)
    return np.concatenate((head, np.linspace(CLUSTER_EDGE, hi, n)))


def spacing_reference(curve: DensityCurve) -> Tuple[Curve, Curve]:
    """(pdf, cdf) of the spacing from a ``spacing_curve`` table."""
    grid, reduced = curve.abscissa, curve.extra_columns["reduced"]
    beta = float(curve.meta["beta"])
    cdf = cdf_from_table(grid, reduced, origin_power=beta)

    def pdf(s: np.ndarray) -> np.ndarray:
        ss = np.clip(np.asarray(s, dtype=float), 0.0, None)
        inside = np.interp(ss, grid, reduced, right=0.0)
        return np.power(ss, beta) * inside

    return pdf, cdf


def density_reference(curve: DensityCurve) -> Tuple[Curve, Curve]:
    """(pdf, cdf) of one eigenvalue from a ``density_curve`` table."""
    grid, values = curve.abscissa, curve.values

    def pdf(lam: np.ndarray) -> np.ndarray:
        return np.interp(np.abs(np.asarray(lam, dtype=float)), grid, values, right=0.0)

    return pdf, symmetric_cdf_from_table(grid, values)


@lru_cache(maxsize=32)
def bessel_ensemble(p: BesselWeightParams) -> BesselEnsemble:
    return BesselEnsemble(p)


def gap_probability_bessel(s: ArrayLike, p: BesselWeightParams) -> Real:
    ensemble = bessel_ensemble(p)
    ss = np.asarray(s, dtype=float)
    values = np.array([ensemble.gap(float(v)) for v in np.atleast_1d(ss).ravel()])
    return float(values[0]) if ss.ndim == 0 else values.reshape(ss.shape)


def log_gap_probability_bessel(s: ArrayLike, p: BesselWeightParams) -> Real:
    ensemble = bessel_ensemble(p)
    ss = np.asarray(s, dtype=float)
    values = np.array([ensemble.log_gap(float(v)) for v in np.atleast_1d(ss).ravel()])
    return float(values[0]) if ss.ndim == 0 else values.reshape(ss.shape)


def spectral_density_bessel(
    lam: ArrayLike,
    p: BesselWeightParams,
    method: DensityMethod | str = DensityMethod.DIRECT,
) -> Real:
    return bessel_ensemble(p).spectral_density(lam, DensityMethod(method))


def compare_density_methods(p: BesselWeightParams, grid: Sequence[float]) -> float:
    """Largest relative difference between the reduced and direct densities on ``grid``.

    A difference above the tolerance is logged; the direct curve stays authoritative.
    """
    points = np.asarray(grid, dtype=float)
    reduced = np.asarray(spectral_density_bessel(points, p, DensityMethod.REDUCED))
    direct = np.asarray(spectral_density_bessel(points, p, DensityMethod.DIRECT))
    discrepancy = float(np.max(np.abs(reduced - direct) / np.abs(direct)))
    if discrepancy > METHOD_TOLERANCE:
        logger.warning(
            "reduced and direct Bessel densities differ by %.3g (zeta=%s); using the direct curve",
            discrepancy,
            p.zeta,
        )
    return discrepancy


def fit_tail_exponent(
    s: ArrayLike,
    log_p: ArrayLike,
    coefficient: Optional[float] = None,
) -> float:
    """Fit k in log P = A + B log s - c s^k; A and B are nuisance parameters.

    With ``coefficient`` given, c is held at that value.
    """
    ss = np.asarray(s, dtype=float)
    ys = np.asarray(log_p, dtype=float)
    if ss.size < 5 or ss.shape != ys.shape:
        raise DomainError("tail fit needs at least 5 matching points")
    try:
        if coefficient is not None:
            popt, _ = optimize.curve_fit(
                lambda x, a, b, k: a + b * np.log(x) - coefficient * np.power(x, k),
                ss,
                ys,
                p0=(0.0, 0.0, 1.5),
                bounds=([-np.inf, -np.inf, 0.25], [np.inf, np.inf, 4.0]),
            )
            return float(popt[2])
        popt, _ = optimize.curve_fit(
            lambda x, a, b, c, k: a + b * np.log(x) - c * np.power(x, k),
            ss,
            ys,
            p0=(0.0, 0.0, 1.0, 1.5),
            bounds=([-np.inf, -np.inf, 1e-6, 0.25], [np.inf, np.inf, np.inf, 4.0]),
        )
        return float(popt[3])
    except (RuntimeError, ValueError) as exc:
        raise FitError(f"tail exponent fit did not converge: {exc}") from exc
