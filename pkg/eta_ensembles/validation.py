"""Cross-module invariant battery behind ``eta-ensembles validate``."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List

import numpy as np
from scipy import stats

from . import bessel_ensemble as bessel
from . import gaussian_ensemble as gaussian
from .errors import EnsembleError
from .matrix_sampling import vandermonde_power_sum_det
from .models import ValidationCheck, ValidationSummary, WeightKind
from .numerics import Domain, QuadratureSpec, integrate, integrate_2d
from .rng import RngStream

logger = logging.getLogger(__name__)

NORMALISATION_ETAS = (0.0, 0.25, 0.5, 0.75, 1.0, 1.25)
NORMALISATION_TOL = 1e-6
NORMALISATION_SPEC = QuadratureSpec(rel_tol=1e-9, abs_tol=1e-10)
EIGEN_BOX = 12.0
LIMIT_TOL = 1e-9
TOWER_ETAS = (0.0, 0.3, 0.5, 0.8)
TOWER_POINTS = ((0.3, -0.7), (1.1, 0.4), (-1.5, 0.9), (2.0, -1.2), (0.6, 1.8))
TOWER_TOL = 1e-6
TAIL_ETAS = (0.2, 0.5, 0.8)
TAIL_BANDS = ((6.0, 0.05), (10.0, 0.01))
TWIN_ETAS = (0.5, 0.7, 0.9, 1.0)
TWIN_TOL = 1e-12
POWER_SUM_SIZES = range(2, 7)
POWER_SUM_SETS = 100
POWER_SUM_TOL = 1e-9
POWER_SUM_SEED = 20240611
BESSEL_LIMIT_POINTS = (0.5, 1.0, 2.0, 4.0)
BESSEL_LIMIT_TOL = 1e-6
BESSEL_TAIL_ETAS = (0.6, 0.75, 0.9)
BESSEL_TAIL_TOL = 0.02
BESSEL_TAIL_GRID = np.linspace(6.0, 12.0, 13)
BESSEL_METHOD_ETAS = (0.5, 0.725, 0.95)
# even count on a symmetric interval keeps lambda = 0 off the grid
BESSEL_METHOD_GRID = np.linspace(-4.0, 4.0, 8)


@dataclass
class ValidationReport:
    weight: WeightKind
    _checks: List[ValidationCheck] = field(init=False, default_factory=list)
    _discrepancies: Dict[str, float] = field(init=False, default_factory=dict)

    def add(self, name: str, value: float, tolerance: float, *, detail: str = "") -> ValidationCheck:
        passed = math.isfinite(value) and value <= tolerance
        check = ValidationCheck(name=name, passed=passed, value=value, tolerance=tolerance, detail=detail)
        self._checks.append(check)
        if passed:
            logger.info("PASS %s: %.3g <= %.3g", name, value, tolerance)
        else:
            logger.warning("FAIL %s: %.3g > %.3g %s", name, value, tolerance, detail)
        return check

    def measure(self, name: str, tolerance: float, compute: Callable[[], float], detail: str = "") -> None:
        """Record ``compute()`` as the error of a check; library errors count as failures."""
        try:
            value = float(compute())
        except EnsembleError as exc:
            self.add(name, math.nan, tolerance, detail=f"{type(exc).__name__}: {exc}")
            return
        self.add(name, value, tolerance, detail=detail)

    def note_discrepancy(self, key: str, value: float) -> None:
        self._discrepancies[key] = value

    def finalise(self) -> ValidationSummary:
        return ValidationSummary(
            weight=self.weight,
            checks=list(self._checks),
            method_discrepancies=dict(self._discrepancies),
        )


def _eigen_mass(eta: float) -> float:
    box = Domain.finite(-EIGEN_BOX, EIGEN_BOX)
    res = integrate_2d(
        lambda l1, l2: gaussian.jpd_eigen(l1, l2, eta),
        box,
        box,
        NORMALISATION_SPEC,
        inner_points=lambda l1: (l1,),
    )
    return res.value


def _density_mass(eta: float) -> float:
    return integrate(
        lambda lam: gaussian.spectral_density_gaussian(lam, eta),
        Domain.whole_line(),
        NORMALISATION_SPEC.with_points(0.0),
    ).value


def _gap_mass(eta: float) -> float:
    return integrate(
        lambda s: gaussian.gap_probability_gaussian(s, eta),
        Domain.finite(0.0, 2.0 * EIGEN_BOX),
        NORMALISATION_SPEC,
    ).value


def check_gaussian_normalisations(report: ValidationReport) -> None:
    for eta in NORMALISATION_ETAS:
        report.measure(f"normalisation.jpd_eigen[eta={eta}]", NORMALISATION_TOL, lambda: abs(_eigen_mass(eta) - 1.0))
        report.measure(
            f"normalisation.spectral_density[eta={eta}]", NORMALISATION_TOL, lambda: abs(_density_mass(eta) - 1.0)
        )
        report.measure(f"normalisation.gap[eta={eta}]", NORMALISATION_TOL, lambda: abs(_gap_mass(eta) - 1.0))


def check_limit_collapse(report: ValidationReport) -> None:
    grid = np.linspace(-5.0, 5.0, 201)
    for eta in (0.0, 0.5, 1.0):
        report.measure(
            f"limit.spectral_density[eta={eta}]",
            LIMIT_TOL,
            lambda: float(
                np.max(
                    np.abs(
                        np.asarray(gaussian.spectral_density_gaussian(grid, eta))
                        - np.asarray(gaussian.spectral_density_closed_form(grid, eta))
                    )
                )
            ),
        )


def _tower_p1_error(eta: float) -> float:
    worst = 0.0
    for x, _ in TOWER_POINTS:
        integral = integrate(
            lambda y: gaussian.marginal_p2(x, y, eta),
            Domain.whole_line(),
            NORMALISATION_SPEC.with_points(x),
        ).value
        worst = max(worst, abs(integral - gaussian.marginal_p1(x, eta)))
    return worst


def _tower_p2_error(eta: float) -> float:
    worst = 0.0
    for x, y in TOWER_POINTS:
        integral = integrate(
            lambda t: gaussian.marginal_p3(x, y, t, eta),
            Domain.whole_line(),
            NORMALISATION_SPEC.with_points(0.0),
        ).value
        worst = max(worst, abs(integral - gaussian.marginal_p2(x, y, eta)))
    return worst


def check_marginal_tower(report: ValidationReport) -> None:
    for eta in TOWER_ETAS:
        report.measure(f"tower.p2_to_p1[eta={eta}]", TOWER_TOL, lambda: _tower_p1_error(eta))
        report.measure(f"tower.p3_to_p2[eta={eta}]", TOWER_TOL, lambda: _tower_p2_error(eta))
    xs = np.array([x for x, _ in TOWER_POINTS])
    report.measure(
        "tower.p1_gue_normal",
        1e-10,
        lambda: float(np.max(np.abs(np.asarray(gaussian.marginal_p1(xs, 0.0)) - stats.norm.pdf(xs)))),
    )


def check_p1_tail(report: ValidationReport) -> None:
    for eta in TAIL_ETAS:
        for x, band in TAIL_BANDS:
            report.measure(
                f"tail.p1_asymptotic[eta={eta},x={x:g}]",
                band,
                lambda: abs(gaussian.marginal_p1(x, eta) / gaussian.p1_asymptotic(x, eta) - 1.0),
            )


def check_anti_eta(report: ValidationReport) -> None:
    def excess() -> float:
        _, normalizable = gaussian.anti_eta_check(1.25)
        if not normalizable:
            return math.inf
        attracting = float(gaussian.spacing_cdf_gaussian(0.1, 1.25))
        poisson = float(gaussian.spacing_cdf_gaussian(0.1, 1.0))
        # non-positive when small spacings are more likely than at eta = 1
        return poisson - attracting

    report.measure("anti_eta.small_spacing_excess", 0.0, excess)


def check_twinning(report: ValidationReport) -> None:
    grid = np.linspace(-4.0, 4.0, 41)
    l1, l2 = np.meshgrid(grid, grid + 0.05)
    for eta in TWIN_ETAS:
        report.measure(
            f"twin.jpd_eigen[eta={eta}]",
            TWIN_TOL,
            lambda: float(
                np.max(
                    np.abs(
                        np.asarray(gaussian.jpd_eigen(l1, l2, eta))
                        - np.asarray(gaussian.jpd_eigen_real_twin(l1, l2, 2.0 * eta - 1.0))
                    )
                )
            ),
        )


def _power_sum_error(n: int) -> float:
    gen = RngStream(seed=POWER_SUM_SEED, stream_id=n).generator()
    lattice = 0.5 * (np.arange(n) - 0.5 * (n - 1))
    worst = 0.0
    for _ in range(POWER_SUM_SETS):
        # jittered lattice: random, but separated enough for a well-conditioned Hankel matrix
        eigenvalues = gen.permutation(lattice + gen.uniform(-0.15, 0.15, n))
        det, vdm_sq = vandermonde_power_sum_det(eigenvalues, n)
        worst = max(worst, abs(det - vdm_sq) / vdm_sq)
    return worst


def check_power_sum_identity(report: ValidationReport) -> None:
    for n in POWER_SUM_SIZES:
        report.measure(f"power_sum.hankel_det[n={n}]", POWER_SUM_TOL, lambda: _power_sum_error(n))


def _bessel(eta: float, alpha: float = 1.0) -> bessel.BesselEnsemble:
    return bessel.bessel_ensemble(bessel.BesselWeightParams(eta=eta, alpha=alpha))


def check_bessel_limits(report: ValidationReport) -> None:
    s = np.array(BESSEL_LIMIT_POINTS)

    def poisson() -> float:
        ensemble = _bessel(1.0)
        return float(np.max(np.abs([ensemble.gap(float(v)) - math.exp(-v) for v in s])))

    def wigner() -> float:
        ensemble = _bessel(0.5, math.pi / 4.0)
        expected = 0.5 * math.pi * s * np.exp(-0.25 * math.pi * s * s)
        return float(np.max(np.abs([ensemble.gap(float(v)) for v in s] - expected)))

    report.measure("bessel.limit_poisson[eta=1]", BESSEL_LIMIT_TOL, poisson)
    report.measure("bessel.limit_wigner[eta=0.5]", BESSEL_LIMIT_TOL, wigner)


def check_bessel_fourier(report: ValidationReport) -> None:
    def spread() -> float:
        p = bessel.BesselWeightParams(eta=1.0)
        ratios = np.array([bessel.convolution_check(v, p) * math.exp(v) for v in BESSEL_LIMIT_POINTS])
        return float((ratios.max() - ratios.min()) / ratios.mean())

    report.measure("bessel.fourier_exponential[eta=1]", 1e-6, spread)


def check_bessel_normalisations(report: ValidationReport) -> None:
    eta = 0.725
    ensemble = _bessel(eta)

    def gap_mass() -> float:
        res = integrate(ensemble.gap, Domain.finite(0.0, 30.0), QuadratureSpec(rel_tol=1e-8, abs_tol=1e-10))
        return abs(res.value - 1.0)

    def density_mass() -> float:
        res = integrate(
            lambda lam: ensemble.spectral_density(lam, bessel.DensityMethod.REDUCED),
            Domain.whole_line(),
            QuadratureSpec(rel_tol=1e-8, abs_tol=1e-10, singular_points=(0.0,)),
        )
        return abs(res.value - 1.0)

    def direct_density_mass() -> float:
        # rho is even
        res = integrate(
            lambda lam: ensemble.spectral_density(lam, bessel.DensityMethod.DIRECT),
            Domain.half_line(0.0),
            QuadratureSpec(rel_tol=1e-8, abs_tol=1e-10),
        )
        return abs(2.0 * res.value - 1.0)

    report.measure(f"normalisation.bessel_gap[eta={eta}]", NORMALISATION_TOL, gap_mass)
    report.measure(f"normalisation.bessel_density[eta={eta}]", NORMALISATION_TOL, density_mass)
    report.measure(f"normalisation.bessel_density_direct[eta={eta}]", NORMALISATION_TOL, direct_density_mass)


def check_bessel_tail(report: ValidationReport) -> None:
    for eta in BESSEL_TAIL_ETAS:
        def relative_error(eta: float = eta) -> float:
            p = bessel.BesselWeightParams(eta=eta)
            log_p = np.asarray(bessel.log_gap_probability_bessel(BESSEL_TAIL_GRID, p))
            k = bessel.fit_tail_exponent(BESSEL_TAIL_GRID, log_p, bessel.tail_coefficient(eta, p.alpha))
            return abs(k * eta - 1.0)

        report.measure(f"bessel.tail_exponent[eta={eta}]", BESSEL_TAIL_TOL, relative_error)


def check_bessel_methods(report: ValidationReport) -> None:
    for eta in BESSEL_METHOD_ETAS:
        p = bessel.BesselWeightParams(eta=eta)

        def discrepancy(p: bessel.BesselWeightParams = p) -> float:
            value = bessel.compare_density_methods(p, BESSEL_METHOD_GRID)
            report.note_discrepancy(f"zeta={p.zeta:g}", value)
            return value

        report.measure(
            f"bessel.reduced_vs_direct[zeta={p.zeta:g}]",
            bessel.METHOD_TOLERANCE,
            discrepancy,
            detail="reduced form flagged; the direct curve is the default",
        )


GAUSSIAN_CHECKS = (
    check_gaussian_normalisations,
    check_limit_collapse,
    check_marginal_tower,
    check_p1_tail,
    check_anti_eta,
)
SHARED_CHECKS = (check_twinning, check_power_sum_identity)
BESSEL_CHECKS = (
    check_bessel_limits,
    check_bessel_fourier,
    check_bessel_normalisations,
    check_bessel_tail,
    check_bessel_methods,
)


def run_validation(weight: WeightKind = WeightKind.GAUSSIAN) -> ValidationSummary:
    weight = WeightKind(weight)
    report = ValidationReport(weight=weight)
    battery = (GAUSSIAN_CHECKS if weight is WeightKind.GAUSSIAN else BESSEL_CHECKS) + SHARED_CHECKS
    for check in battery:
        logger.info("Running %s", check.__name__)
        check(report)
    summary = report.finalise()
    logger.info("%d checks, %d failed", len(summary.checks), len(summary.failures))
    return summary
