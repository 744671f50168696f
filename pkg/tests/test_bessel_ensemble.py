import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate
from scipy import special, stats

from eta_ensembles import bessel_ensemble as be
from eta_ensembles import specfun
from eta_ensembles.errors import DomainError, FitError, SingularPointError
from eta_ensembles.models import DensityCurve, EnsembleParams, WeightKind
from eta_ensembles.numerics import Domain, QuadratureSpec, integrate


def test_weight_params_reject_out_of_range_values():
    with pytest.raises(DomainError):
        be.BesselWeightParams(eta=1.2)
    with pytest.raises(DomainError):
        be.BesselWeightParams(eta=0.7, alpha=0.0)
    with pytest.raises(DomainError):
        be.BesselWeightParams.from_ensemble(EnsembleParams(weight=WeightKind.GAUSSIAN, eta=0.7))


def test_weight_params_derived_exponents():
    p = be.BesselWeightParams(eta=0.75, alpha=2.0)
    assert p.zeta == pytest.approx(0.5)
    assert p.beta == pytest.approx(0.5)
    assert be.BesselWeightParams.from_ensemble(
        EnsembleParams(weight=WeightKind.BESSEL, eta=0.75, alpha=2.0)
    ) == p


def test_phi_reduces_to_macdonald_function_at_eta_one():
    p = be.BesselWeightParams(eta=1.0)
    for x in (0.3, 1.0, 2.5):
        assert be.phi(x, p) == pytest.approx(2.0 * specfun.bessel_k0(x), rel=1e-8)


def test_phi_is_gaussian_at_eta_one_half():
    p = be.BesselWeightParams(eta=0.5, alpha=1.0)
    assert be.phi(0.0, p) == pytest.approx(8.0, rel=1e-12)
    assert be.phi(0.7, p) == pytest.approx(8.0 * math.exp(-2.0 * 0.49), rel=1e-8)


def test_phi_diverges_at_origin_for_eta_one():
    with pytest.raises(SingularPointError):
        be.phi(0.0, be.BesselWeightParams(eta=1.0))


def test_phi_is_even_and_vectorised():
    p = be.BesselWeightParams(eta=0.8)
    values = be.phi(np.array([[-1.5, 1.5], [-0.2, 0.2]]), p)
    assert values.shape == (2, 2)
    np.testing.assert_allclose(values[:, 0], values[:, 1], rtol=1e-12)


def test_eigen_from_traces():
    pair = be.eigen_from_traces(4.0, 10.0)
    assert (pair.lambda1, pair.lambda2, pair.spacing) == pytest.approx((1.0, 3.0, 2.0))
    pair = be.eigen_from_traces(0.0, 2.0)
    assert (pair.lambda1, pair.lambda2) == pytest.approx((-1.0, 1.0))


def test_eigen_from_traces_rejects_impossible_traces():
    with pytest.raises(DomainError):
        be.eigen_from_traces(4.0, 7.0)


def test_tail_coefficient_limits():
    assert be.tail_coefficient(1.0, 3.0) == pytest.approx(1.0)
    assert be.tail_coefficient(0.5, 0.7) == pytest.approx(0.7)
    with pytest.raises(DomainError):
        be.tail_coefficient(0.3, 1.0)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_gap_normalisation_at_poisson_end(alpha):
    ensemble = be.BesselEnsemble(be.BesselWeightParams(eta=1.0, alpha=alpha))
    assert ensemble.z_gap == pytest.approx(2.0 * math.pi**2, rel=1e-9)
    assert ensemble.pair_normalisation == pytest.approx(4.0 * math.pi**2, rel=1e-9)


@pytest.mark.parametrize("alpha", [1.0, math.pi / 4.0])
def test_gap_normalisation_at_wigner_end(alpha):
    ensemble = be.BesselEnsemble(be.BesselWeightParams(eta=0.5, alpha=alpha))
    assert ensemble.z_gap == pytest.approx(16.0 * math.sqrt(math.pi * alpha), rel=1e-9)


def test_gap_is_poisson_at_eta_one():
    p = be.BesselWeightParams(eta=1.0)
    for s in (0.5, 1.0, 3.0):
        assert be.gap_probability_bessel(s, p) == pytest.approx(math.exp(-s), rel=1e-6)


def test_gap_is_wigner_surmise_at_eta_one_half():
    p = be.BesselWeightParams(eta=0.5, alpha=math.pi / 4.0)
    for s in (0.5, 1.0, 2.0):
        expected = 0.5 * math.pi * s * math.exp(-0.25 * math.pi * s * s)
        assert be.gap_probability_bessel(s, p) == pytest.approx(expected, rel=1e-6)


def test_gap_vanishes_at_zero_with_level_repulsion():
    ensemble = be.BesselEnsemble(be.BesselWeightParams(eta=0.75))
    assert ensemble.gap(0.0) == 0.0
    with pytest.raises(DomainError):
        ensemble.gap(-0.1)
    with pytest.raises(DomainError):
        ensemble.log_gap(0.0)


def test_log_gap_matches_gap():
    p = be.BesselWeightParams(eta=0.8)
    s = np.array([0.4, 1.3])
    np.testing.assert_allclose(
        np.exp(be.log_gap_probability_bessel(s, p)), be.gap_probability_bessel(s, p), rtol=1e-12
    )


def test_convolution_matches_gap_overlap_at_poisson_end():
    p = be.BesselWeightParams(eta=1.0)
    ensemble = be.bessel_ensemble(p)
    # phi * phi (s) = Z_gap P(s) when beta = 0
    assert be.convolution_check(1.0, p) == pytest.approx(ensemble.z_gap * math.exp(-1.0), rel=1e-5)


def test_density_methods_agree_where_phi_is_gaussian():
    p = be.BesselWeightParams(eta=0.5)
    assert be.compare_density_methods(p, [0.0, 0.3, 1.1]) < 1e-6


def test_density_at_wigner_end_is_closed_form():
    # rho(l) = phi(l) E|l - Y| / (2 Z_gap) with Y ~ N(0, 1/4)
    p = be.BesselWeightParams(eta=0.5, alpha=1.0)
    lam = 0.6
    sigma = 0.5
    mean_abs = sigma * math.sqrt(2.0 / math.pi) * math.exp(-lam * lam / (2.0 * sigma**2)) + lam * math.erf(
        lam / (sigma * math.sqrt(2.0))
    )
    phi_value = 8.0 * math.exp(-2.0 * lam * lam)
    z_gap = 16.0 * math.sqrt(math.pi)
    expected = phi_value * 8.0 * sigma * math.sqrt(2.0 * math.pi) * mean_abs / (2.0 * z_gap)
    for method in be.DensityMethod:
        assert be.spectral_density_bessel(lam, p, method) == pytest.approx(expected, rel=1e-7)


def test_fit_tail_exponent_recovers_synthetic_exponent():
    s = np.linspace(2.0, 10.0, 30)
    log_p = 0.3 + 0.5 * np.log(s) - 1.2 * s**1.4
    assert be.fit_tail_exponent(s, log_p) == pytest.approx(1.4, rel=1e-4)
    assert be.fit_tail_exponent(s, log_p, coefficient=1.2) == pytest.approx(1.4, rel=1e-6)


def test_fit_tail_exponent_needs_enough_points():
    with pytest.raises(DomainError):
        be.fit_tail_exponent([1.0, 2.0], [0.0, -1.0])


def test_fit_tail_exponent_reports_failure(mocker):
    mocker.patch("eta_ensembles.bessel_ensemble.optimize.curve_fit", side_effect=RuntimeError("no fit"))
    with pytest.raises(FitError):
        be.fit_tail_exponent(np.linspace(1.0, 5.0, 8), -np.linspace(1.0, 5.0, 8))


@pytest.mark.parametrize(("eta", "x"), [(0.725, 17.8), (0.6, 3.0), (0.25, 12.0), (0.25, 30.0), (0.95, 0.01)])
def test_phi_is_finite_far_from_the_bulk(eta, x):
    value = be.phi(x, be.BesselWeightParams(eta=eta))
    assert math.isfinite(value)
    assert value > 0.0


def test_phi_matches_plain_quadrature_of_its_mixture():
    p = be.BesselWeightParams(eta=0.75, alpha=1.5)
    x = 1.3

    def integrand(t):
        return t ** -p.zeta * math.exp(-t / (8.0 * p.alpha) - 2.0 * p.alpha * x * x * t ** -p.zeta)

    expected, _ = sp_integrate.quad(integrand, 0.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=500)
    assert be.phi(x, p) == pytest.approx(expected, rel=1e-8)


def test_phi_decreases_away_from_origin():
    values = be.phi(np.array([0.0, 0.5, 2.0, 8.0, 20.0]), be.BesselWeightParams(eta=0.725))
    assert np.all(np.diff(values) < 0)


@pytest.mark.parametrize("eta", [0.725, 0.95], ids=["zeta=0.45", "zeta=0.9"])
def test_direct_density_agrees_with_reduced_density(eta):
    p = be.BesselWeightParams(eta=eta)
    assert be.compare_density_methods(p, [-2.5, -0.4, 1.0]) < be.METHOD_TOLERANCE


def test_spacing_reference_keeps_the_power_law_at_origin():
    # P(s) = s^0.1 exp(-s) / Gamma(1.1), tabulated the way spacing_curve does
    grid = np.concatenate(([0.0], be._clustered_grid(30.0, 200, 20, 1e-3)))
    reduced = np.exp(-grid) / special.gamma(1.1)
    curve = DensityCurve(grid, grid**0.1 * reduced, "s", "P", meta={"beta": 0.1}, extra_columns={"reduced": reduced})
    pdf, cdf = be.spacing_reference(curve)
    s = np.array([0.0, 0.02, 0.3, 2.0])
    np.testing.assert_allclose(cdf(s), stats.gamma.cdf(s, 1.1), atol=2e-4)
    np.testing.assert_allclose(pdf(s[1:]), stats.gamma.pdf(s[1:], 1.1), rtol=5e-3)


def test_density_reference_is_even():
    grid = be._clustered_grid(10.0, 200, be.CLUSTER_NODES, be.CLUSTER_MIN)
    values = stats.laplace.pdf(grid)
    pdf, cdf = be.density_reference(DensityCurve(grid, values, "lambda", "rho"))
    lam = np.array([0.3, 1.7])
    np.testing.assert_allclose(pdf(-lam), pdf(lam), rtol=1e-12)
    np.testing.assert_allclose(cdf(lam), stats.laplace.cdf(lam), atol=2e-4)
    np.testing.assert_allclose(cdf(-lam), stats.laplace.cdf(-lam), atol=2e-4)


@pytest.mark.slow
def test_spacing_reference_matches_gap_quadrature_near_poisson_end():
    p = be.BesselWeightParams(eta=0.95)
    ensemble = be.bessel_ensemble(p)
    _, cdf = be.spacing_reference(ensemble.spacing_curve(s_max=12.0, n=49))
    for s in (0.02, 0.1, 0.5):
        expected = integrate(ensemble.gap, Domain.finite(0.0, s), QuadratureSpec(rel_tol=1e-8, abs_tol=1e-12)).value
        assert cdf(np.array([s]))[0] == pytest.approx(expected, rel=1e-2)


@pytest.mark.slow
@pytest.mark.parametrize("eta", [0.725, 0.95])
def test_direct_density_is_normalised(eta):
    ensemble = be.bessel_ensemble(be.BesselWeightParams(eta=eta))
    res = integrate(
        lambda lam: ensemble.spectral_density(lam, be.DensityMethod.DIRECT),
        Domain.half_line(0.0),
        QuadratureSpec(rel_tol=1e-8, abs_tol=1e-10),
    )
    assert 2.0 * res.value == pytest.approx(1.0, abs=1e-6)


@pytest.mark.slow
def test_fitted_tail_exponent_falls_as_eta_grows():
    s = np.linspace(6.0, 12.0, 13)
    exponents = []
    for eta in (0.5, 0.6, 0.7, 0.8, 0.9, 1.0):
        p = be.BesselWeightParams(eta=eta)
        log_p = np.asarray(be.log_gap_probability_bessel(s, p))
        exponents.append(be.fit_tail_exponent(s, log_p, be.tail_coefficient(eta, p.alpha)))
    assert np.all(np.diff(exponents) < 0)
    assert exponents[0] == pytest.approx(2.0, rel=1e-3)
    assert exponents[-1] == pytest.approx(1.0, rel=1e-3)
