import math

import numpy as np
import pytest
from scipy import special, stats

from eta_ensembles.errors import DomainError, QuadratureError
from eta_ensembles.numerics import (
    Domain,
    QuadratureSpec,
    build_histogram,
    cdf_from_table,
    integrate,
    integrate_2d,
    integrate_log_concave,
    ks_critical_value,
    ks_distance,
    merge_histograms,
    multinomial_sigma,
    symmetric_cdf_from_table,
    tabulate_cdf,
)
from eta_ensembles.rng import RngStream


def test_integrate_half_line_exponential():
    res = integrate(lambda t: math.exp(-t), Domain.half_line())
    assert res.value == pytest.approx(1.0, rel=1e-10)
    assert res.est_abs_error < 1e-8


def test_integrate_whole_line_gaussian():
    res = integrate(lambda x: math.exp(-x * x), Domain.whole_line())
    assert res.value == pytest.approx(math.sqrt(math.pi), rel=1e-10)


def test_integrate_handles_singular_endpoint():
    res = integrate(lambda t: t**-0.5 * math.exp(-t), Domain.half_line())
    assert res.value == pytest.approx(math.sqrt(math.pi), rel=1e-8)


def test_integrate_splits_at_interior_singular_point():
    spec = QuadratureSpec(singular_points=(0.3,))
    res = integrate(lambda x: abs(x - 0.3) ** -0.5, Domain.finite(0.0, 1.0), spec)
    expected = 2.0 * math.sqrt(0.3) + 2.0 * math.sqrt(0.7)
    assert res.value == pytest.approx(expected, rel=1e-8)


def test_integrate_rejects_non_finite_integrand():
    with pytest.raises(QuadratureError):
        integrate(lambda x: math.nan, Domain.finite(0.0, 1.0))


def test_integrate_reports_non_convergence():
    spec = QuadratureSpec(rel_tol=1e-14, abs_tol=1e-300, max_subdivisions=3)
    with pytest.raises(QuadratureError):
        integrate(lambda x: math.sin(1.0 / x), Domain.finite(1e-4, 1.0), spec)


def test_domain_and_spec_validation():
    with pytest.raises(DomainError):
        Domain.finite(1.0, 1.0)
    with pytest.raises(DomainError):
        QuadratureSpec(rel_tol=0.0)


def test_integrate_2d_product_gaussian():
    res = integrate_2d(
        lambda x, y: math.exp(-x * x - y * y),
        Domain.whole_line(),
        Domain.whole_line(),
    )
    assert res.value == pytest.approx(math.pi, rel=1e-8)


def test_histogram_single_value():
    hist = build_histogram([0.5], 1, (0.0, 1.0))
    assert hist.counts.tolist() == [1]
    assert hist.normalized_heights.tolist() == [1.0]


def test_histogram_uniform_grid_is_flat():
    data = (np.arange(1000) + 0.5) / 1000
    hist = build_histogram(data, 10, (0.0, 1.0))
    np.testing.assert_allclose(hist.normalized_heights, 1.0)


def test_histogram_tallies_out_of_range_values():
    hist = build_histogram([-2.0, 0.1, 0.2, 5.0, 6.0], 2, (0.0, 1.0))
    assert hist.below_range == 1
    assert hist.above_range == 2
    assert hist.total == 2


def test_histogram_rejects_empty_data():
    with pytest.raises(DomainError):
        build_histogram([], 5, (0.0, 1.0))


def test_merge_histograms_adds_counts():
    first = build_histogram([0.1, 0.2, 2.0], 4, (0.0, 1.0))
    second = build_histogram([0.9, -1.0], 4, (0.0, 1.0))
    merged = merge_histograms(first, second)
    assert merged.total == 3
    assert merged.counts.tolist() == [2, 0, 0, 1]
    assert merged.below_range == 1 and merged.above_range == 1
    with pytest.raises(DomainError):
        merge_histograms(first, build_histogram([0.5], 3, (0.0, 1.0)))


def test_gaussian_histogram_within_multinomial_bands():
    data = RngStream(seed=11).generator().standard_normal(75000)
    hist = build_histogram(data, 50, (-4.0, 4.0))
    sigma = multinomial_sigma(hist, stats.norm.pdf)
    expected = stats.norm.pdf(hist.centres)
    # heights are normalised to the in-range mass, which is 1 - 6e-5 here
    assert np.all(np.abs(hist.normalized_heights - expected) <= 4.0 * sigma + 1e-4)


def test_ks_distance_of_own_samples_is_below_critical_value():
    data = RngStream(seed=3).generator().standard_normal(10_000)
    gof = ks_distance(data, stats.norm.cdf)
    assert gof.n == 10_000
    assert gof.ks_distance < ks_critical_value(10_000)


def test_ks_distance_single_point_on_a_step():
    gof = ks_distance([0.0], lambda x: np.where(np.asarray(x) >= 0.0, 1.0, 0.0))
    assert gof.ks_distance == 1.0


def test_ks_distance_of_shifted_data_reflects_shift():
    data = RngStream(seed=5).generator().standard_normal(20_000) + 0.5
    gof = ks_distance(data, stats.norm.cdf)
    expected = stats.norm.cdf(0.25) - stats.norm.cdf(-0.25)
    assert gof.ks_distance == pytest.approx(expected, abs=0.02)


def test_ks_critical_value_matches_asymptotic_constant():
    assert ks_critical_value(10_000) == pytest.approx(1.628 / 100.0, rel=1e-3)


def test_tabulate_cdf_matches_normal_cdf():
    cdf = tabulate_cdf(stats.norm.pdf, -10.0, 10.0)
    x = np.array([-2.0, -0.3, 0.0, 1.1, 3.0])
    np.testing.assert_allclose(cdf(x), stats.norm.cdf(x), atol=1e-7)
    assert cdf(np.array([-20.0]))[0] == 0.0
    assert cdf(np.array([20.0]))[0] == 1.0


def test_cdf_from_table_on_coarse_grid():
    grid = np.linspace(-8.0, 8.0, 161)
    cdf = cdf_from_table(grid, stats.norm.pdf(grid))
    x = np.array([-1.5, 0.0, 0.7, 2.5])
    np.testing.assert_allclose(cdf(x), stats.norm.cdf(x), atol=2e-4)


def test_cdf_from_table_rejects_negative_values():
    with pytest.raises(QuadratureError):
        cdf_from_table([0.0, 1.0, 2.0], [1.0, -1.0, 1.0])


def test_integrate_log_concave_factors_out_a_huge_peak():
    peak, res = integrate_log_concave(lambda u: 800.0 - 0.5 * (u - 3.0) ** 2, lambda u: -(u - 3.0))
    assert peak == pytest.approx(800.0, rel=1e-12)
    assert res.value == pytest.approx(math.sqrt(2.0 * math.pi), rel=1e-9)


def test_integrate_log_concave_survives_a_far_underflowing_mode():
    # exp(log_f) is below the smallest double everywhere
    peak, res = integrate_log_concave(lambda u: -2000.0 - 0.5 * (u - 40.0) ** 2, lambda u: -(u - 40.0))
    assert peak == pytest.approx(-2000.0, rel=1e-12)
    assert res.value == pytest.approx(math.sqrt(2.0 * math.pi), rel=1e-9)


def test_integrate_log_concave_needs_a_mode():
    with pytest.raises(QuadratureError):
        integrate_log_concave(lambda u: u, lambda u: 1.0)


def test_cdf_from_table_with_origin_power_law():
    # f(s) = s^0.3 exp(-s) / Gamma(1.3); only the regular factor is tabulated
    grid = np.concatenate(([0.0], np.geomspace(1e-4, 40.0, 300)))
    cdf = cdf_from_table(grid, np.exp(-grid) / special.gamma(1.3), origin_power=0.3)
    s = np.array([0.002, 0.02, 0.5, 2.0, 6.0])
    np.testing.assert_allclose(cdf(s), stats.gamma.cdf(s, 1.3), atol=1e-4)
    assert cdf(np.array([0.0]))[0] == 0.0


def test_cdf_from_table_origin_power_needs_origin_node():
    with pytest.raises(DomainError):
        cdf_from_table([0.1, 1.0, 2.0], [1.0, 1.0, 1.0], origin_power=0.5)
    with pytest.raises(DomainError):
        cdf_from_table([0.0, 1.0, 2.0], [1.0, 1.0, 1.0], origin_power=-1.0)


def test_symmetric_cdf_from_table_handles_divergence_at_origin():
    # even density |x|^(-1/2) exp(-|x|) / (2 Gamma(1/2))
    grid = np.concatenate((np.geomspace(1e-6, 0.5, 120, endpoint=False), np.linspace(0.5, 40.0, 400)))
    density = grid**-0.5 * np.exp(-grid) / (2.0 * math.sqrt(math.pi))
    cdf = symmetric_cdf_from_table(grid, density)
    x = np.array([1e-5, 1e-3, 0.05, 0.4, 1.5, 4.0])
    expected = 0.5 + 0.5 * special.gammainc(0.5, x)
    np.testing.assert_allclose(cdf(x), expected, atol=1e-3)
    np.testing.assert_allclose(cdf(-x), 1.0 - cdf(x), atol=1e-12)
    assert cdf(np.array([0.0]))[0] == 0.5


def test_symmetric_cdf_from_table_needs_positive_nodes():
    with pytest.raises(DomainError):
        symmetric_cdf_from_table([0.0, 1.0, 2.0], [1.0, 0.5, 0.1])
