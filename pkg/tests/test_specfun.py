import math

import numpy as np
import pytest
from scipy import integrate

from eta_ensembles import specfun
from eta_ensembles.errors import DomainError, NumericalOverflowError, PoleError


def test_gamma_known_values():
    assert specfun.gamma(1.5) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-14)
    assert specfun.gamma(1.0) == pytest.approx(1.0, rel=1e-15)
    assert specfun.gamma(-0.5) == pytest.approx(-3.5449077018110318, rel=1e-13)


def test_gamma_vectorised_returns_array():
    values = specfun.gamma(np.array([1.0, 2.0, 3.0, 4.0]))
    assert isinstance(values, np.ndarray)
    np.testing.assert_allclose(values, [1.0, 1.0, 2.0, 6.0], rtol=1e-14)


@pytest.mark.parametrize("z", [0.0, -1.0, -2.0])
def test_gamma_rejects_poles(z):
    with pytest.raises(PoleError):
        specfun.gamma(z)


def test_gamma_overflow_is_reported():
    with pytest.raises(NumericalOverflowError):
        specfun.gamma(200.0)


def test_upper_incomplete_gamma_positive_and_zero_order():
    assert specfun.upper_incomplete_gamma(1.0, 2.0) == pytest.approx(math.exp(-2.0), rel=1e-13)
    assert specfun.upper_incomplete_gamma(0.0, 1.0) == pytest.approx(0.21938393439552029, rel=1e-12)


def test_upper_incomplete_gamma_negative_order_matches_quadrature():
    oracle, _ = integrate.quad(lambda t: t**-1.25 * math.exp(-t), 1.0, np.inf, epsabs=1e-14, epsrel=1e-13)
    assert specfun.upper_incomplete_gamma(-0.25, 1.0) == pytest.approx(oracle, rel=1e-10)


def test_upper_incomplete_gamma_domain():
    with pytest.raises(DomainError):
        specfun.upper_incomplete_gamma(-1.0, 1.0)
    with pytest.raises(DomainError):
        specfun.upper_incomplete_gamma(0.0, 0.0)
    with pytest.raises(DomainError):
        specfun.upper_incomplete_gamma(0.5, -1.0)


def test_regularized_lower_gamma_order_one():
    x = np.array([0.0, 0.5, 2.0, 7.0])
    np.testing.assert_allclose(specfun.regularized_lower_gamma(1.0, x), 1.0 - np.exp(-x), rtol=1e-13, atol=1e-16)


def _kummer_series(a, b, z, terms=200):
    total, term = 1.0, 1.0
    for k in range(terms):
        term *= (a + k) / (b + k) * z / (k + 1)
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
    return total


def test_kummer_known_values():
    assert specfun.kummer_1f1(0.5, 0.5, 3.0) == pytest.approx(math.exp(3.0), rel=1e-13)
    assert specfun.kummer_1f1(1.5, 0.5, 0.0) == 1.0
    assert specfun.kummer_1f1(1.5, 0.5, 2.0) == pytest.approx(_kummer_series(1.5, 0.5, 2.0), rel=1e-12)


def test_kummer_rejects_pole_and_negative_argument():
    with pytest.raises(PoleError):
        specfun.kummer_1f1(0.5, -1.0, 1.0)
    with pytest.raises(DomainError):
        specfun.kummer_1f1(0.5, 0.5, -1.0)


@pytest.mark.parametrize("a,b", [(1.5, 0.5), (1.0, 0.5), (0.75, 0.5)])
def test_scaled_kummer_asymptotic_branch_matches_direct_value(a, b):
    z = 60.0
    direct = math.exp(-z) * _kummer_series(a, b, z, terms=2000)
    assert specfun.kummer_1f1_scaled(a, b, z) == pytest.approx(direct, rel=1e-9)


def test_scaled_kummer_stays_finite_for_huge_arguments():
    value = specfun.kummer_1f1_scaled(1.25, 0.5, 1e6)
    # e^-z M(a, b, z) ~ Gamma(b)/Gamma(a) z^(a-b)
    leading = math.gamma(0.5) / math.gamma(1.25) * 1e6**0.75
    assert value == pytest.approx(leading, rel=1e-5)


def test_kummer_overflow_is_reported():
    with pytest.raises(NumericalOverflowError):
        specfun.kummer_1f1(1.5, 0.5, 800.0)


def test_tricomi_u_power_identity():
    # U(a, a + 1, z) = z^-a
    assert specfun.tricomi_u(0.5, 1.5, 2.0) == pytest.approx(2.0**-0.5, rel=1e-12)


def test_bessel_k0_values():
    assert specfun.bessel_k0(1.0) == pytest.approx(0.42102443824070834, rel=1e-13)
    assert specfun.bessel_k0_scaled(1.0) == pytest.approx(math.e * 0.42102443824070834, rel=1e-13)
    with pytest.raises(DomainError):
        specfun.bessel_k0(0.0)


def test_erf_values_and_symmetry():
    assert specfun.erf(0.0) == 0.0
    assert specfun.erf(1.0) == pytest.approx(0.8427007929497149, rel=1e-14)
    assert specfun.erf(1.3) == pytest.approx(-specfun.erf(-1.3), rel=1e-15)
