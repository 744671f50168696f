import math

import pytest

from eta_ensembles import gaussian_ensemble
from eta_ensembles import validation
from eta_ensembles.errors import QuadratureError
from eta_ensembles.models import NormConstants, WeightKind


def test_report_records_pass_and_fail():
    report = validation.ValidationReport(weight=WeightKind.GAUSSIAN)
    assert report.add("small", 1e-9, 1e-6).passed
    assert not report.add("large", 1e-3, 1e-6).passed
    assert not report.add("nan", math.nan, 1e-6).passed

    summary = report.finalise()
    assert summary.failures == ["large", "nan"]
    assert summary.passed is False


def test_measure_turns_library_errors_into_failures():
    report = validation.ValidationReport(weight=WeightKind.BESSEL)

    def broken() -> float:
        raise QuadratureError("no convergence")

    report.measure("broken", 1e-6, broken)
    report.note_discrepancy("zeta=0.5", 2e-4)

    summary = report.finalise()
    (check,) = summary.checks
    assert check.name == "broken"
    assert math.isnan(check.value)
    assert "QuadratureError" in check.detail
    assert summary.method_discrepancies == {"zeta=0.5": 2e-4}


def test_twinning_and_power_sums_pass():
    report = validation.ValidationReport(weight=WeightKind.GAUSSIAN)
    validation.check_twinning(report)
    validation.check_power_sum_identity(report)
    summary = report.finalise()
    assert summary.passed, summary.failures
    assert len(summary.checks) == len(validation.TWIN_ETAS) + len(validation.POWER_SUM_SIZES)


def test_limit_collapse_and_anti_eta_pass():
    report = validation.ValidationReport(weight=WeightKind.GAUSSIAN)
    validation.check_limit_collapse(report)
    validation.check_anti_eta(report)
    assert report.finalise().passed


def test_normalisations_pass(mocker):
    mocker.patch("eta_ensembles.validation.NORMALISATION_ETAS", (0.5,))
    report = validation.ValidationReport(weight=WeightKind.GAUSSIAN)
    validation.check_gaussian_normalisations(report)
    assert report.finalise().passed


def test_wrong_normalisation_constant_is_caught(mocker):
    real_constants = gaussian_ensemble.norm_constants

    def doubled(eta: float) -> NormConstants:
        constants = real_constants(eta)
        return NormConstants(c_eta=2.0 * constants.c_eta, k_eta=2.0 * constants.k_eta)

    mocker.patch("eta_ensembles.validation.NORMALISATION_ETAS", (0.5,))
    mocker.patch("eta_ensembles.gaussian_ensemble.norm_constants", side_effect=doubled)
    report = validation.ValidationReport(weight=WeightKind.GAUSSIAN)
    validation.check_gaussian_normalisations(report)

    failures = report.finalise().failures
    assert "normalisation.jpd_eigen[eta=0.5]" in failures
    assert "normalisation.gap[eta=0.5]" in failures
    assert "normalisation.spectral_density[eta=0.5]" not in failures


def test_run_validation_selects_battery(mocker):
    calls = []
    fake_gaussian = lambda report: calls.append("gaussian")  # noqa: E731
    fake_bessel = lambda report: calls.append("bessel")  # noqa: E731
    fake_shared = lambda report: calls.append("shared")  # noqa: E731
    mocker.patch.object(validation, "GAUSSIAN_CHECKS", (fake_gaussian,))
    mocker.patch.object(validation, "BESSEL_CHECKS", (fake_bessel,))
    mocker.patch.object(validation, "SHARED_CHECKS", (fake_shared,))

    summary = validation.run_validation(WeightKind.BESSEL)

    assert calls == ["bessel", "shared"]
    assert summary.weight is WeightKind.BESSEL
    assert summary.passed


@pytest.mark.slow
@pytest.mark.parametrize("weight", [WeightKind.GAUSSIAN, WeightKind.BESSEL])
def test_full_battery_passes(weight):
    summary = validation.run_validation(weight)
    assert summary.passed, summary.failures
