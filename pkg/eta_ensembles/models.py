from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Sequence

import numpy as np

from .errors import DomainError


class WeightKind(str, Enum):
    GAUSSIAN = "gaussian"
    BESSEL = "bessel"


class SymmetryClass(str, Enum):
    UNITARY = "unitary2x2"
    REAL_SYMMETRIC = "real_symmetric2x2"


@dataclass(slots=True, frozen=True)
class EvalResult:
    """A numerically evaluated quantity together with its error estimate."""

    value: float
    est_abs_error: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.est_abs_error) or self.est_abs_error < 0:
            raise ValueError(f"invalid error estimate: {self.est_abs_error}")


@dataclass(slots=True, frozen=True)
class EnsembleParams:
    """Model configuration: weight, running parameter, scale and symmetry class.

    For the real-symmetric class ``eta`` holds the renamed parameter of that
    model (often written eta-hat), so that ``beta_eff = 1 - eta``.
    """

    weight: WeightKind
    eta: float
    alpha: float = 1.0
    symmetry: SymmetryClass = SymmetryClass.UNITARY

    def __post_init__(self) -> None:
        if not math.isfinite(self.eta):
            raise DomainError(f"eta must be finite, got {self.eta}")
        if self.weight is WeightKind.GAUSSIAN:
            if self.symmetry is SymmetryClass.UNITARY and self.eta >= 1.5:
                raise DomainError(f"Gaussian weight needs eta < 3/2, got {self.eta}")
            if self.symmetry is SymmetryClass.REAL_SYMMETRIC and self.eta >= 2.0:
                raise DomainError(f"real-symmetric Gaussian model needs eta < 2, got {self.eta}")
        else:
            if self.symmetry is not SymmetryClass.UNITARY:
                raise DomainError("the Generalized Bessel weight is only defined for the unitary class")
            if not 0.0 <= self.eta <= 1.0:
                raise DomainError(f"Generalized Bessel weight needs eta in [0, 1], got {self.eta}")
            if not self.alpha > 0:
                raise DomainError(f"alpha must be positive, got {self.alpha}")

    @property
    def beta_eff(self) -> float:
        if self.symmetry is SymmetryClass.REAL_SYMMETRIC:
            return 1.0 - self.eta
        return 2.0 - 2.0 * self.eta

    @property
    def zeta(self) -> float:
        return 2.0 * self.eta - 1.0

    @property
    def twin_eta(self) -> float:
        """Parameter of the spectrally identical model in the other symmetry class."""
        if self.symmetry is SymmetryClass.REAL_SYMMETRIC:
            twin = (1.0 + self.eta) / 2.0
            if not 0.5 <= twin <= 1.0:
                raise DomainError(f"real-symmetric eta {self.eta} has no unitary twin in [1/2, 1]")
            return twin
        if not 0.5 <= self.eta <= 1.0:
            raise DomainError(f"unitary eta {self.eta} has no real-symmetric twin (needs [1/2, 1])")
        return 2.0 * self.eta - 1.0


@dataclass(slots=True, frozen=True)
class HermitianEntries:
    """Real coordinates of [[x, (t+is)/sqrt2], [(t-is)/sqrt2, y]]."""

    x: float
    y: float
    t: float
    s: float

    @property
    def trace(self) -> float:
        return self.x + self.y

    @property
    def trace2(self) -> float:
        return self.x**2 + self.y**2 + self.t**2 + self.s**2

    @property
    def vstar(self) -> float:
        # (x - y)^2 + 2(t^2 + s^2) is the cancellation-free form of 2 Tr X^2 - (Tr X)^2
        return (self.x - self.y) ** 2 + 2.0 * (self.t**2 + self.s**2)

    def as_matrix(self) -> np.ndarray:
        off = complex(self.t, self.s) / math.sqrt(2.0)
        return np.array([[self.x, off], [off.conjugate(), self.y]], dtype=complex)


@dataclass(slots=True, frozen=True)
class SpectralPair:
    lambda1: float
    lambda2: float
    spacing: float

    @classmethod
    def from_unordered(cls, a: float, b: float) -> "SpectralPair":
        lo, hi = (a, b) if a <= b else (b, a)
        return cls(lambda1=lo, lambda2=hi, spacing=hi - lo)


@dataclass(slots=True, frozen=True)
class NormConstants:
    c_eta: float
    k_eta: float


@dataclass(slots=True)
class DensityCurve:
    """A sampled analytic function, the unit the CLI writes to disk."""

    abscissa: np.ndarray
    values: np.ndarray
    abscissa_name: str
    value_name: str
    meta: Dict[str, Any] = field(default_factory=dict)
    extra_columns: Dict[str, np.ndarray] = field(default_factory=dict)


@dataclass(slots=True)
class Histogram:
    bin_edges: np.ndarray
    counts: np.ndarray
    total: int
    normalized_heights: np.ndarray
    below_range: int = 0
    above_range: int = 0

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)

    @property
    def centres(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "bin_edges": [float(v) for v in self.bin_edges],
            "counts": [int(v) for v in self.counts],
            "total": int(self.total),
            "normalized_heights": [float(v) for v in self.normalized_heights],
            "below_range": int(self.below_range),
            "above_range": int(self.above_range),
        }


@dataclass(slots=True, frozen=True)
class GofStats:
    ks_distance: float
    sup_norm_vs_curve: float
    n: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ks_distance": self.ks_distance,
            "sup_norm_vs_curve": self.sup_norm_vs_curve,
            "n": self.n,
        }


SAMPLE_COLUMNS: Sequence[str] = ("x", "y", "t", "s", "lambda1", "lambda2", "spacing")


@dataclass(slots=True)
class ExperimentResult:
    """Seeded Monte Carlo output: raw samples, histograms and fit statistics."""

    params: EnsembleParams
    n_samples: int
    samples: np.ndarray
    eigen_histogram: Histogram
    spacing_histogram: Histogram
    gof_density: GofStats
    gof_spacing: GofStats
    seed: int
    method: str
    elapsed_seconds: float = 0.0


@dataclass(slots=True, frozen=True)
class HankelMomentMatrix:
    n: int
    power_sums: np.ndarray
    entries: np.ndarray


@dataclass(slots=True, frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "value": self.value,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


@dataclass(slots=True)
class ValidationSummary:
    """Aggregated outcome of an invariant run."""

    weight: WeightKind
    checks: Sequence[ValidationCheck] = field(default_factory=list)
    # reduced minus direct Bessel density, per zeta; diagnostic only
    method_discrepancies: Dict[str, float] = field(default_factory=dict)

    @property
    def failures(self) -> list[str]:
        return [check.name for check in self.checks if not check.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> Dict[str, Any]:
        return {
            "weight": self.weight.value,
            "passed": self.passed,
            "failures": self.failures,
            "checks": [check.to_dict() for check in self.checks],
            "method_discrepancies": dict(self.method_discrepancies),
        }
