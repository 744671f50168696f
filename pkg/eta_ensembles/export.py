from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping

import numpy as np

from . import __version__
from .models import SAMPLE_COLUMNS, DensityCurve, EnsembleParams, ExperimentResult, ValidationSummary, WeightKind


def format_value(value: float) -> str:
    return f"{float(value):.17g}"


def build_header(command_line: str, params: EnsembleParams, seed: int | None = None) -> Dict[str, Any]:
    header: Dict[str, Any] = {
        "command": command_line,
        "weight": params.weight.value,
        "eta": params.eta,
        "alpha": params.alpha,
        "symmetry": params.symmetry.value,
        "version": __version__,
    }
    if params.weight is WeightKind.BESSEL:
        header["zeta"] = params.zeta
    if seed is not None:
        header["seed"] = seed
    return header


def _comment_lines(header: Mapping[str, Any]) -> List[str]:
    return [f"# {key}: {value}" for key, value in header.items()]


def _rows(columns: Iterable[np.ndarray]) -> Iterable[str]:
    for row in zip(*columns):
        yield ",".join(format_value(v) for v in row)


@dataclass(slots=True)
class CurveExporter:
    header: Dict[str, Any] = field(default_factory=dict)

    def render(self, curve: DensityCurve) -> str:
        names = [curve.abscissa_name, curve.value_name, *curve.extra_columns]
        columns = [curve.abscissa, curve.values, *curve.extra_columns.values()]
        lines = _comment_lines({**self.header, **curve.meta})
        lines.append(",".join(names))
        lines.extend(_rows(columns))
        return "\n".join(lines) + "\n"

    def render_json(self, curve: DensityCurve) -> str:
        payload: Dict[str, Any] = {
            "header": {**self.header, **curve.meta},
            curve.abscissa_name: [float(v) for v in curve.abscissa],
            curve.value_name: [float(v) for v in curve.values],
        }
        for name, values in curve.extra_columns.items():
            payload[name] = [float(v) for v in values]
        return json.dumps(payload, indent=2, allow_nan=True) + "\n"


@dataclass(slots=True)
class SampleExporter:
    """Raw Monte Carlo rows; the content depends only on the seed and parameters."""

    header: Dict[str, Any] = field(default_factory=dict)

    def render(self, samples: np.ndarray) -> str:
        lines = _comment_lines(self.header)
        lines.append(",".join(SAMPLE_COLUMNS))
        lines.extend(_rows(samples.T))
        return "\n".join(lines) + "\n"

    def render_json(self, samples: np.ndarray) -> str:
        payload = {
            "header": self.header,
            "columns": list(SAMPLE_COLUMNS),
            "rows": [[float(v) for v in row] for row in samples],
        }
        return json.dumps(payload, indent=2) + "\n"


def render_summary_json(result: ExperimentResult, header: Mapping[str, Any]) -> str:
    payload = {
        "header": dict(header),
        "n_samples": result.n_samples,
        "seed": result.seed,
        "method": result.method,
        "elapsed_seconds": result.elapsed_seconds,
        "gof_density": result.gof_density.to_dict(),
        "gof_spacing": result.gof_spacing.to_dict(),
        "eigen_histogram": result.eigen_histogram.to_dict(),
        "spacing_histogram": result.spacing_histogram.to_dict(),
    }
    return json.dumps(payload, indent=2) + "\n"


def render_validation_json(summary: ValidationSummary, header: Mapping[str, Any]) -> str:
    return json.dumps({"header": dict(header), **summary.to_dict()}, indent=2, allow_nan=True) + "\n"
