from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np

from .bessel_ensemble import DensityMethod
from .matrix_sampling import SamplingMethod
from .models import EnsembleParams, SymmetryClass, WeightKind

OUT_DIR_ENVVAR = "ETA_ENSEMBLES_OUT_DIR"
DEFAULT_OUT_DIR = Path("results")


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


@dataclass(slots=True, frozen=True)
class GridSpec:
    lo: float
    hi: float
    n_points: int

    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n_points)

    def __str__(self) -> str:
        return f"{self.lo!r}:{self.hi!r}:{self.n_points}"


@dataclass(slots=True)
class OutputPaths:
    data_path: Path
    summary_path: Path

    def all(self) -> list[Path]:
        return [self.data_path, self.summary_path]


@dataclass(slots=True)
class RunConfig:
    command: str
    params: EnsembleParams
    grid: Optional[GridSpec]
    output_format: OutputFormat
    paths: OutputPaths
    seed: Optional[int] = None
    n_samples: Optional[int] = None
    n_bins: int = 60
    workers: int = 1
    density_method: DensityMethod = DensityMethod.DIRECT
    sampling_method: Optional[SamplingMethod] = None

    def command_line(self) -> str:
        """Canonical invocation recorded in file headers; worker count is left out."""
        parts = [
            "eta-ensembles",
            self.command,
            f"--weight {self.params.weight.value}",
            f"--eta {self.params.eta!r}",
        ]
        if self.params.weight is WeightKind.BESSEL:
            parts.append(f"--alpha {self.params.alpha!r}")
        if self.params.symmetry is not SymmetryClass.UNITARY:
            parts.append(f"--symmetry {self.params.symmetry.value}")
        if self.grid is not None:
            parts.append(f"--grid {self.grid}")
        if self.command == "density" and self.params.weight is WeightKind.BESSEL:
            parts.append(f"--method {self.density_method.value}")
        if self.n_samples is not None:
            parts.append(f"--n {self.n_samples}")
            parts.append(f"--bins {self.n_bins}")
        if self.sampling_method is not None:
            parts.append(f"--sampler {self.sampling_method.value}")
        if self.seed is not None:
            parts.append(f"--seed {self.seed}")
        return " ".join(parts)


def parse_grid(value: str) -> GridSpec:
    parts = value.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must look like lo:hi:n, got {value!r}")
    try:
        lo, hi, n_points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ValueError(f"invalid grid {value!r}") from exc
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError(f"grid bounds must be finite, got {value!r}")
    if not lo < hi:
        raise ValueError(f"grid needs lo < hi, got {value!r}")
    if n_points < 2:
        raise ValueError(f"grid needs at least 2 points, got {value!r}")
    return GridSpec(lo=lo, hi=hi, n_points=n_points)


def parse_weight(value: str) -> WeightKind:
    try:
        return WeightKind(value.lower())
    except ValueError as exc:
        raise ValueError(f"unknown weight {value!r}; expected gaussian or bessel") from exc


def parse_symmetry(value: str) -> SymmetryClass:
    try:
        return SymmetryClass(value.lower())
    except ValueError as exc:
        raise ValueError(f"unknown symmetry class {value!r}") from exc


def compute_paths(base_dir: Path, command: str, params: EnsembleParams, output_format: OutputFormat) -> OutputPaths:
    stem = f"{command}-{params.weight.value}-eta{params.eta:g}"
    if params.symmetry is SymmetryClass.REAL_SYMMETRIC:
        stem += "-real"
    return OutputPaths(
        data_path=base_dir / f"{stem}.{output_format.value}",
        summary_path=base_dir / f"{stem}-summary.json",
    )


def build_run_config(
    *,
    command: str,
    weight: str,
    eta: float,
    alpha: float = 1.0,
    symmetry: str = SymmetryClass.UNITARY.value,
    grid: Optional[str] = None,
    output_format: str = OutputFormat.CSV.value,
    out: Optional[Path] = None,
    base_dir: Path = DEFAULT_OUT_DIR,
    seed: Optional[int] = None,
    n_samples: Optional[int] = None,
    n_bins: int = 60,
    workers: int = 1,
    density_method: str = DensityMethod.DIRECT.value,
    sampling_method: Optional[str] = None,
) -> RunConfig:
    """Parse and validate everything before any computation starts.

    Malformed strings raise ``ValueError``; parameters outside the model's
    domain raise ``DomainError`` from ``EnsembleParams``.
    """
    params = EnsembleParams(
        weight=parse_weight(weight),
        eta=eta,
        alpha=alpha,
        symmetry=parse_symmetry(symmetry),
    )
    try:
        fmt = OutputFormat(output_format.lower())
        method = DensityMethod(density_method.lower())
        sampler = SamplingMethod(sampling_method.lower()) if sampling_method else None
    except ValueError as exc:
        raise ValueError(f"invalid option value: {exc}") from exc
    if workers < 1:
        raise ValueError(f"workers must be at least 1, got {workers}")
    if n_bins < 1:
        raise ValueError(f"bins must be at least 1, got {n_bins}")
    if n_samples is not None and n_samples < 1:
        raise ValueError(f"--n must be at least 1, got {n_samples}")

    paths = compute_paths(base_dir, command, params, fmt)
    if out is not None:
        paths = OutputPaths(data_path=out, summary_path=out.with_name(f"{out.stem}-summary.json"))
    return RunConfig(
        command=command,
        params=params,
        grid=parse_grid(grid) if grid is not None else None,
        output_format=fmt,
        paths=paths,
        seed=seed,
        n_samples=n_samples,
        n_bins=n_bins,
        workers=workers,
        density_method=method,
        sampling_method=sampler,
    )
