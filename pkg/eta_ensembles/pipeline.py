from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import reduce
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from .bessel_ensemble import BesselWeightParams, bessel_ensemble, density_reference, spacing_reference
from .errors import DomainError
from .gaussian_ensemble import GaussianEnsemble
from .matrix_sampling import MatrixSampler, SamplingMethod, default_method, make_sampler, sample_row
from .models import SAMPLE_COLUMNS, EnsembleParams, ExperimentResult, Histogram, WeightKind
from .numerics import build_histogram, ks_distance, merge_histograms
from .rng import RngStream

logger = logging.getLogger(__name__)

Curve = Callable[[np.ndarray], np.ndarray]

LAMBDA_COLUMNS = (SAMPLE_COLUMNS.index("lambda1"), SAMPLE_COLUMNS.index("lambda2"))
SPACING_COLUMN = SAMPLE_COLUMNS.index("spacing")
CHUNKS_PER_WORKER = 4


@dataclass(slots=True)
class ExperimentOptions:
    n_samples: int
    seed: int
    n_bins: int = 60
    value_range: Tuple[float, float] = (-5.0, 5.0)
    workers: int = 1
    method: Optional[SamplingMethod] = None
    progress: bool = False

    def __post_init__(self) -> None:
        if self.n_samples < 1:
            raise DomainError(f"n_samples must be at least 1, got {self.n_samples}")
        if self.workers < 1:
            raise DomainError(f"workers must be at least 1, got {self.workers}")
        if not self.value_range[0] < self.value_range[1]:
            raise DomainError(f"histogram range needs lo < hi, got {self.value_range}")

    @property
    def spacing_range(self) -> Tuple[float, float]:
        return 0.0, self.value_range[1] - self.value_range[0]


@dataclass(slots=True)
class ReferenceCurves:
    """Analytic curves a sampled ensemble is checked against."""

    density_pdf: Curve
    density_cdf: Curve
    spacing_pdf: Curve
    spacing_cdf: Curve


def reference_curves(params: EnsembleParams, value_range: Tuple[float, float] = (-5.0, 5.0)) -> ReferenceCurves:
    if params.weight is WeightKind.GAUSSIAN:
        ensemble = GaussianEnsemble(params)
        return ReferenceCurves(
            density_pdf=lambda lam: np.asarray(ensemble.density(lam)),
            density_cdf=ensemble.density_cdf(),
            spacing_pdf=lambda s: np.asarray(ensemble.gap(np.maximum(s, 0.0))),
            spacing_cdf=ensemble.spacing_cdf(),
        )
    logger.info("Tabulating Bessel reference curves for eta=%s alpha=%s", params.eta, params.alpha)
    ensemble = bessel_ensemble(BesselWeightParams.from_ensemble(params))
    half_width = max(8.0, abs(value_range[0]), abs(value_range[1]))
    density_pdf, density_cdf = density_reference(ensemble.density_curve(half_width=half_width))
    spacing_pdf, spacing_cdf = spacing_reference(
        ensemble.spacing_curve(s_max=max(10.0, value_range[1] - value_range[0]))
    )
    return ReferenceCurves(
        density_pdf=density_pdf,
        density_cdf=density_cdf,
        spacing_pdf=spacing_pdf,
        spacing_cdf=spacing_cdf,
    )


def draw_chunk(sampler: MatrixSampler, seed: int, start: int, stop: int) -> np.ndarray:
    """Rows for sample indices [start, stop); index i always uses stream i."""
    rows = np.empty((stop - start, len(SAMPLE_COLUMNS)))
    for offset, index in enumerate(range(start, stop)):
        rows[offset] = sample_row(sampler, RngStream(seed=seed, stream_id=index).generator())
    return rows


def _draw_chunk_args(args: Tuple[MatrixSampler, int, int, int]) -> np.ndarray:
    return draw_chunk(*args)


def split_indices(n_samples: int, n_chunks: int) -> List[Tuple[int, int]]:
    n_chunks = max(1, min(n_chunks, n_samples))
    bounds = np.linspace(0, n_samples, n_chunks + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


@dataclass(slots=True)
class ExperimentPipeline:
    params: EnsembleParams
    options: ExperimentOptions
    sampler: Optional[MatrixSampler] = None
    curves: Optional[ReferenceCurves] = None

    def run(self) -> ExperimentResult:
        opts = self.options
        method = default_method(self.params) if opts.method is None else SamplingMethod(opts.method)
        started = time.perf_counter()
        sampler = self.sampler if self.sampler is not None else make_sampler(self.params, method)
        logger.info(
            "Sampling %d matrices (%s, eta=%s, method=%s) with %d worker(s)",
            opts.n_samples,
            self.params.weight.value,
            self.params.eta,
            method.value,
            opts.workers,
        )
        chunks = self._draw(sampler)
        samples = np.concatenate(chunks, axis=0)

        eigen_hist = reduce(merge_histograms, (self._eigen_histogram(chunk) for chunk in chunks))
        spacing_hist = reduce(merge_histograms, (self._spacing_histogram(chunk) for chunk in chunks))

        curves = self.curves if self.curves is not None else reference_curves(self.params, opts.value_range)
        eigenvalues = samples[:, LAMBDA_COLUMNS].ravel()
        gof_density = ks_distance(eigenvalues, curves.density_cdf, histogram=eigen_hist, pdf=curves.density_pdf)
        gof_spacing = ks_distance(
            samples[:, SPACING_COLUMN], curves.spacing_cdf, histogram=spacing_hist, pdf=curves.spacing_pdf
        )
        elapsed = time.perf_counter() - started
        logger.info(
            "Finished in %.1fs: KS(density)=%.4g KS(spacing)=%.4g",
            elapsed,
            gof_density.ks_distance,
            gof_spacing.ks_distance,
        )
        return ExperimentResult(
            params=self.params,
            n_samples=opts.n_samples,
            samples=samples,
            eigen_histogram=eigen_hist,
            spacing_histogram=spacing_hist,
            gof_density=gof_density,
            gof_spacing=gof_spacing,
            seed=opts.seed,
            method=method.value,
            elapsed_seconds=elapsed,
        )

    def _draw(self, sampler: MatrixSampler) -> List[np.ndarray]:
        opts = self.options
        if opts.workers == 1:
            bounds = split_indices(opts.n_samples, max(1, opts.n_samples // 1000))
            return [
                draw_chunk(sampler, opts.seed, start, stop)
                for start, stop in tqdm(bounds, desc="chunks", disable=not opts.progress)
            ]
        bounds = split_indices(opts.n_samples, opts.workers * CHUNKS_PER_WORKER)
        tasks = [(sampler, opts.seed, start, stop) for start, stop in bounds]
        with ProcessPoolExecutor(max_workers=opts.workers) as pool:
            return list(tqdm(pool.map(_draw_chunk_args, tasks), total=len(tasks), desc="chunks", disable=not opts.progress))

    def _eigen_histogram(self, chunk: np.ndarray) -> Histogram:
        return build_histogram(chunk[:, LAMBDA_COLUMNS].ravel(), self.options.n_bins, self.options.value_range)

    def _spacing_histogram(self, chunk: np.ndarray) -> Histogram:
        return build_histogram(chunk[:, SPACING_COLUMN], self.options.n_bins, self.options.spacing_range)


def run_experiment(
    params: EnsembleParams,
    n_samples: int,
    seed: int,
    n_bins: int = 60,
    value_range: Sequence[float] = (-5.0, 5.0),
    workers: int = 1,
    method: Optional[SamplingMethod] = None,
    progress: bool = False,
) -> ExperimentResult:
    options = ExperimentOptions(
        n_samples=n_samples,
        seed=seed,
        n_bins=n_bins,
        value_range=(float(value_range[0]), float(value_range[1])),
        workers=workers,
        method=method,
        progress=progress,
    )
    return ExperimentPipeline(params=params, options=options).run()
