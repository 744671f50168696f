"""Quadrature, histograms and empirical-distribution statistics."""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike
from scipy import integrate as sp_integrate
from scipy import interpolate, optimize, stats

from .errors import DomainError, QuadratureError
from .models import EvalResult, GofStats, Histogram

logger = logging.getLogger(__name__)

Integrand = Callable[[float], float]

LOG_WINDOW = 50.0
BRACKET_EXPANSIONS = 12
_CLAMP = 1e300


@dataclass(slots=True, frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000
    # integrable singularities or kinks; the domain is split there
    singular_points: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be at least 1")

    def with_points(self, *points: float) -> "QuadratureSpec":
        return QuadratureSpec(
            rel_tol=self.rel_tol,
            abs_tol=self.abs_tol,
            max_subdivisions=self.max_subdivisions,
            singular_points=tuple(self.singular_points) + tuple(points),
        )


DEFAULT_SPEC = QuadratureSpec()


class DomainKind(str, Enum):
    FINITE = "finite"
    HALF_LINE = "half_line"
    WHOLE_LINE = "whole_line"


@dataclass(slots=True, frozen=True)
class Domain:
    kind: DomainKind
    lower: float = 0.0
    upper: float = 0.0

    @classmethod
    def finite(cls, lower: float, upper: float) -> "Domain":
        if not lower < upper:
            raise DomainError(f"finite domain needs lower < upper, got ({lower}, {upper})")
        return cls(DomainKind.FINITE, lower, upper)

    @classmethod
    def half_line(cls, lower: float = 0.0) -> "Domain":
        return cls(DomainKind.HALF_LINE, lower, math.inf)

    @classmethod
    def whole_line(cls) -> "Domain":
        return cls(DomainKind.WHOLE_LINE, -math.inf, math.inf)

    def bounds(self) -> Tuple[float, float]:
        if self.kind is DomainKind.WHOLE_LINE:
            return -math.inf, math.inf
        if self.kind is DomainKind.HALF_LINE:
            return self.lower, math.inf
        return self.lower, self.upper


def integrate(
    f: Integrand,
    domain: Domain,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> EvalResult:
    """Adaptive Gauss-Kronrod quadrature (QUADPACK) on finite or infinite domains.

    Infinite ranges are mapped onto a finite interval by QUADPACK itself. The
    domain is split at every declared singular point inside it so that each
    piece sees the singularity only at an endpoint.
    """
    lo, hi = domain.bounds()
    inner = sorted({p for p in spec.singular_points if lo < p < hi})
    edges = [lo, *inner, hi]
    pieces = list(zip(edges[:-1], edges[1:]))

    def checked(x: float) -> float:
        value = f(x)
        if not math.isfinite(value):
            raise QuadratureError(f"integrand is not finite at x={x!r}: {value!r}")
        return value

    total = 0.0
    error = 0.0
    abs_tol = spec.abs_tol / len(pieces)
    for a, b in pieces:
        with warnings.catch_warnings():
            warnings.simplefilter("error", sp_integrate.IntegrationWarning)
            try:
                value, err = sp_integrate.quad(
                    checked,
                    a,
                    b,
                    epsabs=abs_tol,
                    epsrel=spec.rel_tol,
                    limit=spec.max_subdivisions,
                )
            except sp_integrate.IntegrationWarning as exc:
                raise QuadratureError(f"quadrature on ({a}, {b}) did not converge: {exc}") from exc
        total += value
        error += err
    return EvalResult(value=total, est_abs_error=error)


def integrate_2d(
    f: Callable[[float, float], float],
    outer: Domain,
    inner: Callable[[float], Domain] | Domain,
    spec: QuadratureSpec = DEFAULT_SPEC,
    *,
    inner_points: Optional[Callable[[float], Sequence[float]]] = None,
) -> EvalResult:
    """Iterated quadrature: outer variable x, inner variable y."""
    errors: list[float] = []

    def outer_integrand(x: float) -> float:
        dom = inner(x) if callable(inner) else inner
        points = tuple(inner_points(x)) if inner_points is not None else ()
        res = integrate(lambda y: f(x, y), dom, QuadratureSpec(
            rel_tol=spec.rel_tol,
            abs_tol=spec.abs_tol,
            max_subdivisions=spec.max_subdivisions,
            singular_points=points,
        ))
        errors.append(res.est_abs_error)
        return res.value

    outer_res = integrate(outer_integrand, outer, spec)
    inner_err = max(errors) if errors else 0.0
    return EvalResult(value=outer_res.value, est_abs_error=outer_res.est_abs_error + inner_err)


def _clamped(f: Integrand) -> Integrand:
    def bounded(u: float) -> float:
        return min(max(f(u), -_CLAMP), _CLAMP)

    return bounded


def _bracket_root(f: Integrand, start: float, direction: float) -> float:
    """Root of ``f`` on one side of ``start``, where f changes sign exactly once."""
    near, f_near = start, f(start)
    if f_near == 0.0:
        return near
    step = 1.0
    for _ in range(BRACKET_EXPANSIONS):
        far = near + direction * step
        f_far = f(far)
        if f_far == 0.0:
            return far
        if (f_far > 0.0) != (f_near > 0.0):
            lo, hi = (near, far) if near < far else (far, near)
            return float(optimize.brentq(f, lo, hi, xtol=1e-12, rtol=1e-12))
        near, f_near = far, f_far
        step *= 2.0
    raise QuadratureError(f"no sign change within {step:g} of {start!r}")


def integrate_log_concave(
    log_f: Integrand,
    log_f_prime: Integrand,
    spec: QuadratureSpec = DEFAULT_SPEC,
    *,
    start: float = 0.0,
    window: float = LOG_WINDOW,
) -> Tuple[float, EvalResult]:
    """int exp(log_f(u)) du over the real line, for a strictly concave ``log_f``.

    Returns ``(peak, result)``: ``peak`` is the maximum of ``log_f`` and
    ``result`` integrates exp(log_f - peak) over the interval on which log_f
    stays within ``window`` of its peak, so the integral is
    exp(peak) * result.value. The integrand QUADPACK sees is at most 1 and
    never underflows across a whole panel, whatever the size of exp(peak).
    """
    slope = _clamped(log_f_prime)
    initial = slope(start)
    mode = start if initial == 0.0 else _bracket_root(slope, start, 1.0 if initial > 0 else -1.0)
    peak = log_f(mode)
    if not math.isfinite(peak):
        raise QuadratureError(f"log-integrand is not finite at its mode u={mode!r}: {peak!r}")

    def above_floor(u: float) -> float:
        return max(log_f(u) - peak, -2.0 * window) + window

    lo = _bracket_root(above_floor, mode, -1.0)
    hi = _bracket_root(above_floor, mode, 1.0)
    result = integrate(lambda u: math.exp(min(log_f(u) - peak, 0.0)), Domain.finite(lo, hi), spec.with_points(mode))
    return peak, result


def build_histogram(data: ArrayLike, n_bins: int, value_range: Tuple[float, float]) -> Histogram:
    values = np.asarray(data, dtype=float).ravel()
    if values.size == 0:
        raise DomainError("cannot build a histogram of empty data")
    if n_bins < 1:
        raise DomainError("n_bins must be at least 1")
    lo, hi = value_range
    if not lo < hi:
        raise DomainError(f"histogram range needs lo < hi, got ({lo}, {hi})")

    below = int(np.count_nonzero(values < lo))
    above = int(np.count_nonzero(values > hi))
    if below or above:
        logger.info("histogram: %d values below and %d above range (%s, %s)", below, above, lo, hi)
    inside = values[(values >= lo) & (values <= hi)]
    counts, edges = np.histogram(inside, bins=n_bins, range=(lo, hi))
    return _histogram_from_counts(edges, counts, below, above)


def _histogram_from_counts(edges: np.ndarray, counts: np.ndarray, below: int, above: int) -> Histogram:
    total = int(counts.sum())
    widths = np.diff(edges)
    if total > 0:
        heights = counts / (total * widths)
    else:
        heights = np.zeros_like(widths)
    return Histogram(
        bin_edges=edges,
        counts=counts.astype(np.int64),
        total=total,
        normalized_heights=heights,
        below_range=below,
        above_range=above,
    )


def merge_histograms(first: Histogram, second: Histogram) -> Histogram:
    if first.bin_edges.shape != second.bin_edges.shape or not np.array_equal(first.bin_edges, second.bin_edges):
        raise DomainError("cannot merge histograms with different bin edges")
    return _histogram_from_counts(
        first.bin_edges,
        first.counts + second.counts,
        first.below_range + second.below_range,
        first.above_range + second.above_range,
    )


def multinomial_sigma(hist: Histogram, pdf: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Standard deviation of each normalised bin height under ``pdf``."""
    widths = hist.widths
    p = np.clip(np.asarray(pdf(hist.centres)) * widths, 0.0, 1.0)
    n = max(hist.total, 1)
    return np.sqrt(n * p * (1.0 - p)) / (n * widths)


def ks_distance(
    data: ArrayLike,
    cdf: Callable[[np.ndarray], np.ndarray],
    *,
    histogram: Optional[Histogram] = None,
    pdf: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> GofStats:
    """Kolmogorov-Smirnov distance between the empirical CDF of ``data`` and ``cdf``.

    ``cdf`` is evaluated at the sorted sample points and both one-sided gaps
    are taken: D+ = max(i/n - F(x_i)), D- = max(F(x_i) - (i-1)/n). For a step
    CDF this right-continuous convention counts the jump in D-, so a single
    sample sitting on the step has distance 1.

    When a histogram and density are supplied, the largest absolute difference
    between bin heights and the density at the bin centres is reported too.
    """
    values = np.sort(np.asarray(data, dtype=float).ravel())
    n = values.size
    if n == 0:
        raise DomainError("cannot compute a KS distance of empty data")
    f = np.asarray(cdf(values), dtype=float)
    i = np.arange(1, n + 1)
    d_plus = float(np.max(i / n - f))
    d_minus = float(np.max(f - (i - 1) / n))
    distance = min(max(d_plus, d_minus, 0.0), 1.0)

    sup_norm = 0.0
    if histogram is not None and pdf is not None:
        expected = np.asarray(pdf(histogram.centres), dtype=float)
        sup_norm = float(np.max(np.abs(histogram.normalized_heights - expected)))
    return GofStats(ks_distance=distance, sup_norm_vs_curve=sup_norm, n=n)


def ks_critical_value(n: int, confidence: float = 0.99) -> float:
    """Asymptotic KS critical value, e.g. 1.628/sqrt(n) at 99%."""
    return float(stats.kstwobign.ppf(confidence)) / math.sqrt(n)


def tabulate_cdf(
    density: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    n: int = 20001,
) -> Callable[[np.ndarray], np.ndarray]:
    """CDF of ``density`` by cumulative quadrature on a dense grid over [lo, hi].

    The mass outside [lo, hi] is assumed negligible; the table is normalised
    to reach exactly 1 at ``hi``.
    """
    grid = np.linspace(lo, hi, n)
    values = np.asarray(density(grid), dtype=float)
    if not np.all(np.isfinite(values)):
        raise QuadratureError("density is not finite on the CDF grid")
    cumulative = sp_integrate.cumulative_trapezoid(values, grid, initial=0.0)
    mass = cumulative[-1]
    if mass <= 0:
        raise QuadratureError("density has no mass on the CDF grid")
    if abs(mass - 1.0) > 1e-4:
        logger.warning("tabulated CDF mass on [%s, %s] is %.6g, renormalising", lo, hi, mass)
    cumulative /= mass

    def cdf(x: np.ndarray) -> np.ndarray:
        return np.interp(x, grid, cumulative, left=0.0, right=1.0)

    return cdf


def _checked_table(grid: ArrayLike, values: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    nodes = np.asarray(grid, dtype=float)
    heights = np.asarray(values, dtype=float)
    if nodes.ndim != 1 or nodes.size < 3 or nodes.shape != heights.shape:
        raise DomainError("a density table needs matching 1-d grids with at least 3 nodes")
    if np.any(np.diff(nodes) <= 0):
        raise DomainError("density table nodes must be strictly increasing")
    if not np.all(np.isfinite(heights)) or np.any(heights < 0):
        raise QuadratureError("tabulated density must be finite and non-negative")
    return nodes, heights


def _warn_mass(mass: float, lo: float, hi: float) -> None:
    if mass <= 0:
        raise QuadratureError("tabulated density has no mass")
    if abs(mass - 1.0) > 1e-3:
        logger.warning("tabulated density mass on [%s, %s] is %.6g, renormalising", lo, hi, mass)


def cdf_from_table(
    grid: ArrayLike,
    values: ArrayLike,
    *,
    origin_power: float = 0.0,
) -> Callable[[np.ndarray], np.ndarray]:
    """CDF of a density known only on a coarse grid (expensive densities).

    The density is interpolated with a shape-preserving cubic and integrated
    exactly; the result is clipped to [0, 1] and renormalised at the last node.

    With ``origin_power`` p != 0 the grid starts at x = 0 and ``values`` holds
    the regular factor q of a density f(x) = x^p q(x). The table is then
    integrated in u = x^(p + 1), where f dx = q du / (p + 1) stays finite and
    smooth at the origin.
    """
    nodes, heights = _checked_table(grid, values)
    if origin_power != 0.0:
        if not origin_power > -1.0:
            raise DomainError(f"origin_power must exceed -1, got {origin_power}")
        if nodes[0] != 0.0:
            raise DomainError("a table with an origin power law must start at x = 0")
    exponent = origin_power + 1.0
    u_nodes = np.power(nodes, exponent) if origin_power != 0.0 else nodes
    primitive = interpolate.PchipInterpolator(u_nodes, heights / exponent).antiderivative()
    lo, hi = nodes[0], nodes[-1]
    u_lo, u_hi = u_nodes[0], u_nodes[-1]
    mass = float(primitive(u_hi) - primitive(u_lo))
    _warn_mass(mass, lo, hi)

    def cdf(x: np.ndarray) -> np.ndarray:
        xs = np.clip(np.asarray(x, dtype=float), lo, hi)
        us = np.power(xs, exponent) if origin_power != 0.0 else xs
        return np.clip((primitive(us) - primitive(u_lo)) / mass, 0.0, 1.0)

    return cdf


def symmetric_cdf_from_table(grid: ArrayLike, values: ArrayLike) -> Callable[[np.ndarray], np.ndarray]:
    """CDF of an even density tabulated at positive abscissae only.

    The first node should sit close to the origin, where the density may have
    a cusp or an integrable divergence. The piece between 0 and the first node
    follows the local power law f ~ x^p fitted through the first two nodes;
    the rest is integrated through a shape-preserving cubic.
    """
    nodes, heights = _checked_table(grid, values)
    if not nodes[0] > 0:
        raise DomainError("symmetric density tables start at a positive abscissa")
    if heights[0] > 0 and heights[1] > 0:
        power = math.log(heights[1] / heights[0]) / math.log(nodes[1] / nodes[0])
    else:
        power = 0.0
    power = max(power, -0.99)
    head = float(heights[0] * nodes[0] / (power + 1.0))
    primitive = interpolate.PchipInterpolator(nodes, heights).antiderivative()
    hi = nodes[-1]
    half_mass = head + float(primitive(hi) - primitive(nodes[0]))
    _warn_mass(2.0 * half_mass, -hi, hi)

    def cdf(x: np.ndarray) -> np.ndarray:
        xs = np.asarray(x, dtype=float)
        r = np.minimum(np.abs(xs), hi)
        inside = head * np.power(np.minimum(r, nodes[0]) / nodes[0], power + 1.0)
        bulk = primitive(np.maximum(r, nodes[0])) - primitive(nodes[0])
        return np.clip(0.5 + 0.5 * np.sign(xs) * (inside + bulk) / half_mass, 0.0, 1.0)

    return cdf
