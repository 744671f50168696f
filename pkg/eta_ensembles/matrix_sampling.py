"""Monte Carlo engine for 2x2 eta-ensembles.

Gaussian weight, unitary class: the entry chain x -> y | x -> t | x, y ->
s | x, y, t, each stage drawn exactly from its conditional density. Anything
else (level attraction, the real-symmetric class, the Bessel weight) is drawn
in eigenvalue space and conjugated with a Haar-random rotation, which is
equivalent because every model here is invariant under conjugation.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Protocol, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy import integrate as sp_integrate
from scipy import linalg, special

from . import specfun
from .bessel_ensemble import BesselWeightParams
from .errors import (
    DomainError,
    EnvelopeViolationError,
    SingularConditionalError,
    StarvationError,
)
from .gaussian_ensemble import marginal_p1
from .models import (
    EnsembleParams,
    HankelMomentMatrix,
    HermitianEntries,
    SpectralPair,
    SymmetryClass,
    WeightKind,
)
from .rng import RngStream

logger = logging.getLogger(__name__)

RandomSource = Union[RngStream, np.random.Generator]

CHECK_COUNT = 4096
ENVELOPE_MARGIN = 0.1
TAIL_TOLERANCE = 1e-12
STARVATION_RATE = 1e-4
STARVATION_MIN_TRIALS = 100_000
TABLE_SIZE = 2048
T_TABLE_SIZE = 1024
X_HALF_WIDTH = 9.0
U_MAX = 45.0
S_HALF_WIDTH = 9.0
Y_CORE = 0.5
Y_SIGMA = 0.5
SQRT_TWO_PI = math.sqrt(2.0 * math.pi)
GAUSSIAN_ENVELOPE_MIN_A = 0.25
PERTURBATION = 1e-9


def _generator(rng: RandomSource) -> np.random.Generator:
    return rng.generator() if isinstance(rng, RngStream) else rng


@dataclass(slots=True)
class AcceptanceCounter:
    proposals: int = 0
    accepted: int = 0

    def record(self, proposals: int, accepted: int) -> None:
        self.proposals += proposals
        self.accepted += accepted

    @property
    def rate(self) -> float:
        return self.accepted / self.proposals if self.proposals else 0.0

    def check(self) -> None:
        if self.proposals >= STARVATION_MIN_TRIALS and self.rate < STARVATION_RATE:
            raise StarvationError(
                f"acceptance rate {self.rate:.2e} after {self.proposals} proposals is below {STARVATION_RATE:g}"
            )


class Envelope(Protocol):
    def density(self, x: np.ndarray) -> np.ndarray:
        ...

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        ...

    def check_points(self, n: int) -> np.ndarray:
        ...

    def allowance(self, x: np.ndarray) -> np.ndarray:
        ...


@dataclass(slots=True, frozen=True)
class GaussianEnvelope:
    """``scale`` times the N(mu, sigma^2) density."""

    mu: float
    sigma: float
    scale: float

    def __post_init__(self) -> None:
        if not (self.sigma > 0 and self.scale > 0):
            raise DomainError("Gaussian envelope needs sigma > 0 and scale > 0")

    def density(self, x: np.ndarray) -> np.ndarray:
        z = (np.asarray(x, dtype=float) - self.mu) / self.sigma
        return self.scale * np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2.0 * math.pi))

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        return gen.normal(self.mu, self.sigma, size)

    def check_points(self, n: int) -> np.ndarray:
        return np.linspace(self.mu - 12.0 * self.sigma, self.mu + 12.0 * self.sigma, n)

    def allowance(self, x: np.ndarray) -> np.ndarray:
        return np.zeros_like(x)


@dataclass(slots=True, frozen=True)
class GridEnvelope:
    """Piecewise-constant envelope on cells ``edges[i] .. edges[i+1]``."""

    edges: np.ndarray
    heights: np.ndarray
    cumulative: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.edges.ndim != 1 or self.edges.size != self.heights.size + 1 or np.any(np.diff(self.edges) <= 0):
            raise DomainError("grid envelope needs increasing edges and one height per cell")
        if np.any(self.heights < 0) or not np.all(np.isfinite(self.heights)):
            raise DomainError("grid envelope heights must be finite and non-negative")
        object.__setattr__(self, "cumulative", np.cumsum(self.heights * np.diff(self.edges)))

    @classmethod
    def from_density(
        cls,
        density: Callable[[np.ndarray], np.ndarray],
        edges: ArrayLike,
        margin: float = ENVELOPE_MARGIN,
        points_per_cell: int = 8,
    ) -> "GridEnvelope":
        edges = np.asarray(edges, dtype=float)
        frac = np.linspace(0.0, 1.0, points_per_cell + 1)
        points = edges[:-1, None] + np.diff(edges)[:, None] * frac[None, :]
        peak = np.asarray(density(points.ravel()), dtype=float).reshape(points.shape).max(axis=1)
        return cls(edges=edges, heights=(1.0 + margin) * peak)

    @classmethod
    def from_even_decreasing(cls, density: Callable[[np.ndarray], np.ndarray], edges: ArrayLike) -> "GridEnvelope":
        """Envelope of an even density that decreases in |x|; each cell takes the value at its edge nearest 0."""
        edges = np.asarray(edges, dtype=float)
        lo, hi = edges[:-1], edges[1:]
        nearest = np.where(lo * hi <= 0, 0.0, np.minimum(np.abs(lo), np.abs(hi)))
        return cls(edges=edges, heights=np.asarray(density(nearest), dtype=float))

    @property
    def support(self) -> Tuple[float, float]:
        return float(self.edges[0]), float(self.edges[-1])

    def density(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.edges, x, side="right") - 1
        idx = np.where(x == self.edges[-1], self.heights.size - 1, idx)
        inside = (idx >= 0) & (idx < self.heights.size)
        out = np.zeros_like(x)
        out[inside] = self.heights[idx[inside]]
        return out

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        total = self.cumulative[-1]
        cells = np.searchsorted(self.cumulative, gen.random(size) * total, side="right")
        cells = np.minimum(cells, self.heights.size - 1)
        return self.edges[cells] + gen.random(size) * np.diff(self.edges)[cells]

    def check_points(self, n: int) -> np.ndarray:
        lo, hi = self.support
        pad = 0.1 * (hi - lo)
        return np.union1d(np.linspace(lo - pad, hi + pad, n), self.edges)

    def allowance(self, x: np.ndarray) -> np.ndarray:
        lo, hi = self.support
        outside = (x < lo) | (x > hi)
        return np.where(outside, TAIL_TOLERANCE * float(self.heights.max()), 0.0)


@dataclass(slots=True)
class RejectionSampler:
    """Exact sampler for ``density`` under a dominating envelope.

    Domination is checked on ``checks`` points when the sampler is built;
    ``checks=0`` skips the check for envelopes that dominate analytically.
    """

    density: Callable[[np.ndarray], np.ndarray]
    envelope: Envelope
    checks: int = CHECK_COUNT
    counter: AcceptanceCounter = field(default_factory=AcceptanceCounter)

    def __post_init__(self) -> None:
        if self.checks == 0:
            return
        x = self.envelope.check_points(self.checks)
        target = np.asarray(self.density(x), dtype=float)
        bound = self.envelope.density(x) + self.envelope.allowance(x)
        excess = target - bound
        if np.any(excess > 0):
            worst = int(np.argmax(excess))
            raise EnvelopeViolationError(
                f"density {target[worst]:.6g} exceeds envelope {bound[worst]:.6g} at x={x[worst]:.6g}"
            )

    @property
    def acceptance_rate(self) -> float:
        return self.counter.rate

    def draw(self, gen: np.random.Generator, size: int = 1, batch: int = 16) -> np.ndarray:
        out = np.empty(size)
        filled = 0
        while filled < size:
            n = max(batch, 2 * (size - filled))
            candidates = self.envelope.sample(gen, n)
            u = gen.random(n)
            keep = candidates[u * self.envelope.density(candidates) < np.asarray(self.density(candidates))]
            take = keep[: size - filled]
            out[filled : filled + take.size] = take
            filled += take.size
            self.counter.record(n, keep.size)
            self.counter.check()
        return out

    def draw_one(self, gen: np.random.Generator) -> float:
        return float(self.draw(gen, 1)[0])


def rejection_sample(
    density: Callable[[np.ndarray], np.ndarray],
    envelope: Envelope,
    rng: RandomSource,
) -> float:
    sampler = RejectionSampler(density, envelope)
    value = sampler.draw_one(_generator(rng))
    logger.debug("rejection sample accepted at rate %.3f", sampler.acceptance_rate)
    return value


@dataclass(slots=True, frozen=True)
class InverseCdfTable:
    grid: np.ndarray
    cdf: np.ndarray
    # trapezoid mass of the tabulated density before normalisation
    mass: float = 1.0

    @classmethod
    def from_density(cls, grid: np.ndarray, values: np.ndarray) -> "InverseCdfTable":
        if not np.all(np.isfinite(values)):
            raise SingularConditionalError("conditional density is not finite on its grid")
        cumulative = sp_integrate.cumulative_trapezoid(values, grid, initial=0.0)
        total = cumulative[-1]
        if not total > 0:
            raise SingularConditionalError("conditional density has no mass on its grid")
        return cls(grid=grid, cdf=cumulative / total, mass=float(total))

    def sample(self, gen: np.random.Generator) -> float:
        return float(np.interp(gen.random(), self.cdf, self.grid))


def _sinh_grid(centre: float, half_width: float, n: int, stretch: float) -> np.ndarray:
    # an even n keeps the centre itself off the grid
    u = np.linspace(-1.0, 1.0, n)
    return centre + half_width * np.sinh(stretch * u) / math.sinh(stretch)


@dataclass(slots=True)
class GaussianChainSampler:
    """Draws (x, y, t, s) from the entry density by chained conditionals.

    The table for x ~ p1 and the core table for the y stage are built once;
    the t stage tabulates its radial density for every conditioning value.
    """

    eta: float
    x_table: InverseCdfTable = field(init=False)
    d_core: InverseCdfTable = field(init=False)
    k_edge: float = field(init=False)
    counter: AcceptanceCounter = field(default_factory=AcceptanceCounter)

    def __post_init__(self) -> None:
        if not 0.0 <= self.eta <= 1.0:
            raise DomainError(f"the entry chain needs eta in [0, 1], got {self.eta}")
        grid = _sinh_grid(0.0, X_HALF_WIDTH, TABLE_SIZE, 2.0)
        positive = grid[TABLE_SIZE // 2 :]
        logger.info("Tabulating p1 for eta=%s on %d nodes", self.eta, positive.size)
        half = np.asarray(marginal_p1(positive, self.eta))
        values = np.concatenate((half[::-1], half))
        self.x_table = InverseCdfTable.from_density(grid, values)
        core = np.geomspace(1e-12, Y_CORE, TABLE_SIZE)
        self.d_core = InverseCdfTable.from_density(core, self._offset_kernel(core * core))
        self.k_edge = float(self._offset_kernel(np.array([Y_CORE * Y_CORE]))[0])

    def _offset_kernel(self, z: np.ndarray) -> np.ndarray:
        # exp(z) Gamma(1 - eta, z) = int_0^inf (z + w)^-eta e^-w dw, non-increasing in z
        return np.exp(z) * np.asarray(specfun.upper_incomplete_gamma(1.0 - self.eta, z))

    def draw(self, gen: np.random.Generator) -> HermitianEntries:
        x = self.x_table.sample(gen)
        y = self._draw_y(x, gen)
        try:
            t = self._draw_t(x, y, gen)
        except SingularConditionalError:
            logger.warning("t | x, y is singular at y=%r, retrying with a perturbed y", y)
            y += PERTURBATION * (1.0 + abs(y))
            t = self._draw_t(x, y, gen)
        try:
            s = self._draw_s(x, y, t, gen)
        except SingularConditionalError:
            logger.warning("s | x, y, t is singular at t=%r, retrying with a perturbed t", t)
            t += PERTURBATION * (1.0 + abs(t))
            s = self._draw_s(x, y, t, gen)
        return HermitianEntries(x=x, y=y, t=t, s=s)

    def _draw_y(self, x: float, gen: np.random.Generator) -> float:
        """y = x + 2d, where d | x has density proportional to N(d; -x/2, 1/4) k(d^2).

        k is the offset kernel exp(z) Gamma(1 - eta, z). The envelope has two
        parts. On |d| < Y_CORE the Gaussian factor is replaced by its maximum
        there and d comes from the cached k(d^2) table. Outside, k is replaced
        by k(Y_CORE^2) and d is a Gaussian draw.
        """
        centre = -0.5 * x
        nearest = min(max(centre, -Y_CORE), Y_CORE)
        gauss_max = _normal_pdf(nearest, centre, Y_SIGMA)
        core_mass = 2.0 * gauss_max * self.d_core.mass
        outside = special.ndtr((-Y_CORE - centre) / Y_SIGMA) + special.ndtr((centre - Y_CORE) / Y_SIGMA)
        core_share = core_mass / (core_mass + self.k_edge * outside)
        while True:
            self.counter.record(1, 0)
            self.counter.check()
            if gen.random() < core_share:
                d = self.d_core.sample(gen)
                if gen.random() < 0.5:
                    d = -d
                ratio = _normal_pdf(d, centre, Y_SIGMA) / gauss_max
            else:
                d = float(gen.normal(centre, Y_SIGMA))
                if abs(d) < Y_CORE:
                    continue
                ratio = float(self._offset_kernel(np.array([d * d]))[0]) / self.k_edge
            if gen.random() < ratio:
                self.counter.record(0, 1)
                return x + 2.0 * d

    def _draw_t(self, x: float, y: float, gen: np.random.Generator) -> float:
        """t is the first coordinate of (t, s) | x, y, which depends on t^2 + s^2 only.

        With u = (t^2 + s^2)/2 the radial density is exp(-u) (d^2 + 4u)^(-eta),
        and the angle is uniform.
        """
        d2 = (x - y) ** 2
        if d2 == 0.0 and self.eta >= 1.0:
            raise SingularConditionalError("the radial density is not integrable at x = y for eta = 1")
        lower = 1e-12 * min(1.0, 0.25 * d2) if d2 > 0 else 1e-16
        grid = np.geomspace(lower, U_MAX, T_TABLE_SIZE)
        values = np.exp(-grid) * np.power(d2 + 4.0 * grid, -self.eta)
        u = InverseCdfTable.from_density(grid, values).sample(gen)
        angle = gen.uniform(0.0, 2.0 * math.pi)
        return math.sqrt(2.0 * u) * math.cos(angle)

    def _draw_s(self, x: float, y: float, t: float, gen: np.random.Generator) -> float:
        eta = self.eta
        if eta == 0.0:
            return float(gen.standard_normal())
        a = (x - y) ** 2 + 2.0 * t * t
        if a == 0.0:
            raise SingularConditionalError("s | x, y, t is singular at (x - y)^2 + 2t^2 = 0")

        def density(s: np.ndarray) -> np.ndarray:
            return np.exp(-0.5 * s * s) * np.power(a + 2.0 * s * s, -eta)

        # both envelopes dominate analytically
        envelope: Envelope
        if a >= GAUSSIAN_ENVELOPE_MIN_A:
            # (a + 2s^2)^-eta <= a^-eta
            envelope = GaussianEnvelope(0.0, 1.0, a ** (-eta) * math.sqrt(2.0 * math.pi))
        else:
            positive = np.geomspace(1e-2 * math.sqrt(a), S_HALF_WIDTH, 128)
            edges = np.concatenate((-positive[::-1], [0.0], positive))
            envelope = GridEnvelope.from_even_decreasing(density, edges)
        sampler = RejectionSampler(density, envelope, checks=0, counter=self.counter)
        return sampler.draw_one(gen)


def _normal_pdf(x: float, mu: float, sigma: float) -> float:
    z = (x - mu) / sigma
    return math.exp(-0.5 * z * z) / (sigma * SQRT_TWO_PI)


def sample_entries_gaussian(eta: float, rng: RandomSource) -> HermitianEntries:
    return GaussianChainSampler(eta).draw(_generator(rng))


def sample_eigen_gaussian(eta: float, rng: RandomSource) -> SpectralPair:
    """Exact draw from K exp(-(l1^2 + l2^2)/2) |l2 - l1|^(2 - 2 eta), any eta < 3/2.

    The centre (l1 + l2)/2 is N(0, 1/2) and s^2/4 is Gamma(3/2 - eta), independently.
    """
    if not eta < 1.5:
        raise DomainError(f"Gaussian weight needs eta < 3/2, got {eta}")
    gen = _generator(rng)
    centre = gen.normal(0.0, math.sqrt(0.5))
    spacing = 2.0 * math.sqrt(gen.gamma(1.5 - eta))
    return SpectralPair(lambda1=centre - 0.5 * spacing, lambda2=centre + 0.5 * spacing, spacing=spacing)


def sample_eigen_real_twin(eta_hat: float, rng: RandomSource) -> SpectralPair:
    if not eta_hat < 2.0:
        raise DomainError(f"real-symmetric model needs eta_hat < 2, got {eta_hat}")
    return sample_eigen_gaussian(0.5 * (1.0 + eta_hat), rng)


@dataclass(slots=True)
class BesselEigenSampler:
    """Eigenvalue pairs of the Generalized Bessel weight.

    phi is a Gaussian scale mixture, phi(x) = B int w(t) exp(-A(t) x^2) dt with
    w(t) = t^-zeta exp(-t/(8 alpha)) and A(t) = 2 alpha t^-zeta. Given the mixing
    variables (t1, t2) the pair is Gaussian times |l2 - l1|^beta, which splits
    into an independent centre and a Gamma-distributed spacing^2. With a = 1/A
    the mixing pair has density proportional to g(t1) g(t2) (a1 + a2)^(beta/2),
    g being the Gamma(1 - zeta/2, 8 alpha) density. It is drawn by rejection
    from the mixture that bounds (a1 + a2)^h by a1^h + a2^h, so at least half
    of the proposals are accepted.
    """

    params: BesselWeightParams
    counter: AcceptanceCounter = field(default_factory=AcceptanceCounter)

    def draw_pair(self, gen: np.random.Generator) -> SpectralPair:
        p = self.params
        zeta, alpha = p.zeta, p.alpha
        half = 0.5 * p.beta
        scale = 8.0 * alpha
        base_shape = 1.0 - 0.5 * zeta
        tilted_shape = 1.0 - 0.5 * zeta * zeta
        while True:
            if half == 0.0:
                t1, t2 = gen.gamma(base_shape, scale), gen.gamma(base_shape, scale)
                self.counter.record(1, 1)
                break
            tilted, base = gen.gamma(tilted_shape, scale), gen.gamma(base_shape, scale)
            t1, t2 = (tilted, base) if gen.random() < 0.5 else (base, tilted)
            a1 = t1**zeta / (2.0 * alpha)
            a2 = t2**zeta / (2.0 * alpha)
            accept = (a1 + a2) ** half / (a1**half + a2**half)
            if gen.random() < accept:
                self.counter.record(1, 1)
                break
            self.counter.record(1, 0)
            self.counter.check()
        big_a = 2.0 * alpha * t1 ** (-zeta)
        big_b = 2.0 * alpha * t2 ** (-zeta)
        total = big_a + big_b
        c = big_a * big_b / total
        delta = math.sqrt(gen.gamma(0.5 * (p.beta + 1.0)) / c)
        if gen.random() < 0.5:
            delta = -delta
        centre = gen.normal(0.0, math.sqrt(0.5 / total))
        return SpectralPair.from_unordered(centre - big_b * delta / total, centre + big_a * delta / total)


def sample_eigen_bessel(p: BesselWeightParams, rng: RandomSource) -> SpectralPair:
    return BesselEigenSampler(p).draw_pair(_generator(rng))


def haar_unitary_2x2(rng: RandomSource) -> np.ndarray:
    gen = _generator(rng)
    z = (gen.standard_normal((2, 2)) + 1j * gen.standard_normal((2, 2))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    # fix the phases of diag(R) so that Q is Haar distributed
    d = np.diagonal(r)
    q *= d / np.abs(d)
    return q


def haar_orthogonal_2x2(rng: RandomSource) -> np.ndarray:
    gen = _generator(rng)
    q, r = np.linalg.qr(gen.standard_normal((2, 2)))
    d = np.diagonal(r)
    q *= d / np.abs(d)
    return q


def lift_to_entries(pair: SpectralPair, unitary: np.ndarray) -> HermitianEntries:
    """Entries of U diag(l1, l2) U^dagger."""
    matrix = (unitary * np.array([pair.lambda1, pair.lambda2])) @ unitary.conj().T
    off = matrix[0, 1]
    return HermitianEntries(
        x=float(matrix[0, 0].real),
        y=float(matrix[1, 1].real),
        t=math.sqrt(2.0) * float(off.real),
        s=math.sqrt(2.0) * float(off.imag),
    )


def eigenvalues_2x2(e: HermitianEntries) -> SpectralPair:
    spacing = math.sqrt(e.vstar)
    centre = 0.5 * (e.x + e.y)
    return SpectralPair(lambda1=centre - 0.5 * spacing, lambda2=centre + 0.5 * spacing, spacing=spacing)


def hankel_moment_matrix(eigenvalues: ArrayLike) -> HankelMomentMatrix:
    lam = np.asarray(eigenvalues, dtype=float)
    n = lam.size
    powers = np.array([np.sum(lam**k) for k in range(2 * n - 1)])
    return HankelMomentMatrix(n=n, power_sums=powers[1:], entries=linalg.hankel(powers[:n], powers[n - 1 :]))


def vandermonde_power_sum_det(eigenvalues: ArrayLike, n: int) -> Tuple[float, float]:
    """det of the power-sum Hankel matrix and the squared Vandermonde product."""
    lam = np.asarray(eigenvalues, dtype=float)
    if not 2 <= n <= 8:
        raise DomainError(f"the determinant check supports 2 <= n <= 8, got {n}")
    if lam.size != n:
        raise DomainError(f"expected {n} eigenvalues, got {lam.size}")
    hankel = hankel_moment_matrix(lam)
    i, j = np.triu_indices(n, k=1)
    vdm_sq = float(np.prod((lam[i] - lam[j]) ** 2))
    return float(np.linalg.det(hankel.entries)), vdm_sq


class SamplingMethod(str, Enum):
    CHAIN = "chain"
    EIGEN = "eigen"


class MatrixSampler(Protocol):
    def draw(self, gen: np.random.Generator) -> HermitianEntries:
        ...


@dataclass(slots=True)
class GaussianEigenSampler:
    eta: float

    def draw(self, gen: np.random.Generator) -> HermitianEntries:
        return lift_to_entries(sample_eigen_gaussian(self.eta, gen), haar_unitary_2x2(gen))


@dataclass(slots=True)
class RealTwinSampler:
    """Real-symmetric matrices; the off-diagonal is stored in Hermitian coordinates, s = 0."""

    eta_hat: float

    def draw(self, gen: np.random.Generator) -> HermitianEntries:
        return lift_to_entries(sample_eigen_real_twin(self.eta_hat, gen), haar_orthogonal_2x2(gen))


@dataclass(slots=True)
class BesselMatrixSampler:
    params: BesselWeightParams
    eigen: BesselEigenSampler = field(init=False)

    def __post_init__(self) -> None:
        self.eigen = BesselEigenSampler(self.params)

    def draw(self, gen: np.random.Generator) -> HermitianEntries:
        return lift_to_entries(self.eigen.draw_pair(gen), haar_unitary_2x2(gen))


def default_method(params: EnsembleParams) -> SamplingMethod:
    if (
        params.weight is WeightKind.GAUSSIAN
        and params.symmetry is SymmetryClass.UNITARY
        and 0.0 <= params.eta <= 1.0
    ):
        return SamplingMethod.CHAIN
    return SamplingMethod.EIGEN


def make_sampler(params: EnsembleParams, method: Optional[SamplingMethod] = None) -> MatrixSampler:
    method = default_method(params) if method is None else SamplingMethod(method)
    if params.weight is WeightKind.BESSEL:
        if method is SamplingMethod.CHAIN:
            raise DomainError("the Bessel weight has no entry chain; use the eigen method")
        return BesselMatrixSampler(BesselWeightParams.from_ensemble(params))
    if params.symmetry is SymmetryClass.REAL_SYMMETRIC:
        if method is SamplingMethod.CHAIN:
            raise DomainError("the real-symmetric model is sampled in eigenvalue space only")
        return RealTwinSampler(params.eta)
    if method is SamplingMethod.CHAIN:
        return GaussianChainSampler(params.eta)
    return GaussianEigenSampler(params.eta)


def sample_row(sampler: MatrixSampler, gen: np.random.Generator) -> np.ndarray:
    """One output row (x, y, t, s, lambda1, lambda2, spacing); the matrix is diagonalised here."""
    entries = sampler.draw(gen)
    pair = eigenvalues_2x2(entries)
    return np.array([entries.x, entries.y, entries.t, entries.s, pair.lambda1, pair.lambda2, pair.spacing])
