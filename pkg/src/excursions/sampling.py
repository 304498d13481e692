"""Exact synthesis of stationary Gaussian paths and exceedance conditioning.

Sampling is exact (no AR/Markov approximation): circulant embedding with
eigenvalue checks where it works, dense Cholesky of the full covariance as the
fallback.  Conditioning on an origin exceedance replaces the origin coordinate
by an independent truncated normal and propagates it along the regression
profile R(t)/R(0), which reproduces the conditional law exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import linalg as sla
from scipy import stats as sps

from .errors import DomainError, SynthesisError
from .kernels import Kernel
from .streams import as_generator, generator

__all__ = [
    "Grid",
    "Path",
    "SynthesisMethod",
    "SamplerPlan",
    "build_sampler",
    "sample_unconditional",
    "sample_truncated_normal",
    "sample_conditional_exceedance",
    "path_derivative_at_zero",
]

# Circulant embedding is retried on progressively padded domains up to this
# factor before the dense route takes over.
MAX_EMBED_FACTOR = 64
# Negative circulant eigenvalues above this fraction of the largest one are
# treated as roundoff and clamped to zero.
EIGENVALUE_TOL = 1e-12
# Relative Frobenius error any accepted factorization must meet.
FACTOR_TOL = 1e-8
# Dense fallback: diagonal jitter ladder in units of R(0).
JITTER_LADDER = (1e-14, 1e-13, 1e-12, 1e-11, 1e-10)
# Dense factorization memory/time guard.
MAX_DENSE_POINTS = 8193


@dataclass(frozen=True)
class Grid:
    """Uniform grid symmetric around t = 0 with an odd number of points."""

    step: float
    half_width: float

    def __post_init__(self):
        if not (self.step > 0.0 and self.half_width > 0.0):
            raise DomainError("grid step and half_width must be positive")
        if int(math.floor(self.half_width / self.step + 1e-9)) < 1:
            raise DomainError("grid needs at least 3 points; require half_width >= step")

    @property
    def arm(self) -> int:
        # points strictly to one side of the origin
        return int(math.floor(self.half_width / self.step + 1e-9))

    @property
    def n(self) -> int:
        return 2 * self.arm + 1

    @property
    def origin_index(self) -> int:
        return self.arm

    def times(self) -> np.ndarray:
        m = self.arm
        return np.arange(-m, m + 1) * self.step


@dataclass
class Path:
    grid: Grid
    values: np.ndarray
    seed: int
    origin_index: int


class SynthesisMethod(Enum):
    CIRCULANT_EMBEDDING = "CirculantEmbedding"
    DENSE_FACTORIZATION = "DenseFactorization"


@dataclass
class SamplerPlan:
    """Precomputed factorization reused across replicates."""

    kernel: Kernel
    grid: Grid
    method: SynthesisMethod
    jitter_used: float
    fro_error: float
    embed_factor: int = 1
    spectral_weights: np.ndarray | None = None  # circulant: sqrt(lam / M), length M
    factor: np.ndarray | None = None            # dense: lower-triangular Cholesky


def _toeplitz_fro_gap(row_target: np.ndarray, row_realized: np.ndarray, n: int) -> float:
    """Relative Frobenius distance between symmetric Toeplitz matrices given by
    their first rows, computed in O(n) via lag multiplicities."""
    w = (n - np.arange(n)).astype(float)
    w[1:] *= 2.0  # each off-diagonal lag appears on both sides
    da = row_target[:n]
    db = row_realized[:n]
    num = math.sqrt(float(np.sum(w * (da - db) ** 2)))
    den = math.sqrt(float(np.sum(w * da**2)))
    return num / den


def _circulant_attempt(kernel: Kernel, grid: Grid, embed_factor: int):
    """Try one padded circulant embedding; None if eigenvalues fail the tolerance."""
    n = grid.n
    ext = embed_factor * (n - 1)
    row = kernel.value(np.arange(ext + 1) * grid.step)
    c = np.concatenate([row, row[-2:0:-1]])  # wrapped row, length 2 * ext
    lam = np.fft.fft(c).real
    lam_max = float(lam.max())
    if float(lam.min()) < -EIGENVALUE_TOL * lam_max:
        return None
    lam = np.maximum(lam, 0.0)
    realized = np.fft.ifft(lam).real  # covariance the clamped spectrum delivers
    gap = _toeplitz_fro_gap(row, realized, n)
    if gap > FACTOR_TOL:
        return None
    weights = np.sqrt(lam / lam.size)
    return weights, gap


def _dense_attempt(kernel: Kernel, grid: Grid):
    n = grid.n
    if n > MAX_DENSE_POINTS:
        raise SynthesisError(
            f"dense factorization is capped at {MAX_DENSE_POINTS} points, grid has {n}"
        )
    row = kernel.value(np.arange(n) * grid.step)
    cov = sla.toeplitz(row)
    eye = np.eye(n)
    for jitter in JITTER_LADDER:
        eps = jitter * kernel.r0
        try:
            factor = np.linalg.cholesky(cov + eps * eye)
        except np.linalg.LinAlgError:
            continue
        gap = float(np.linalg.norm(factor @ factor.T - cov) / np.linalg.norm(cov))
        if gap <= FACTOR_TOL:
            return factor, eps, gap
    raise SynthesisError("no jitter level produced an acceptable Cholesky factor")


def build_sampler(kernel: Kernel, grid: Grid, *, force_dense: bool = False) -> SamplerPlan:
    """Factorize the grid covariance once, for reuse across replicates.

    Circulant embedding is attempted first on domains padded by factors
    1, 2, ..., MAX_EMBED_FACTOR; embeddings whose spectrum dips below
    -EIGENVALUE_TOL * max eigenvalue are rejected.  The dense Cholesky fallback
    escalates diagonal jitter through JITTER_LADDER.  Whatever route is taken,
    the realized covariance must match the target within FACTOR_TOL in relative
    Frobenius norm, else SynthesisError.
    """
    if not force_dense:
        embed_factor = 1
        while embed_factor <= MAX_EMBED_FACTOR:
            hit = _circulant_attempt(kernel, grid, embed_factor)
            if hit is not None:
                weights, gap = hit
                return SamplerPlan(
                    kernel=kernel,
                    grid=grid,
                    method=SynthesisMethod.CIRCULANT_EMBEDDING,
                    jitter_used=0.0,
                    fro_error=gap,
                    embed_factor=embed_factor,
                    spectral_weights=weights,
                )
            embed_factor *= 2
    factor, eps, gap = _dense_attempt(kernel, grid)
    return SamplerPlan(
        kernel=kernel,
        grid=grid,
        method=SynthesisMethod.DENSE_FACTORIZATION,
        jitter_used=eps,
        fro_error=gap,
        factor=factor,
    )


def _draw_values(plan: SamplerPlan, rng: np.random.Generator) -> np.ndarray:
    if plan.method is SynthesisMethod.CIRCULANT_EMBEDDING:
        m = plan.spectral_weights.size
        z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        return np.fft.fft(z * plan.spectral_weights).real[: plan.grid.n]
    z = rng.standard_normal(plan.grid.n)
    return plan.factor @ z


def sample_unconditional(plan: SamplerPlan, seed: int) -> Path:
    """One exact draw of the stationary path on the plan's grid."""
    rng = generator(seed)
    values = _draw_values(plan, rng)
    return Path(plan.grid, values, int(seed), plan.grid.origin_index)


# Above this standardized threshold the inverse-CDF loses nothing to switch to
# rejection from a shifted exponential, whose acceptance rate tends to 1.
_INVERSE_CDF_CUTOFF = 2.0


def _truncated_std_normal(a: float, rng: np.random.Generator) -> float:
    """Standard normal conditioned on exceeding a; exact for every a."""
    if a <= _INVERSE_CDF_CUTOFF:
        q = float(sps.norm.sf(a))
        # (1 - U) keeps the argument strictly positive, so isf stays finite
        return float(sps.norm.isf((1.0 - rng.uniform()) * q))
    lam = 0.5 * (a + math.sqrt(a * a + 4.0))
    while True:
        x = a + rng.standard_exponential() / lam
        # accept with probability exp(-(x - lam)^2 / 2)
        if math.log(1.0 - rng.uniform()) <= -0.5 * (x - lam) ** 2:
            return x


def sample_truncated_normal(variance: float, u: float, seed) -> float:
    """Exact draw of N(0, variance) conditioned on exceeding u.

    Inverse-CDF for u/sigma <= 2, shifted-exponential rejection above.  ``seed``
    may be an integer or a Generator (for callers drawing in bulk).
    """
    if not variance > 0.0:
        raise DomainError(f"variance must be positive, got {variance!r}")
    rng = as_generator(seed)
    sigma = math.sqrt(variance)
    return sigma * _truncated_std_normal(u / sigma, rng)


def sample_conditional_exceedance(plan: SamplerPlan, u: float, seed: int) -> Path:
    """One exact draw of the path conditioned on its origin value exceeding u.

    Writes X + (R(t)/R(0)) * (xi - X_0) with X unconditional and xi an
    independent truncated normal; the origin value is xi itself, so the
    conditioning holds on every replicate, never by rejection.
    """
    rng = generator(seed)
    values = _draw_values(plan, rng)
    r0 = plan.kernel.r0
    sigma = math.sqrt(r0)
    xi = sigma * _truncated_std_normal(u / sigma, rng)
    origin = plan.grid.origin_index
    profile = plan.kernel.value(plan.grid.times()) / r0
    values = values + profile * (xi - values[origin])
    values[origin] = xi  # exact, guards the strict exceedance against roundoff
    return Path(plan.grid, values, int(seed), origin)


def path_derivative_at_zero(path: Path) -> float:
    """Central difference of the path at the origin."""
    o = path.origin_index
    if o <= 0 or o >= len(path.values) - 1:
        raise DomainError("origin sits on the grid boundary; no central difference")
    return float((path.values[o + 1] - path.values[o - 1]) / (2.0 * path.grid.step))
