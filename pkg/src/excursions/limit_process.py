"""Heavy-tail limit objects: two-sided fractional Brownian motion, the drifted
limit process, and its zero-hitting interval around the origin.

The limit process is Y_t = sqrt(2 c) B(t) + r0 * t_star - (c / r0) * |t|**alpha
with c = c_alpha(alpha), B a two-sided fBm of Hurst index alpha/2 pinned at
B(0) = 0, and t_star an independent unit exponential level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .crossings import crossing_bounds
from .errors import DomainError, SynthesisError
from .kernels import c_alpha
from .sampling import FACTOR_TOL, Grid, Path
from .streams import generator, substream_seed

__all__ = [
    "FbmPath",
    "LimitSample",
    "fbm_two_sided",
    "limit_process_path",
    "tilde_process_path",
    "limit_hitting_interval",
    "sample_limit_length",
    "sample_tilde_length",
    "MAX_WINDOW_EXTENSIONS",
]

# A window with no crossing is regenerated on a doubled window (fresh draw) at
# most this many times before the replicate is censored.
MAX_WINDOW_EXTENSIONS = 6
# Jitter ladder for the dense fBm factorization, relative to the largest
# variance on the grid; zero first because the matrix is usually clean.
_JITTER_LADDER = (0.0, 1e-14, 1e-13, 1e-12, 1e-11, 1e-10)


@dataclass
class FbmPath:
    grid: Grid
    values: np.ndarray
    alpha: float
    seed: int

    @property
    def origin_index(self) -> int:
        return self.grid.origin_index


@dataclass(frozen=True)
class LimitSample:
    tau_star_minus: float
    tau_star_plus: float
    length: float  # nan when censored
    window_extensions: int
    censored: bool


def _fbm_cov(times: np.ndarray, alpha: float) -> np.ndarray:
    s = np.abs(times[:, None]) ** alpha
    t = np.abs(times[None, :]) ** alpha
    d = np.abs(times[:, None] - times[None, :]) ** alpha
    return 0.5 * (s + t - d)


@lru_cache(maxsize=32)
def _fbm_factor(alpha: float, grid: Grid):
    """Cholesky factor of the fBm covariance on the grid times minus the pinned
    origin; cached because every replicate on the same grid reuses it."""
    times = np.delete(grid.times(), grid.origin_index)
    cov = _fbm_cov(times, alpha)
    scale = float(cov.diagonal().max())
    eye = np.eye(times.size)
    for jitter in _JITTER_LADDER:
        eps = jitter * scale
        try:
            factor = np.linalg.cholesky(cov + eps * eye)
        except np.linalg.LinAlgError:
            continue
        gap = float(np.linalg.norm(factor @ factor.T - cov) / np.linalg.norm(cov))
        if gap <= FACTOR_TOL:
            return factor, eps, gap
    raise SynthesisError("fBm covariance factorization failed at every jitter level")


def _draw_fbm_values(alpha: float, grid: Grid, rng: np.random.Generator) -> np.ndarray:
    factor, _, _ = _fbm_factor(alpha, grid)
    z = rng.standard_normal(grid.n - 1)
    return np.insert(factor @ z, grid.origin_index, 0.0)


def fbm_two_sided(alpha: float, grid: Grid, seed: int) -> FbmPath:
    """Exact two-sided fBm draw with Hurst index alpha/2; B(0) = 0 exactly."""
    if not 0.0 < alpha < 2.0:
        raise DomainError(f"fBm needs alpha in (0, 2), got {alpha!r}")
    rng = generator(seed)
    return FbmPath(grid, _draw_fbm_values(alpha, grid, rng), alpha, int(seed))


def limit_process_path(alpha: float, r0: float, fbm: FbmPath, t_star: float) -> Path:
    """Drifted limit path sqrt(2c) B(t) + r0 * t_star - (c/r0) |t|**alpha."""
    if fbm.alpha != alpha:
        raise DomainError("alpha does not match the fBm draw")
    if not r0 > 0.0:
        raise DomainError(f"r0 must be positive, got {r0!r}")
    if not t_star > 0.0:
        raise DomainError(f"t_star must be positive, got {t_star!r}")
    c = c_alpha(alpha)
    t = fbm.grid.times()
    values = math.sqrt(2.0 * c) * fbm.values + r0 * t_star - (c / r0) * np.abs(t) ** alpha
    return Path(fbm.grid, values, fbm.seed, fbm.grid.origin_index)


def tilde_process_path(alpha: float, fbm: FbmPath, t_star: float) -> Path:
    """Drift-normalized variant sqrt(2) B(t) + t_star - |t|**alpha."""
    if fbm.alpha != alpha:
        raise DomainError("alpha does not match the fBm draw")
    if not t_star > 0.0:
        raise DomainError(f"t_star must be positive, got {t_star!r}")
    t = fbm.grid.times()
    values = math.sqrt(2.0) * fbm.values + t_star - np.abs(t) ** alpha
    return Path(fbm.grid, values, fbm.seed, fbm.grid.origin_index)


def limit_hitting_interval(y: Path) -> LimitSample:
    """Zero-hitting times of a limit path on each side of the origin.

    Measurement only: censoring is reported, window regeneration lives in the
    samplers that own the generative inputs.
    """
    res = crossing_bounds(y, 0.0)
    censored = res.censored_left or res.censored_right
    return LimitSample(res.tau_minus, res.tau_plus, res.length, 0, censored)


def _positive_exponential(rng: np.random.Generator) -> float:
    t_star = float(rng.standard_exponential())
    while t_star == 0.0:  # zero draws break the origin-positivity precondition
        t_star = float(rng.standard_exponential())
    return t_star


def _sample_hitting_length(path_builder, grid: Grid, seed: int) -> LimitSample:
    """Shared window-doubling loop: fresh draw on a doubled window (step and
    half_width both double, keeping the point count at desk scale) until the
    interval fits, then censor."""
    res = None
    for extension in range(MAX_WINDOW_EXTENSIONS + 1):
        rng = generator(substream_seed(seed, extension))
        t_star = _positive_exponential(rng)
        y = path_builder(grid, rng, t_star)
        res = crossing_bounds(y, 0.0)
        if not (res.censored_left or res.censored_right):
            return LimitSample(res.tau_minus, res.tau_plus, res.length, extension, False)
        grid = Grid(step=grid.step * 2.0, half_width=grid.half_width * 2.0)
    return LimitSample(res.tau_minus, res.tau_plus, math.nan, MAX_WINDOW_EXTENSIONS, True)


def sample_limit_length(alpha: float, r0: float, grid: Grid, seed: int) -> LimitSample:
    """One draw of the limit excursion interval: exponential level, independent
    fBm, hitting times; the window doubles on a fresh substream when the
    interval does not fit."""
    if not 0.0 < alpha < 2.0:
        raise DomainError(f"limit process needs alpha in (0, 2), got {alpha!r}")
    if not r0 > 0.0:
        raise DomainError(f"r0 must be positive, got {r0!r}")

    def build(g: Grid, rng: np.random.Generator, t_star: float) -> Path:
        fbm = FbmPath(g, _draw_fbm_values(alpha, g, rng), alpha, seed)
        return limit_process_path(alpha, r0, fbm, t_star)

    return _sample_hitting_length(build, grid, seed)


def sample_tilde_length(alpha: float, grid: Grid, seed: int) -> LimitSample:
    """Same draw for the drift-normalized variant."""
    if not 0.0 < alpha < 2.0:
        raise DomainError(f"limit process needs alpha in (0, 2), got {alpha!r}")

    def build(g: Grid, rng: np.random.Generator, t_star: float) -> Path:
        fbm = FbmPath(g, _draw_fbm_values(alpha, g, rng), alpha, seed)
        return tilde_process_path(alpha, fbm, t_star)

    return _sample_hitting_length(build, grid, seed)
