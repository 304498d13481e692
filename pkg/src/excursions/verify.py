"""Empirical-distribution machinery and the Monte Carlo verification driver.

One master seed drives a run; replicate i always consumes the pure substream
(master, lane, i), so reports are bit-identical whatever the worker count.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .crossings import crossing_bounds
from .errors import CensorBudgetExceeded, DomainError, EmptySampleError
from .kernels import Kernel, c_alpha, delta_u, second_derivative_at_zero
from .limit_law import C2LimitParams, c2_limit_cdf, c2_limit_quantile, c2_limit_sample
from .limit_process import sample_limit_length
from .sampling import Grid, build_sampler, sample_conditional_exceedance
from .streams import substream_seed

__all__ = [
    "Regime",
    "SampleSet",
    "VerificationGrids",
    "VerificationReport",
    "make_sample_set",
    "ecdf",
    "ks_one_sample",
    "ks_two_sample",
    "wasserstein1",
    "simulate_excursion_lengths",
    "draw_limit_lengths",
    "covariance_panel",
    "median_excursion_length",
    "run_verification",
    "c2_grid",
    "heavy_tail_grid",
    "limit_grid",
    "thread_budget",
]

QUANTILE_PROBS = (0.05, 0.25, 0.5, 0.75, 0.95)
# Fraction of censored replicates a run may absorb before it aborts.
CENSOR_BUDGET = 0.005
# KS acceptance thresholds by regime at the default run sizes.
KS_THRESHOLDS = {"C2": 0.05, "HeavyTail": 0.08}
MIN_RUN_SIZE = 100

DEFAULT_STEP_FACTOR = 0.01
C2_WINDOW_FACTOR = 20.0
HT_WINDOW_FACTOR = 50.0
LIMIT_GRID_STEP = 0.01
LIMIT_GRID_HALF_WIDTH = 10.0

# Substream lanes, so path replicates and reference draws never collide.
PATH_LANE = 0
LIMIT_LANE = 1

SCHEMA_VERSION = 1


class Regime(Enum):
    C2 = "C2"
    HEAVY_TAIL = "HeavyTail"


# ---------------------------------------------------------------------------
# sample containers and empirical statistics


@dataclass(frozen=True, eq=False)
class SampleSet:
    values: np.ndarray  # sorted ascending, finite
    n_censored: int = 0
    master_seed: int | None = None


def make_sample_set(values, n_censored: int = 0, master_seed: int | None = None) -> SampleSet:
    arr = np.sort(np.asarray(values, dtype=float))
    if arr.size and not np.all(np.isfinite(arr)):
        raise DomainError("sample values must be finite; censored draws are excluded, not imputed")
    return SampleSet(arr, int(n_censored), master_seed)


def ecdf(s: SampleSet, x: float) -> float:
    """Fraction of sample values <= x (right-continuous)."""
    if s.values.size < 1:
        raise EmptySampleError("ecdf needs at least one sample value")
    return float(np.searchsorted(s.values, x, side="right")) / s.values.size


def _kolmogorov_pvalue(stat: float, n_eff: float) -> float:
    return float(special.kolmogorov(math.sqrt(n_eff) * stat))


def ks_one_sample(s: SampleSet, cdf: Callable[[float], float]) -> tuple[float, float]:
    """Two-sided KS statistic against a continuous reference CDF, with the
    asymptotic Kolmogorov p-value at sqrt(n) * D (meaningful for n >= 8)."""
    n = s.values.size
    if n < 1:
        raise EmptySampleError("ks_one_sample needs a non-empty sample")
    f = np.array([cdf(float(x)) for x in s.values], dtype=float)
    i = np.arange(1, n + 1, dtype=float)
    d_plus = float(np.max(i / n - f))
    d_minus = float(np.max(f - (i - 1.0) / n))
    stat = max(d_plus, d_minus, 0.0)
    return stat, _kolmogorov_pvalue(stat, n)


def ks_two_sample(a: SampleSet, b: SampleSet) -> tuple[float, float]:
    """Two-sided two-sample KS via merged ECDFs; p-value at the effective size
    n_a * n_b / (n_a + n_b)."""
    na, nb = a.values.size, b.values.size
    if na < 1 or nb < 1:
        raise EmptySampleError("ks_two_sample needs two non-empty samples")
    pooled = np.concatenate([a.values, b.values])
    fa = np.searchsorted(a.values, pooled, side="right") / na
    fb = np.searchsorted(b.values, pooled, side="right") / nb
    stat = float(np.max(np.abs(fa - fb)))
    n_eff = na * nb / (na + nb)
    return stat, _kolmogorov_pvalue(stat, n_eff)


def wasserstein1(a: SampleSet, b: SampleSet) -> float:
    """Mean absolute difference of order statistics.

    For unequal sizes both samples are resampled onto the common quantile grid
    (i + 1/2)/m, m = max(n_a, n_b), with the inverted-CDF (order statistic)
    rule; for equal sizes this reduces to the plain sorted-difference mean.
    """
    na, nb = a.values.size, b.values.size
    if na < 1 or nb < 1:
        raise EmptySampleError("wasserstein1 needs two non-empty samples")
    if na == nb:
        return float(np.mean(np.abs(a.values - b.values)))
    m = max(na, nb)
    q = (np.arange(m) + 0.5) / m
    qa = np.quantile(a.values, q, method="inverted_cdf")
    qb = np.quantile(b.values, q, method="inverted_cdf")
    return float(np.mean(np.abs(qa - qb)))


# ---------------------------------------------------------------------------
# replicate execution


def thread_budget(max_workers: int | None = None) -> int:
    """Worker count: explicit argument, else EXCURSION_THREADS, else CPU count."""
    if max_workers is not None:
        return max(1, int(max_workers))
    env = os.environ.get("EXCURSION_THREADS")
    if env:
        return max(1, int(env))
    return min(os.cpu_count() or 1, 8)


def _map_replicates(fn, n: int, workers: int) -> list:
    if workers <= 1:
        return [fn(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n)))


def simulate_excursion_lengths(
    kernel: Kernel,
    u: float,
    grid: Grid,
    n: int,
    master_seed: int,
    *,
    lane: int = PATH_LANE,
    max_workers: int | None = None,
) -> tuple[np.ndarray, int]:
    """Unscaled excursion lengths of n exactly conditioned paths.

    Censored replicates (no crossing inside the window) are dropped and
    counted, never imputed.  Returns (lengths, n_censored).
    """
    plan = build_sampler(kernel, grid)

    def one(i: int):
        path = sample_conditional_exceedance(plan, u, substream_seed(master_seed, lane, i))
        res = crossing_bounds(path, u)
        if res.censored_left or res.censored_right:
            return None
        return res.length

    out = _map_replicates(one, n, thread_budget(max_workers))
    lengths = np.array([v for v in out if v is not None], dtype=float)
    return lengths, n - lengths.size


def draw_limit_lengths(
    alpha: float,
    r0: float,
    grid: Grid,
    n: int,
    master_seed: int,
    *,
    lane: int = LIMIT_LANE,
    max_workers: int | None = None,
) -> tuple[np.ndarray, int]:
    """n draws of the heavy-tail limit interval length; censored draws dropped
    and counted."""

    def one(j: int):
        s = sample_limit_length(alpha, r0, grid, substream_seed(master_seed, lane, j))
        return None if s.censored else s.length

    out = _map_replicates(one, n, thread_budget(max_workers))
    lengths = np.array([v for v in out if v is not None], dtype=float)
    return lengths, n - lengths.size


def median_excursion_length(
    kernel: Kernel,
    u: float,
    grid: Grid,
    n: int,
    master_seed: int,
    *,
    max_workers: int | None = None,
) -> float:
    lengths, _ = simulate_excursion_lengths(
        kernel, u, grid, n, master_seed, max_workers=max_workers
    )
    if lengths.size < 1:
        raise EmptySampleError("all replicates were censored")
    return float(np.median(lengths))


def covariance_panel(
    kernel: Kernel,
    u: float,
    pairs: Sequence[tuple[float, float]],
    n: int,
    master_seed: int,
    grid: Grid | None = None,
    *,
    max_workers: int | None = None,
) -> list[dict]:
    """Empirical covariance of the scaled conditional residual u * Z_t at
    pair times (s, t) in delta_u units, against the fBm target
    c_alpha * (|s|^a + |t|^a - |s-t|^a).

    Z_t = X_t - (R(t)/R(0)) * X_0 on the conditioned path; the panel times must
    land on grid points.
    """
    d = delta_u(kernel, u)
    if grid is None:
        grid = heavy_tail_grid(kernel, u)
    plan = build_sampler(kernel, grid)
    times = grid.times()
    profile = kernel.value(times) / kernel.r0
    origin = grid.origin_index

    panel_times = sorted({float(v) for pair in pairs for v in pair})
    indices = {}
    for s in panel_times:
        offset = s * d / grid.step
        idx = round(offset)
        if abs(offset - idx) > 1e-6:
            raise DomainError(f"panel time {s} * delta_u does not land on the grid")
        indices[s] = origin + int(idx)
        if not 0 <= indices[s] < grid.n:
            raise DomainError(f"panel time {s} * delta_u lies outside the window")

    cols = [indices[s] for s in panel_times]

    def one(i: int):
        path = sample_conditional_exceedance(plan, u, substream_seed(master_seed, PATH_LANE, i))
        z = path.values[cols] - profile[cols] * path.values[origin]
        return u * z

    rows = np.array(_map_replicates(one, n, thread_budget(max_workers)))
    col_of = {s: k for k, s in enumerate(panel_times)}
    c = c_alpha(kernel.alpha)
    a = kernel.alpha

    out = []
    for s, t in pairs:
        xs = rows[:, col_of[float(s)]]
        ys = rows[:, col_of[float(t)]]
        cov = float(np.cov(xs, ys, ddof=1)[0, 1])
        var_x = float(np.var(xs, ddof=1))
        var_y = float(np.var(ys, ddof=1))
        se = math.sqrt((var_x * var_y + cov * cov) / n)
        target = c * (abs(s) ** a + abs(t) ** a - abs(s - t) ** a)
        out.append(
            {"s": float(s), "t": float(t), "empirical": cov, "target": target, "se": se, "n": n}
        )
    return out


# ---------------------------------------------------------------------------
# verification driver


def c2_grid(u: float, step_factor: float = DEFAULT_STEP_FACTOR, window_factor: float = C2_WINDOW_FACTOR) -> Grid:
    """Smooth-regime grid: resolution and window shrink like 1/u."""
    return Grid(step=step_factor / u, half_width=window_factor / u)


def heavy_tail_grid(
    kernel: Kernel,
    u: float,
    step_factor: float = DEFAULT_STEP_FACTOR,
    window_factor: float = HT_WINDOW_FACTOR,
) -> Grid:
    """Heavy-tail grid in units of the excursion scale delta_u."""
    d = delta_u(kernel, u)
    return Grid(step=step_factor * d, half_width=window_factor * d)


def limit_grid(step: float = LIMIT_GRID_STEP, half_width: float = LIMIT_GRID_HALF_WIDTH) -> Grid:
    return Grid(step=step, half_width=half_width)


@dataclass(frozen=True)
class VerificationGrids:
    path: Grid
    limit: Grid | None = None  # heavy-tail runs only


@dataclass
class VerificationReport:
    regime: str
    ks_stat: float
    ks_pvalue: float
    wasserstein1: float
    quantiles: list[dict]
    n: int
    n_censored: int
    ks_threshold: float
    passed: bool
    config: dict
    runtime_seconds: float
    delta_u: float | None = None
    n_censored_limit: int | None = None
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        out = {
            "schema_version": self.schema_version,
            "regime": self.regime,
            "ks_stat": self.ks_stat,
            "ks_pvalue": self.ks_pvalue,
            "wasserstein1": self.wasserstein1,
            "quantiles": self.quantiles,
            "n": self.n,
            "n_censored": self.n_censored,
            "ks_threshold": self.ks_threshold,
            "passed": self.passed,
            "config": self.config,
            "runtime_seconds": self.runtime_seconds,
        }
        if self.delta_u is not None:
            out["delta_u"] = self.delta_u
        if self.n_censored_limit is not None:
            out["n_censored_limit"] = self.n_censored_limit
        return out


def _check_censor_budget(n_censored: int, n: int, what: str) -> None:
    rate = n_censored / n
    if rate > CENSOR_BUDGET:
        raise CensorBudgetExceeded(
            f"{what}: censored {n_censored}/{n} replicates "
            f"({rate:.2%} > budget {CENSOR_BUDGET:.2%}); widen the window"
        )


def _grid_echo(grid: Grid) -> dict:
    return {"step": grid.step, "half_width": grid.half_width, "points": grid.n}


def run_verification(
    regime,
    kernel: Kernel,
    u: float,
    grids: VerificationGrids,
    n: int,
    master_seed: int,
    *,
    ks_threshold: float | None = None,
    max_workers: int | None = None,
    extra_config: dict | None = None,
) -> VerificationReport:
    """Simulate n conditioned paths, scale the excursion lengths, and compare
    them to the regime's reference law.

    C2: lengths scaled by u, one-sample KS against the closed limit CDF.
    HeavyTail: lengths scaled by 1/delta_u, two-sample KS against n draws of
    the limit interval.  Censor rates above CENSOR_BUDGET abort the run.
    """
    t0 = time.perf_counter()
    regime = Regime(regime)
    if n < MIN_RUN_SIZE:
        raise DomainError(f"verification needs n >= {MIN_RUN_SIZE}, got {n}")
    if not u > 0.0:
        raise DomainError(f"threshold u must be positive, got {u!r}")

    config = {
        "regime": regime.value,
        "alpha": kernel.alpha,
        "r0": kernel.r0,
        "u": u,
        "n": n,
        "master_seed": int(master_seed),
        "path_grid": _grid_echo(grids.path),
        "censor_budget": CENSOR_BUDGET,
    }
    if extra_config:
        config.update(extra_config)

    if regime is Regime.C2:
        if kernel.alpha != 2.0:
            raise DomainError("C2 verification requires alpha = 2")
        threshold = KS_THRESHOLDS["C2"] if ks_threshold is None else ks_threshold
        lengths, n_cens = simulate_excursion_lengths(
            kernel, u, grids.path, n, master_seed, max_workers=max_workers
        )
        _check_censor_budget(n_cens, n, "path simulation")
        sample = make_sample_set(u * lengths, n_cens, master_seed)
        params = C2LimitParams(kernel.r0, second_derivative_at_zero(kernel))
        stat, pvalue = ks_one_sample(sample, lambda x: c2_limit_cdf(params, x))
        reference = make_sample_set(
            c2_limit_sample(params, substream_seed(master_seed, LIMIT_LANE, 0), size=sample.values.size)
        )
        w1 = wasserstein1(sample, reference)
        quantiles = [
            {
                "p": p,
                "empirical": float(np.quantile(sample.values, p)),
                "reference": c2_limit_quantile(params, p),
            }
            for p in QUANTILE_PROBS
        ]
        d_u = None
        n_cens_limit = None
    else:
        if not kernel.alpha < 2.0:
            raise DomainError("heavy-tail verification requires alpha < 2")
        if grids.limit is None:
            raise DomainError("heavy-tail verification needs a limit grid")
        threshold = KS_THRESHOLDS["HeavyTail"] if ks_threshold is None else ks_threshold
        d_u = delta_u(kernel, u)
        lengths, n_cens = simulate_excursion_lengths(
            kernel, u, grids.path, n, master_seed, max_workers=max_workers
        )
        _check_censor_budget(n_cens, n, "path simulation")
        limit_lengths, n_cens_limit = draw_limit_lengths(
            kernel.alpha, kernel.r0, grids.limit, n, master_seed, max_workers=max_workers
        )
        _check_censor_budget(n_cens_limit, n, "limit-process draws")
        sample = make_sample_set(lengths / d_u, n_cens, master_seed)
        reference = make_sample_set(limit_lengths, n_cens_limit, master_seed)
        stat, pvalue = ks_two_sample(sample, reference)
        w1 = wasserstein1(sample, reference)
        quantiles = [
            {
                "p": p,
                "empirical": float(np.quantile(sample.values, p)),
                "reference": float(np.quantile(reference.values, p)),
            }
            for p in QUANTILE_PROBS
        ]
        config["limit_grid"] = _grid_echo(grids.limit)

    return VerificationReport(
        regime=regime.value,
        ks_stat=float(stat),
        ks_pvalue=float(pvalue),
        wasserstein1=float(w1),
        quantiles=quantiles,
        n=n,
        n_censored=int(n_cens),
        ks_threshold=float(threshold),
        passed=bool(stat <= threshold),
        config=config,
        runtime_seconds=time.perf_counter() - t0,
        delta_u=d_u,
        n_censored_limit=n_cens_limit,
    )
