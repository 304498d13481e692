"""Limit distribution of scaled excursion lengths in the smooth regime.

The scaled length converges to s * sqrt(Z**2 + 2*T) with Z standard normal,
T unit exponential, independent, and s = 2 * r0 / sqrt(-r2) built from the
covariance value and curvature at zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError
from .streams import as_generator

__all__ = ["C2LimitParams", "c2_limit_cdf", "c2_limit_sample", "c2_limit_quantile"]

# Quadrature error budget, far below any Monte Carlo noise this CDF judges.
_QUAD_TOL = 1e-12
# The standard normal density is numerically zero beyond this point.
_Z_SUPPORT = 40.0
# Quantile inversion tolerances: on the CDF value and on the abscissa.
_QUANTILE_F_TOL = 1e-8
_QUANTILE_X_TOL = 1e-9


@dataclass(frozen=True)
class C2LimitParams:
    r0: float
    r2: float

    def __post_init__(self):
        if not self.r0 > 0.0:
            raise DomainError(f"r0 must be positive, got {self.r0!r}")
        if not self.r2 < 0.0:
            raise DomainError(f"r2 must be negative, got {self.r2!r}")

    @property
    def scale(self) -> float:
        return 2.0 * self.r0 / math.sqrt(-self.r2)


def _integrand(z: float, a: float) -> float:
    # phi(z) * P(2T <= a^2 - z^2) = phi(z) * (1 - exp(-(a^2 - z^2)/2))
    return (
        math.exp(-0.5 * z * z)
        / math.sqrt(2.0 * math.pi)
        * -math.expm1(-0.5 * (a * a - z * z))
    )


def c2_limit_cdf(params: C2LimitParams, x: float) -> float:
    """P(s * sqrt(Z**2 + 2T) <= x), by adaptive quadrature over the normal coordinate.

    Conditioning on Z = z, the event is T <= (a**2 - z**2)/2 with a = x/s, so the
    CDF is the integral of the exponential CDF against phi(z) over |z| <= a.
    Absolute quadrature error is held below 1e-10.
    """
    a = x / params.scale
    if a <= 0.0:
        return 0.0
    # beyond _Z_SUPPORT the integrand underflows; clipping loses < 1e-300 mass
    hi = min(a, _Z_SUPPORT)
    val, _ = integrate.quad(
        _integrand, -hi, hi, args=(a,), epsabs=_QUAD_TOL, epsrel=_QUAD_TOL, limit=200
    )
    return min(max(float(val), 0.0), 1.0)


def c2_limit_sample(params: C2LimitParams, seed, size: int | None = None):
    """Direct draws of s * sqrt(Z**2 + 2T); scalar by default, vectorized via size."""
    rng = as_generator(seed)
    z = rng.standard_normal(size)
    t = rng.standard_exponential(size)
    out = params.scale * np.sqrt(z * z + 2.0 * t)
    return float(out) if size is None else out


def c2_limit_quantile(params: C2LimitParams, p: float) -> float:
    """Bisection inverse of the CDF; stops once |F(x) - p| <= 1e-8 and the
    bracket is tighter than 1e-9 * scale."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"quantile level must lie in (0, 1), got {p!r}")
    s = params.scale
    lo, hi = 0.0, s
    while c2_limit_cdf(params, hi) < p:
        hi *= 2.0
    x_tol = _QUANTILE_X_TOL * s
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f = c2_limit_cdf(params, mid)
        if abs(f - p) <= _QUANTILE_F_TOL and hi - lo <= x_tol:
            return mid
        if f < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
