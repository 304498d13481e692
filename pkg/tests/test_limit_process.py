"""Two-sided fractional Brownian motion and the heavy-tail limit interval."""

import math

import numpy as np
import pytest

from excursions import (
    DomainError,
    FbmPath,
    Grid,
    c_alpha,
    fbm_two_sided,
    limit_hitting_interval,
    limit_process_path,
    sample_limit_length,
    sample_tilde_length,
    tilde_process_path,
)
from excursions.limit_process import MAX_WINDOW_EXTENSIONS, _fbm_cov, _fbm_factor
from excursions.sampling import FACTOR_TOL
from excursions.streams import generator, substream_seed


def _zero_fbm(alpha, grid):
    return FbmPath(grid=grid, values=np.zeros(grid.n), alpha=alpha, seed=0)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_fbm_factor_reconstructs_covariance(alpha):
    g = Grid(0.25, 1.5)
    factor, jitter, gap = _fbm_factor(alpha, g)
    times = g.times()
    t = np.delete(times, g.origin_index)  # origin is pinned to zero, not sampled
    target = _fbm_cov(t, alpha)
    assert gap <= FACTOR_TOL
    np.testing.assert_allclose(factor @ factor.T, target, atol=1e-8)
    # reconstructed variance along the diagonal is |t|^alpha
    np.testing.assert_allclose(np.diag(factor @ factor.T), np.abs(t) ** alpha, atol=1e-8)
    assert jitter <= 1e-10


def test_fbm_cov_hand_values():
    # cov(s, t) = (|s|^a + |t|^a - |s-t|^a) / 2 at a = 1: min for same signs
    t = np.array([-1.0, 0.5, 2.0])
    cov = _fbm_cov(t, 1.0)
    assert cov[1, 2] == pytest.approx(0.5, abs=1e-14)  # min(0.5, 2)
    assert cov[0, 1] == pytest.approx(0.0, abs=1e-14)  # opposite signs
    assert cov[0, 0] == pytest.approx(1.0, abs=1e-14)


def test_fbm_two_sided_pins_origin_and_is_deterministic():
    g = Grid(0.1, 1.0)
    a = fbm_two_sided(1.0, g, 314)
    b = fbm_two_sided(1.0, g, 314)
    np.testing.assert_array_equal(a.values, b.values)
    assert a.values[a.origin_index] == 0.0
    assert a.values.shape == (g.n,)
    assert a.alpha == 1.0


def test_fbm_empirical_variance_scales_as_hurst_law():
    g = Grid(0.5, 2.0)
    n = 3000
    vals = np.vstack([fbm_two_sided(0.5, g, substream_seed(11, 0, i)).values for i in range(n)])
    t = g.times()
    for idx in (0, g.n - 1, g.origin_index + 2):
        if idx == g.origin_index:
            continue
        target = abs(t[idx]) ** 0.5
        var = vals[:, idx].var(ddof=1)
        se = target * math.sqrt(2.0 / (n - 1))  # chi-square spread of a variance
        assert abs(var - target) <= 4.0 * se


def test_limit_process_deterministic_drift_geometry():
    # with the noise switched off, Y_t = r0 t* - (c/r0) |t|^alpha for t != 0
    g = Grid(0.01, 10.0)
    fbm = _zero_fbm(1.0, g)
    y = limit_process_path(1.0, 1.0, fbm, t_star=2.0)
    assert y.values[g.origin_index] == 2.0  # Y(0) = r0 * t*, exactly
    res = limit_hitting_interval(y)
    root = 2.0 / c_alpha(1.0)  # solves t* = c |t|
    assert res.tau_star_plus == pytest.approx(root, abs=1e-9)
    assert res.tau_star_minus == pytest.approx(-root, abs=1e-9)
    assert res.length == pytest.approx(2.0 * root, abs=1e-9)
    assert not res.censored and res.window_extensions == 0


def test_tilde_process_deterministic_drift_geometry():
    g = Grid(0.01, 10.0)
    fbm = _zero_fbm(1.0, g)
    y = tilde_process_path(1.0, fbm, t_star=0.5)
    assert y.values[g.origin_index] == 0.5
    res = limit_hitting_interval(y)
    assert res.tau_star_plus == pytest.approx(0.5, abs=1e-12)
    assert res.tau_star_minus == pytest.approx(-0.5, abs=1e-12)


def test_limit_process_mean_drift():
    # averaged over unit-exponential t* and fBm noise, E Y_t = r0 - (c/r0)|t|^a
    g = Grid(0.25, 1.0)
    col = g.origin_index + 4  # t = 1
    n = 2000
    vals = np.empty(n)
    for i in range(n):
        rng = generator(substream_seed(17, 0, i))
        t_star = float(rng.standard_exponential())
        fbm = fbm_two_sided(1.0, g, substream_seed(17, 1, i))
        vals[i] = limit_process_path(1.0, 1.0, fbm, t_star).values[col]
    target = 1.0 - c_alpha(1.0)
    se = vals.std(ddof=1) / math.sqrt(n)
    assert abs(vals.mean() - target) <= 3.0 * se


def test_tilde_and_limit_scaling_identity_without_noise():
    # tilde lengths equal c_alpha^(1/alpha) times limit lengths, realization-wise
    alpha, t_star = 1.0, 2.0
    c = c_alpha(alpha)
    scale = c ** (1.0 / alpha)
    lim = limit_hitting_interval(
        limit_process_path(alpha, 1.0, _zero_fbm(alpha, Grid(0.01, 10.0)), t_star)
    )
    til = limit_hitting_interval(
        tilde_process_path(alpha, _zero_fbm(alpha, Grid(0.01 * scale, 10.0 * scale)), t_star)
    )
    assert til.length == pytest.approx(scale * lim.length, abs=1e-9)


def test_limit_process_validation():
    g = Grid(0.1, 1.0)
    fbm = _zero_fbm(0.5, g)
    with pytest.raises(DomainError):
        limit_process_path(1.0, 1.0, fbm, 1.0)  # alpha mismatch with the fbm draw
    with pytest.raises(DomainError):
        limit_process_path(0.5, -1.0, fbm, 1.0)
    with pytest.raises(DomainError):
        limit_process_path(0.5, 1.0, fbm, 0.0)
    with pytest.raises(DomainError):
        tilde_process_path(0.5, fbm, -2.0)


def test_sample_limit_length_deterministic_and_positive():
    g = Grid(0.02, 8.0)
    a = sample_limit_length(1.0, 1.0, g, 55)
    b = sample_limit_length(1.0, 1.0, g, 55)
    assert not a.censored
    assert a == b
    for j in range(50):
        s = sample_limit_length(1.0, 1.0, g, substream_seed(56, 1, j))
        assert s.window_extensions <= MAX_WINDOW_EXTENSIONS
        if s.censored:
            assert math.isnan(s.length)
        else:
            assert s.tau_star_minus < 0.0 < s.tau_star_plus
            assert s.length == pytest.approx(s.tau_star_plus - s.tau_star_minus, abs=1e-12)


def test_sample_tilde_length_deterministic():
    g = Grid(0.05, 10.0)
    a = sample_tilde_length(0.75, g, 77)
    b = sample_tilde_length(0.75, g, 77)
    assert not a.censored
    assert a == b


def test_window_extension_recovers_wide_excursions():
    # a window this tight cannot contain typical alpha = 0.5 intervals at first try
    tiny = Grid(0.05, 0.2)
    extended = censored = 0
    for j in range(200):
        s = sample_limit_length(0.5, 1.0, tiny, substream_seed(99, 1, j))
        extended += s.window_extensions > 0
        censored += s.censored
        if not s.censored:
            assert np.isfinite(s.length)
    assert extended >= 50  # the doubling machinery actually runs
    assert censored <= 10


def test_limit_length_rejects_smooth_exponent():
    with pytest.raises(DomainError):
        sample_limit_length(2.0, 1.0, Grid(0.05, 5.0), 1)
