"""Path sampling, exit statistics and decay-rate fitting."""

from __future__ import annotations

import math

import numpy as np
import pytest

import levyexit as le
from levyexit.montecarlo import Z95, ConfigurationError

UNIT = le.Domain(((-1.0, 1.0),))
BM = le.LevyTriplet(A=1.0, gamma=0.0, measure=le.NoJumps())
CAUCHY = le.LevyTriplet(A=0.0, gamma=0.0, measure=le.StableJumps(alpha=1.0))
POISSON = le.LevyTriplet(A=0.0, gamma=0.0, measure=le.PoissonJumps(rate=1.0))

# Discrete boundary checking misses excursions past the boundary between
# steps, biasing diffusion exit times upward by O(sqrt(A dt)).
BM_DT_BIAS = lambda dt: 1.5 * math.sqrt(dt)


# ---------------------------------------------------------------------------
# Scheme construction guards
# ---------------------------------------------------------------------------


def test_scheme_rejects_bad_parameters():
    with pytest.raises(ValueError):
        le.PathScheme(BM, dt=0.0, seed=1)
    with pytest.raises(ValueError):
        le.PathScheme(BM, dt=1e-3, seed=-1)
    with pytest.raises(ValueError):
        le.PathScheme(BM, dt=1e-3, seed=2**64)
    with pytest.raises(ValueError):
        le.PathScheme(BM, dt=1e-3, seed=1, small_jump_cutoff=1.5)
    with pytest.raises(ValueError):
        le.PathScheme(BM, dt=1e-3, seed=1, method="magic")


def test_scheme_rejects_skewed_alpha_one_exact():
    skewed = le.LevyTriplet(A=0.0, gamma=0.0, measure=le.StableJumps(alpha=1.0, skew=0.5))
    with pytest.raises(ConfigurationError):
        le.PathScheme(skewed, dt=1e-3, seed=1, method="exact")
    # substitution still handles it
    le.PathScheme(skewed, dt=1e-3, seed=1, method="substitution")


def test_scheme_rejects_substitution_for_atoms():
    with pytest.raises(ConfigurationError):
        le.PathScheme(POISSON, dt=1e-3, seed=1, method="substitution")


# ---------------------------------------------------------------------------
# Determinism
# ---------------------------------------------------------------------------


def test_same_seed_reproduces_everything():
    t_grid = np.linspace(0.0, 2.0, 21)
    a = le.estimate_survival(le.PathScheme(BM, dt=1e-3, seed=7), 0.0, UNIT, t_grid, 1000)
    b = le.estimate_survival(le.PathScheme(BM, dt=1e-3, seed=7), 0.0, UNIT, t_grid, 1000)
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.ci_lo, b.ci_lo)
    c = le.estimate_survival(le.PathScheme(BM, dt=1e-3, seed=8), 0.0, UNIT, t_grid, 1000)
    assert not np.array_equal(a.values, c.values)


def test_single_path_exit_is_reproducible():
    scheme = le.PathScheme(BM, dt=1e-3, seed=123)
    t1 = le.simulate_exit(scheme, 0.0, UNIT, horizon=50.0)
    t2 = le.simulate_exit(scheme, 0.0, UNIT, horizon=50.0)
    assert t1 == t2
    assert 0.0 < t1 < 50.0


# ---------------------------------------------------------------------------
# Estimate guards
# ---------------------------------------------------------------------------


def test_estimate_survival_requires_min_paths():
    with pytest.raises(ValueError):
        le.estimate_survival(
            le.PathScheme(BM, dt=1e-3, seed=1), 0.0, UNIT, np.linspace(0, 1, 11), 999
        )


def test_collect_exit_stats_censors_at_horizon():
    scheme = le.PathScheme(BM, dt=1e-3, seed=5)
    stats = le.collect_exit_stats(scheme, 0.0, UNIT, n_paths=200, horizon=0.05)
    assert stats.exit_times.shape == (200,)
    finite = np.isfinite(stats.exit_times)
    assert np.any(~finite)  # nearly everything survives 0.05
    assert np.all(stats.exit_times[finite] <= 0.05 + 1e-12)


# ---------------------------------------------------------------------------
# Brownian oracles
# ---------------------------------------------------------------------------


def test_brownian_mean_exit_time():
    """E T = 1 - x0^2 = 1 from the center, up to the sqrt(dt) step bias."""
    dt = 2.5e-4
    scheme = le.PathScheme(BM, dt=dt, seed=11)
    occ = le.estimate_occupation(scheme, 0.0, UNIT, 4, 4000)
    se = float(np.sqrt(np.sum((occ.ci / Z95) ** 2)))
    assert abs(occ.mean_exit_time - 1.0) <= 3.0 * se + BM_DT_BIAS(dt)


def test_brownian_occupation_green_bins():
    """Expected occupation of [0, 0.5) from x0 = 0 is 3/8 exactly."""
    dt = 2.5e-4
    scheme = le.PathScheme(BM, dt=dt, seed=13)
    edges = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])
    occ = le.estimate_occupation(scheme, 0.0, UNIT, edges, 4000)
    exact = np.array([1.0 / 8.0, 3.0 / 8.0, 3.0 / 8.0, 1.0 / 8.0])
    sigma = occ.ci / Z95
    z = np.abs(occ.occupation - exact) / np.maximum(sigma, 1e-300)
    # allow the step bias on top of 3 standard errors
    assert np.all(np.abs(occ.occupation - exact) <= 3.0 * sigma + BM_DT_BIAS(dt) * exact)


def test_brownian_survival_matches_series():
    """p_hat at a few times vs the sine series, within CI + step bias."""
    dt = 2.5e-4
    scheme = le.PathScheme(BM, dt=dt, seed=17)
    t_grid = np.linspace(0.0, 2.0, 9)
    curve = le.estimate_survival(scheme, 0.0, UNIT, t_grid, 4000)

    def series(t):
        if t == 0.0:
            return 1.0
        total = 0.0
        for k in range(1, 99, 2):
            total += 4.0 / (math.pi * k) * math.sin(k * math.pi / 2.0) * math.exp(
                -(k**2) * math.pi**2 * t / 8.0
            )
        return total

    for j, t in enumerate(curve.times):
        p = series(float(t))
        half = 0.5 * (curve.ci_hi[j] - curve.ci_lo[j])
        slack = 1.5 * half + BM_DT_BIAS(dt) * abs(
            -math.pi**2 / 8.0 * p
        )  # bias shifts time by O(sqrt dt)
        assert abs(curve.values[j] - p) <= slack, f"t={t}: {curve.values[j]} vs {p}"


# ---------------------------------------------------------------------------
# Jump-process oracles
# ---------------------------------------------------------------------------


def test_poisson_exit_is_second_jump():
    """X = N_t on (-0.5, 1.5): exit at the second jump, Gamma(2, 1)."""
    scheme = le.PathScheme(POISSON, dt=1e-2, seed=19)
    domain = le.Domain(((-0.5, 1.5),))
    t_grid = np.linspace(0.0, 1.0, 11)
    curve = le.estimate_survival(scheme, 0.0, domain, t_grid, 4000)
    target = 2.0 / math.e  # P(Gamma(2) > 1) = 2 e^{-1}
    j = -1
    half = 0.5 * (curve.ci_hi[j] - curve.ci_lo[j])
    assert abs(curve.values[j] - target) <= 2.0 * half + 2.0 * 1e-2  # dt granularity


def test_cauchy_mean_exit_time():
    """Mean exit from the center of (-1, 1) is exactly 1 for the Cauchy."""
    scheme = le.PathScheme(CAUCHY, dt=5e-4, seed=23)
    occ = le.estimate_occupation(scheme, 0.0, UNIT, 4, 6000)
    se = float(np.sqrt(np.sum((occ.ci / Z95) ** 2)))
    assert abs(occ.mean_exit_time - 1.0) <= 3.0 * se + 3.0 * 5e-4


def test_substitution_agrees_with_exact_sampler():
    """Replacing small stable jumps by matched Gaussian noise must not move
    the survival curve beyond joint confidence bands."""
    t_grid = np.linspace(0.0, 3.0, 13)
    exact = le.estimate_survival(
        le.PathScheme(CAUCHY, dt=5e-4, seed=29, method="exact"), 0.0, UNIT, t_grid, 3000
    )
    subst = le.estimate_survival(
        le.PathScheme(CAUCHY, dt=5e-4, seed=31, method="substitution", small_jump_cutoff=0.05),
        0.0, UNIT, t_grid, 3000,
    )
    for j in range(1, len(t_grid)):
        half_e = 0.5 * (exact.ci_hi[j] - exact.ci_lo[j])
        half_s = 0.5 * (subst.ci_hi[j] - subst.ci_lo[j])
        joint = math.hypot(half_e, half_s)
        assert abs(exact.values[j] - subst.values[j]) <= 2.0 * joint + 0.05 * 5e-4


# ---------------------------------------------------------------------------
# Rate fitting
# ---------------------------------------------------------------------------


def _synthetic_curve(rate=1.2, c=1.1, n_eff=1e5):
    t = np.linspace(0.0, 14.0 / rate, 201)
    p = np.minimum(c * np.exp(-rate * t), 1.0)
    sd_log = np.sqrt((1.0 - p) / (n_eff * p))
    half = Z95 * sd_log * p
    return le.SurvivalCurve(
        times=t, values=p, x0=0.0, fitted_rate=math.nan, rate_stderr=math.nan,
        ci_lo=p - half, ci_hi=p + half,
    )


def test_fit_decay_rate_recovers_exact_rate():
    curve = _synthetic_curve(rate=1.2)
    rate, stderr = le.fit_decay_rate(curve)
    assert rate == pytest.approx(1.2, rel=1e-9)
    assert 0.0 < stderr < 0.05


def test_fit_decay_rate_stderr_scales_with_paths():
    loose = le.fit_decay_rate(_synthetic_curve(n_eff=1e4))[1]
    tight = le.fit_decay_rate(_synthetic_curve(n_eff=1e6))[1]
    assert tight < loose / 3.0  # ~ 10x fewer paths -> ~ sqrt(10) wider


def test_fit_decay_rate_needs_window_points():
    t = np.linspace(0.0, 1.0, 12)
    p = np.full(12, 0.6)
    curve = le.SurvivalCurve(
        times=t, values=p, x0=0.0, fitted_rate=math.nan, rate_stderr=math.nan,
        ci_lo=p - 0.01, ci_hi=p + 0.01,
    )
    with pytest.raises(ValueError):
        le.fit_decay_rate(curve)


def test_estimated_curve_carries_consistent_fit():
    """fit_decay_rate(curve) reproduces the rate stored on the curve."""
    scheme = le.PathScheme(CAUCHY, dt=1e-3, seed=37)
    t_grid = np.linspace(0.0, 15.0, 151)
    curve = le.estimate_survival(scheme, 0.0, UNIT, t_grid, 3000)
    rate, stderr = le.fit_decay_rate(curve)
    assert rate == pytest.approx(curve.fitted_rate)
    assert stderr == pytest.approx(curve.rate_stderr)
    # and the fit is in the right neighborhood of the true rate ~ 1.1578
    assert abs(rate - 1.1578) <= 4.0 * stderr
