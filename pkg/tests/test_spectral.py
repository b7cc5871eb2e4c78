"""Principal eigenpair, survival curves, Laplace values and spectral checks."""

from __future__ import annotations

import math

import numpy as np
import pytest

import levyexit as le
from levyexit.spectral import FIT_WINDOW, _fit_log_slope

from conftest import build_problem, interior_index

EIG_BM = 8.0 / math.pi**2  # principal eigenvalue of B, Brownian A=1 on (-1,1)
C1_BM = 4.0 / math.pi


def brownian_survival_series(t: float, x: float = 0.0, terms: int = 60) -> float:
    """P(T > t) for Brownian motion (A = 1) on (-1, 1): classic sine series."""
    total = 0.0
    for k in range(1, 2 * terms, 2):
        coef = 4.0 / (math.pi * k) * math.sin(k * math.pi * (x + 1.0) / 2.0)
        total += coef * math.exp(-(k**2) * math.pi**2 * t / 8.0)
    return total


# ---------------------------------------------------------------------------
# Principal eigenpair
# ---------------------------------------------------------------------------


def test_principal_eigenpair_brownian(brownian200):
    _, ops = brownian200
    lam1, g1, h1 = le.principal_eigenpair(ops.B)
    assert lam1 == pytest.approx(EIG_BM, rel=1e-3)
    assert np.all(g1 > 0.0)
    assert np.all(h1 > 0.0)


def test_eigen_result_fields(brownian200_eigen):
    result, sector = brownian200_eigen
    assert result.lambda1 == pytest.approx(EIG_BM, rel=1e-3)
    assert result.c1 == pytest.approx(C1_BM, rel=1e-3)
    assert result.leading_eigenvalues[0][0].real == pytest.approx(result.lambda1)
    assert isinstance(sector.passed, bool) and sector.passed


def test_brownian_subdominant_eigenvalues(brownian200_eigen):
    """B eigenvalues for the half-Laplacian are 8/(k^2 pi^2)."""
    result, _ = brownian200_eigen
    values = sorted((z.real for z, _ in result.leading_eigenvalues), reverse=True)
    for k, val in enumerate(values[:4], start=1):
        assert val == pytest.approx(8.0 / (k**2 * math.pi**2), rel=2e-3)


def test_symmetric_spectra_are_real(brownian200_eigen, cauchy200_eigen):
    for result, _ in (brownian200_eigen, cauchy200_eigen):
        for z, _mult in result.leading_eigenvalues:
            assert abs(z.imag) <= 1e-8 * result.lambda1


def test_disk_margin_nonnegative_for_type_ii(brownian200_eigen, cauchy200_eigen):
    """All leading eigenvalues sit inside the disk |z - l1/2| <= l1/2."""
    for result, _ in (brownian200_eigen, cauchy200_eigen):
        margin = le.disk_margin([z for z, _ in result.leading_eigenvalues], result.lambda1)
        assert margin >= -1e-6


def test_disk_margin_detects_outside_value():
    assert le.disk_margin([complex(-0.1, 0.0)], 1.0) < 0.0
    assert le.disk_margin([complex(0.5, 0.51)], 1.0) < 0.0
    assert le.disk_margin([complex(0.5, 0.0)], 1.0) > 0.0


def test_sectoriality_check_symmetric(brownian200):
    grid, ops = brownian200
    report = le.sectoriality_check(ops.S_mid, trials=64, seed=3)
    assert report.min_real > 0.0
    assert report.max_angle < math.pi / 2
    assert report.passed


# ---------------------------------------------------------------------------
# Survival curve
# ---------------------------------------------------------------------------


def test_survival_curve_matches_series_oracle(brownian200):
    grid, ops = brownian200
    t_grid = np.array([0.0, 0.25, 0.5, 1.0, 2.0, 3.0])
    curve = le.survival_curve(ops.L, 0.0, t_grid, grid=grid)
    assert curve.values[0] == pytest.approx(1.0, abs=1e-9)
    for t, p in zip(curve.times[1:], curve.values[1:]):
        assert p == pytest.approx(brownian_survival_series(t), rel=1e-3)


def test_survival_curve_off_center(brownian200):
    grid, ops = brownian200
    curve = le.survival_curve(ops.L, 0.5, np.array([0.0, 0.5, 1.0]), grid=grid)
    for t, p in zip(curve.times[1:], curve.values[1:]):
        assert p == pytest.approx(brownian_survival_series(t, x=0.5), rel=2e-3)


def test_survival_curve_monotone_and_bounded(cauchy200):
    grid, ops = cauchy200
    t_grid = np.linspace(0.0, 10.0, 101)
    curve = le.survival_curve(ops.L, 0.0, t_grid, grid=grid)
    assert np.all(curve.values <= 1.0 + 1e-12)
    assert np.all(curve.values >= -1e-12)
    assert np.all(np.diff(curve.values) <= 1e-12)


def test_survival_curve_fitted_rate(brownian200):
    grid, ops = brownian200
    t_grid = np.linspace(0.0, 12.0, 241)
    curve = le.survival_curve(ops.L, 0.0, t_grid, grid=grid)
    assert curve.fitted_rate == pytest.approx(math.pi**2 / 8.0, rel=5e-3)
    assert curve.rate_stderr < 1e-6  # matrix curve is exactly exponential late


def test_survival_curve_rejects_boundary_start(brownian200):
    grid, ops = brownian200
    with pytest.raises(ValueError):
        le.survival_curve(ops.L, 1.0, np.array([0.0, 1.0]), grid=grid)


# ---------------------------------------------------------------------------
# Laplace transform
# ---------------------------------------------------------------------------


def test_laplace_zero_is_exact_row_sum(brownian200):
    grid, ops = brownian200
    idx = interior_index(grid, 0.0)
    val = le.laplace_survival(ops.B, 0.0, 0.0, grid=grid)
    assert val == float(np.sum(ops.B[idx, :]))  # exact, by construction


def test_laplace_matches_brownian_closed_form(brownian200):
    """int e^{-st} p(t) dt = (1 - sech(sqrt(2s)))/s for A = 1 on (-1, 1)."""
    grid, ops = brownian200
    for s in (0.5, 1.0, 2.0):
        val = le.laplace_survival(ops.B, 0.0, s, grid=grid)
        closed = (1.0 - 1.0 / math.cosh(math.sqrt(2.0 * s))) / s
        assert val == pytest.approx(closed, rel=1e-3)


def test_laplace_rejects_negative_s(brownian200):
    grid, ops = brownian200
    with pytest.raises(ValueError):
        le.laplace_survival(ops.B, 0.0, -0.5, grid=grid)


def test_laplace_rejects_boundary_start(brownian200):
    grid, ops = brownian200
    with pytest.raises(ValueError):
        le.laplace_survival(ops.B, -1.0, 1.0, grid=grid)


# ---------------------------------------------------------------------------
# Asymptotics
# ---------------------------------------------------------------------------


def test_asymptotics_center(brownian200, brownian200_eigen):
    grid, _ = brownian200
    result, _ = brownian200_eigen
    rate, coef = le.asymptotics(result, 0.0, grid=grid)
    assert rate == pytest.approx(math.pi**2 / 8.0, rel=1e-3)
    assert coef == pytest.approx(C1_BM, rel=1e-3)


def test_asymptotics_coefficient_vanishes_at_boundary(brownian200, brownian200_eigen):
    grid, _ = brownian200
    result, _ = brownian200_eigen
    _, coef = le.asymptotics(result, 1.0, grid=grid)
    assert coef == 0.0


def test_asymptotics_tail_matches_curve(brownian200, brownian200_eigen):
    """c1 * exp(-t/lambda1) reproduces the matrix curve deep in the tail."""
    grid, ops = brownian200
    result, _ = brownian200_eigen
    rate, coef = le.asymptotics(result, 0.3, grid=grid)
    t_grid = np.array([0.0, 4.0, 6.0])
    curve = le.survival_curve(ops.L, 0.3, t_grid, grid=grid)
    for t, p in zip(curve.times[1:], curve.values[1:]):
        assert p == pytest.approx(coef * math.exp(-rate * t), rel=1e-6)


# ---------------------------------------------------------------------------
# Log-slope fitting
# ---------------------------------------------------------------------------


def test_fit_log_slope_exact_exponential():
    t = np.linspace(0.0, 20.0, 201)
    p = 1.3 * np.exp(-2.0 * t)
    rate, stderr = _fit_log_slope(t, p)
    assert rate == pytest.approx(2.0, rel=1e-12)
    assert stderr <= 1e-10


def test_fit_log_slope_window_excludes_early_transient():
    t = np.linspace(0.0, 20.0, 401)
    p = 0.8 * np.exp(-1.5 * t) + 0.2 * np.exp(-8.0 * t)  # transient dies out
    rate, _ = _fit_log_slope(t, p, window=FIT_WINDOW)
    assert rate == pytest.approx(1.5, rel=1e-3)


def test_fit_log_slope_requires_five_points():
    t = np.linspace(0.0, 1.0, 6)
    p = np.full(6, 0.5)  # everything outside the window
    rate, stderr = _fit_log_slope(t, p)
    assert math.isnan(rate) and math.isnan(stderr)


def test_fit_log_slope_weighted_matches_unweighted_on_clean_data():
    t = np.linspace(0.0, 15.0, 151)
    p = np.exp(-1.2 * t)
    var_log = np.full_like(t, 1e-6)
    rate, stderr = _fit_log_slope(t, p, var_log)
    assert rate == pytest.approx(1.2, rel=1e-6)
    assert stderr > 0.0


# ---------------------------------------------------------------------------
# Full summary on a fresh problem
# ---------------------------------------------------------------------------


def test_spectral_summary_jump_diffusion(unit_domain):
    """A mixed triplet runs the whole spectral path and stays consistent."""
    triplet = le.LevyTriplet(A=0.5, gamma=0.1, measure=le.GammaJumps(shape=1.0, rate=3.0))
    grid, ops = build_problem(triplet, unit_domain, 80)
    result, sector = le.spectral_summary(ops.B, ops.S_mid, grid, 0.2)
    assert result.lambda1 > 0.0
    assert result.c1 > 0.0
    margin = le.disk_margin([z for z, _ in result.leading_eigenvalues], result.lambda1)
    assert margin >= -1e-6
    assert sector.max_angle < math.pi / 2
    # rate from the matrix curve agrees with 1/lambda1
    t_grid = np.linspace(0.0, 12.0 * result.lambda1, 241)
    curve = le.survival_curve(ops.L, 0.2, t_grid, grid=grid)
    assert curve.fitted_rate == pytest.approx(1.0 / result.lambda1, rel=5e-3)
