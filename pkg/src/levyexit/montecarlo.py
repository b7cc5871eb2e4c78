"""Path-simulation oracle for exit times, survival curves, and occupation.

Everything the matrix pipeline computes — survival probabilities, decay
rates, quasi-potential row integrals — has a probabilistic counterpart
obtained by simulating the process at step resolution and recording when
paths first leave the domain.  This module provides that independent
estimate: exact increment samplers where the family admits them (Gaussian,
Poisson counts, gamma subordinator, stable via the polar transform) and a
compound-Poisson-plus-Gaussian small-jump substitution for the rest.

Determinism: paths are simulated in fixed-size chunks, chunk ``c`` drawing
from ``default_rng([seed, c])``, and accumulators are reduced in chunk
order — identical (seed, scheme, n_paths, thread count) inputs reproduce
outputs bit for bit regardless of scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.special import gammainc
from scipy.special import gamma as gamma_fn

from .kernels import TailQuadratureError, tail_functions
from .models import (
    AtomMeasure,
    CGMYJumps,
    CompoundPoissonJumps,
    DensityMeasure,
    GammaJumps,
    LevyTriplet,
    NoJumps,
    PoissonJumps,
    StableJumps,
    atoms_of,
    compensator_mean,
    levy_symbol,
)
from .operators import Domain
from .spectral import FIT_WINDOW, SurvivalCurve, _fit_log_slope

__all__ = [
    "ConfigurationError",
    "ExitStats",
    "OccupationEstimate",
    "PathScheme",
    "collect_exit_stats",
    "estimate_occupation",
    "estimate_survival",
    "fit_decay_rate",
    "sample_increment",
    "simulate_exit",
]

#: Paths simulated per independent RNG stream (chunk c -> rng([seed, c])).
CHUNK_PATHS = 8192

#: Steps advanced per vectorized block inside a chunk.
STEP_BLOCK = 256

#: Two-sided 95% normal quantile for Wilson intervals and occupation CIs.
Z95 = 1.959963984540054


class ConfigurationError(ValueError):
    """A scheme/family combination that cannot be simulated as requested."""


Sampler = Callable[[np.random.Generator, tuple[int, int], float], np.ndarray]


def _small_second_moment(measure, eps: float) -> float:
    """``integral_{|x| < eps} x^2 nu(dx)`` for the substitution variance."""
    if isinstance(measure, StableJumps):
        c_minus, c_plus = measure.intensities
        return (c_minus + c_plus) * eps ** (2.0 - measure.alpha) / (2.0 - measure.alpha)
    if isinstance(measure, GammaJumps):
        r = measure.rate
        return measure.shape * (1.0 - (1.0 + r * eps) * math.exp(-r * eps)) / r**2
    if isinstance(measure, CGMYJumps):
        s = 2.0 - measure.Y
        total = 0.0
        for rate in (measure.M, measure.G):
            total += measure.C * rate**-s * gamma_fn(s) * gammainc(s, rate * eps)
        return total
    if isinstance(measure, DensityMeasure):
        from scipy.integrate import quad

        total = 0.0
        for lo, hi in ((-eps, 0.0), (0.0, eps)):
            if hi <= 0.0 and not measure.charges_negative:
                continue
            if lo >= 0.0 and not measure.charges_positive:
                continue
            val, err = quad(lambda x: x * x * measure.density(x), lo, hi, limit=200)
            if err > max(1e-9, 1e-6 * abs(val)):
                raise TailQuadratureError(
                    f"small-jump second moment on ({lo}, {hi}) did not converge"
                )
            total += val
        return total
    raise ConfigurationError(
        f"no small-jump moment rule for {type(measure).__name__}"
    )


@dataclass(frozen=True)
class _JumpTable:
    """Inverse-CDF sampler for one side's jumps of size >= eps."""

    rate: float  # jumps per unit time
    xs: np.ndarray
    cdf: np.ndarray

    def sums(
        self, rng: np.random.Generator, shape: tuple[int, int], dt: float
    ) -> np.ndarray:
        """Sum of this side's jumps over each dt-cell of ``shape``."""
        counts = rng.poisson(self.rate * dt, shape)
        total = int(counts.sum())
        if total == 0:
            return np.zeros(shape)
        draws = np.interp(rng.uniform(size=total), self.cdf, self.xs)
        idx = np.repeat(np.arange(counts.size), counts.ravel())
        return np.bincount(idx, weights=draws, minlength=counts.size).reshape(shape)


def _build_jump_table(side, eps: float) -> _JumpTable | None:
    rate = float(side.tail_mass(eps))
    if rate <= 0.0:
        return None
    xmax = max(2.0 * eps, 1.0)
    while side.tail_mass(xmax) > 1e-12 * rate and xmax < 1e300:
        xmax *= 2.0
    xs = np.geomspace(eps, xmax, 4097)
    tail = np.asarray(side.tail_mass(xs), dtype=float)
    cdf = (rate - tail) / (rate - tail[-1])
    cdf[0], cdf[-1] = 0.0, 1.0
    cdf = np.maximum.accumulate(cdf)
    return _JumpTable(rate=rate, xs=xs, cdf=cdf)


def _stable_shift(measure: StableJumps, gamma: float, A: float) -> float:
    """Linear drift making the polar-transform sampler match the symbol.

    The sampler produces a strictly stable variable with exponent
    ``scale^alpha |z|^alpha (1 - i skew tan(pi alpha/2) sign z)``; whatever
    linear-in-z part the triplet's symbol has beyond that (drift plus
    truncation-convention offsets) is returned as a real shift per unit
    time.
    """
    triplet = LevyTriplet(A=A, gamma=gamma, measure=measure)
    lam1 = complex(levy_symbol(triplet, 1.0)) - 0.5 * A
    tan_part = math.tan(0.5 * math.pi * measure.alpha) if measure.alpha != 1.0 else 0.0
    strict = measure.scale**measure.alpha * (1.0 - 1j * measure.skew * tan_part)
    delta = 1j * (lam1 - strict)
    if abs(delta.imag) > 1e-8 * (1.0 + abs(delta)):
        raise ConfigurationError(
            f"stable sampler shift is not real ({delta}); unsupported "
            "parametrization"
        )
    return delta.real


@dataclass(frozen=True)
class PathScheme:
    """Increment sampler specification for one process.

    Attributes
    ----------
    triplet : LevyTriplet
        The process to simulate.
    dt : float
        Default step size for path simulation.
    seed : int
        Master seed; chunk ``c`` of any run draws from
        ``default_rng([seed, c])``.
    small_jump_cutoff : float
        Substitution threshold ``eps`` in ``(0, 1)``: jumps with
        ``|x| < eps`` are replaced by a Brownian term of matched variance
        when no exact sampler exists.
    method : str
        ``"auto"`` (exact when available, substitution otherwise),
        ``"exact"``, or ``"substitution"``.
    """

    triplet: LevyTriplet
    dt: float
    seed: int
    small_jump_cutoff: float = 1e-2
    method: str = "auto"

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not 0.0 < self.small_jump_cutoff < 1.0:
            raise ValueError(
                f"small_jump_cutoff must lie in (0, 1), got {self.small_jump_cutoff}"
            )
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.method not in ("auto", "exact", "substitution"):
            raise ValueError(f"unknown method {self.method!r}")
        self._resolve_method()  # fail fast on unsupported combinations

    def _resolve_method(self) -> str:
        measure = self.triplet.measure
        exact_ok = isinstance(
            measure,
            (NoJumps, AtomMeasure, PoissonJumps, CompoundPoissonJumps, GammaJumps),
        ) or (
            isinstance(measure, StableJumps)
            and (measure.alpha != 1.0 or measure.skew == 0.0)
        )
        subst_ok = isinstance(
            measure, (StableJumps, GammaJumps, CGMYJumps, DensityMeasure)
        )
        if self.method == "exact" or (self.method == "auto" and exact_ok):
            if not exact_ok:
                raise ConfigurationError(
                    f"no exact increment sampler for "
                    f"{type(measure).__name__} (asymmetric alpha = 1 stable "
                    "has no supported parametrization)"
                )
            return "exact"
        if not subst_ok:
            raise ConfigurationError(
                f"small-jump substitution requires a density-type jump "
                f"measure, got {type(measure).__name__}"
            )
        return "substitution"

    @cached_property
    def sampler(self) -> Sampler:
        """``sampler(rng, shape, dt)`` drawing one increment per cell."""
        if self._resolve_method() == "exact":
            return self._exact_sampler()
        return self._substitution_sampler()

    def _exact_sampler(self) -> Sampler:
        A, gamma = self.triplet.A, self.triplet.gamma
        measure = self.triplet.measure

        if isinstance(measure, NoJumps):

            def sample(rng, shape, dt):
                return rng.normal(gamma * dt, math.sqrt(A * dt), shape)

            return sample

        if isinstance(measure, GammaJumps):
            gamma0 = gamma - compensator_mean(measure)
            shape_rate, scale = measure.shape, 1.0 / measure.rate

            def sample(rng, shape, dt):
                out = np.full(shape, gamma0 * dt)
                if A > 0.0:
                    out += rng.normal(0.0, math.sqrt(A * dt), shape)
                return out + rng.gamma(shape_rate * dt, scale, shape)

            return sample

        if isinstance(measure, StableJumps):
            alpha, skew, scale = measure.alpha, measure.skew, measure.scale
            shift = _stable_shift(measure, gamma, A)
            if alpha == 1.0:

                def sample(rng, shape, dt):
                    out = shift * dt + scale * dt * rng.standard_cauchy(shape)
                    if A > 0.0:
                        out += rng.normal(0.0, math.sqrt(A * dt), shape)
                    return out

                return sample

            tan_ab = skew * math.tan(0.5 * math.pi * alpha)
            b0 = math.atan(tan_ab) / alpha
            prefac = (1.0 + tan_ab**2) ** (0.5 / alpha)

            def sample(rng, shape, dt):
                u = rng.uniform(-0.5 * math.pi, 0.5 * math.pi, shape)
                w = rng.standard_exponential(shape)
                raw = (
                    prefac
                    * np.sin(alpha * (u + b0))
                    / np.cos(u) ** (1.0 / alpha)
                    * (np.cos(u - alpha * (u + b0)) / w) ** ((1.0 - alpha) / alpha)
                )
                out = shift * dt + scale * dt ** (1.0 / alpha) * raw
                if A > 0.0:
                    out += rng.normal(0.0, math.sqrt(A * dt), shape)
                return out

            return sample

        atoms = atoms_of(measure)
        assert atoms is not None
        gamma0 = gamma - compensator_mean(measure)
        positions = np.array([p for p, _ in atoms])
        masses = np.array([m for _, m in atoms])

        def sample(rng, shape, dt):
            out = np.full(shape, gamma0 * dt)
            if A > 0.0:
                out += rng.normal(0.0, math.sqrt(A * dt), shape)
            for pos, mass in zip(positions, masses):
                out += pos * rng.poisson(mass * dt, shape)
            return out

        return sample

    def _substitution_sampler(self) -> Sampler:
        A, gamma = self.triplet.A, self.triplet.gamma
        measure = self.triplet.measure
        eps = self.small_jump_cutoff
        tails = tail_functions(self.triplet)
        table_plus = _build_jump_table(tails.side_plus, eps)
        table_minus = _build_jump_table(tails.side_minus, eps)
        var_small = _small_second_moment(measure, eps)
        comp = tails.side_plus.moment_between(eps, 1.0) - tails.side_minus.moment_between(eps, 1.0)
        gamma_eff = gamma - comp

        def sample(rng, shape, dt):
            out = rng.normal(gamma_eff * dt, math.sqrt((A + var_small) * dt), shape)
            if table_plus is not None:
                out += table_plus.sums(rng, shape, dt)
            if table_minus is not None:
                out -= table_minus.sums(rng, shape, dt)
            return out

        return sample


def sample_increment(scheme: PathScheme, dt: float, rng: np.random.Generator) -> float:
    """One increment of the process over time ``dt`` from the given stream."""
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    return float(scheme.sampler(rng, (1, 1), dt)[0, 0])


@dataclass(frozen=True)
class OccupationEstimate:
    """Expected time spent per bin before exit (censored at the horizon).

    ``occupation[k]`` estimates the quasi-potential row integral over bin
    ``k`` — the increment of the exit-time kernel between the bin edges.
    ``sum(occupation)`` is by construction the mean (censored) exit time:
    both come from the same per-path accumulator.
    """

    bin_left: np.ndarray
    bin_right: np.ndarray
    occupation: np.ndarray
    ci: np.ndarray
    n_paths: int

    @property
    def mean_exit_time(self) -> float:
        return float(np.sum(self.occupation))


@dataclass(frozen=True)
class ExitStats:
    """Raw outcome of one simulation run.

    ``exit_times`` holds the first step multiple of ``dt`` at which each
    path was outside the domain, ``inf`` where the path was still inside
    at the horizon (censored).
    """

    n_paths: int
    dt: float
    horizon: float
    exit_times: np.ndarray
    curve: SurvivalCurve | None = None
    occupation: OccupationEstimate | None = None

    @property
    def n_censored(self) -> int:
        return int(np.isinf(self.exit_times).sum())


def _bin_layout(domain: Domain, bins) -> tuple[np.ndarray, np.ndarray, list]:
    """Per-interval bin edges partitioning the domain."""
    per_interval = []
    if isinstance(bins, int):
        if bins < 1:
            raise ValueError(f"bins must be positive, got {bins}")
        for lo, hi in domain.intervals:
            per_interval.append(np.linspace(lo, hi, bins + 1))
    else:
        edges = np.asarray(bins, dtype=float)
        if len(domain.intervals) != 1:
            raise ValueError("explicit bin edges require a single-interval domain")
        lo, hi = domain.intervals[0]
        if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0.0):
            raise ValueError("bin edges must be strictly increasing with >= 2 entries")
        if edges[0] != lo or edges[-1] != hi:
            raise ValueError(
                f"bin edges must span the domain [{lo}, {hi}], got "
                f"[{edges[0]}, {edges[-1]}]"
            )
        per_interval.append(edges)
    left = np.concatenate([e[:-1] for e in per_interval])
    right = np.concatenate([e[1:] for e in per_interval])
    return left, right, per_interval


def _bin_indices(positions: np.ndarray, domain: Domain, per_interval) -> np.ndarray:
    """Bin index for positions known to lie inside the domain."""
    out = np.zeros(positions.shape, dtype=np.int64)
    offset = 0
    for (lo, hi), edges in zip(domain.intervals, per_interval):
        nb = edges.size - 1
        mask = (positions >= lo) & (positions <= hi)
        local = np.clip(np.searchsorted(edges, positions[mask], side="right") - 1, 0, nb - 1)
        out[mask] = offset + local
        offset += nb
    return out


def _inside(positions: np.ndarray, intervals) -> np.ndarray:
    ins = np.zeros(positions.shape, dtype=bool)
    for lo, hi in intervals:
        ins |= (positions >= lo) & (positions <= hi)
    return ins


def collect_exit_stats(
    scheme: PathScheme,
    x0: float,
    domain: Domain,
    *,
    n_paths: int,
    horizon: float,
    t_grid=None,
    bins=None,
) -> ExitStats:
    """Simulate ``n_paths`` first exits, optionally with survival/occupation.

    The walk advances in steps of ``scheme.dt``; a path exits at the first
    step whose position falls outside the (closed) domain, and is censored
    if still inside at the horizon.  Occupation credits each executed step
    as ``dt`` spent at the position held during that step, so the per-path
    bin totals sum exactly to the (censored) exit time.
    """
    if n_paths < 1:
        raise ValueError(f"n_paths must be positive, got {n_paths}")
    if not horizon > 0.0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    dt = scheme.dt
    max_steps = int(math.ceil(horizon / dt - 1e-12))
    intervals = domain.intervals

    t = None
    if t_grid is not None:
        t = np.asarray(t_grid, dtype=float)
        if t.ndim != 1 or t.size == 0:
            raise ValueError("t_grid must be a non-empty 1-d array")
        if np.any(t < 0.0) or np.any(np.diff(t) <= 0.0):
            raise ValueError("t_grid must be nonnegative and strictly increasing")
        if t[-1] > horizon * (1.0 + 1e-12):
            raise ValueError(
                f"t_grid reaches {t[-1]} beyond the horizon {horizon}; censored "
                "paths would bias the survival estimate"
            )

    layout = None
    occ_sum = occ_sumsq = None
    if bins is not None:
        left, right, layout = _bin_layout(domain, bins)
        occ_sum = np.zeros(left.size)
        occ_sumsq = np.zeros(left.size)

    exit_times = np.empty(n_paths)
    sampler = scheme.sampler
    started_inside = domain.contains(float(x0))

    for chunk, start in enumerate(range(0, n_paths, CHUNK_PATHS)):
        n = min(CHUNK_PATHS, n_paths - start)
        if not started_inside:
            exit_times[start : start + n] = 0.0
            continue
        rng = np.random.default_rng([int(scheme.seed), chunk])
        exit_step = np.full(n, -1, dtype=np.int64)
        occ_path = np.zeros((n, occ_sum.size)) if occ_sum is not None else None
        alive = np.arange(n)
        pos = np.full(n, float(x0))
        step = 0
        while alive.size and step < max_steps:
            k = min(STEP_BLOCK, max_steps - step)
            inc = sampler(rng, (alive.size, k), dt)
            paths = pos[:, None] + np.cumsum(inc, axis=1)
            outside = ~_inside(paths, intervals)
            exited = outside.any(axis=1)
            first = np.where(exited, np.argmax(outside, axis=1), k)
            exit_step[alive[exited]] = step + first[exited] + 1
            if occ_path is not None:
                held = np.column_stack([pos, paths[:, :-1]])
                # the exiting step still counts: dt is spent at the last
                # inside position while the move that leaves is made, so the
                # per-path bin totals sum exactly to exit_step * dt
                steps_done = np.where(exited, first + 1, first)
                live = np.arange(k)[None, :] < steps_done[:, None]
                rows = np.broadcast_to(alive[:, None], live.shape)[live]
                cols = _bin_indices(held[live], domain, layout)
                flat = np.bincount(
                    rows * occ_sum.size + cols, minlength=n * occ_sum.size
                )
                occ_path += flat.reshape(n, occ_sum.size) * dt
            pos = paths[~exited, -1]
            alive = alive[~exited]
            step += k
        chunk_times = np.where(exit_step < 0, math.inf, exit_step * dt)
        exit_times[start : start + n] = chunk_times
        if occ_path is not None:
            occ_sum += occ_path.sum(axis=0)
            occ_sumsq += (occ_path**2).sum(axis=0)

    curve = None
    if t is not None:
        surv = (exit_times[None, :] > t[:, None]).mean(axis=1)
        counts = np.rint(surv * n_paths)
        lo, hi = _wilson(counts, n_paths)
        safe = np.where(surv > 0.0, surv, 1.0)  # masked entries get inf below
        var_log = np.where(surv > 0.0, ((hi - lo) / (2.0 * Z95 * safe)) ** 2, np.inf)
        rate, stderr = _fit_log_slope(t, surv, var_log)
        curve = SurvivalCurve(
            times=t,
            values=surv,
            x0=float(x0),
            fitted_rate=rate,
            rate_stderr=stderr,
            ci_lo=lo,
            ci_hi=hi,
        )

    occupation = None
    if occ_sum is not None:
        left, right, _ = _bin_layout(domain, bins)
        mean = occ_sum / n_paths
        var = np.maximum(occ_sumsq / n_paths - mean**2, 0.0)
        ci = Z95 * np.sqrt(var / n_paths)
        occupation = OccupationEstimate(
            bin_left=left, bin_right=right, occupation=mean, ci=ci, n_paths=n_paths
        )

    return ExitStats(
        n_paths=n_paths,
        dt=dt,
        horizon=horizon,
        exit_times=exit_times,
        curve=curve,
        occupation=occupation,
    )


def _wilson(successes: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Wilson-score 95% interval for binomial proportions."""
    p = np.asarray(successes, dtype=float) / n
    z2 = Z95**2
    denom = 1.0 + z2 / n
    center = (p + z2 / (2.0 * n)) / denom
    half = (Z95 / denom) * np.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n**2))
    return np.clip(center - half, 0.0, 1.0), np.clip(center + half, 0.0, 1.0)


def simulate_exit(
    scheme: PathScheme, x0: float, domain: Domain, horizon: float
) -> float:
    """First-exit time of a single path at step resolution.

    Returns the exit time (a multiple of ``scheme.dt``), ``0.0`` when the
    start lies outside the domain, or ``math.inf`` when the path is still
    inside at the horizon (censored).
    """
    stats = collect_exit_stats(scheme, x0, domain, n_paths=1, horizon=horizon)
    return float(stats.exit_times[0])


def estimate_survival(
    scheme: PathScheme, x0: float, domain: Domain, t_grid, n_paths: int
) -> SurvivalCurve:
    """Empirical survival curve with Wilson-score 95% intervals."""
    if n_paths < 1000:
        raise ValueError(f"survival estimation needs >= 1000 paths, got {n_paths}")
    t = np.asarray(t_grid, dtype=float)
    stats = collect_exit_stats(
        scheme, x0, domain, n_paths=n_paths, horizon=float(t[-1]), t_grid=t
    )
    return stats.curve


def estimate_occupation(
    scheme: PathScheme, x0: float, domain: Domain, bins, n_paths: int
) -> OccupationEstimate:
    """Expected occupation time per bin with 95% confidence half-widths.

    The horizon is set generously from a pilot run so censoring is
    negligible: paths still alive at the horizon stop accumulating time.
    """
    if n_paths < 1:
        raise ValueError(f"n_paths must be positive, got {n_paths}")
    # decorrelated seed so the horizon choice does not share the main streams
    pilot_scheme = replace(scheme, seed=(int(scheme.seed) ^ 0x9E3779B97F4A7C15) % 2**64)
    pilot = collect_exit_stats(
        pilot_scheme, x0, domain, n_paths=min(n_paths, 1024), horizon=512.0 * _scale_time(scheme, domain)
    )
    finite = pilot.exit_times[np.isfinite(pilot.exit_times)]
    base = float(np.mean(finite)) if finite.size else _scale_time(scheme, domain)
    horizon = max(20.0 * base, 50.0 * scheme.dt)
    stats = collect_exit_stats(
        scheme, x0, domain, n_paths=n_paths, horizon=horizon, bins=bins
    )
    return stats.occupation


def fit_decay_rate(
    curve: SurvivalCurve, window: tuple[float, float] = FIT_WINDOW
) -> tuple[float, float]:
    """Exponential decay rate of a survival curve by weighted least squares.

    Weights come from the curve's confidence-interval widths (variance of
    ``log p`` by the delta method); a curve without intervals is fitted
    unweighted.  Requires at least five usable points with ``p`` strictly
    inside ``(0, 1)`` and within ``window``.
    """
    var_log = None
    if curve.ci_lo is not None and curve.ci_hi is not None:
        p = np.asarray(curve.values, dtype=float)
        width = np.asarray(curve.ci_hi) - np.asarray(curve.ci_lo)
        safe = np.where(p > 0.0, p, 1.0)  # masked entries get inf below
        var_log = np.where(p > 0.0, (width / (2.0 * Z95 * safe)) ** 2, np.inf)
    rate, stderr = _fit_log_slope(curve.times, curve.values, var_log, window)
    if math.isnan(rate):
        raise ValueError(
            f"decay-rate window p in [{window[0]}, {window[1]}] holds fewer "
            "than five usable points (all censored or outside the window)"
        )
    return rate, stderr


def _scale_time(scheme: PathScheme, domain: Domain) -> float:
    """Crude time scale for horizon defaults: domain diameter over drift+noise."""
    diam = domain.diameter
    a = scheme.triplet.A
    g = abs(scheme.triplet.gamma)
    return max(diam**2 / max(a, 1e-2), diam / max(g, 1e-2), 1.0)
