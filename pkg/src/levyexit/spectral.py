"""Principal eigenpair of the quasi-potential, survival curves, and decay laws.

The quasi-potential matrix ``B`` built by :mod:`levyexit.operators` is a
compact positive operator on the interior nodes.  Its dominant eigenvalue
``lambda1`` sets the exponential lifetime of the killed process: the survival
probability decays like ``c1 * exp(-t / lambda1)``.  This module extracts the
eigenpair by power iteration, localizes the rest of the leading spectrum,
verifies sectoriality of the convolution factor, and evaluates survival
curves and their Laplace transforms directly from the matrices.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .operators import Domain, Grid

__all__ = [
    "EigenResult",
    "SurvivalCurve",
    "SectorialityReport",
    "asymptotics",
    "disk_margin",
    "laplace_survival",
    "leading_spectrum",
    "principal_eigenpair",
    "sectoriality_check",
    "spectral_summary",
    "survival_curve",
]

#: Relative radius slack for the eigenvalue localization disk.
DISK_SLACK = 1e-6

#: Fraction of a right angle that quadratic-form arguments must stay below.
SECTOR_SLACK = 1e-3

#: Survival window used when fitting an exponential decay rate to log p.
FIT_WINDOW = (1e-4, 1e-1)


@dataclass(frozen=True)
class SurvivalCurve:
    """Survival probabilities ``p(t) = P(exit time > t)`` on a time grid.

    Attributes
    ----------
    times : ndarray
        Strictly increasing, nonnegative time grid.
    values : ndarray
        Survival probabilities in ``[0, 1]``, nonincreasing.
    x0 : float
        Starting point of the process.
    fitted_rate : float
        Exponential decay rate fitted to ``log values`` over the window
        where ``p`` is in ``FIT_WINDOW``; ``nan`` when the window holds
        fewer than five points.
    rate_stderr : float
        Standard error of ``fitted_rate`` (``nan`` when unfitted).
    ci_lo, ci_hi : ndarray or None
        Pointwise 95% confidence bounds; ``None`` for deterministic curves.
    """

    times: np.ndarray
    values: np.ndarray
    x0: float
    fitted_rate: float = math.nan
    rate_stderr: float = math.nan
    ci_lo: np.ndarray | None = None
    ci_hi: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        p = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != p.shape:
            raise ValueError("times and values must be matching 1-d arrays")
        if t.size == 0:
            raise ValueError("time grid must be non-empty")
        if np.any(t < 0.0) or np.any(np.diff(t) <= 0.0):
            raise ValueError("times must be nonnegative and strictly increasing")
        if np.any(p < 0.0) or np.any(p > 1.0):
            raise ValueError("survival values must lie in [0, 1]")


@dataclass(frozen=True)
class SectorialityReport:
    """Sampled numerical range of the convolution factor ``S``.

    ``values`` holds the quadratic forms ``(S f, f)`` over random complex
    unit vectors; the operator passes the strong-sectoriality test when
    every value stays strictly inside the right half-plane sector of
    half-angle ``pi/2 * (1 - SECTOR_SLACK)``.
    """

    min_real: float
    max_angle: float
    n_trials: int
    values: np.ndarray = field(repr=False)

    @property
    def passed(self) -> bool:
        return self.max_angle < 0.5 * math.pi * (1.0 - SECTOR_SLACK)


@dataclass(frozen=True)
class EigenResult:
    """Dominant spectral data of a quasi-potential matrix.

    Attributes
    ----------
    lambda1 : float
        Dominant eigenvalue of ``B`` (units of time); the survival decay
        rate is ``1 / lambda1``.
    g1 : ndarray
        Right eigenfunction on interior nodes, sup-normalized to 1.
    h1_density : ndarray
        Left eigenfunction as per-node masses, scaled so that
        ``g1 @ h1_density == 1``.
    c1 : float
        Leading survival coefficient ``g1(x0) * sum(h1_density)`` for the
        starting point the result was built with.
    leading_eigenvalues : tuple of (complex, int)
        Dominant eigenvalues with multiplicity flags, in decreasing
        magnitude order; the first entry is ``lambda1`` with flag 1.
    """

    lambda1: float
    g1: np.ndarray
    h1_density: np.ndarray
    c1: float
    leading_eigenvalues: tuple[tuple[complex, int], ...]

    def __post_init__(self):
        if not self.lambda1 > 0.0:
            raise ValueError(f"lambda1 must be positive, got {self.lambda1}")
        g = np.asarray(self.g1, dtype=float)
        h = np.asarray(self.h1_density, dtype=float)
        if g.min() < -1e-10 or h.min() < -1e-10 * max(h.max(), 1.0):
            raise ValueError("eigenfunctions must be componentwise nonnegative")
        pairing = float(g @ h)
        if abs(pairing - 1.0) > 1e-8:
            raise ValueError(f"eigenpair normalization (g1, h1) = {pairing!r} != 1")
        radius = 0.5 * self.lambda1 * (1.0 + DISK_SLACK)
        for z, _ in self.leading_eigenvalues:
            if abs(z - 0.5 * self.lambda1) > radius:
                raise ValueError(
                    f"eigenvalue {z} escapes the localization disk of radius "
                    f"{radius} centered at {0.5 * self.lambda1}"
                )


def _check_square(B: np.ndarray) -> np.ndarray:
    B = np.asarray(B, dtype=float)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {B.shape}")
    return B


def _power_iterate(
    B: np.ndarray,
    v0: np.ndarray,
    *,
    tol: float = 1e-12,
    maxiter: int = 100000,
    projector: np.ndarray | None = None,
) -> tuple[float, np.ndarray, bool, np.ndarray]:
    """Power iteration with optional orthogonal-complement projection.

    Returns ``(rayleigh, vector, converged, previous_vector)``; the previous
    iterate lets callers recover an invariant plane when a complex pair
    stalls the Rayleigh quotient.
    """
    v = np.asarray(v0, dtype=float)
    if projector is not None:
        v = v - projector @ (projector.T @ v)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise RuntimeError("dominance failure: start vector lies in the deflated span")
    v = v / norm
    lam_old = math.inf
    prev = v
    for _ in range(maxiter):
        w = B @ v
        if projector is not None:
            w = w - projector @ (projector.T @ w)
        lam = float(v @ w)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            raise RuntimeError("dominance failure: iterate annihilated by the operator")
        prev, v = v, w / norm
        if abs(lam - lam_old) <= tol * abs(lam):
            return lam, v, True, prev
        lam_old = lam
    return lam_old, v, False, prev


def principal_eigenpair(B: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """Dominant eigenvalue and positive eigenpair of the quasi-potential.

    Power iteration from the all-ones vector on ``B`` yields the right
    eigenfunction, and on ``B.T`` the left one.  Convergence is declared
    when successive Rayleigh quotients agree to ``1e-12`` relative.  The
    right eigenfunction is sup-normalized to 1 and the left one scaled so
    the pairing ``g1 @ h1_density`` equals 1, which pins the survival
    coefficient convention.

    Returns
    -------
    (lambda1, g1, h1_density)

    Raises
    ------
    RuntimeError
        On non-convergence within 100000 iterations ("dominance failure":
        a complex dominant pair contradicts positivity of ``B`` and points
        at an assembly bug), a simple-eigenvalue index check failure, or a
        sign-indefinite eigenvector.
    """
    B = _check_square(B)
    ones = np.ones(B.shape[0])
    lam, g1, converged, _ = _power_iterate(B, ones)
    if not converged:
        raise RuntimeError(
            "dominance failure: power iteration on B did not converge; "
            "a complex dominant pair contradicts positivity of the "
            "quasi-potential and indicates an assembly bug"
        )
    lam_t, h1, converged_t, _ = _power_iterate(B.T, ones)
    if not converged_t:
        raise RuntimeError("dominance failure: power iteration on B.T did not converge")
    if abs(lam - lam_t) > 1e-6 * max(abs(lam), abs(lam_t)):
        raise RuntimeError(
            f"transpose iteration disagrees on the dominant eigenvalue "
            f"({lam!r} vs {lam_t!r}); assembly bug"
        )
    if lam <= 0.0:
        raise RuntimeError(f"dominant eigenvalue is not positive: {lam!r}")

    # orient both vectors into the positive cone
    if g1.sum() < 0.0:
        g1 = -g1
    if h1.sum() < 0.0:
        h1 = -h1
    floor = -1e-10
    if g1.min() < floor * g1.max() or h1.min() < floor * h1.max():
        raise RuntimeError(
            "dominant eigenvector changes sign; the quasi-potential is not "
            "positivity-preserving — assembly bug"
        )
    g1 = np.maximum(g1, 0.0)
    h1 = np.maximum(h1, 0.0)

    # index check: (B - lam I) y = g1 is solvable iff g1 has no component in
    # the left null space of the shift, i.e. the eigenvalue carries a Jordan
    # block.  The shift is only near-singular (lam converged to ~1e-12), so
    # rank is decided by a singular-value cutoff rather than exact solves.
    shifted = B - lam * np.eye(B.shape[0])
    U, sv, _ = np.linalg.svd(shifted)
    null_cols = sv <= 1e-9 * sv[0]
    if not np.any(null_cols):
        null_cols = sv <= sv[-1] * (1.0 + 1e-12)
    overlap = np.linalg.norm(U[:, null_cols].T @ g1) / np.linalg.norm(g1)
    if overlap < 1e-6:
        raise RuntimeError(
            f"dominant eigenvalue has index > 1 (left-null-space overlap "
            f"{overlap:.2e}); assembly bug"
        )

    g1 = g1 / g1.max()
    h1 = h1 / float(g1 @ h1)
    return lam, g1, h1


def leading_spectrum(
    B: np.ndarray,
    m: int,
    *,
    lambda1: float | None = None,
    tol: float = 1e-12,
    maxiter: int = 20000,
) -> list[complex]:
    """``m`` dominant eigenvalues by deflated power iteration.

    Each converged iterate is appended to an orthonormal basis and later
    iterations are projected onto its complement, building up a partial
    Schur factorization; the eigenvalues are read off the small projected
    block, which also resolves complex-conjugate pairs captured by the
    basis.  If an iteration stalls (a complex pair dominates the deflated
    complement), its last two iterates are absorbed into the basis and a
    warning marks the list as recovered-partial.

    When ``lambda1`` is supplied, every returned eigenvalue is checked
    against the localization disk ``|z - lambda1/2| <= lambda1/2`` and the
    open right-half-plane sector, with warnings on violations.
    """
    B = _check_square(B)
    n = B.shape[0]
    if not 1 <= m <= 20:
        raise ValueError(f"m must be between 1 and 20, got {m}")
    m = min(m, n)

    basis: list[np.ndarray] = []
    rng = np.random.default_rng(20260815)
    start = np.ones(n)
    broke = False
    while len(basis) < m:
        Q = np.column_stack(basis) if basis else None
        lam, v, converged, prev = _power_iterate(
            B, start, tol=tol, maxiter=maxiter, projector=Q
        )
        if converged:
            if Q is not None:
                v = v - Q @ (Q.T @ v)
                nv = np.linalg.norm(v)
                if nv < 1e-12:
                    warnings.warn(
                        "deflation breakdown: converged iterate collapsed into "
                        "the deflated span; returning a partial spectrum",
                        RuntimeWarning,
                        stacklevel=2,
                    )
                    broke = True
                    break
                v = v / nv
            basis.append(v)
        else:
            # a complex pair rotates in a 2-d invariant plane; absorb it
            warnings.warn(
                "deflated power iteration stalled (complex dominant pair); "
                "absorbing its invariant plane and reading eigenvalues off "
                "the projected block",
                RuntimeWarning,
                stacklevel=2,
            )
            broke = True
            for w in (prev, v):
                if Q is not None:
                    w = w - Q @ (Q.T @ w)
                for b in basis:
                    w = w - b * float(b @ w)
                nw = np.linalg.norm(w)
                if nw > 1e-10:
                    basis.append(w / nw)
                    Q = np.column_stack(basis)
            break
        start = rng.standard_normal(n)

    if not basis:
        raise RuntimeError("deflation produced no converged eigenvectors")
    Q = np.column_stack(basis)
    block = Q.T @ B @ Q
    eigs = np.linalg.eigvals(block)
    order = np.argsort(-np.abs(eigs))
    values = [complex(eigs[i]) for i in order[:m]]
    if broke and len(values) < m:
        warnings.warn(
            f"returning {len(values)} of {m} requested eigenvalues",
            RuntimeWarning,
            stacklevel=2,
        )

    if lambda1 is not None:
        radius = 0.5 * lambda1 * (1.0 + DISK_SLACK)
        sector = 0.5 * math.pi * (1.0 - SECTOR_SLACK)
        for z in values:
            if abs(z - 0.5 * lambda1) > radius:
                warnings.warn(
                    f"eigenvalue {z} escapes the localization disk "
                    f"|z - {0.5 * lambda1:.6g}| <= {radius:.6g}",
                    RuntimeWarning,
                    stacklevel=2,
                )
            if z != 0 and abs(np.angle(complex(z))) > sector:
                warnings.warn(
                    f"eigenvalue {z} escapes the right-half-plane sector",
                    RuntimeWarning,
                    stacklevel=2,
                )
    return values


def disk_margin(eigenvalues, lambda1: float) -> float:
    """Smallest slack of ``|z - lambda1/2| <= lambda1/2`` over the list.

    Nonnegative when every eigenvalue sits inside the localization disk;
    the acceptance threshold allows ``-1e-6 * lambda1`` of rounding slack.
    """
    zs = [complex(z) for z in eigenvalues]
    if not zs:
        raise ValueError("eigenvalue list is empty")
    half = 0.5 * lambda1
    return min(half - abs(z - half) for z in zs)


def sectoriality_check(
    S_mid: np.ndarray, trials: int = 64, *, seed: int = 0
) -> SectorialityReport:
    """Sample the numerical range of ``S`` over random complex unit vectors.

    For each trial ``f`` the quadratic form ``(S f, f) = f* S f`` is
    recorded; strong sectoriality requires every value in the closed right
    half-plane, bounded away from the imaginary axis by a fixed fraction
    of a right angle (see :class:`SectorialityReport`).
    """
    S = _check_square(S_mid)
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    rng = np.random.default_rng(seed)
    n = S.shape[0]
    values = np.empty(trials, dtype=complex)
    for k in range(trials):
        f = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        f = f / np.linalg.norm(f)
        values[k] = np.vdot(f, S @ f)
    angles = np.abs(np.angle(values))
    return SectorialityReport(
        min_real=float(values.real.min()),
        max_angle=float(angles.max()),
        n_trials=trials,
        values=values,
    )


def _interior_index(x0, grid: Grid | None, n: int, *, what: str) -> tuple[str, int]:
    """Map a starting point to ("interior"/"boundary", row index)."""
    if grid is None:
        idx = int(x0)
        if idx != x0 or not 0 <= idx < n:
            raise ValueError(
                f"{what}: without a grid, x0 must be an interior node index "
                f"in [0, {n}), got {x0!r}"
            )
        return "interior", idx
    kind, idx = grid.locate(float(x0))
    return kind, idx


def _fit_log_slope(
    times: np.ndarray,
    values: np.ndarray,
    var_log: np.ndarray | None = None,
    window: tuple[float, float] = FIT_WINDOW,
) -> tuple[float, float]:
    """Least-squares decay rate of ``log values`` over a p-window.

    Returns ``(rate, stderr)`` with ``rate = -slope``; ``(nan, nan)`` when
    fewer than five points fall inside the window.

    Without ``var_log`` (deterministic curves) this is ordinary least
    squares with the residual-based standard error.  With ``var_log``
    (empirical curves) the points are survival estimates sharing paths, so
    their log errors accumulate like a random walk: Cov(e_j, e_k) =
    Var(e_min(j,k)).  Weighted least squares under that covariance is
    ordinary regression on the *increments* of log p, with increment
    variances (1/n)(1/p(t_{k+1}) - 1/p(t_k)).  The variances are built from
    a smooth exponential model of the curve and the path count implied by
    the interval widths, never from individual increments: empirical
    per-increment variances vanish on no-death stretches and would drag the
    slope toward zero.  Fitting the levels as if independent would
    understate the error badly instead.
    """
    t = np.asarray(times, dtype=float)
    p = np.asarray(values, dtype=float)
    mask = (p >= window[0]) & (p <= window[1]) & (p > 0.0) & (p < 1.0)
    if var_log is not None:
        v_arr = np.asarray(var_log, dtype=float)
        mask &= np.isfinite(v_arr) & (v_arr > 0.0)
    if int(mask.sum()) < 5:
        return math.nan, math.nan
    x = t[mask]
    y = np.log(p[mask])
    X = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    if var_log is None:
        resid = y - X @ coef
        dof = max(x.size - 2, 1)
        cov = np.linalg.inv(X.T @ X) * float(resid @ resid) / dof
        return -float(coef[0]), float(math.sqrt(max(cov[0, 0], 0.0)))
    pm = p[mask]
    # Var(log p) = (1 - p)/(n p) for a binomial proportion, so each CI
    # width implies the path count; the median is robust to tail noise.
    n_eff = float(np.median((1.0 - pm) / (pm * v_arr[mask])))
    p_model = np.exp(X @ coef)  # smooth decay shape from the plain fit
    dv = np.maximum(np.diff(1.0 / p_model) / n_eff, 1e-30)
    dy = np.diff(y)
    dx = np.diff(x)
    weight_sum = float(np.sum(dx * dx / dv))
    slope = float(np.sum(dy * dx / dv)) / weight_sum
    return -slope, float(1.0 / math.sqrt(weight_sum))


def survival_curve(
    L: np.ndarray,
    x0,
    t_grid,
    *,
    grid: Grid | None = None,
    tol: float = 1e-9,
    max_refinements: int = 6,
) -> SurvivalCurve:
    """Survival probabilities ``p(t, x0) = (exp(t L) 1)(x0)`` on a time grid.

    The killed semigroup is applied to the all-ones vector by stepping
    through the grid with cached matrix exponentials (scaling-and-squaring);
    each pass is then recomputed with all steps halved until two successive
    refinements agree pointwise to ``tol``, controlling the accumulated
    rounding of the repeated applications.

    Parameters
    ----------
    x0 : float or int
        Starting position (with ``grid``) mapped to the nearest interior
        node, or a raw interior node index (without).
    t_grid : array_like
        Strictly increasing, nonnegative times.
    """
    L = _check_square(L)
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("t_grid must be a non-empty 1-d array")
    if np.any(t < 0.0) or np.any(np.diff(t) <= 0.0):
        raise ValueError("t_grid must be nonnegative and strictly increasing")
    kind, idx = _interior_index(x0, grid, L.shape[0], what="survival_curve")
    if kind == "boundary":
        raise ValueError("survival_curve requires an interior starting point")

    cache: dict[float, np.ndarray] = {}

    def propagator(dt: float) -> np.ndarray:
        key = float(f"{dt:.12e}")  # share exponentials across ulp-level spacing jitter
        if key not in cache:
            cache[key] = expm(key * L)
        return cache[key]

    def sweep(splits: int) -> np.ndarray:
        v = np.ones(L.shape[0])
        out = np.empty(t.size)
        cur = 0.0
        for k, tk in enumerate(t):
            dt = tk - cur
            if dt > 0.0:
                E = propagator(dt / splits)
                for _ in range(splits):
                    v = E @ v
            out[k] = v[idx]
            cur = tk
        return out

    splits = 1
    p = sweep(splits)
    for _ in range(max_refinements):
        splits *= 2
        p_next = sweep(splits)
        agreed = np.max(np.abs(p - p_next)) <= tol
        p = p_next
        if agreed:
            break
    else:
        raise RuntimeError(
            f"survival_curve did not stabilize to {tol} after "
            f"{max_refinements} step halvings"
        )
    if p.max() > 1.0 + 1e-6:
        raise RuntimeError(
            f"survival probability exceeded 1 ({p.max()!r}); the generator "
            "is not dissipative — assembly bug"
        )
    p = np.minimum.accumulate(np.clip(p, 0.0, 1.0))
    rate, stderr = _fit_log_slope(t, p)
    x0_val = float(grid.interior_nodes[idx]) if grid is not None else float(idx)
    return SurvivalCurve(
        times=t, values=p, x0=x0_val, fitted_rate=rate, rate_stderr=stderr
    )


def laplace_survival(
    B: np.ndarray, x0, s: float, *, grid: Grid | None = None
) -> float:
    """Laplace transform ``int_0^inf exp(-s t) p(t, x0) dt`` from ``B``.

    Evaluates ``((I + s B)^{-1} B 1)(x0)``.  At ``s = 0`` this is the row
    sum ``sum_j B[x0, j]`` — the expected exit time — computed literally as
    that sum so downstream identity checks share the arithmetic path.
    """
    B = _check_square(B)
    if s < 0.0:
        raise ValueError(f"s must be nonnegative, got {s}")
    kind, idx = _interior_index(x0, grid, B.shape[0], what="laplace_survival")
    if kind == "boundary":
        raise ValueError("laplace_survival requires an interior starting point")
    if s == 0.0:
        return float(np.sum(B[idx, :]))
    rhs = B @ np.ones(B.shape[0])
    M = np.eye(B.shape[0]) + s * B
    try:
        sol = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:  # impossible for sectorial B, s >= 0
        raise RuntimeError(
            f"I + s B is singular at s = {s}; the quasi-potential is not "
            "sectorial — assembly bug"
        ) from exc
    return float(sol[idx])


def asymptotics(
    eig: EigenResult | tuple[float, np.ndarray, np.ndarray],
    x0,
    subdomain: Domain | None = None,
    *,
    grid: Grid,
) -> tuple[float, float]:
    """Long-time survival model ``p(t) ~ coefficient * exp(-rate * t)``.

    Returns ``(rate, coefficient)`` with ``rate = 1 / lambda1`` and
    ``coefficient = g1(x0) * sum(h1_density over the subdomain)`` (full
    domain by default).  A starting point on the boundary yields
    coefficient 0; one outside the domain raises ``ValueError``.
    """
    if isinstance(eig, EigenResult):
        lam, g1, h1 = eig.lambda1, eig.g1, eig.h1_density
    else:
        lam, g1, h1 = eig
    g1 = np.asarray(g1, dtype=float)
    h1 = np.asarray(h1, dtype=float)
    if g1.shape != h1.shape or g1.ndim != 1:
        raise ValueError("g1 and h1_density must be matching 1-d arrays")
    if g1.size != grid.n_interior:
        raise ValueError(
            f"eigenvectors have {g1.size} entries but the grid has "
            f"{grid.n_interior} interior nodes"
        )
    kind, idx = grid.locate(float(x0))
    rate = 1.0 / lam
    if kind == "boundary":
        return rate, 0.0
    if subdomain is None:
        mass = float(h1.sum())
    else:
        inside = np.fromiter(
            (subdomain.contains(float(y)) for y in grid.interior_nodes),
            dtype=bool,
            count=grid.n_interior,
        )
        mass = float(h1[inside].sum())
    return rate, float(g1[idx] * mass)


def spectral_summary(
    B: np.ndarray,
    S_mid: np.ndarray,
    grid: Grid,
    x0,
    *,
    m: int = 10,
    trials: int = 64,
    seed: int = 0,
) -> tuple[EigenResult, SectorialityReport]:
    """Bundle the dominant spectral analysis for one assembled operator set.

    Computes the principal eigenpair, the ``m`` leading eigenvalues with
    multiplicity flags (clustered at ``1e-8`` relative), the survival
    coefficient at ``x0``, and the sampled sectoriality of ``S``.
    """
    lam, g1, h1 = principal_eigenpair(B)
    m_eff = min(m, B.shape[0])
    values = leading_spectrum(B, m_eff, lambda1=lam)
    clusters: list[list[complex]] = []
    for z in values:
        for group in clusters:
            if abs(z - group[0]) <= 1e-8 * lam:
                group.append(z)
                break
        else:
            clusters.append([z])
    leading = tuple(
        (group[0], len(group))
        for group in sorted(clusters, key=lambda g: -abs(g[0]))
    )
    _, c1 = asymptotics((lam, g1, h1), x0, grid=grid)
    result = EigenResult(
        lambda1=lam, g1=g1, h1_density=h1, c1=c1, leading_eigenvalues=leading
    )
    report = sectoriality_check(S_mid, trials, seed=seed)
    return result, report
