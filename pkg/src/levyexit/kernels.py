"""Convolution kernels of the generator.

The generator of a Levy process acts on smooth functions vanishing at
infinity as

    L f(x) = (A/2) f''(x) + int K_tot(u) f''(x + u) du,

where ``K_tot`` combines three ingredients built here:

* tail functions ``mu_minus``/``mu_plus`` (cumulative jump mass on each
  half-line),
* anchored kernel functions ``k_minus``/``k_plus`` (antiderivatives of the
  tails, pinned to vanish at ``-anchor`` and ``+anchor``),
* a sign-kernel ``-(d/2) sign(u)`` carrying the first-derivative part,
  whose coefficient ``d`` equals ``gamma - Gamma`` at the default anchor 1.

The module also tabulates ``K_tot`` as exact cell averages on a uniform
offset grid (``KernelTable``) and verifies the construction in Fourier
space: the transform of ``K_tot`` plus ``A/2`` must reproduce
``lambda(z)/z**2`` for the process symbol ``lambda``.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import exp1

from .models import (
    CGMYJumps,
    DensityMeasure,
    GammaJumps,
    LevyMeasureSpec,
    LevyTriplet,
    NoJumps,
    StableJumps,
    atoms_of,
    levy_symbol,
    upper_gamma,
)

__all__ = [
    "TailQuadratureError",
    "TableCoverageError",
    "TruncationRadiusError",
    "TailFunctions",
    "KernelFunctions",
    "KernelTable",
    "SymbolCheckReport",
    "tail_functions",
    "kernel_functions",
    "unified_kernel",
    "kernel_integral",
    "tabulate",
    "suggest_radius",
    "kernel_symbol_check",
]


class TailQuadratureError(RuntimeError):
    """Adaptive quadrature of a density tail failed to converge."""


class TableCoverageError(ValueError):
    """A kernel table was asked for an offset cell it cannot provide."""


class TruncationRadiusError(ValueError):
    """Tail mass beyond the tabulated radius is too large for the check."""


# ---------------------------------------------------------------------------
# One-sided measure views
# ---------------------------------------------------------------------------
#
# Each half of the jump measure is reflected onto (0, inf) and exposed
# through
#   tail_mass(t)  = nu((t, inf))          (reflected axis)
#   cum_tail(t)   = an antiderivative J of tail_mass
#   cum_tail2(t)  = an antiderivative of J, finite at 0
# so that kernel values and exact cell integrals reduce to differences of
# J and J2.  Families with closed forms never sample the integrable
# singularity at 0.


class _Side:
    """One half of a jump measure reflected onto the positive axis."""

    active = True
    reach = math.inf  # beyond this, tail_mass is exactly zero

    def tail_mass(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def tail_mass_closed(self, t: np.ndarray) -> np.ndarray:
        # nu([t, inf)); differs from tail_mass only for atom measures.
        return self.tail_mass(t)

    def density_at(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def density_slope(self, t: float) -> float | None:
        # d/dt of the reflected density; None when unavailable (numeric side).
        return None

    def cum_tail(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def cum_tail2(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def moment_between(self, lo: float, hi: float) -> float:
        """Integral of t over [lo, hi) against the reflected measure."""
        raise NotImplementedError

    def k_value(self, t, anchor: float):
        """Kernel value k(t) = J(anchor) - J(t) for t > 0 (reflected)."""
        return self.cum_tail(np.full_like(np.asarray(t, float), anchor)) - self.cum_tail(t)

    def k_integral(self, lo, hi, anchor: float):
        """Exact integral of k over [lo, hi], 0 <= lo <= hi (reflected)."""
        lo = np.asarray(lo, float)
        hi = np.asarray(hi, float)
        ja = self.cum_tail(np.asarray(anchor, float))
        return ja * (hi - lo) - (self.cum_tail2(hi) - self.cum_tail2(lo))


class _ZeroSide(_Side):
    active = False
    reach = 0.0

    def tail_mass(self, t):
        return np.zeros_like(np.asarray(t, float))

    def density_slope(self, t):
        return 0.0

    density_at = tail_mass
    cum_tail = tail_mass
    cum_tail2 = tail_mass

    def moment_between(self, lo, hi):
        return 0.0


class _AtomSide(_Side):
    """Finitely many atoms at positions p_j > 0 with masses m_j."""

    def __init__(self, positions: Sequence[float], masses: Sequence[float]):
        order = np.argsort(positions)
        self.p = np.asarray(positions, float)[order]
        self.m = np.asarray(masses, float)[order]
        self.reach = float(self.p[-1])

    def tail_mass(self, t):
        t = np.asarray(t, float)
        return (t[..., None] < self.p) @ self.m

    def tail_mass_closed(self, t):
        t = np.asarray(t, float)
        return (t[..., None] <= self.p) @ self.m

    def density_at(self, t):
        return np.zeros_like(np.asarray(t, float))

    def density_slope(self, t):
        return 0.0

    def cum_tail(self, t):
        t = np.asarray(t, float)
        return np.minimum(t[..., None], self.p) @ self.m

    def cum_tail2(self, t):
        t = np.asarray(t, float)[..., None]
        # per atom: t^2/2 while t <= p, then p*t - p^2/2 (C^1 continuation)
        per = np.where(t <= self.p, 0.5 * t * t, self.p * t - 0.5 * self.p * self.p)
        return per @ self.m

    def moment_between(self, lo, hi):
        keep = (self.p >= lo) & (self.p < hi)
        return float(np.sum(self.p[keep] * self.m[keep]))


class _StableSide(_Side):
    """Power density c * t**(-1-alpha) on (0, inf)."""

    def __init__(self, c: float, alpha: float):
        self.c = float(c)
        self.alpha = float(alpha)

    def tail_mass(self, t):
        t = np.asarray(t, float)
        return (self.c / self.alpha) * t ** (-self.alpha)

    def density_at(self, t):
        t = np.asarray(t, float)
        return self.c * t ** (-1.0 - self.alpha)

    def density_slope(self, t):
        return -(1.0 + self.alpha) * self.c * t ** (-2.0 - self.alpha)

    def cum_tail(self, t):
        t = np.asarray(t, float)
        a = self.alpha
        if a == 1.0:
            return self.c * np.log(t)
        return (self.c / a) * t ** (1.0 - a) / (1.0 - a)

    def cum_tail2(self, t):
        t = np.asarray(t, float)
        a = self.alpha
        if a == 1.0:
            safe = np.where(t > 0.0, t, 1.0)
            return np.where(t > 0.0, self.c * (safe * np.log(safe) - safe), 0.0)
        return (self.c / a) * t ** (2.0 - a) / ((1.0 - a) * (2.0 - a))

    def moment_between(self, lo, hi):
        a = self.alpha
        if a == 1.0:
            return self.c * math.log(hi / lo)
        return self.c * (hi ** (1.0 - a) - lo ** (1.0 - a)) / (1.0 - a)


class _GammaSide(_Side):
    """Density shape * exp(-rate*t)/t on (0, inf)."""

    def __init__(self, shape: float, rate: float):
        self.shape = float(shape)
        self.rate = float(rate)

    def tail_mass(self, t):
        return self.shape * exp1(self.rate * np.asarray(t, float))

    def density_at(self, t):
        t = np.asarray(t, float)
        return self.shape * np.exp(-self.rate * t) / t

    def density_slope(self, t):
        return -self.shape * math.exp(-self.rate * t) * (self.rate / t + 1.0 / t**2)

    def cum_tail(self, t):
        u = self.rate * np.asarray(t, float)
        safe = np.where(u > 0.0, u, 1.0)
        val = safe * exp1(safe) - np.exp(-safe)
        return (self.shape / self.rate) * np.where(u > 0.0, val, -1.0)

    def cum_tail2(self, t):
        u = self.rate * np.asarray(t, float)
        safe = np.where(u > 0.0, u, 1.0)
        val = 0.5 * (safe * safe * exp1(safe) + (1.0 - safe) * np.exp(-safe))
        return (self.shape / self.rate**2) * np.where(u > 0.0, val, 0.5)

    def moment_between(self, lo, hi):
        r = self.rate
        return self.shape * (math.exp(-r * lo) - math.exp(-r * hi)) / r


class _TemperedPowerSide(_Side):
    """Density c * t**(-1-y) * exp(-rate*t) on (0, inf), y < 2, y != 0."""

    def __init__(self, c: float, rate: float, y: float):
        self.c = float(c)
        self.rate = float(rate)
        self.y = float(y)
        self.s = -float(y)  # exponent of the incomplete-gamma ladder

    def tail_mass(self, t):
        v = self.rate * np.asarray(t, float)
        return self.c * self.rate**self.y * upper_gamma(self.s, v)

    def density_at(self, t):
        t = np.asarray(t, float)
        return self.c * t ** (-1.0 - self.y) * np.exp(-self.rate * t)

    def density_slope(self, t):
        return -self.c * t ** (-2.0 - self.y) * math.exp(-self.rate * t) * (
            1.0 + self.y + self.rate * t
        )

    def cum_tail(self, t):
        v = self.rate * np.asarray(t, float)
        val = v * upper_gamma(self.s, v) - upper_gamma(self.s + 1.0, v)
        return self.c * self.rate ** (self.y - 1.0) * val

    def cum_tail2(self, t):
        v = self.rate * np.asarray(t, float)
        safe = np.where(v > 0.0, v, 1.0)
        val = (
            0.5 * safe * safe * upper_gamma(self.s, safe)
            - safe * upper_gamma(self.s + 1.0, safe)
            + 0.5 * upper_gamma(self.s + 2.0, safe)
        )
        at_zero = 0.5 * math.gamma(self.s + 2.0)
        return self.c * self.rate ** (self.y - 2.0) * np.where(v > 0.0, val, at_zero)

    def moment_between(self, lo, hi):
        r = self.rate
        val = upper_gamma(1.0 - self.y, r * lo) - upper_gamma(1.0 - self.y, r * hi)
        return float(self.c * r ** (self.y - 1.0) * val)


def _scalar_map(fn: Callable[[float], float], t) -> np.ndarray | float:
    arr = np.asarray(t, float)
    out = np.array([fn(float(v)) for v in np.atleast_1d(arr)])
    return out.reshape(arr.shape) if arr.shape else float(out[0])


class _DensitySide(_Side):
    """Numeric fallback for user-supplied densities (adaptive quadrature)."""

    def __init__(self, density: Callable[[float], float], orientation: int):
        self._density = density
        self._orientation = orientation

    def _quad(self, fn, lo, hi) -> float:
        with warnings.catch_warnings():
            warnings.simplefilter("error", IntegrationWarning)
            try:
                val, err = quad(fn, lo, hi, epsabs=1e-12, epsrel=1e-9, limit=200)
            except (IntegrationWarning, Exception) as exc:  # noqa: BLE001
                if isinstance(exc, (KeyboardInterrupt, SystemExit)):
                    raise
                raise TailQuadratureError(
                    f"tail quadrature failed on ({lo}, {hi}): {exc}"
                ) from exc
        if err > max(1e-9, 1e-6 * abs(val)):
            raise TailQuadratureError(
                f"tail quadrature error {err:.2e} too large on ({lo}, {hi})"
            )
        return val

    def density_at(self, t):
        return _scalar_map(lambda v: self._density(self._orientation * v), t)

    def tail_mass(self, t):
        def one(v: float) -> float:
            return self._quad(lambda u: self._density(self._orientation * u), v, np.inf)

        return _scalar_map(one, t)

    def k_value(self, t, anchor):
        def one(v: float) -> float:
            lo, hi, sgn = (v, anchor, 1.0) if v <= anchor else (anchor, v, -1.0)
            return sgn * self._quad(lambda u: float(self.tail_mass(u)), lo, hi)

        return _scalar_map(one, t)

    def k_integral(self, lo, hi, anchor):
        def one(pair) -> float:
            a, b = pair
            if a == b:
                return 0.0
            return self._quad(lambda u: float(self.k_value(u, anchor)), a, b)

        lo = np.asarray(lo, float)
        hi = np.asarray(hi, float)
        flat = [one(p) for p in zip(np.atleast_1d(lo).ravel(), np.atleast_1d(hi).ravel())]
        out = np.array(flat).reshape(np.broadcast(lo, hi).shape)
        return out if out.shape else float(out)

    def moment_between(self, lo, hi):
        return self._quad(lambda u: u * self._density(self._orientation * u), lo, hi)


def _sides_of(measure: LevyMeasureSpec) -> tuple[_Side, _Side]:
    """Split the measure into (negative side reflected, positive side)."""
    if isinstance(measure, NoJumps):
        return _ZeroSide(), _ZeroSide()
    atoms = atoms_of(measure)
    if atoms is not None:
        neg = [(abs(p), m) for p, m in atoms if p < 0]
        pos = [(p, m) for p, m in atoms if p > 0]
        side_m = _AtomSide(*zip(*neg)) if neg else _ZeroSide()
        side_p = _AtomSide(*zip(*pos)) if pos else _ZeroSide()
        return side_m, side_p
    if isinstance(measure, StableJumps):
        c_minus, c_plus = measure.intensities
        side_m = _StableSide(c_minus, measure.alpha) if c_minus > 0 else _ZeroSide()
        side_p = _StableSide(c_plus, measure.alpha) if c_plus > 0 else _ZeroSide()
        return side_m, side_p
    if isinstance(measure, GammaJumps):
        return _ZeroSide(), _GammaSide(measure.shape, measure.rate)
    if isinstance(measure, CGMYJumps):
        if measure.Y == 0.0:
            return _GammaSide(measure.C, measure.G), _GammaSide(measure.C, measure.M)
        return (
            _TemperedPowerSide(measure.C, measure.G, measure.Y),
            _TemperedPowerSide(measure.C, measure.M, measure.Y),
        )
    if isinstance(measure, DensityMeasure):
        side_m = _DensitySide(measure.density, -1) if measure.charges_negative else _ZeroSide()
        side_p = _DensitySide(measure.density, +1) if measure.charges_positive else _ZeroSide()
        return side_m, side_p
    raise TypeError(f"unsupported measure specification: {type(measure).__name__}")


# ---------------------------------------------------------------------------
# Tail and kernel functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TailFunctions:
    """Cumulative jump-mass functions on each half-line.

    ``mu_minus(x)`` for x < 0 is the mass of ``(-inf, x]`` (nonnegative,
    nondecreasing); ``mu_plus(x)`` for x > 0 is minus the mass of
    ``(x, inf)`` (nonpositive, nondecreasing).  Both vanish at infinity.
    """

    triplet: LevyTriplet
    side_minus: _Side
    side_plus: _Side

    def mu_minus(self, x) -> np.ndarray | float:
        x = np.asarray(x, float)
        return self.side_minus.tail_mass_closed(np.abs(x))

    def mu_plus(self, x) -> np.ndarray | float:
        x = np.asarray(x, float)
        return -self.side_plus.tail_mass(x)


def tail_functions(triplet: LevyTriplet) -> TailFunctions:
    """Build the one-sided tail functions of the jump measure.

    Closed forms are used for atom, stable, gamma and tempered-power
    measures; user-supplied densities fall back to adaptive quadrature and
    raise :class:`TailQuadratureError` when it cannot converge.
    """
    side_m, side_p = _sides_of(triplet.measure)
    return TailFunctions(triplet=triplet, side_minus=side_m, side_plus=side_p)


@dataclass(frozen=True)
class KernelFunctions:
    """Anchored kernel functions and the sign-kernel drift coefficient.

    ``k_minus``/``k_plus`` are antiderivatives of the tail functions pinned
    to vanish at ``-anchor`` and ``+anchor``.  ``gamma1``/``gamma2`` are the
    one-sided kernel derivatives at the anchor (taken from the origin side,
    so an atom sitting exactly at the anchor is included), scaled by the
    anchor; ``Gamma`` is their sum.  ``drift_coefficient`` multiplies the
    sign-kernel ``-(1/2) sign(u)`` and equals ``gamma - Gamma`` at the
    default anchor 1; for other anchors the signed jump moment between
    radius 1 and the anchor is added so the represented operator does not
    depend on the anchor.
    """

    tails: TailFunctions
    anchor: float
    gamma1: float
    gamma2: float
    Gamma: float
    drift_coefficient: float

    def k_minus(self, x) -> np.ndarray | float:
        """Kernel on the negative half-line, k(-anchor) = 0."""
        x = np.asarray(x, float)
        return self.tails.side_minus.k_value(np.abs(x), self.anchor)

    def k_plus(self, x) -> np.ndarray | float:
        """Kernel on the positive half-line, k(+anchor) = 0."""
        x = np.asarray(x, float)
        return self.tails.side_plus.k_value(x, self.anchor)


def kernel_functions(tails: TailFunctions, anchor: float = 1.0) -> KernelFunctions:
    """Anchored kernels, boundary derivatives and drift coefficient.

    Parameters
    ----------
    tails : TailFunctions
        Output of :func:`tail_functions`.
    anchor : float
        Positive pinning point of the kernels; 1 reproduces the standard
        construction.
    """
    if anchor <= 0.0:
        raise ValueError(f"anchor must be positive, got {anchor}")
    side_m, side_p = tails.side_minus, tails.side_plus
    gamma1 = anchor * float(side_m.tail_mass_closed(np.asarray(anchor)))
    gamma2 = -anchor * float(side_p.tail_mass_closed(np.asarray(anchor)))
    big_gamma = gamma1 + gamma2
    if anchor > 1.0:
        between = side_p.moment_between(1.0, anchor) - side_m.moment_between(1.0, anchor)
    elif anchor < 1.0:
        between = -(side_p.moment_between(anchor, 1.0) - side_m.moment_between(anchor, 1.0))
    else:
        between = 0.0
    drift = tails.triplet.gamma - big_gamma + between
    return KernelFunctions(
        tails=tails,
        anchor=anchor,
        gamma1=gamma1,
        gamma2=gamma2,
        Gamma=big_gamma,
        drift_coefficient=drift,
    )


def unified_kernel(
    triplet: LevyTriplet, kernels: KernelFunctions | None = None
) -> Callable[[np.ndarray], np.ndarray]:
    """Pointwise evaluator for K_tot(u) = k(u) - (d/2) sign(u).

    Defined for u != 0; at 0 the jump kernel may diverge (integrable
    singularity for infinite-variation measures), so use cell averages
    there.  The diffusion term A/2 is *not* part of K_tot.
    """
    if kernels is None:
        kernels = kernel_functions(tail_functions(triplet))
    side_m, side_p = kernels.tails.side_minus, kernels.tails.side_plus
    a = kernels.anchor
    d = kernels.drift_coefficient

    def k_tot(u) -> np.ndarray | float:
        u = np.asarray(u, float)
        out = np.zeros(np.shape(u))
        flat_u = np.atleast_1d(u)
        flat = np.atleast_1d(out).astype(float)
        neg = flat_u < 0.0
        pos = flat_u > 0.0
        if np.any(neg):
            flat[neg] = side_m.k_value(-flat_u[neg], a)
        if np.any(pos):
            flat[pos] = side_p.k_value(flat_u[pos], a)
        flat -= 0.5 * d * np.sign(flat_u)
        return flat.reshape(u.shape) if u.shape else float(flat[0])

    return k_tot


def _jump_integral(kernels: KernelFunctions, lo, hi) -> np.ndarray:
    """Exact integral of the jump kernel alone over [lo, hi], lo <= hi."""
    lo = np.asarray(lo, float)
    hi = np.asarray(hi, float)
    side_m, side_p = kernels.tails.side_minus, kernels.tails.side_plus
    a = kernels.anchor
    pos = side_p.k_integral(np.clip(lo, 0.0, None), np.clip(hi, 0.0, None), a)
    neg = side_m.k_integral(np.clip(-hi, 0.0, None), np.clip(-lo, 0.0, None), a)
    return pos + neg


def kernel_integral(kernels: KernelFunctions, lo, hi) -> np.ndarray | float:
    """Exact integral of K_tot over [lo, hi] (vectorized, lo <= hi).

    Cells may straddle 0: the jump part splits at the origin and the
    sign-kernel part integrates to ``-(d/2)(|hi| - |lo|)`` exactly.
    """
    lo = np.asarray(lo, float)
    hi = np.asarray(hi, float)
    sign_part = -0.5 * kernels.drift_coefficient * (np.abs(hi) - np.abs(lo))
    return _jump_integral(kernels, lo, hi) + sign_part


# ---------------------------------------------------------------------------
# Tabulation
# ---------------------------------------------------------------------------


@dataclass
class KernelTable:
    """Uniform-cell tabulation of K_tot as exact cell averages.

    Cells are centered at integer multiples of ``step``;
    ``cell_avg[k] = (1/step) * int_{u_left[k]}^{u_right[k]} K_tot(u) du``.
    Averages stay finite even where K_tot has an integrable blow-up at 0.
    ``integral`` is an exact evaluator ``(lo, hi) -> int K_tot`` retained
    when the table is built in-process; tables loaded from CSV have none
    and can only serve lattice offsets.
    """

    u_left: np.ndarray
    u_right: np.ndarray
    cell_avg: np.ndarray
    step: float
    anchor: float
    diffusion: float
    drift_coefficient: float
    integral: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.u_left + self.u_right)

    @property
    def radius(self) -> float:
        return float(self.u_right[-1])

    def average_over(self, offsets) -> np.ndarray:
        """Cell average of K_tot over width-``step`` cells at given centers.

        Lattice offsets (integer multiples of ``step``) are served from the
        stored table; anything else requires the exact evaluator and raises
        :class:`TableCoverageError` when the table was loaded from CSV.
        """
        offsets = np.atleast_1d(np.asarray(offsets, float))
        h = self.step
        k = np.rint(offsets / h).astype(int)
        ncell = (len(self.cell_avg) - 1) // 2
        lattice = (np.abs(offsets - k * h) <= 1e-9 * h) & (np.abs(k) <= ncell)
        out = np.empty_like(offsets)
        out[lattice] = self.cell_avg[k[lattice] + ncell]
        missing = ~lattice
        if np.any(missing):
            if self.integral is None:
                worst = offsets[missing][0]
                raise TableCoverageError(
                    f"kernel table does not cover offset {worst!r} "
                    f"(lattice step {h}, radius {self.radius})"
                )
            lo = offsets[missing] - 0.5 * h
            hi = offsets[missing] + 0.5 * h
            out[missing] = np.asarray(self.integral(lo, hi)) / h
        return out

    def to_csv(self, path) -> None:
        """Write cells as CSV with columns u_left,u_right,cell_avg."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["u_left", "u_right", "cell_avg"])
            for left, right, avg in zip(self.u_left, self.u_right, self.cell_avg):
                writer.writerow([repr(float(left)), repr(float(right)), repr(float(avg))])

    @classmethod
    def from_csv(
        cls,
        path,
        *,
        anchor: float = 1.0,
        diffusion: float = 0.0,
        drift_coefficient: float = 0.0,
    ) -> "KernelTable":
        """Load a table written by :meth:`to_csv` (lattice cells only)."""
        lefts: list[float] = []
        rights: list[float] = []
        avgs: list[float] = []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != ["u_left", "u_right", "cell_avg"]:
                raise ValueError(f"unexpected kernel-table header: {header!r}")
            for row in reader:
                lefts.append(float(row[0]))
                rights.append(float(row[1]))
                avgs.append(float(row[2]))
        u_left = np.asarray(lefts)
        u_right = np.asarray(rights)
        # span / count loses far less precision than a single cell difference
        step = float((u_right[-1] - u_left[0]) / len(lefts))
        return cls(
            u_left=u_left,
            u_right=u_right,
            cell_avg=np.asarray(avgs),
            step=step,
            anchor=anchor,
            diffusion=diffusion,
            drift_coefficient=drift_coefficient,
            integral=None,
        )


def tabulate(kernels: KernelFunctions, step: float, radius: float, A: float = 0.0) -> KernelTable:
    """Tabulate K_tot as exact cell averages on a symmetric uniform grid.

    Cells are centered at ``k*step`` for ``|k| <= ceil(radius/step - 1/2)``
    so the cells cover at least ``[-radius, radius]``.  All averages come
    from closed-form antiderivatives (adaptive quadrature for density
    measures), never from midpoint sampling, so the center cell is exact
    despite any integrable singularity.  Evaluation is vectorized over
    cells and deterministic.
    """
    if step <= 0.0 or radius <= 0.0:
        raise ValueError(f"step and radius must be positive, got {step}, {radius}")
    ncell = max(1, math.ceil(radius / step - 0.5 - 1e-12))
    idx = np.arange(-ncell, ncell + 1)
    u_left = idx * step - 0.5 * step
    u_right = idx * step + 0.5 * step
    # The sign-kernel average is exactly -(d/2) sign(center) on the lattice:
    # the only cell straddling the origin is centered there, so its odd part
    # averages to zero.  Adding the average (not the integral/step quotient)
    # keeps pure-drift tables exact to the last bit.
    sign_avg = -0.5 * kernels.drift_coefficient * np.sign(idx)
    jump = np.asarray(_jump_integral(kernels, u_left, u_right))
    return KernelTable(
        u_left=u_left,
        u_right=u_right,
        cell_avg=jump / step + sign_avg,
        step=float(step),
        anchor=kernels.anchor,
        diffusion=float(A),
        drift_coefficient=kernels.drift_coefficient,
        integral=lambda lo, hi: kernel_integral(kernels, lo, hi),
    )


def suggest_radius(
    kernels: KernelFunctions,
    rel_tail: float = 1e-6,
    minimum: float = 1.0,
    fallback: float = 50.0,
) -> float:
    """Truncation radius with relative jump-kernel tail below ``rel_tail``.

    For atom measures the kernel is exactly flat beyond the farthest atom;
    for exponentially tempered tails a doubling search brings the remaining
    tail mass under ``rel_tail`` of the bulk kernel weight.  Power tails
    (stable) have no finite radius meeting an integrated-tail criterion, so
    ``fallback`` is returned; the Fourier check compensates the remainder
    analytically and errors out if the radius is genuinely too small.
    """
    side_m, side_p = kernels.tails.side_minus, kernels.tails.side_plus
    a = kernels.anchor
    reach = max(side_m.reach, side_p.reach, a, minimum)
    if math.isfinite(reach) and all(
        isinstance(s, (_AtomSide, _ZeroSide)) for s in (side_m, side_p)
    ):
        return reach
    if any(isinstance(s, (_StableSide, _DensitySide)) for s in (side_m, side_p)):
        return max(fallback, minimum, a)
    # tempered tails: remaining integral of the tail mass is -cum_tail(R)
    bulk = float(
        side_p.k_integral(np.asarray(0.0), np.asarray(a), a)
        + side_m.k_integral(np.asarray(0.0), np.asarray(a), a)
    )
    bulk = max(bulk, 1e-300)
    radius = max(a, minimum)
    for _ in range(60):
        tail = -float(side_p.cum_tail(np.asarray(radius))) - float(
            side_m.cum_tail(np.asarray(radius))
        )
        if tail <= rel_tail * bulk:
            return radius
        radius *= 2.0
    raise TruncationRadiusError("no finite radius meets the tail criterion")


# ---------------------------------------------------------------------------
# Fourier symbol check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymbolCheckReport:
    """Residuals of the Fourier identity transform(K_tot) + A/2 = lambda/z^2."""

    frequencies: np.ndarray
    residuals: np.ndarray
    max_residual: float
    positivity_margin: float
    step: float
    radius: float


def _side_tail_correction(side: _Side, edge: float, anchor: float, z: np.ndarray, sign: int):
    """Analytic transform of the jump kernel beyond one table edge.

    Integration by parts four times gives, for the positive side with
    table edge U (sign=+1),

        int_U^inf e^{izu} k(u) du
          = e^{izU} (-k(U) w + mu(U) w^2 - n(U) w^3 + n'(U) w^4)
            + O(|n'(U)|/|z|^4),

    with w = 1/(iz), mu the signed tail and n the density; the mirrored
    formula holds on the negative side (sign=-1), where n' denotes the
    slope of the reflected density.  For atom measures the kernel is flat
    beyond the atoms and the first term alone is exact.
    """
    if not side.active:
        return np.zeros_like(z, dtype=complex)
    w = 1.0 / (1j * z)
    edge_arr = np.asarray(edge, float)
    kval = float(side.k_value(edge_arr, anchor))
    tail = float(side.tail_mass(edge_arr))
    dens = float(side.density_at(edge_arr)) if not isinstance(side, _AtomSide) else 0.0
    slope = side.density_slope(edge)
    fourth = (slope if slope is not None else 0.0) * w**4
    phase = np.exp(1j * z * sign * edge)
    if sign > 0:
        mu = -tail  # mu_plus(edge) <= 0
        return phase * (-kval * w + mu * w**2 - dens * w**3 + fourth)
    mu = tail  # mu_minus(-edge) >= 0
    return phase * (kval * w - mu * w**2 + dens * w**3 + fourth)


def kernel_symbol_check(
    triplet: LevyTriplet,
    table: KernelTable,
    frequencies: Sequence[float],
    tolerance: float = 1e-3,
) -> SymbolCheckReport:
    """Verify the tabulated kernel against the process symbol in Fourier space.

    For each nonzero frequency z the check assembles the transform of
    K_tot from three exact pieces: the discrete transform of the tabulated
    jump-kernel cell averages (piecewise-constant transform, exact per
    cell), analytic tail corrections beyond the table edges, and the
    closed-form transform ``-i d/z`` of the sign-kernel.  The residual is

        | transform + A/2 - lambda(z)/z^2 |

    and the report also carries the worst-case real-part margin of the
    jump transform, which must be nonnegative up to roundoff.

    Raises
    ------
    TruncationRadiusError
        If jump mass beyond the table edges is too large for the requested
        tolerance (third-order remainder bound above ``tolerance/2``), or
        if an atom lies beyond the edge.
    """
    z = np.asarray(frequencies, float)
    if z.ndim != 1 or len(z) == 0:
        raise ValueError("frequencies must be a nonempty 1-d sequence")
    if np.any(z == 0.0):
        raise ValueError("frequencies must be nonzero (the identity divides by z^2)")
    tails = tail_functions(triplet)
    kern = kernel_functions(tails, table.anchor)
    if abs(kern.drift_coefficient - table.drift_coefficient) > 1e-10 * max(
        1.0, abs(kern.drift_coefficient)
    ):
        raise ValueError(
            "kernel table drift coefficient "
            f"{table.drift_coefficient!r} does not match the triplet "
            f"({kern.drift_coefficient!r})"
        )
    side_m, side_p = tails.side_minus, tails.side_plus
    edge_p = float(table.u_right[-1])
    edge_m = float(-table.u_left[0])

    # Remainder beyond the edges: atoms must be inside; densities leave a
    # third-order term bounded by the edge density over |z|^3.
    for side, edge, name in ((side_p, edge_p, "right"), (side_m, edge_m, "left")):
        if isinstance(side, _AtomSide) and side.reach > edge:
            raise TruncationRadiusError(
                f"truncation radius too small: atom at reach {side.reach} outside "
                f"the {name} table edge {edge}"
            )
    remainder = np.zeros_like(z)
    for side, edge in ((side_p, edge_p), (side_m, edge_m)):
        if isinstance(side, (_AtomSide, _ZeroSide)):
            continue
        slope = side.density_slope(edge)
        if slope is None:
            # numeric density: stop at third order, bound by the edge density
            remainder = remainder + float(side.density_at(np.asarray(edge))) / np.abs(z) ** 3
        else:
            remainder = remainder + abs(slope) / np.abs(z) ** 4
    if np.any(remainder > 0.5 * tolerance):
        worst = float(np.max(remainder))
        raise TruncationRadiusError(
            f"truncation radius too small: tail remainder bound {worst:.3e} "
            f"exceeds half the tolerance {tolerance:.3e}"
        )

    h = table.step
    centers = table.centers
    d = table.drift_coefficient
    # Remove the sign-kernel averages: exact since the only cell straddling
    # the origin is centered there, where the odd part averages to zero.
    jump_avg = table.cell_avg + 0.5 * d * np.sign(centers)
    shape_factor = h * np.sinc(z * h / (2.0 * np.pi))
    phases = np.exp(1j * np.outer(z, centers))
    transform = (phases @ jump_avg) * shape_factor
    transform = transform + _side_tail_correction(side_p, edge_p, table.anchor, z, +1)
    transform = transform + _side_tail_correction(side_m, edge_m, table.anchor, z, -1)

    symbol_side = levy_symbol(triplet, z) / z**2
    total = transform - 1j * d / z + 0.5 * triplet.A
    residuals = np.abs(total - symbol_side)
    return SymbolCheckReport(
        frequencies=z,
        residuals=residuals,
        max_residual=float(np.max(residuals)),
        positivity_margin=float(np.min(np.real(transform))),
        step=h,
        radius=max(edge_p, edge_m),
    )
