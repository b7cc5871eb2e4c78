"""Levy triplets, jump-measure families, and the Levy symbol.

A process is specified by the triplet (A, gamma, measure): diffusion
coefficient A >= 0, drift gamma, and a jump measure given either as a list
of atoms, a density with declared tail behavior, or a named family.  The
module classifies processes (type I vs type II), determines path support,
detects symmetry, and evaluates the Levy symbol lambda(z) defined by
E e^{izX_t} = e^{-t lambda(z)} with the |x| < 1 compensator convention.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.special import exp1, gamma as gamma_fn, gammaincc


class ProcessType(Enum):
    TYPE_I = "TypeI"
    TYPE_II = "TypeII"


class SupportKind(Enum):
    FULL_LINE = "FullLine"
    HALF_LINE_UP = "HalfLineUp"
    HALF_LINE_DOWN = "HalfLineDown"


class UnclassifiableMeasureError(ValueError):
    """Density measure lacks the declared behavior needed to classify it."""


class SymbolIntegrationError(RuntimeError):
    """Adaptive quadrature of the Levy symbol failed to converge."""


# ---------------------------------------------------------------------------
# Jump-measure variants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NoJumps:
    """Empty jump measure (Brownian or pure-drift processes)."""


@dataclass(frozen=True)
class AtomMeasure:
    """Finite jump measure concentrated on finitely many atoms.

    Attributes
    ----------
    atoms : tuple of (position, mass)
        Jump sizes and their intensities.  Positions exclude 0, masses are
        strictly positive.
    """

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.atoms) == 0:
            raise ValueError("atom list must be nonempty; use NoJumps for an empty measure")
        for pos, mass in self.atoms:
            if pos == 0.0:
                raise ValueError("atom positions must exclude 0")
            if mass <= 0.0:
                raise ValueError(f"atom masses must be positive, got {mass} at {pos}")


@dataclass(frozen=True)
class DensityMeasure:
    """Jump measure with an evaluable density and declared tail behavior.

    Finiteness near 0 and at infinity is metadata, never decided by
    quadrature (diverging vs converging integrals are not robustly
    decidable numerically).

    Attributes
    ----------
    density : callable
        Pointwise density nu(x), nonnegative wherever evaluated.
    finite_total_mass : bool or None
        Declared finiteness of the total mass (behavior near 0).  None
        means undeclared; classification then raises.
    finite_first_moment : bool
        Declared finiteness of the tail first moment, integral of |x| nu(dx)
        over |x| >= 1.
    finite_small_variation : bool
        Declared finiteness of the small-jump first moment, integral of
        |x| nu(dx) over |x| < 1 (finite-variation small jumps).
    charges_negative, charges_positive : bool
        Which half-lines carry mass.
    """

    density: Callable[[float], float]
    finite_total_mass: bool | None = None
    finite_first_moment: bool = True
    finite_small_variation: bool = True
    charges_negative: bool = True
    charges_positive: bool = True


@dataclass(frozen=True)
class PoissonJumps:
    """Standard Poisson process jumps: nu = rate * delta_{+1}."""

    rate: float = 1.0

    def __post_init__(self):
        if self.rate <= 0.0:
            raise ValueError(f"rate must be positive, got {self.rate}")


@dataclass(frozen=True)
class CompoundPoissonJumps:
    """Compound Poisson jumps with a discrete jump-size law.

    nu = rate * sum_j prob_j * delta_{size_j}.

    Attributes
    ----------
    rate : float
        Total jump intensity.
    jumps : tuple of (size, probability)
        Discrete jump-size law; probabilities sum to 1.
    """

    rate: float
    jumps: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if self.rate <= 0.0:
            raise ValueError(f"rate must be positive, got {self.rate}")
        total = 0.0
        for size, prob in self.jumps:
            if size == 0.0:
                raise ValueError("jump sizes must exclude 0")
            if prob <= 0.0:
                raise ValueError(f"jump probabilities must be positive, got {prob}")
            total += prob
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"jump probabilities must sum to 1, got {total}")


@dataclass(frozen=True)
class StableJumps:
    """Stable jump measure c_+ x^{-1-alpha} dx + c_- |x|^{-1-alpha} dx.

    Normalized so that the symmetric case has symbol scale^alpha |z|^alpha:
    c_+ + c_- = scale^alpha / I_alpha with I_alpha = -Gamma(-alpha) cos(pi
    alpha / 2) (I_1 = pi/2), and c_+ - c_- = skew * (c_+ + c_-).

    Attributes
    ----------
    alpha : float
        Stability index in (0, 2).
    scale : float
        Scale parameter sigma > 0.
    skew : float
        Skewness beta in [-1, 1]; 0 is symmetric.
    """

    alpha: float
    scale: float = 1.0
    skew: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            raise ValueError(f"alpha must be in (0, 2), got {self.alpha}")
        if self.scale <= 0.0:
            raise ValueError(f"scale must be positive, got {self.scale}")
        if not -1.0 <= self.skew <= 1.0:
            raise ValueError(f"skew must be in [-1, 1], got {self.skew}")

    @property
    def intensities(self) -> tuple[float, float]:
        """Tail intensities (c_minus, c_plus) of the density."""
        total = self.scale**self.alpha / _stable_norm(self.alpha)
        c_plus = 0.5 * total * (1.0 + self.skew)
        c_minus = 0.5 * total * (1.0 - self.skew)
        return c_minus, c_plus


@dataclass(frozen=True)
class GammaJumps:
    """Gamma-subordinator jump measure shape * x^{-1} e^{-rate x} dx on (0, inf)."""

    shape: float
    rate: float

    def __post_init__(self):
        if self.shape <= 0.0:
            raise ValueError(f"shape must be positive, got {self.shape}")
        if self.rate <= 0.0:
            raise ValueError(f"rate must be positive, got {self.rate}")


@dataclass(frozen=True)
class CGMYJumps:
    """Tempered-stable (CGMY) jump measure.

    nu(x) = C e^{-G|x|} |x|^{-1-Y} dx for x < 0 and C e^{-M x} x^{-1-Y} dx
    for x > 0, with Y < 2.
    """

    C: float
    G: float
    M: float
    Y: float

    def __post_init__(self):
        if self.C <= 0.0:
            raise ValueError(f"C must be positive, got {self.C}")
        if self.G <= 0.0:
            raise ValueError(f"G must be positive, got {self.G}")
        if self.M <= 0.0:
            raise ValueError(f"M must be positive, got {self.M}")
        if self.Y >= 2.0:
            raise ValueError(f"Y must be < 2, got {self.Y}")


LevyMeasureSpec = (
    NoJumps
    | AtomMeasure
    | DensityMeasure
    | PoissonJumps
    | CompoundPoissonJumps
    | StableJumps
    | GammaJumps
    | CGMYJumps
)


@dataclass(frozen=True)
class LevyTriplet:
    """Levy triplet (A, gamma, measure).

    Attributes
    ----------
    A : float
        Diffusion coefficient, >= 0 (variance per unit time).
    gamma : float
        Drift (displacement per unit time), compensator cutoff |x| < 1.
    measure : LevyMeasureSpec
        Jump measure specification.
    """

    A: float
    gamma: float
    measure: LevyMeasureSpec = field(default_factory=NoJumps)

    def __post_init__(self):
        if self.A < 0.0:
            raise ValueError(f"diffusion coefficient A must be >= 0, got {self.A}")
        if not math.isfinite(self.A) or not math.isfinite(self.gamma):
            raise ValueError("triplet entries must be finite")


@dataclass(frozen=True)
class SupportDescriptor:
    """Support of the process law at time t, per-unit-time normalized.

    kind FullLine means S(X_t) is the whole line; HalfLineUp means
    S(X_t) = [t * offset_rate, inf); HalfLineDown the mirror image.
    offset_rate is the finite-variation drift gamma0 = gamma -
    integral_{|x|<1} x nu(dx) for the half-line cases.
    """

    kind: SupportKind
    offset_rate: float = 0.0


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of checking a triplet/domain pair before the spectral pipeline.

    The report never raises; the CLI decides whether to proceed.
    """

    process_type: ProcessType
    support: SupportDescriptor
    symmetric: bool
    domain_in_support: bool
    spectral_ok: bool
    messages: tuple[str, ...]


# ---------------------------------------------------------------------------
# Measure helpers
# ---------------------------------------------------------------------------


def _stable_norm(alpha: float) -> float:
    """I_alpha = -Gamma(-alpha) cos(pi alpha / 2), continuous with I_1 = pi/2."""
    if abs(alpha - 1.0) < 1e-12:
        return math.pi / 2.0
    return -gamma_fn(-alpha) * math.cos(math.pi * alpha / 2.0)


def atoms_of(measure: LevyMeasureSpec) -> tuple[tuple[float, float], ...] | None:
    """Return the atom list for finite discrete measures, else None."""
    if isinstance(measure, AtomMeasure):
        return measure.atoms
    if isinstance(measure, PoissonJumps):
        return ((1.0, measure.rate),)
    if isinstance(measure, CompoundPoissonJumps):
        merged: dict[float, float] = {}
        for size, prob in measure.jumps:
            merged[size] = merged.get(size, 0.0) + measure.rate * prob
        return tuple(sorted(merged.items()))
    return None


def total_mass(measure: LevyMeasureSpec) -> float:
    """Total mass of nu, possibly inf; raises for undeclared densities."""
    if isinstance(measure, NoJumps):
        return 0.0
    atoms = atoms_of(measure)
    if atoms is not None:
        return sum(mass for _, mass in atoms)
    if isinstance(measure, (StableJumps, GammaJumps)):
        return math.inf
    if isinstance(measure, CGMYJumps):
        return math.inf if measure.Y >= 0.0 else _cgmy_total_mass(measure)
    if isinstance(measure, DensityMeasure):
        if measure.finite_total_mass is None:
            raise UnclassifiableMeasureError(
                "unclassifiable measure: density variant must declare total-mass finiteness"
            )
        if not measure.finite_total_mass:
            return math.inf
        # Declared finite: quadrature is then safe for the actual value.
        val = 0.0
        if measure.charges_negative:
            val += _density_quad(measure.density, lambda x: 1.0, side=-1)
        if measure.charges_positive:
            val += _density_quad(measure.density, lambda x: 1.0, side=+1)
        return val
    raise TypeError(f"unknown measure variant {type(measure).__name__}")


def _cgmy_total_mass(measure: CGMYJumps) -> float:
    # Y < 0: integral of C e^{-Mx} x^{-1-Y} over (0, inf) = C M^Y Gamma(-Y), plus G side.
    return measure.C * gamma_fn(-measure.Y) * (
        measure.M**measure.Y + measure.G**measure.Y
    )


def charges_halflines(measure: LevyMeasureSpec) -> tuple[bool, bool]:
    """(charges_negative, charges_positive) for the jump measure."""
    if isinstance(measure, NoJumps):
        return False, False
    atoms = atoms_of(measure)
    if atoms is not None:
        neg = any(pos < 0 for pos, _ in atoms)
        pos_ = any(pos > 0 for pos, _ in atoms)
        return neg, pos_
    if isinstance(measure, StableJumps):
        c_minus, c_plus = measure.intensities
        return c_minus > 0.0, c_plus > 0.0
    if isinstance(measure, GammaJumps):
        return False, True
    if isinstance(measure, CGMYJumps):
        return True, True
    if isinstance(measure, DensityMeasure):
        return measure.charges_negative, measure.charges_positive
    raise TypeError(f"unknown measure variant {type(measure).__name__}")


def abs_moment_small_finite(measure: LevyMeasureSpec) -> bool:
    """Whether integral_{|x|<1} |x| nu(dx) is finite (finite-variation jumps)."""
    if isinstance(measure, NoJumps):
        return True
    if atoms_of(measure) is not None:
        return True
    if isinstance(measure, StableJumps):
        return measure.alpha < 1.0
    if isinstance(measure, GammaJumps):
        return True
    if isinstance(measure, CGMYJumps):
        return measure.Y < 1.0
    if isinstance(measure, DensityMeasure):
        return measure.finite_small_variation
    raise TypeError(f"unknown measure variant {type(measure).__name__}")


def compensator_mean(measure: LevyMeasureSpec) -> float:
    """integral_{|x|<1} x nu(dx), finite exactly when small jumps have finite variation."""
    if isinstance(measure, NoJumps):
        return 0.0
    atoms = atoms_of(measure)
    if atoms is not None:
        return sum(pos * mass for pos, mass in atoms if abs(pos) < 1.0)
    if isinstance(measure, StableJumps):
        if measure.alpha >= 1.0:
            raise ValueError("small-jump mean undefined for alpha >= 1")
        c_minus, c_plus = measure.intensities
        return (c_plus - c_minus) / (1.0 - measure.alpha)
    if isinstance(measure, GammaJumps):
        # integral_0^1 x * shape x^{-1} e^{-rate x} dx
        return measure.shape * (1.0 - math.exp(-measure.rate)) / measure.rate
    if isinstance(measure, CGMYJumps):
        if measure.Y >= 1.0:
            raise ValueError("small-jump mean undefined for Y >= 1")
        s = 1.0 - measure.Y
        up = measure.C * measure.M ** (-s) * (gamma_fn(s) - upper_gamma(s, measure.M))
        down = measure.C * measure.G ** (-s) * (gamma_fn(s) - upper_gamma(s, measure.G))
        return up - down
    if isinstance(measure, DensityMeasure):
        if not measure.finite_small_variation:
            raise ValueError("small-jump mean undefined for declared infinite variation")
        val = 0.0
        if measure.charges_positive:
            val += quad(lambda x: x * measure.density(x), 0.0, 1.0, limit=200)[0]
        if measure.charges_negative:
            val += quad(lambda x: x * measure.density(x), -1.0, 0.0, limit=200)[0]
        return val
    raise TypeError(f"unknown measure variant {type(measure).__name__}")


def upper_gamma(s: float, x: float | np.ndarray) -> float | np.ndarray:
    """Upper incomplete gamma Gamma(s, x) for s > -3, x > 0.

    Extends scipy (which needs s > 0) by the downward recursion
    Gamma(s, x) = (Gamma(s+1, x) - x^s e^{-x}) / s, stable for x > 0.
    """
    if s > 0.0:
        return gammaincc(s, x) * gamma_fn(s)
    if s == 0.0:
        return exp1(x)
    return (upper_gamma(s + 1.0, x) - x**s * np.exp(-x)) / s


# ---------------------------------------------------------------------------
# Classification, support, symmetry
# ---------------------------------------------------------------------------


def classify_type(triplet: LevyTriplet) -> ProcessType:
    """Type I iff A = 0 and the jump measure is finite; type II otherwise."""
    if triplet.A != 0.0:
        return ProcessType.TYPE_II
    if math.isinf(total_mass(triplet.measure)):
        return ProcessType.TYPE_II
    return ProcessType.TYPE_I


def finite_variation_drift(triplet: LevyTriplet) -> float:
    """Drift gamma0 = gamma - integral_{|x|<1} x nu(dx) of the uncompensated form."""
    return triplet.gamma - compensator_mean(triplet.measure)


def support_of(triplet: LevyTriplet) -> SupportDescriptor:
    """Support of the law of X_t per the triplet case analysis.

    Full line when A > 0, when small jumps have infinite variation, or when
    both half-lines are charged.  One-sided finite-variation jumps give a
    half line anchored at the finite-variation drift rate.
    """
    measure = triplet.measure
    if triplet.A > 0.0:
        return SupportDescriptor(SupportKind.FULL_LINE)
    if not abs_moment_small_finite(measure):
        return SupportDescriptor(SupportKind.FULL_LINE)
    neg, pos = charges_halflines(measure)
    if neg and pos:
        return SupportDescriptor(SupportKind.FULL_LINE)
    gamma0 = finite_variation_drift(triplet)
    if pos:
        return SupportDescriptor(SupportKind.HALF_LINE_UP, offset_rate=gamma0)
    if neg:
        return SupportDescriptor(SupportKind.HALF_LINE_DOWN, offset_rate=gamma0)
    # Pure drift: the law is a point mass; report the half line it sweeps.
    if gamma0 >= 0.0:
        return SupportDescriptor(SupportKind.HALF_LINE_UP, offset_rate=gamma0)
    return SupportDescriptor(SupportKind.HALF_LINE_DOWN, offset_rate=gamma0)


def is_symmetric(triplet: LevyTriplet) -> bool:
    """True iff gamma = 0 and the jump measure is mirror-symmetric."""
    if triplet.gamma != 0.0:
        return False
    measure = triplet.measure
    if isinstance(measure, NoJumps):
        return True
    atoms = atoms_of(measure)
    if atoms is not None:
        table = dict(atoms)
        return all(
            table.get(-pos) is not None and abs(table[-pos] - mass) <= 1e-12 * mass
            for pos, mass in table.items()
        )
    if isinstance(measure, StableJumps):
        return measure.skew == 0.0
    if isinstance(measure, GammaJumps):
        return False
    if isinstance(measure, CGMYJumps):
        return measure.G == measure.M
    if isinstance(measure, DensityMeasure):
        if measure.charges_negative != measure.charges_positive:
            return False
        pts = np.array([0.13, 0.37, 0.71, 1.0, 1.9, 3.7, 8.5])
        left = np.array([measure.density(-x) for x in pts])
        right = np.array([measure.density(x) for x in pts])
        scale = np.max(np.abs(right)) + np.max(np.abs(left))
        return bool(np.all(np.abs(left - right) <= 1e-10 * max(scale, 1e-300)))
    raise TypeError(f"unknown measure variant {type(measure).__name__}")


# ---------------------------------------------------------------------------
# Levy symbol
# ---------------------------------------------------------------------------


def levy_symbol(triplet: LevyTriplet, z: float | np.ndarray) -> complex | np.ndarray:
    """Levy symbol lambda(z), with E e^{izX_t} = e^{-t lambda(z)}.

    lambda(z) = A z^2 / 2 - i gamma z - integral (e^{izx} - 1 - izx 1_{|x|<1}) nu(dx).

    Closed forms are used per family where known; density variants fall
    back to adaptive quadrature split at the compensator breakpoint.
    Re lambda(z) >= 0 always holds.
    """
    z_arr = np.asarray(z, dtype=float)
    base = 0.5 * triplet.A * z_arr**2 - 1j * triplet.gamma * z_arr
    jump = _jump_symbol(triplet.measure, z_arr)
    out = base + jump
    if np.ndim(z) == 0:
        return complex(out)
    return out


def _jump_symbol(measure: LevyMeasureSpec, z: np.ndarray) -> np.ndarray:
    if isinstance(measure, NoJumps):
        return np.zeros_like(z, dtype=complex)
    atoms = atoms_of(measure)
    if atoms is not None:
        out = np.zeros_like(z, dtype=complex)
        for pos, mass in atoms:
            comp = 1j * z * pos if abs(pos) < 1.0 else 0.0
            out -= mass * (np.exp(1j * z * pos) - 1.0 - comp)
        return out
    if isinstance(measure, StableJumps):
        return _stable_symbol(measure, z)
    if isinstance(measure, GammaJumps):
        sh, r = measure.shape, measure.rate
        return sh * np.log(1.0 - 1j * z / r) + 1j * z * sh * (1.0 - math.exp(-r)) / r
    if isinstance(measure, CGMYJumps):
        return _cgmy_symbol(measure, z)
    if isinstance(measure, DensityMeasure):
        return np.array([_density_symbol(measure, float(zz)) for zz in np.atleast_1d(z)]).reshape(
            z.shape
        )
    raise TypeError(f"unknown measure variant {type(measure).__name__}")


def _stable_symbol(measure: StableJumps, z: np.ndarray) -> np.ndarray:
    alpha = measure.alpha
    c_minus, c_plus = measure.intensities
    sigma_a = measure.scale**alpha
    if abs(alpha - 1.0) < 1e-12:
        # From integral_0^inf (e^{it} - 1_{t<1})/t dt = -euler_gamma + i pi/2.
        with np.errstate(divide="ignore", invalid="ignore"):
            log_term = np.where(z == 0.0, 0.0, np.log(np.abs(np.where(z == 0.0, 1.0, z))))
        return sigma_a * np.abs(z) + 1j * (c_plus - c_minus) * z * (
            np.euler_gamma - 1.0 + log_term
        )
    core = sigma_a * np.abs(z) ** alpha * (
        1.0 - 1j * measure.skew * math.tan(math.pi * alpha / 2.0) * np.sign(z)
    )
    if alpha > 1.0:
        # Compensating beyond the cutoff shifts the drift by the tail mean.
        tail_mean = (c_plus - c_minus) / (alpha - 1.0)
        return core - 1j * z * tail_mean
    small_mean = (c_plus - c_minus) / (1.0 - alpha)
    return core + 1j * z * small_mean


def _cgmy_symbol(measure: CGMYJumps, z: np.ndarray) -> np.ndarray:
    C, G, M, Y = measure.C, measure.G, measure.M, measure.Y
    if abs(Y - 1.0) < 1e-12 or abs(Y) < 1e-12:
        # Gamma(-Y) pole; integrate directly.
        def density(x: float) -> float:
            if x > 0:
                return C * math.exp(-M * x) * x ** (-1.0 - Y)
            return C * math.exp(G * x) * abs(x) ** (-1.0 - Y)

        spec = DensityMeasure(density, finite_total_mass=Y < 0.0, finite_first_moment=True)
        return np.array([_density_symbol(spec, float(zz)) for zz in np.atleast_1d(z)]).reshape(
            z.shape
        )
    g = gamma_fn(-Y)
    zz = np.asarray(z, dtype=complex)
    if Y > 1.0:
        # Fully compensated closed form plus the cutoff-change drift term.
        psi = C * g * (
            (M - 1j * zz) ** Y - M**Y + 1j * zz * Y * M ** (Y - 1.0)
            + (G + 1j * zz) ** Y - G**Y - 1j * zz * Y * G ** (Y - 1.0)
        )
        s = 1.0 - Y
        tail_mean = C * (
            M ** (-s) * upper_gamma(s, M) - G ** (-s) * upper_gamma(s, G)
        )
        return -psi - 1j * zz * tail_mean
    # Y < 1: uncompensated closed form plus the small-jump mean.
    psi = C * g * ((M - 1j * zz) ** Y - M**Y + (G + 1j * zz) ** Y - G**Y)
    small_mean = compensator_mean(measure)
    return -psi + 1j * zz * small_mean


def _density_quad(density: Callable[[float], float], weight: Callable[[float], float], side: int) -> float:
    """integral of weight(x) density(x) over one half-line, tails via x -> 1/x."""
    if side > 0:
        core = quad(lambda x: weight(x) * density(x), 0.0, 1.0, limit=200)[0]
        tail = quad(lambda u: weight(1.0 / u) * density(1.0 / u) / u**2, 0.0, 1.0, limit=200)[0]
    else:
        core = quad(lambda x: weight(x) * density(x), -1.0, 0.0, limit=200)[0]
        tail = quad(lambda u: weight(-1.0 / u) * density(-1.0 / u) / u**2, 0.0, 1.0, limit=200)[0]
    return core + tail


def _density_symbol(measure: DensityMeasure, z: float) -> complex:
    """Quadrature of the jump part, split at the compensator breakpoint |x| = 1."""
    out = 0.0 + 0.0j
    try:
        for side in (-1, +1):
            if side < 0 and not measure.charges_negative:
                continue
            if side > 0 and not measure.charges_positive:
                continue

            def core_f(x: float, s=side) -> complex:
                xx = s * x
                return (np.exp(1j * z * xx) - 1.0 - 1j * z * xx) * measure.density(xx)

            def tail_f(u: float, s=side) -> complex:
                xx = s / u
                return (np.exp(1j * z * xx) - 1.0) * measure.density(xx) / u**2

            core, core_err = quad(core_f, 0.0, 1.0, complex_func=True, limit=400)
            tail, tail_err = quad(tail_f, 0.0, 1.0, complex_func=True, limit=400)
            if max(abs(core_err), abs(tail_err)) > 1e-7 * max(1.0, abs(core) + abs(tail)):
                raise SymbolIntegrationError(
                    f"symbol integration failure at z={z}: quadrature error "
                    f"{max(abs(core_err), abs(tail_err)):.2e}"
                )
            out -= core + tail
    except SymbolIntegrationError:
        raise
    except Exception as exc:
        raise SymbolIntegrationError(f"symbol integration failure at z={z}: {exc}") from exc
    return out


# ---------------------------------------------------------------------------
# Problem validation
# ---------------------------------------------------------------------------


def validate_problem(triplet: LevyTriplet, domain) -> ValidationReport:
    """Check a triplet/domain pair ahead of the spectral pipeline.

    Flags the process type (the spectral pipeline requires type II), whether
    the domain lies inside the path support (half-line supports require the
    domain on the matching side), and symmetry.  Always returns a report;
    callers decide whether to proceed.  An unclassifiable density measure is
    reported as type I (spectral pipeline gated off) with the reason in
    ``messages``.
    """
    messages: list[str] = []
    try:
        ptype = classify_type(triplet)
    except UnclassifiableMeasureError as exc:
        ptype = ProcessType.TYPE_I
        messages.append(str(exc))
    support = support_of(triplet)
    symmetric = is_symmetric(triplet)

    lo = min(a for a, _ in domain.intervals)
    hi = max(b for _, b in domain.intervals)
    in_support = True
    if support.kind is SupportKind.HALF_LINE_UP and lo < 0.0:
        in_support = False
        messages.append(
            f"domain extends below 0 but the path support is the upper half line "
            f"(offset rate {support.offset_rate:g})"
        )
    elif support.kind is SupportKind.HALF_LINE_DOWN and hi > 0.0:
        in_support = False
        messages.append(
            f"domain extends above 0 but the path support is the lower half line "
            f"(offset rate {support.offset_rate:g})"
        )

    spectral_ok = ptype is ProcessType.TYPE_II and in_support
    if ptype is ProcessType.TYPE_I:
        messages.append("type I process: spectral pipeline gated off (requires type II)")
    return ValidationReport(
        process_type=ptype,
        support=support,
        symmetric=symmetric,
        domain_in_support=in_support,
        spectral_ok=spectral_ok,
        messages=tuple(messages),
    )
