"""Cross-validation report between the spectral and Monte Carlo pipelines.

The spectral side predicts a survival decay rate ``1/lambda1``, a leading
coefficient ``c1`` and per-bin expected occupation times (quasi-potential
row integrals); the Monte Carlo side estimates the same quantities from
paths.  :func:`compare` checks their agreement in units of the Monte Carlo
standard errors and bundles the verdicts into a :class:`ComparisonReport`
whose every numeric entry carries its tolerance.

Both sides carry a fingerprint of the triplet/domain pair they were
computed from; comparing artifacts from different problems is an error,
never a silent mismatch.

:func:`render_figures` draws the overlay/diagnostic figures (PNG, Agg
backend) next to the delimited artifacts.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .config import Tolerances
from .models import LevyTriplet
from .montecarlo import OccupationEstimate, Z95
from .operators import Domain
from .spectral import SurvivalCurve


def problem_fingerprint(triplet: LevyTriplet, domain: Domain) -> str:
    """Stable short hash of one triplet/domain pair."""
    text = f"{triplet!r}|{domain.intervals!r}"
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class SpectralArtifacts:
    """Spectral outputs entering a comparison.

    ``row``/``nodes``/``step`` describe the quasi-potential row at the
    starting point: ``row[j]`` is the expected sojourn time in the cell of
    width ``step`` around interior node ``nodes[j]``.
    """

    fingerprint: str
    lambda1: float
    c1: float
    curve: SurvivalCurve
    row: np.ndarray
    nodes: np.ndarray
    step: float

    @property
    def rate(self) -> float:
        return 1.0 / self.lambda1


@dataclass(frozen=True)
class McArtifacts:
    """Monte Carlo outputs entering a comparison."""

    fingerprint: str
    curve: SurvivalCurve
    occupation: OccupationEstimate


@dataclass(frozen=True)
class CheckResult:
    """One numeric agreement check: value vs target within tolerance."""

    name: str
    value: float
    target: float
    tolerance: float
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "target": self.target,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class ComparisonReport:
    """Agreement summary between the spectral and Monte Carlo sides."""

    spectral_rate: float
    mc_rate: float
    mc_stderr: float
    c1_spectral: float
    c1_mc: float
    occupation_max_z: float
    checks: tuple[CheckResult, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_dict(self) -> dict:
        return {
            "spectral_rate": self.spectral_rate,
            "mc_rate": self.mc_rate,
            "mc_stderr": self.mc_stderr,
            "c1_spectral": self.c1_spectral,
            "c1_mc": self.c1_mc,
            "occupation_max_z": self.occupation_max_z,
            "checks": [check.to_dict() for check in self.checks],
            "passed": self.passed,
            "units": {
                "spectral_rate": "1/time",
                "mc_rate": "1/time",
                "mc_stderr": "1/time",
                "c1_spectral": "dimensionless",
                "c1_mc": "dimensionless",
                "occupation_max_z": "standard errors",
            },
        }


def occupation_prediction(
    row: np.ndarray, nodes: np.ndarray, step: float, bin_left, bin_right
) -> np.ndarray:
    """Quasi-potential row integrals over bins ``[bin_left[k], bin_right[k])``.

    Each row entry is the sojourn time in one grid cell; cells straddling a
    bin edge are apportioned by overlap fraction (the kernel peaks at the
    starting point, so assigning whole cells would split the peak cell's
    mass to the wrong side).
    """
    row = np.asarray(row, dtype=float)
    nodes = np.asarray(nodes, dtype=float)
    left = np.asarray(bin_left, dtype=float)
    right = np.asarray(bin_right, dtype=float)
    cell_lo = nodes - 0.5 * step
    cell_hi = nodes + 0.5 * step
    out = np.empty(left.size)
    for k, (a, b) in enumerate(zip(left, right)):
        overlap = np.clip((np.minimum(cell_hi, b) - np.maximum(cell_lo, a)) / step, 0.0, 1.0)
        out[k] = float(np.sum(row * overlap))
    return out


def compare(
    spectral: SpectralArtifacts,
    mc: McArtifacts,
    tolerances: Tolerances | None = None,
) -> ComparisonReport:
    """Check spectral predictions against Monte Carlo estimates.

    Raises ``ValueError`` when the two sides carry different
    triplet/domain fingerprints.
    """
    if spectral.fingerprint != mc.fingerprint:
        raise ValueError(
            "cannot compare artifacts from different problems: spectral "
            f"fingerprint {spectral.fingerprint} != mc fingerprint {mc.fingerprint}"
        )
    tol = tolerances if tolerances is not None else Tolerances()
    checks: list[CheckResult] = []

    rate = spectral.rate
    mc_rate = mc.curve.fitted_rate
    mc_stderr = mc.curve.rate_stderr
    rate_tol = tol.rate_sigma * mc_stderr
    rate_ok = bool(abs(rate - mc_rate) <= rate_tol)
    checks.append(CheckResult(
        name="rate_agreement",
        value=mc_rate,
        target=rate,
        tolerance=rate_tol,
        passed=rate_ok,
        detail=f"|1/lambda1 - mc_rate| = {abs(rate - mc_rate):.3e} "
               f"vs {tol.rate_sigma:g} * stderr = {rate_tol:.3e}",
    ))

    # Leading-coefficient check at t* ~ 3 * lambda1 (three mean lifetimes):
    # the tail prediction c1 * exp(-t*/lambda1) must sit inside the Monte
    # Carlo confidence interval, scaled by c1_sigma.
    t = mc.curve.times
    t_star = min(3.0 * spectral.lambda1, float(t[-1]))
    idx = int(np.argmin(np.abs(t - t_star)))
    idx = max(idx, 1)
    p_pred = spectral.c1 * math.exp(-t[idx] * rate)
    p_hat = float(mc.curve.values[idx])
    if mc.curve.ci_lo is not None and mc.curve.ci_hi is not None:
        half_width = 0.5 * float(mc.curve.ci_hi[idx] - mc.curve.ci_lo[idx])
    else:
        half_width = math.nan
    c1_mc = p_hat * math.exp(t[idx] * rate) if p_hat > 0.0 else math.nan
    c1_tol = tol.c1_sigma * half_width
    c1_ok = bool(abs(p_pred - p_hat) <= c1_tol)
    checks.append(CheckResult(
        name="c1_extrapolation",
        value=p_hat,
        target=p_pred,
        tolerance=c1_tol,
        passed=c1_ok,
        detail=f"tail prediction at t = {t[idx]:g} vs MC interval half-width "
               f"{half_width:.3e} * {tol.c1_sigma:g}",
    ))

    occ = mc.occupation
    pred = occupation_prediction(
        spectral.row, spectral.nodes, spectral.step, occ.bin_left, occ.bin_right
    )
    sigma = occ.ci / Z95
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(sigma > 0.0, np.abs(occ.occupation - pred) / sigma, np.inf)
    max_z = float(np.max(z))
    occ_ok = bool(max_z <= tol.occupation_sigma)
    checks.append(CheckResult(
        name="occupation_rows",
        value=max_z,
        target=0.0,
        tolerance=tol.occupation_sigma,
        passed=occ_ok,
        detail=f"max per-bin deviation {max_z:.2f} standard errors over {z.size} bins",
    ))

    return ComparisonReport(
        spectral_rate=rate,
        mc_rate=mc_rate,
        mc_stderr=mc_stderr,
        c1_spectral=spectral.c1,
        c1_mc=c1_mc,
        occupation_max_z=max_z,
        checks=tuple(checks),
    )


# ---------------------------------------------------------------------------
# Figures
# ---------------------------------------------------------------------------


def _matplotlib():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_figures(
    out_dir,
    *,
    spectral_curve: SurvivalCurve | None = None,
    mc_curve: SurvivalCurve | None = None,
    c1: float | None = None,
    lambda1: float | None = None,
    occupation: OccupationEstimate | None = None,
    occupation_pred: np.ndarray | None = None,
    kernel_cells: tuple[np.ndarray, np.ndarray] | None = None,
    eigenvalues: tuple[tuple[complex, int], ...] | None = None,
) -> list[str]:
    """Render the available diagnostic figures as PNG files.

    Draws only the panels whose inputs are present and returns the written
    paths: ``fig_survival.png`` (log-scale overlay with the asymptote),
    ``fig_occupation.png`` (histogram vs predicted row integrals),
    ``fig_kernel.png`` (tabulated cell averages) and ``fig_spectrum.png``
    (leading eigenvalues against the localization disk).
    """
    from pathlib import Path

    plt = _matplotlib()
    out = Path(out_dir)
    written: list[str] = []

    if spectral_curve is not None or mc_curve is not None:
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        if spectral_curve is not None:
            ax.semilogy(spectral_curve.times, np.maximum(spectral_curve.values, 1e-300),
                        label="matrix exponential", color="C0")
        if mc_curve is not None:
            keep = mc_curve.values > 0.0
            ax.semilogy(mc_curve.times[keep], mc_curve.values[keep], ".",
                        label="Monte Carlo", color="C1", markersize=4)
            if mc_curve.ci_lo is not None and mc_curve.ci_hi is not None:
                ax.fill_between(mc_curve.times[keep],
                                np.maximum(mc_curve.ci_lo[keep], 1e-300),
                                np.maximum(mc_curve.ci_hi[keep], 1e-300),
                                alpha=0.25, color="C1", linewidth=0)
        if c1 is not None and lambda1 is not None:
            ref = spectral_curve if spectral_curve is not None else mc_curve
            tt = ref.times[ref.times > 0]
            ax.semilogy(tt, c1 * np.exp(-tt / lambda1), "--", color="C2",
                        label="c1 exp(-t/lambda1)")
        ax.set_xlabel("t")
        ax.set_ylabel("survival probability")
        ax.set_ylim(bottom=1e-6)
        ax.legend()
        fig.tight_layout()
        path = out / "fig_survival.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(str(path))

    if occupation is not None:
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        centers = 0.5 * (occupation.bin_left + occupation.bin_right)
        widths = occupation.bin_right - occupation.bin_left
        ax.bar(centers, occupation.occupation, width=widths, yerr=occupation.ci,
               color="C1", alpha=0.6, capsize=3, label="Monte Carlo")
        if occupation_pred is not None:
            ax.step(np.concatenate([occupation.bin_left, occupation.bin_right[-1:]]),
                    np.concatenate([occupation_pred, occupation_pred[-1:]]),
                    where="post", color="C0", label="quasi-potential row")
        ax.set_xlabel("position")
        ax.set_ylabel("expected occupation time")
        ax.legend()
        fig.tight_layout()
        path = out / "fig_occupation.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(str(path))

    if kernel_cells is not None:
        centers, averages = kernel_cells
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        ax.plot(centers, averages, lw=0.8)
        ax.set_xlabel("offset u")
        ax.set_ylabel("kernel cell average")
        ax.set_yscale("symlog", linthresh=1e-6)
        fig.tight_layout()
        path = out / "fig_kernel.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(str(path))

    if eigenvalues is not None and lambda1 is not None:
        fig, ax = plt.subplots(figsize=(4.5, 4.5))
        theta = np.linspace(0.0, 2.0 * np.pi, 256)
        radius = 0.5 * lambda1
        ax.plot(radius + radius * np.cos(theta), radius * np.sin(theta), "--",
                color="gray", label="localization disk")
        pts = np.array([z for z, _ in eigenvalues], dtype=complex)
        ax.plot(pts.real, pts.imag, "x", color="C3", label="leading eigenvalues")
        ax.axhline(0.0, color="black", lw=0.5)
        ax.axvline(0.0, color="black", lw=0.5)
        ax.set_xlabel("Re")
        ax.set_ylabel("Im")
        ax.set_aspect("equal")
        ax.legend(loc="upper right", fontsize=8)
        fig.tight_layout()
        path = out / "fig_spectrum.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(str(path))

    return written
