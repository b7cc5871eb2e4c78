"""First-exit times and ruin probabilities of one-dimensional Levy processes.

The package assembles the generator of a Levy process restricted to a
bounded open set in convolution form, inverts it into the quasi-potential
operator (whose rows are expected occupation densities and whose action
gives mean exit times), and extracts the principal eigenvalue governing
the exponential decay of survival probabilities.  A jump-adapted Monte
Carlo sampler provides an independent estimate of the same quantities,
and the report layer cross-validates the two routes.

Typical use::

    from levyexit import (
        Domain, LevyTriplet, StableJumps,
        build_grid, build_operator_set,
        kernel_functions, suggest_radius, tabulate, tail_functions,
        spectral_summary, survival_curve,
    )

    triplet = LevyTriplet(A=0.0, gamma=0.0, measure=StableJumps(alpha=1.0))
    domain = Domain(((-1.0, 1.0),))
    grid = build_grid(domain, 200)
    kf = kernel_functions(tail_functions(triplet))
    table = tabulate(kf, grid.steps[0], suggest_radius(kf), A=triplet.A)
    ops = build_operator_set(grid, table, triplet.A)
    eig, sector = spectral_summary(ops.B, ops.S_mid, grid, x0=0.0)
"""

from .kernels import (
    KernelFunctions,
    KernelTable,
    SymbolCheckReport,
    TailFunctions,
    kernel_functions,
    kernel_symbol_check,
    suggest_radius,
    tabulate,
    tail_functions,
)
from .models import (
    AtomMeasure,
    CGMYJumps,
    CompoundPoissonJumps,
    DensityMeasure,
    GammaJumps,
    LevyTriplet,
    NoJumps,
    PoissonJumps,
    ProcessType,
    StableJumps,
    SupportDescriptor,
    SupportKind,
    ValidationReport,
    classify_type,
    is_symmetric,
    levy_symbol,
    support_of,
    validate_problem,
)
from .montecarlo import (
    ExitStats,
    OccupationEstimate,
    PathScheme,
    SurvivalCurve,
    collect_exit_stats,
    estimate_occupation,
    estimate_survival,
    fit_decay_rate,
    simulate_exit,
)
from .operators import Domain, Grid, OperatorSet, build_grid, build_operator_set
from .report import (
    ComparisonReport,
    McArtifacts,
    SpectralArtifacts,
    compare,
    occupation_prediction,
    problem_fingerprint,
    render_figures,
)
from .spectral import (
    EigenResult,
    SectorialityReport,
    asymptotics,
    disk_margin,
    laplace_survival,
    principal_eigenpair,
    sectoriality_check,
    spectral_summary,
    survival_curve,
)

__version__ = "0.1.0"

__all__ = [
    "AtomMeasure",
    "CGMYJumps",
    "CompoundPoissonJumps",
    "ComparisonReport",
    "DensityMeasure",
    "Domain",
    "EigenResult",
    "ExitStats",
    "GammaJumps",
    "Grid",
    "KernelFunctions",
    "KernelTable",
    "LevyTriplet",
    "McArtifacts",
    "NoJumps",
    "OccupationEstimate",
    "OperatorSet",
    "PathScheme",
    "PoissonJumps",
    "ProcessType",
    "SectorialityReport",
    "SpectralArtifacts",
    "StableJumps",
    "SupportDescriptor",
    "SupportKind",
    "SurvivalCurve",
    "SymbolCheckReport",
    "TailFunctions",
    "ValidationReport",
    "asymptotics",
    "build_grid",
    "build_operator_set",
    "classify_type",
    "collect_exit_stats",
    "compare",
    "disk_margin",
    "estimate_occupation",
    "estimate_survival",
    "fit_decay_rate",
    "is_symmetric",
    "kernel_functions",
    "kernel_symbol_check",
    "laplace_survival",
    "levy_symbol",
    "occupation_prediction",
    "principal_eigenpair",
    "problem_fingerprint",
    "render_figures",
    "sectoriality_check",
    "simulate_exit",
    "spectral_summary",
    "suggest_radius",
    "support_of",
    "survival_curve",
    "tabulate",
    "tail_functions",
    "validate_problem",
]
