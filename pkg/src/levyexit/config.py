"""Run configuration: a flat INI file mapped to validated dataclasses.

A run is described by one human-writable INI file.  Sections and keys
(defaults in parentheses):

``[process]``
    ``family``: one of ``none``, ``poisson``, ``compound-poisson``,
    ``stable``, ``gamma``, ``cgmy``; ``A`` (0): diffusion coefficient;
    ``gamma`` (0): drift.
``[params]``
    Family parameters.  ``poisson``: ``rate`` (1), ``jump`` (1);
    ``compound-poisson``: ``rate``, ``jumps`` as ``size:prob`` pairs
    separated by commas; ``stable``: ``alpha``, ``scale`` (1), ``skew``
    (0); ``gamma``: ``shape``, ``rate``; ``cgmy``: ``C``, ``G``, ``M``,
    ``Y``.
``[domain]``
    ``intervals``: semicolon-separated ``lo hi`` pairs; ``resolution``
    (200): nodes per unit length; ``x0`` (0): starting point.
``[time]``
    ``t_max`` (10), ``t_points`` (201): survival-curve grid
    ``linspace(0, t_max, t_points)``.
``[laplace]``
    ``s`` ("0 0.5 1 2"): whitespace-separated transform arguments.
``[mc]``
    ``n_paths``, ``dt``, ``seed`` (required whenever an MC stage is
    enabled), ``horizon`` (t_max), ``cutoff`` (1e-2): small-jump
    substitution threshold, ``method`` (auto), ``occupation_bins`` (8).
``[stages]``
    Booleans ``kernel_table`` (true), ``assemble`` (true), ``eigen``
    (true), ``survival`` (true), ``laplace`` (false), ``mc_survival``
    (false), ``mc_occupation`` (false), ``compare`` (false).  Enabling a
    stage enables everything it depends on; classification always runs.
``[output]``
    ``directory`` (out), ``dump_matrix`` (false): raw generator CSV.
``[tolerances]``
    ``rate_sigma`` (2), ``occupation_sigma`` (2), ``c1_sigma`` (1),
    ``symbol_residual`` (1e-3), ``laplace_rel`` (1e-3): the comparison
    and diagnostic thresholds, defaults matching the acceptance checks.

Any malformed value, unknown family/key requirement, or an enabled MC
stage without a seed raises :class:`ConfigError` (the CLI maps it to exit
status 2).
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass

import numpy as np

from .models import (
    CGMYJumps,
    CompoundPoissonJumps,
    GammaJumps,
    LevyTriplet,
    NoJumps,
    PoissonJumps,
    StableJumps,
)
from .operators import Domain


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


_FAMILIES = ("none", "poisson", "compound-poisson", "stable", "gamma", "cgmy")

# stage -> stages it needs; closure taken at load time
_STAGE_DEPS: dict[str, tuple[str, ...]] = {
    "kernel_table": (),
    "assemble": ("kernel_table",),
    "eigen": ("assemble",),
    "survival": ("assemble",),
    "laplace": ("assemble",),
    "mc_survival": (),
    "mc_occupation": (),
    "compare": ("eigen", "survival", "mc_survival", "mc_occupation"),
}

STAGE_ORDER = (
    "classify",
    "kernel_table",
    "assemble",
    "eigen",
    "survival",
    "laplace",
    "mc_survival",
    "mc_occupation",
    "compare",
)


@dataclass(frozen=True)
class McConfig:
    """Path-simulation parameters; ``seed`` is mandatory for any MC stage."""

    n_paths: int
    dt: float
    seed: int | None
    horizon: float
    small_jump_cutoff: float = 1e-2
    method: str = "auto"
    occupation_bins: int = 8

    def __post_init__(self):
        if self.n_paths < 1:
            raise ConfigError(f"mc.n_paths must be positive, got {self.n_paths}")
        if not self.dt > 0.0:
            raise ConfigError(f"mc.dt must be positive, got {self.dt}")
        if self.seed is not None and not 0 <= self.seed < 2**64:
            raise ConfigError(f"mc.seed must be a 64-bit unsigned integer, got {self.seed}")
        if not self.horizon > 0.0:
            raise ConfigError(f"mc.horizon must be positive, got {self.horizon}")
        if self.occupation_bins < 1:
            raise ConfigError(f"mc.occupation_bins must be positive, got {self.occupation_bins}")


@dataclass(frozen=True)
class StageToggles:
    """Enabled pipeline stages (dependency-closed)."""

    kernel_table: bool = True
    assemble: bool = True
    eigen: bool = True
    survival: bool = True
    laplace: bool = False
    mc_survival: bool = False
    mc_occupation: bool = False
    compare: bool = False

    def enabled(self, name: str) -> bool:
        if name == "classify":
            return True
        return bool(getattr(self, name))

    @property
    def any_mc(self) -> bool:
        return self.mc_survival or self.mc_occupation or self.compare

    @property
    def any_spectral(self) -> bool:
        return self.eigen or self.survival or self.laplace or self.compare


@dataclass(frozen=True)
class Tolerances:
    """Comparison and diagnostic thresholds (one source of truth).

    ``rate_sigma``/``occupation_sigma``/``c1_sigma`` are multiples of the
    respective Monte Carlo standard errors; ``symbol_residual`` bounds the
    kernel Fourier check; ``laplace_rel`` bounds the transform-vs-quadrature
    cross-check.
    """

    rate_sigma: float = 2.0
    occupation_sigma: float = 2.0
    c1_sigma: float = 1.0
    symbol_residual: float = 1e-3
    laplace_rel: float = 1e-3

    def __post_init__(self):
        for name in ("rate_sigma", "occupation_sigma", "c1_sigma", "symbol_residual", "laplace_rel"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"tolerances.{name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True)
class RunConfig:
    """One fully validated run description."""

    family: str
    triplet: LevyTriplet
    domain: Domain
    resolution: int
    x0: float
    t_max: float
    t_points: int
    laplace_s: tuple[float, ...]
    stages: StageToggles
    mc: McConfig | None
    tolerances: Tolerances
    out_dir: str
    dump_matrix: bool = False

    def __post_init__(self):
        if self.resolution < 16:
            raise ConfigError(f"domain.resolution must be at least 16, got {self.resolution}")
        if not self.t_max > 0.0 or self.t_points < 2:
            raise ConfigError(
                f"time grid needs t_max > 0 and t_points >= 2, got {self.t_max}, {self.t_points}"
            )
        if any(s < 0.0 for s in self.laplace_s):
            raise ConfigError(f"laplace.s values must be nonnegative, got {self.laplace_s}")
        if self.stages.any_mc and self.mc is None:
            raise ConfigError("an MC stage is enabled but the [mc] section is missing")
        if self.stages.any_mc and self.mc is not None and self.mc.seed is None:
            raise ConfigError("mc.seed is required when a Monte Carlo stage is enabled")
        if not self.domain.contains(self.x0):
            raise ConfigError(f"x0 = {self.x0} lies outside the domain {self.domain.intervals}")

    @property
    def t_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.t_points)


def _parse_float(section: str, key: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError as exc:
        raise ConfigError(f"{section}.{key}: not a number: {raw!r}") from exc
    if not math.isfinite(value):
        raise ConfigError(f"{section}.{key}: must be finite, got {raw!r}")
    return value


def _parse_int(section: str, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{section}.{key}: not an integer: {raw!r}") from exc


def _parse_bool(section: str, key: str, raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"{section}.{key}: not a boolean: {raw!r}")


class _Section:
    """One INI section with typed, error-annotated accessors."""

    def __init__(self, name: str, values: dict[str, str]):
        self.name = name
        self.values = values

    def get(self, key: str, default: str | None = None) -> str:
        if key in self.values:
            return self.values[key]
        if default is None:
            raise ConfigError(f"missing required key {self.name}.{key}")
        return default

    def get_float(self, key: str, default: str | None = None) -> float:
        return _parse_float(self.name, key, self.get(key, default))

    def get_int(self, key: str, default: str | None = None) -> int:
        return _parse_int(self.name, key, self.get(key, default))

    def get_bool(self, key: str, default: str) -> bool:
        return _parse_bool(self.name, key, self.get(key, default))


def _build_measure(family: str, params: _Section):
    if family == "none":
        return NoJumps()
    if family == "poisson":
        rate = params.get_float("rate", "1.0")
        jump = params.get_float("jump", "1.0")
        if jump == 1.0:
            return PoissonJumps(rate=rate)
        return CompoundPoissonJumps(rate=rate, jumps=((jump, 1.0),))
    if family == "compound-poisson":
        rate = params.get_float("rate")
        pairs = []
        for item in params.get("jumps").split(","):
            item = item.strip()
            if not item:
                continue
            size_prob = item.split(":")
            if len(size_prob) != 2:
                raise ConfigError(
                    f"params.jumps entries must be size:prob pairs, got {item!r}"
                )
            pairs.append((
                _parse_float("params", "jumps", size_prob[0]),
                _parse_float("params", "jumps", size_prob[1]),
            ))
        if not pairs:
            raise ConfigError("params.jumps must list at least one size:prob pair")
        return CompoundPoissonJumps(rate=rate, jumps=tuple(pairs))
    if family == "stable":
        return StableJumps(
            alpha=params.get_float("alpha"),
            scale=params.get_float("scale", "1.0"),
            skew=params.get_float("skew", "0.0"),
        )
    if family == "gamma":
        return GammaJumps(shape=params.get_float("shape"), rate=params.get_float("rate"))
    if family == "cgmy":
        return CGMYJumps(
            C=params.get_float("C"),
            G=params.get_float("G"),
            M=params.get_float("M"),
            Y=params.get_float("Y"),
        )
    raise ConfigError(f"unknown process family {family!r}; expected one of {_FAMILIES}")


def _parse_intervals(raw: str) -> tuple[tuple[float, float], ...]:
    intervals = []
    for part in raw.split(";"):
        part = part.strip()
        if not part:
            continue
        pieces = part.split()
        if len(pieces) != 2:
            raise ConfigError(
                f"domain.intervals entries must be 'lo hi' pairs separated by ';', got {part!r}"
            )
        intervals.append((
            _parse_float("domain", "intervals", pieces[0]),
            _parse_float("domain", "intervals", pieces[1]),
        ))
    if not intervals:
        raise ConfigError("domain.intervals must list at least one interval")
    return tuple(intervals)


def parse_config(
    text: str,
    *,
    seed_override: int | None = None,
    out_override: str | None = None,
) -> RunConfig:
    """Parse and validate a configuration from INI text.

    ``seed_override``/``out_override`` apply the CLI's ``--seed``/``--out``
    flags before validation, so a seed supplied on the command line
    satisfies the MC-seed requirement.
    """
    if seed_override is not None and not 0 <= seed_override < 2**64:
        raise ConfigError(f"--seed must be a 64-bit unsigned integer, got {seed_override}")
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keep key case (A, C, G, M, Y)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax error: {exc}") from exc

    def section(name: str) -> _Section:
        values = dict(parser[name]) if parser.has_section(name) else {}
        return _Section(name, values)

    process = section("process")
    family = process.get("family").strip().lower()
    measure = _build_measure(family, section("params"))
    try:
        triplet = LevyTriplet(
            A=process.get_float("A", "0.0"),
            gamma=process.get_float("gamma", "0.0"),
            measure=measure,
        )
    except ValueError as exc:
        raise ConfigError(f"invalid triplet: {exc}") from exc

    dom_sec = section("domain")
    try:
        domain = Domain(_parse_intervals(dom_sec.get("intervals")))
    except ValueError as exc:
        raise ConfigError(f"invalid domain: {exc}") from exc

    time_sec = section("time")
    laplace_sec = section("laplace")
    s_values = tuple(
        _parse_float("laplace", "s", item)
        for item in laplace_sec.get("s", "0 0.5 1 2").split()
    )

    stage_sec = section("stages")
    toggles = {
        name: stage_sec.get_bool(name, "true" if default else "false")
        for name, default in (
            ("kernel_table", True),
            ("assemble", True),
            ("eigen", True),
            ("survival", True),
            ("laplace", False),
            ("mc_survival", False),
            ("mc_occupation", False),
            ("compare", False),
        )
    }
    for extra in stage_sec.values:
        if extra not in toggles:
            raise ConfigError(f"unknown stage {extra!r} in [stages]")
    # dependency closure: enabling a stage enables what it consumes
    changed = True
    while changed:
        changed = False
        for name, deps in _STAGE_DEPS.items():
            if toggles[name]:
                for dep in deps:
                    if not toggles[dep]:
                        toggles[dep] = True
                        changed = True
    stages = StageToggles(**toggles)

    t_max = time_sec.get_float("t_max", "10.0")
    mc: McConfig | None = None
    if parser.has_section("mc") or seed_override is not None:
        mc_sec = section("mc")
        seed_raw = mc_sec.values.get("seed")
        seed = _parse_int("mc", "seed", seed_raw) if seed_raw is not None else None
        if seed_override is not None:
            seed = seed_override
        mc = McConfig(
            n_paths=mc_sec.get_int("n_paths", "10000"),
            dt=mc_sec.get_float("dt", "1e-3"),
            seed=seed,
            horizon=mc_sec.get_float("horizon", repr(t_max)),
            small_jump_cutoff=mc_sec.get_float("cutoff", "1e-2"),
            method=mc_sec.get("method", "auto").strip().lower(),
            occupation_bins=mc_sec.get_int("occupation_bins", "8"),
        )
        if mc.method not in ("auto", "exact", "substitution"):
            raise ConfigError(f"mc.method must be auto, exact or substitution, got {mc.method!r}")

    tol_sec = section("tolerances")
    tolerances = Tolerances(
        rate_sigma=tol_sec.get_float("rate_sigma", "2.0"),
        occupation_sigma=tol_sec.get_float("occupation_sigma", "2.0"),
        c1_sigma=tol_sec.get_float("c1_sigma", "1.0"),
        symbol_residual=tol_sec.get_float("symbol_residual", "1e-3"),
        laplace_rel=tol_sec.get_float("laplace_rel", "1e-3"),
    )

    out_sec = section("output")
    out_dir = out_sec.get("directory", "out") if out_override is None else out_override
    return RunConfig(
        family=family,
        triplet=triplet,
        domain=domain,
        resolution=dom_sec.get_int("resolution", "200"),
        x0=dom_sec.get_float("x0", "0.0"),
        t_max=t_max,
        t_points=time_sec.get_int("t_points", "201"),
        laplace_s=s_values,
        stages=stages,
        mc=mc,
        tolerances=tolerances,
        out_dir=out_dir,
        dump_matrix=out_sec.get_bool("dump_matrix", "false"),
    )


def load_config(path, *, seed_override: int | None = None, out_override: str | None = None) -> RunConfig:
    """Load, override and validate a configuration file (see :func:`parse_config`)."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config(text, seed_override=seed_override, out_override=out_override)
