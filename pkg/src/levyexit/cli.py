"""Command-line interface: per-stage artifact commands and full runs.

Subcommands
-----------
``classify``, ``kernel-table``, ``assemble``, ``eigen``, ``survival``,
``laplace``, ``mc-survival``, ``mc-occupation`` each execute one pipeline
stage (plus its dependencies) and write that stage's artifact;
``compare`` executes both the spectral and Monte Carlo sides and writes
the cross-validation report with diagnostic figures; ``run`` executes
every stage enabled in the config.

Every command takes ``--config <path>`` plus optional ``--threads <n>``
(default from the ``LEVYEXIT_THREADS`` environment variable), ``--out
<dir>`` and ``--seed <u64>`` overrides.

Exit status: ``0`` when all executed stages (and, where applicable, all
agreement checks) pass; ``1`` on a stage failure, with the artifacts of
completed stages retained and listed in ``manifest.json``; ``2`` on a
configuration error (unreadable or malformed config, or a Monte Carlo
stage without a seed).

Artifacts are byte-deterministic for a fixed config, seed and thread
count: CSV cells are shortest round-trip float reprs, JSON objects are
written with sorted keys, and Monte Carlo reductions run in a fixed
order.  Figures (PNG) accompany the report path and are excluded from the
byte-determinism contract.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

# numpy & friends are imported lazily inside _execute so --threads can pin
# the BLAS pool sizes before the first numpy import.

_COMMAND_STAGES = {
    "classify": ("classify",),
    "kernel-table": ("classify", "kernel_table"),
    "assemble": ("classify", "kernel_table", "assemble"),
    "eigen": ("classify", "kernel_table", "assemble", "eigen"),
    "survival": ("classify", "kernel_table", "assemble", "survival"),
    "laplace": ("classify", "kernel_table", "assemble", "laplace"),
    "mc-survival": ("classify", "mc_survival"),
    "mc-occupation": ("classify", "mc_occupation"),
    "compare": (
        "classify", "kernel_table", "assemble", "eigen", "survival",
        "mc_survival", "mc_occupation", "compare",
    ),
}


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, metavar="PATH",
                        help="run configuration file (INI)")
    common.add_argument("--threads", type=int, default=None, metavar="N",
                        help="worker thread count (default: LEVYEXIT_THREADS or library default)")
    common.add_argument("--out", default=None, metavar="DIR",
                        help="output directory (overrides output.directory)")
    common.add_argument("--seed", type=int, default=None, metavar="U64",
                        help="master seed (overrides mc.seed)")

    parser = argparse.ArgumentParser(
        prog="levyexit",
        description="First-exit and ruin probabilities of one-dimensional "
                    "Levy processes: spectral pipeline, Monte Carlo "
                    "cross-validation and comparison reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "classify": "process type, support and symmetry of the configured triplet",
        "kernel-table": "tabulate the convolution kernel cell averages (CSV)",
        "assemble": "assemble the generator and quasi-potential; emit diagnostics (JSON)",
        "eigen": "principal eigenvalue, survival coefficient and spectral structure (JSON)",
        "survival": "survival curve from the killed semigroup (CSV)",
        "laplace": "Laplace transform of the survival probability (CSV)",
        "mc-survival": "Monte Carlo survival curve with confidence intervals (CSV)",
        "mc-occupation": "Monte Carlo expected occupation times per bin (CSV)",
        "compare": "run both pipelines and write the agreement report with figures",
        "run": "execute every stage enabled in the config",
    }
    for name in (*_COMMAND_STAGES, "run"):
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def _set_thread_env(threads: int | None) -> int | None:
    if threads is None:
        raw = os.environ.get("LEVYEXIT_THREADS")
        if raw:
            try:
                threads = int(raw)
            except ValueError:
                print(f"levyexit: ignoring non-integer LEVYEXIT_THREADS={raw!r}",
                      file=sys.stderr)
                threads = None
    if threads is not None:
        if threads < 1:
            raise ValueError(f"thread count must be positive, got {threads}")
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
            os.environ[var] = str(threads)
    return threads


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        threads = _set_thread_env(args.threads)
    except ValueError as exc:
        print(f"levyexit: config error: {exc}", file=sys.stderr)
        return 2

    from .config import ConfigError, load_config

    try:
        cfg = load_config(args.config, seed_override=args.seed, out_override=args.out)
        if args.command == "run":
            stage_names = tuple(n for n in _run_stage_order() if cfg.stages.enabled(n))
        else:
            stage_names = _COMMAND_STAGES[args.command]
            _require_mc_seed(cfg, stage_names)
    except ConfigError as exc:
        print(f"levyexit: config error: {exc}", file=sys.stderr)
        return 2
    return _execute(cfg, stage_names, threads, with_report=args.command in ("run", "compare"))


def _run_stage_order() -> tuple[str, ...]:
    from .config import STAGE_ORDER

    return STAGE_ORDER


def _require_mc_seed(cfg, stage_names) -> None:
    from .config import ConfigError

    needs_mc = any(n in ("mc_survival", "mc_occupation", "compare") for n in stage_names)
    if needs_mc and (cfg.mc is None or cfg.mc.seed is None):
        raise ConfigError("mc.seed is required when a Monte Carlo stage is enabled")


# ---------------------------------------------------------------------------
# Artifact writers
# ---------------------------------------------------------------------------


def _jsonable(obj):
    import numpy as np

    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def _write_json(path: Path, obj) -> None:
    text = json.dumps(_jsonable(obj), sort_keys=True, indent=2)
    path.write_text(text + "\n", encoding="utf-8")


def _write_csv(path: Path, header, rows) -> None:
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------


class _StageFailure(RuntimeError):
    """A stage could not produce its artifact."""


class _Pipeline:
    """Executes stages against one config, caching shared intermediates."""

    def __init__(self, cfg, out: Path):
        self.cfg = cfg
        self.out = out
        self._cache: dict[str, object] = {}

    # -- shared intermediates ------------------------------------------------

    def _cached(self, key: str, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def validation(self):
        from .models import validate_problem

        return self._cached(
            "validation", lambda: validate_problem(self.cfg.triplet, self.cfg.domain)
        )

    def grid(self):
        from .operators import build_grid

        return self._cached(
            "grid", lambda: build_grid(self.cfg.domain, self.cfg.resolution)
        )

    def kernel_table(self):
        from .kernels import kernel_functions, suggest_radius, tabulate, tail_functions

        def build():
            kf = kernel_functions(tail_functions(self.cfg.triplet))
            radius = suggest_radius(kf)
            return tabulate(kf, self.grid().steps[0], radius, A=self.cfg.triplet.A)

        return self._cached("kernel_table", build)

    def operator_set(self):
        from .operators import build_operator_set

        return self._cached(
            "ops",
            lambda: build_operator_set(self.grid(), self.kernel_table(), self.cfg.triplet.A),
        )

    def gate(self) -> None:
        """Type II gate for the spectral stages."""
        from .models import ProcessType

        report = self.validation()
        if report.process_type is ProcessType.TYPE_I:
            raise _StageFailure(
                "type II gate: spectral stages require a diffusion component "
                "or an infinite jump measure (type II process); got type I"
            )
        if not report.spectral_ok:
            raise _StageFailure(
                "spectral gate: " + "; ".join(report.messages)
            )

    def eigen(self):
        from .spectral import spectral_summary

        def build():
            self.gate()
            ops = self.operator_set()
            return spectral_summary(ops.B, ops.S_mid, self.grid(), self.cfg.x0)

        return self._cached("eigen", build)

    def scheme(self):
        from .montecarlo import PathScheme

        mc = self.cfg.mc
        return self._cached(
            "scheme",
            lambda: PathScheme(
                self.cfg.triplet,
                dt=mc.dt,
                seed=mc.seed,
                small_jump_cutoff=mc.small_jump_cutoff,
                method=mc.method,
            ),
        )

    def mc_curve(self):
        import numpy as np

        from .montecarlo import estimate_survival

        mc = self.cfg.mc
        t_grid = np.linspace(0.0, mc.horizon, self.cfg.t_points)
        return self._cached(
            "mc_curve",
            lambda: estimate_survival(
                self.scheme(), self.cfg.x0, self.cfg.domain, t_grid, mc.n_paths
            ),
        )

    def mc_occupation(self):
        from .montecarlo import estimate_occupation

        mc = self.cfg.mc
        return self._cached(
            "mc_occupation",
            lambda: estimate_occupation(
                self.scheme(), self.cfg.x0, self.cfg.domain,
                mc.occupation_bins, mc.n_paths,
            ),
        )

    # -- stages ----------------------------------------------------------------

    def stage_classify(self):
        report = self.validation()
        payload = {
            "process_type": report.process_type.value,
            "support": {
                "kind": report.support.kind.value,
                "offset_rate": report.support.offset_rate,
            },
            "symmetric": report.symmetric,
            "domain_in_support": report.domain_in_support,
            "spectral_ok": report.spectral_ok,
            "messages": list(report.messages),
            "units": {"offset_rate": "displacement/time"},
        }
        path = self.out / "classify.json"
        _write_json(path, payload)
        return payload, [path], f"type={payload['process_type']} spectral_ok={report.spectral_ok}"

    def stage_kernel_table(self):
        table = self.kernel_table()
        path = self.out / "kernel_table.csv"
        table.to_csv(path)
        summary = {
            "cells": int(table.cell_avg.size),
            "step": float(table.step),
            "radius": float(table.u_right[-1]),
            "file": path.name,
            "units": {"step": "length", "radius": "length"},
        }
        return summary, [path], f"cells={summary['cells']} radius={summary['radius']:g}"

    def stage_assemble(self):
        import numpy as np

        from .kernels import kernel_symbol_check

        self.gate()
        ops = self.operator_set()
        table = self.kernel_table()
        freqs = np.linspace(0.5, 10.0, 20)
        check = kernel_symbol_check(
            self.cfg.triplet, table, freqs, tolerance=self.cfg.tolerances.symbol_residual
        )
        files = []
        payload = {
            "n_nodes": int(self.grid().nodes.size),
            "n_interior": int(self.grid().n_interior),
            "generator_shape": list(ops.L.shape),
            "symbol_check": {
                "max_residual": check.max_residual,
                "positivity_margin": check.positivity_margin,
                "n_frequencies": int(check.frequencies.size),
                "tolerance": self.cfg.tolerances.symbol_residual,
            },
            "quasipotential": {"residual": ops.residual, "rcond": ops.rcond},
            "units": {"max_residual": "dimensionless", "residual": "relative"},
        }
        path = self.out / "assemble.json"
        _write_json(path, payload)
        files.append(path)
        if self.cfg.dump_matrix:
            dump = self.out / "generator.csv"
            _write_csv(dump, [f"c{j}" for j in range(ops.L.shape[1])], ops.L)
            files.append(dump)
        return payload, files, (
            f"interior={payload['n_interior']} "
            f"symbol_residual={check.max_residual:.2e}"
        )

    def stage_eigen(self):
        from .spectral import disk_margin

        result, sector = self.eigen()
        payload = {
            "lambda1": result.lambda1,
            "c1": result.c1,
            "disk_margin": disk_margin(
                [z for z, _ in result.leading_eigenvalues], result.lambda1
            ),
            "sector_angle": sector.max_angle,
            "sector_min_real": sector.min_real,
            "eigenvalues": [
                {"re": z.real, "im": z.imag, "multiplicity": n}
                for z, n in result.leading_eigenvalues
            ],
            "units": {
                "lambda1": "time",
                "c1": "dimensionless",
                "disk_margin": "relative",
                "sector_angle": "radian",
            },
        }
        path = self.out / "eigen.json"
        _write_json(path, payload)
        return payload, [path], f"lambda1={result.lambda1:.6g} c1={result.c1:.6g}"

    def stage_survival(self):
        from .spectral import survival_curve

        self.gate()
        ops = self.operator_set()
        curve = self._cached(
            "curve",
            lambda: survival_curve(ops.L, self.cfg.x0, self.cfg.t_grid, grid=self.grid()),
        )
        path = self.out / "survival.csv"
        _write_csv(path, ["t", "p"], zip(curve.times, curve.values))
        summary = {
            "file": path.name,
            "fitted_rate": curve.fitted_rate,
            "rate_stderr": curve.rate_stderr,
            "p_final": float(curve.values[-1]),
            "units": {"fitted_rate": "1/time"},
        }
        return summary, [path], f"fitted_rate={curve.fitted_rate:.6g}"

    def stage_laplace(self):
        from .spectral import laplace_survival

        self.gate()
        ops = self.operator_set()
        values = [
            (s, laplace_survival(ops.B, self.cfg.x0, s, grid=self.grid()))
            for s in self.cfg.laplace_s
        ]
        path = self.out / "laplace.csv"
        _write_csv(path, ["s", "value"], values)
        summary = {
            "file": path.name,
            "values": {repr(float(s)): v for s, v in values},
            "units": {"value": "time"},
        }
        return summary, [path], f"n_points={len(values)}"

    def stage_mc_survival(self):
        curve = self.mc_curve()
        path = self.out / "mc_survival.csv"
        _write_csv(
            path,
            ["t", "p_hat", "ci_lo", "ci_hi"],
            zip(curve.times, curve.values, curve.ci_lo, curve.ci_hi),
        )
        summary = {
            "file": path.name,
            "fitted_rate": curve.fitted_rate,
            "rate_stderr": curve.rate_stderr,
            "n_paths": self.cfg.mc.n_paths,
            "dt": self.cfg.mc.dt,
            "seed": self.cfg.mc.seed,
            "units": {"fitted_rate": "1/time", "dt": "time"},
        }
        return summary, [path], (
            f"rate={curve.fitted_rate:.6g} +- {curve.rate_stderr:.2g}"
        )

    def stage_mc_occupation(self):
        occ = self.mc_occupation()
        path = self.out / "mc_occupation.csv"
        _write_csv(
            path,
            ["bin_left", "bin_right", "occ", "ci"],
            zip(occ.bin_left, occ.bin_right, occ.occupation, occ.ci),
        )
        summary = {
            "file": path.name,
            "mean_exit_time": occ.mean_exit_time,
            "n_paths": occ.n_paths,
            "seed": self.cfg.mc.seed,
            "units": {"mean_exit_time": "time", "occ": "time"},
        }
        return summary, [path], f"mean_exit={occ.mean_exit_time:.6g}"

    def stage_compare(self):
        import numpy as np

        from .report import McArtifacts, SpectralArtifacts, compare, problem_fingerprint

        result, _sector = self.eigen()
        grid = self.grid()
        ops = self.operator_set()
        kind, idx = grid.locate(float(self.cfg.x0))
        if kind != "interior":
            raise _StageFailure("compare requires an interior starting point")
        fingerprint = problem_fingerprint(self.cfg.triplet, self.cfg.domain)
        spectral = SpectralArtifacts(
            fingerprint=fingerprint,
            lambda1=result.lambda1,
            c1=result.c1,
            curve=self._cache.get("curve"),
            row=np.asarray(ops.B[idx, :]),
            nodes=grid.interior_nodes,
            step=grid.steps[0],
        )
        mc = McArtifacts(
            fingerprint=fingerprint,
            curve=self.mc_curve(),
            occupation=self.mc_occupation(),
        )
        report = compare(spectral, mc, self.cfg.tolerances)
        path = self.out / "compare.json"
        _write_json(path, report.to_dict())
        self._cache["compare_report"] = report
        self._cache["spectral_artifacts"] = spectral
        detail = " ".join(
            f"{c.name}={'ok' if c.passed else 'FAIL'}" for c in report.checks
        )
        return report.to_dict(), [path], detail

    def render_figures(self) -> list[Path]:
        from .report import occupation_prediction, render_figures

        kwargs = {}
        if "curve" in self._cache:
            kwargs["spectral_curve"] = self._cache["curve"]
        if "mc_curve" in self._cache:
            kwargs["mc_curve"] = self._cache["mc_curve"]
        if "eigen" in self._cache:
            result, _ = self._cache["eigen"]
            kwargs["c1"] = result.c1
            kwargs["lambda1"] = result.lambda1
            kwargs["eigenvalues"] = result.leading_eigenvalues
        if "mc_occupation" in self._cache:
            occ = self._cache["mc_occupation"]
            kwargs["occupation"] = occ
            spectral = self._cache.get("spectral_artifacts")
            if spectral is not None:
                kwargs["occupation_pred"] = occupation_prediction(
                    spectral.row, spectral.nodes, spectral.step,
                    occ.bin_left, occ.bin_right,
                )
        if "kernel_table" in self._cache:
            table = self._cache["kernel_table"]
            centers = 0.5 * (table.u_left + table.u_right)
            kwargs["kernel_cells"] = (centers, table.cell_avg)
        return [Path(p) for p in render_figures(self.out, **kwargs)]


def _execute(cfg, stage_names, threads, *, with_report: bool) -> int:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pipeline = _Pipeline(cfg, out)
    manifest = {
        "family": cfg.family,
        "threads": threads if threads is not None else "default",
        "stages": {},
        "files": [],
    }
    summary: dict[str, object] = {"family": cfg.family}
    status = 0
    files: list[Path] = []
    for name in stage_names:
        stage = getattr(pipeline, f"stage_{name}")
        try:
            payload, stage_files, line = stage()
        except Exception as exc:  # noqa: BLE001 -- every stage error becomes status 1
            manifest["stages"][name] = {"status": "failed", "error": str(exc)}
            print(f"levyexit: {name}: FAILED: {exc}", file=sys.stderr)
            status = 1
            break
        manifest["stages"][name] = {
            "status": "ok",
            "files": sorted(p.name for p in stage_files),
        }
        files.extend(stage_files)
        summary[name] = payload
        print(f"levyexit: {name}: ok ({line})")
    if status == 0 and with_report:
        figures = pipeline.render_figures()
        files.extend(figures)
        manifest["figures"] = sorted(p.name for p in figures)
        summary_path = out / "summary.json"
        _write_json(summary_path, summary)
        files.append(summary_path)
    report = pipeline._cache.get("compare_report")
    if status == 0 and report is not None and not report.passed:
        failed = [c.name for c in report.checks if not c.passed]
        print(f"levyexit: comparison checks failed: {', '.join(failed)}", file=sys.stderr)
        status = 1
    manifest["files"] = sorted(p.name for p in files)
    _write_json(out / "manifest.json", manifest)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
