"""End-to-end command-line behavior: artifacts, exit codes, determinism."""

from __future__ import annotations

import csv
import json

import pytest

from levyexit.cli import main

SPECTRAL_ONLY = """
[process]
family = none
A = 1.0

[domain]
intervals = -1 1
resolution = 32

[time]
t_max = 6.0
t_points = 31
"""

FULL_RUN = """
[process]
family = none
A = 1.0

[domain]
intervals = -1 1
resolution = 32

[time]
t_max = 6.0
t_points = 31

[laplace]
s = 0 1

[mc]
n_paths = 1000
dt = 2e-3
seed = 5
horizon = 6.0
occupation_bins = 4

[stages]
laplace = true
mc_survival = true
mc_occupation = true
compare = true

[tolerances]
rate_sigma = 10
occupation_sigma = 12
c1_sigma = 10
"""

TYPE_I = """
[process]
family = poisson

[params]
rate = 1.0

[domain]
intervals = -1 1
resolution = 32
"""


def write(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def read_json(out, name):
    with open(out / name, encoding="utf-8") as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# Spectral-only run
# ---------------------------------------------------------------------------


def test_run_spectral_stages(tmp_path, capsys):
    cfg = write(tmp_path, SPECTRAL_ONLY)
    out = tmp_path / "out"
    assert main(["run", "--config", cfg, "--out", str(out)]) == 0
    for name in ("classify.json", "kernel_table.csv", "assemble.json",
                 "eigen.json", "survival.csv", "manifest.json", "summary.json"):
        assert (out / name).exists(), name
    manifest = read_json(out, "manifest.json")
    assert all(info["status"] == "ok" for info in manifest["stages"].values())
    assert "mc_survival" not in manifest["stages"]
    eigen = read_json(out, "eigen.json")
    assert eigen["lambda1"] == pytest.approx(8.0 / 3.141592653589793**2, rel=2e-2)
    assert "units" in eigen
    lines = capsys.readouterr().out.splitlines()
    assert sum("ok (" in line for line in lines) == 5


def test_single_stage_command_runs_dependencies(tmp_path):
    cfg = write(tmp_path, SPECTRAL_ONLY)
    out = tmp_path / "eig"
    assert main(["eigen", "--config", cfg, "--out", str(out)]) == 0
    manifest = read_json(out, "manifest.json")
    assert set(manifest["stages"]) == {"classify", "kernel_table", "assemble", "eigen"}
    assert not (out / "survival.csv").exists()


def test_survival_csv_shape(tmp_path):
    cfg = write(tmp_path, SPECTRAL_ONLY)
    out = tmp_path / "sur"
    assert main(["survival", "--config", cfg, "--out", str(out)]) == 0
    with open(out / "survival.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "p"]
    assert len(rows) == 1 + 31
    assert float(rows[1][1]) == pytest.approx(1.0)


def test_classify_runs_on_type_i(tmp_path):
    cfg = write(tmp_path, TYPE_I)
    out = tmp_path / "cls"
    assert main(["classify", "--config", cfg, "--out", str(out)]) == 0
    payload = read_json(out, "classify.json")
    assert payload["process_type"] == "TypeI"
    assert payload["spectral_ok"] is False


# ---------------------------------------------------------------------------
# Failure modes and exit codes
# ---------------------------------------------------------------------------


def test_spectral_stage_on_type_i_fails_with_gate_message(tmp_path, capsys):
    cfg = write(tmp_path, TYPE_I)
    out = tmp_path / "gate"
    assert main(["eigen", "--config", cfg, "--out", str(out)]) == 1
    err = capsys.readouterr().err
    assert "type II gate" in err
    manifest = read_json(out, "manifest.json")
    assert manifest["stages"]["assemble"]["status"] == "failed"
    assert "type II gate" in manifest["stages"]["assemble"]["error"]
    # completed stages keep their artifacts
    assert (out / "classify.json").exists()
    assert (out / "kernel_table.csv").exists()


def test_missing_config_file_is_config_error(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "absent.ini")]) == 2
    assert "config error" in capsys.readouterr().err


def test_malformed_config_is_config_error(tmp_path, capsys):
    cfg = write(tmp_path, "[process]\nfamily = nonesuch\n\n[domain]\nintervals = -1 1\n")
    assert main(["run", "--config", cfg]) == 2
    assert "config error" in capsys.readouterr().err


def test_mc_command_without_seed_is_config_error(tmp_path, capsys):
    cfg = write(tmp_path, SPECTRAL_ONLY + "\n[mc]\nn_paths = 1000\n")
    assert main(["mc-survival", "--config", cfg, "--out", str(tmp_path / "x")]) == 2
    assert "seed" in capsys.readouterr().err


def test_compare_command_without_mc_section_is_config_error(tmp_path, capsys):
    cfg = write(tmp_path, SPECTRAL_ONLY)
    assert main(["compare", "--config", cfg, "--out", str(tmp_path / "x")]) == 2
    assert "seed" in capsys.readouterr().err


def test_seed_flag_satisfies_mc_requirement(tmp_path):
    cfg = write(tmp_path, SPECTRAL_ONLY + "\n[mc]\nn_paths = 1000\ndt = 5e-3\nhorizon = 2.0\n")
    out = tmp_path / "seeded"
    assert main(["mc-survival", "--config", cfg, "--seed", "11", "--out", str(out)]) == 0
    assert (out / "mc_survival.csv").exists()
    manifest = read_json(out, "manifest.json")
    assert manifest["stages"]["mc_survival"]["status"] == "ok"


def test_bad_thread_count_is_config_error(tmp_path, capsys):
    cfg = write(tmp_path, SPECTRAL_ONLY)
    assert main(["run", "--config", cfg, "--threads", "0"]) == 2
    assert "thread" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# Full pipeline with comparison
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def full_run(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("fullrun")
    cfg = write(tmp, FULL_RUN)
    out = tmp / "out"
    code = main(["run", "--config", cfg, "--out", str(out)])
    return code, out


def test_full_run_passes_and_writes_everything(full_run):
    code, out = full_run
    assert code == 0
    for name in (
        "classify.json", "kernel_table.csv", "assemble.json", "eigen.json",
        "survival.csv", "laplace.csv", "mc_survival.csv", "mc_occupation.csv",
        "compare.json", "summary.json", "manifest.json",
        "fig_survival.png", "fig_occupation.png", "fig_kernel.png", "fig_spectrum.png",
    ):
        assert (out / name).exists(), name


def test_compare_report_schema(full_run):
    _, out = full_run
    report = read_json(out, "compare.json")
    assert {"spectral_rate", "mc_rate", "mc_stderr", "checks", "units"} <= set(report)
    names = [c["name"] for c in report["checks"]]
    assert names == ["rate_agreement", "c1_extrapolation", "occupation_rows"]
    assert all(c["passed"] for c in report["checks"])


def test_mc_survival_csv_schema(full_run):
    _, out = full_run
    with open(out / "mc_survival.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "p_hat", "ci_lo", "ci_hi"]
    p0 = float(rows[1][1])
    assert p0 == 1.0
    for row in rows[1:]:
        lo, hi = float(row[2]), float(row[3])
        assert lo <= float(row[1]) <= hi


def test_mc_occupation_csv_schema(full_run):
    _, out = full_run
    with open(out / "mc_occupation.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["bin_left", "bin_right", "occ", "ci"]
    assert len(rows) == 1 + 4
    total = sum(float(r[3 - 1]) for r in rows[1:])
    assert total == pytest.approx(1.0, abs=0.15)  # mean exit time ~ 1


def test_laplace_csv_values(full_run):
    _, out = full_run
    with open(out / "laplace.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["s", "value"]
    values = {float(s): float(v) for s, v in rows[1:]}
    assert values[0.0] == pytest.approx(1.0, rel=0.02)  # mean exit time
    assert 0.0 < values[1.0] < values[0.0]


def test_summary_aggregates_stage_payloads(full_run):
    _, out = full_run
    summary = read_json(out, "summary.json")
    assert summary["eigen"]["lambda1"] > 0.0
    assert summary["compare"]["checks"]


# ---------------------------------------------------------------------------
# Determinism and matrix dump
# ---------------------------------------------------------------------------


def test_rerun_reproduces_artifacts_byte_for_byte(tmp_path):
    cfg = write(tmp_path, FULL_RUN)
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert main(["run", "--config", cfg, "--out", str(out_a)]) == 0
    assert main(["run", "--config", cfg, "--out", str(out_b)]) == 0
    names = sorted(p.name for p in out_a.iterdir() if p.suffix in (".csv", ".json"))
    assert names  # sanity
    for name in names:
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name


def test_dump_matrix_writes_generator(tmp_path):
    cfg = write(tmp_path, SPECTRAL_ONLY + "\n[output]\ndump_matrix = true\n")
    out = tmp_path / "dump"
    assert main(["assemble", "--config", cfg, "--out", str(out)]) == 0
    with open(out / "generator.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    n_interior = 2 * 32 - 1
    assert len(rows) == 1 + n_interior
    assert len(rows[1]) == n_interior
