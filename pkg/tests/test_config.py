"""Run-configuration parsing, defaults, overrides and validation errors."""

from __future__ import annotations

import numpy as np
import pytest

import levyexit as le
from levyexit.config import ConfigError, load_config, parse_config

MINIMAL = """
[process]
family = none
A = 1.0

[domain]
intervals = -1 1
"""

CAUCHY = """
[process]
family = stable

[params]
alpha = 1.0

[domain]
intervals = -1 1
x0 = 0.25
"""


def test_minimal_config_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.family == "none"
    assert isinstance(cfg.triplet.measure, le.NoJumps)
    assert cfg.triplet.A == 1.0
    assert cfg.domain.intervals == ((-1.0, 1.0),)
    assert cfg.resolution == 200
    assert cfg.x0 == 0.0
    assert cfg.t_max == 10.0 and cfg.t_points == 201
    assert cfg.laplace_s == (0.0, 0.5, 1.0, 2.0)
    assert cfg.mc is None
    assert cfg.out_dir == "out"
    assert not cfg.dump_matrix
    assert np.allclose(cfg.t_grid, np.linspace(0.0, 10.0, 201))


def test_default_stage_toggles():
    stages = parse_config(MINIMAL).stages
    assert stages.enabled("classify")
    for name in ("kernel_table", "assemble", "eigen", "survival"):
        assert stages.enabled(name), name
    for name in ("laplace", "mc_survival", "mc_occupation", "compare"):
        assert not stages.enabled(name), name


def test_compare_pulls_in_its_dependencies():
    text = MINIMAL + "\n[stages]\ncompare = true\n\n[mc]\nseed = 1\n"
    stages = parse_config(text).stages
    for name in ("eigen", "survival", "mc_survival", "mc_occupation", "compare"):
        assert stages.enabled(name), name


def test_stages_can_be_disabled():
    text = MINIMAL + "\n[stages]\neigen = false\nsurvival = false\n"
    stages = parse_config(text).stages
    assert stages.enabled("assemble")
    assert not stages.enabled("eigen")
    assert not stages.enabled("survival")


def test_unknown_stage_rejected():
    with pytest.raises(ConfigError, match="unknown stage"):
        parse_config(MINIMAL + "\n[stages]\nfrobnicate = true\n")


@pytest.mark.parametrize(
    "family, params, measure_type",
    [
        ("poisson", "rate = 2.0", le.PoissonJumps),
        ("compound-poisson", "rate = 1.0\njumps = 1:0.5, -2:0.5", le.CompoundPoissonJumps),
        ("stable", "alpha = 1.5\nskew = 0.2", le.StableJumps),
        ("gamma", "shape = 1.0\nrate = 2.0", le.GammaJumps),
        ("cgmy", "C = 1.0\nG = 3.0\nM = 4.0\nY = 0.5", le.CGMYJumps),
    ],
)
def test_family_dispatch(family, params, measure_type):
    text = f"[process]\nfamily = {family}\n\n[params]\n{params}\n\n[domain]\nintervals = -1 1\n"
    cfg = parse_config(text)
    assert isinstance(cfg.triplet.measure, measure_type)


def test_cgmy_keys_keep_case():
    text = "[process]\nfamily = cgmy\n\n[params]\nC = 1.0\nG = 3.0\nM = 4.0\nY = 0.5\n\n[domain]\nintervals = 0.1 1\nx0 = 0.5\n"
    measure = parse_config(text).triplet.measure
    assert (measure.C, measure.G, measure.M, measure.Y) == (1.0, 3.0, 4.0, 0.5)


def test_unknown_family_rejected():
    with pytest.raises(ConfigError, match="unknown process family"):
        parse_config(MINIMAL.replace("none", "weird"))


def test_multi_interval_parsing():
    text = MINIMAL.replace("intervals = -1 1", "intervals = -2 -1; 0 1\nx0 = 0.5")
    cfg = parse_config(text)
    assert cfg.domain.intervals == ((-2.0, -1.0), (0.0, 1.0))
    assert cfg.x0 == 0.5


def test_malformed_interval_rejected():
    with pytest.raises(ConfigError):
        parse_config(MINIMAL.replace("intervals = -1 1", "intervals = -1"))
    with pytest.raises(ConfigError):
        parse_config(MINIMAL.replace("intervals = -1 1", "intervals = 1 -1"))


def test_missing_process_section_rejected():
    with pytest.raises(ConfigError):
        parse_config("[domain]\nintervals = -1 1\n")


def test_bad_float_reports_section_and_key():
    with pytest.raises(ConfigError, match="process.A"):
        parse_config(MINIMAL.replace("A = 1.0", "A = fast"))


def test_syntax_error_rejected():
    with pytest.raises(ConfigError, match="syntax"):
        parse_config("not an ini file at all [[[")


def test_x0_outside_domain_rejected():
    with pytest.raises(ConfigError, match="x0"):
        parse_config(MINIMAL + "\n[domain]\nx0 = 5.0\n".replace("[domain]\n", ""))


def test_resolution_floor():
    with pytest.raises(ConfigError):
        parse_config(MINIMAL + "\n[domain]\nresolution = 8\n".replace("[domain]\n", ""))


def test_negative_laplace_point_rejected():
    with pytest.raises(ConfigError):
        parse_config(MINIMAL + "\n[laplace]\ns = -1\n")


def test_mc_requires_seed_when_mc_stage_enabled():
    text = MINIMAL + "\n[stages]\nmc_survival = true\n\n[mc]\nn_paths = 2000\n"
    with pytest.raises(ConfigError, match="seed"):
        parse_config(text)


def test_mc_stage_without_mc_section_rejected():
    with pytest.raises(ConfigError):
        parse_config(MINIMAL + "\n[stages]\nmc_survival = true\n")


def test_seed_override_satisfies_requirement():
    text = MINIMAL + "\n[stages]\nmc_survival = true\n\n[mc]\nn_paths = 2000\n"
    cfg = parse_config(text, seed_override=99)
    assert cfg.mc.seed == 99
    assert cfg.mc.n_paths == 2000


def test_seed_override_synthesizes_mc_section():
    cfg = parse_config(MINIMAL, seed_override=7)
    assert cfg.mc is not None
    assert cfg.mc.seed == 7
    assert cfg.mc.n_paths == 10000  # documented default
    assert cfg.mc.horizon == cfg.t_max


def test_seed_override_validated():
    with pytest.raises(ConfigError):
        parse_config(MINIMAL, seed_override=-1)


def test_out_override_wins():
    cfg = parse_config(MINIMAL + "\n[output]\ndirectory = elsewhere\n", out_override="cli-dir")
    assert cfg.out_dir == "cli-dir"


def test_mc_defaults_and_parsing():
    text = MINIMAL + "\n[mc]\nn_paths = 5000\ndt = 1e-4\nseed = 3\nmethod = EXACT\n"
    mc = parse_config(text).mc
    assert mc.n_paths == 5000
    assert mc.dt == 1e-4
    assert mc.seed == 3
    assert mc.method == "exact"
    assert mc.small_jump_cutoff == 1e-2
    assert mc.occupation_bins == 8


def test_bad_mc_method_rejected():
    with pytest.raises(ConfigError, match="method"):
        parse_config(MINIMAL + "\n[mc]\nseed = 1\nmethod = euler\n")


def test_tolerances_defaults_and_validation():
    tol = parse_config(MINIMAL).tolerances
    assert tol.rate_sigma == 2.0
    assert tol.occupation_sigma == 2.0
    assert tol.c1_sigma == 1.0
    assert tol.symbol_residual == 1e-3
    assert tol.laplace_rel == 1e-3
    with pytest.raises(ConfigError):
        parse_config(MINIMAL + "\n[tolerances]\nrate_sigma = 0\n")


def test_invalid_triplet_reported_as_config_error():
    with pytest.raises(ConfigError, match="triplet"):
        parse_config(MINIMAL.replace("A = 1.0", "A = -1.0"))


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "nope.ini")


def test_load_config_round_trip(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(CAUCHY)
    cfg = load_config(path)
    assert isinstance(cfg.triplet.measure, le.StableJumps)
    assert cfg.x0 == 0.25
