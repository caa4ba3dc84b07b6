"""Config parsing, file formats, and the four CLI commands with their
exit-code contract (0 ok, 2 config, 3 spec, 4 convergence, 5 certification,
6 non-finite, 7 clobber)."""

import json
import math

import numpy as np
import pytest

from bnls.cli import main
from bnls.errors import BnlsError
from bnls.evolution import RunConfig, evolve
from bnls.io import (
    ConfigError,
    grid_from_config,
    load_config,
    read_manifest,
    read_series_csv,
    read_snapshot,
    run_config_from_config,
    spec_from_config,
    write_manifest,
    write_series_csv,
    write_snapshot,
)
from bnls.problem import Family
from conftest import gaussian

LOCAL_PROBLEM = """
[problem]
family = "local"
dim = 5
b = -0.5
q = 2.5
"""

CHOQUARD_PROBLEM = """
[problem]
family = "choquard"
dim = 5
b = -0.5
p = 2.5
alpha = 2.0
"""

GRID = """
[grid]
size = 512
r_max = 30.0
"""


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


# ------------------------------------------------------------------- formats

def test_snapshot_round_trip(tmp_path, plan512):
    u = gaussian(plan512, amplitude=0.7).values * np.exp(1j * 0.3)
    path = tmp_path / "field.bnls"
    write_snapshot(path, 2.5, 30.0, u)
    t, r_max, back = read_snapshot(path)
    assert t == 2.5 and r_max == 30.0
    assert np.array_equal(back, u)


def test_snapshot_bad_magic(tmp_path):
    path = tmp_path / "junk.bnls"
    path.write_bytes(b"NOPE!" + b"\x00" * 64)
    with pytest.raises(BnlsError):
        read_snapshot(path)


def test_series_csv_round_trip(tmp_path, spec_local, plan512):
    cfg = RunConfig(dt=1e-2, t_end=0.05, diagnostics_every=1,
                    morawetz_R=(10.0,), cutoff_R=(5.0,),
                    lr_exponents=(4.0, math.inf))
    result = evolve(spec_local, plan512, gaussian(plan512, amplitude=0.3), cfg)
    path = tmp_path / "series.csv"
    write_series_csv(path, result.series)
    header, data = read_series_csv(path)
    assert header[:4] == ["t", "mass", "energy", "kinetic"]
    assert "morawetz_R10" in header and "local_mass_R5" in header
    assert "l4_norm" in header and "linf_norm" in header
    assert data.shape == (len(result.series), len(header))
    # %.17g round-trips doubles exactly
    for i, rec in enumerate(result.series):
        assert data[i, header.index("mass")] == rec.mass
        assert data[i, header.index("energy")] == rec.energy


def test_manifest_round_trip(tmp_path):
    path = tmp_path / "manifest.json"
    write_manifest(path, {"a": 1.5, "bad": math.nan, "nested": {"x": [1, 2]}})
    back = read_manifest(path)
    assert back["a"] == 1.5
    assert back["nested"]["x"] == [1, 2]
    assert back["bad"] == "nan"


# -------------------------------------------------------------------- config

def test_config_sections(tmp_path):
    cfg = load_config(_write(tmp_path, "c.toml", LOCAL_PROBLEM + GRID + """
[run]
dt = 1e-3
t_end = 1.0

[diagnostics]
cutoff_R = [5.0]
"""))
    spec = spec_from_config(cfg)
    assert spec.family is Family.LOCAL and spec.q == 2.5
    assert grid_from_config(cfg) == (512, 30.0)
    rc = run_config_from_config(cfg)
    assert rc.dt == 1e-3 and rc.cutoff_R == (5.0,)


def test_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.toml")
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, "bad.toml", "not toml ]["))
    with pytest.raises(ConfigError):
        spec_from_config({"problem": {"family": "local"}})
    with pytest.raises(ConfigError):
        spec_from_config({})


# ----------------------------------------------------------------------- CLI

def test_cli_bad_config_exit_2(tmp_path):
    assert main(["thresholds", "--config", str(tmp_path / "none.toml")]) == 2


def test_cli_thresholds_local(tmp_path, capsys):
    cfg = _write(tmp_path, "local.toml", LOCAL_PROBLEM)
    assert main(["thresholds", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "s_c           1.5" in out
    assert "(2, 4)" in out
    assert "inside window True" in out


def test_cli_thresholds_choquard(tmp_path, capsys):
    cfg = _write(tmp_path, "choq.toml", CHOQUARD_PROBLEM)
    assert main(["thresholds", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "0.833333333333" in out
    assert f"({(3 + math.sqrt(41)) / 4:.12g}, 6)" in out


def test_cli_thresholds_n4_exit_3(tmp_path, capsys):
    cfg = _write(tmp_path, "n4.toml", """
[problem]
family = "local"
dim = 4
b = -0.5
q = 2.5
""")
    assert main(["thresholds", "--config", cfg]) == 3
    assert "DimensionTooSmall" in capsys.readouterr().out


def test_cli_thresholds_violations_exit_3(tmp_path, capsys):
    cfg = _write(tmp_path, "bad.toml", """
[problem]
family = "local"
dim = 5
b = 0.5
q = 2.5
""")
    assert main(["thresholds", "--config", cfg]) == 3
    assert "b<0" in capsys.readouterr().out


def test_cli_clobber_exit_7(tmp_path):
    cfg = _write(tmp_path, "local.toml", LOCAL_PROBLEM)
    out = tmp_path / "occupied"
    out.mkdir()
    (out / "stale.txt").write_text("x")
    assert main(["thresholds", "--config", cfg, "--out", str(out)]) == 7


def test_cli_ground_state_certified_and_deterministic(tmp_path, capsys):
    cfg = _write(tmp_path, "gs.toml", LOCAL_PROBLEM + GRID)
    out1, out2 = tmp_path / "gs1", tmp_path / "gs2"
    assert main(["ground-state", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["ground-state", "--config", cfg, "--out", str(out2)]) == 0
    report = json.loads((out1 / "certification.json").read_text())
    assert report["sharp_constant_defect"] <= 1e-4
    manifest = json.loads((out1 / "manifest.json").read_text())
    assert manifest["outcome"] == "Certified"
    assert manifest["ground_state"]["residual"] <= 1e-8
    # rerun is bit-identical (deterministic pipeline)
    assert (out1 / "ground_state.bnls").read_bytes() == \
        (out2 / "ground_state.bnls").read_bytes()


def test_cli_ground_state_no_convergence_exit_4(tmp_path):
    cfg = _write(tmp_path, "gs.toml", LOCAL_PROBLEM + GRID + """
[run]
tol = 1e-30
max_iter = 40
""")
    assert main(["ground-state", "--config", cfg,
                 "--out", str(tmp_path / "gs")]) == 4


def test_cli_ground_state_aliased_certification_exit_5(tmp_path):
    # without dealiased evaluation (refine = 1) the |x|^{2b} cusp leaves
    # Pohozaev defects just above the certification tolerance at K = 512
    cfg = _write(tmp_path, "gs.toml", LOCAL_PROBLEM + GRID + """
[run]
refine = 1
""")
    assert main(["ground-state", "--config", cfg,
                 "--out", str(tmp_path / "gs")]) == 5


def _energy_defect(series_path):
    header, data = read_series_csv(series_path)
    e = data[:, header.index("energy")]
    k0 = data[0, header.index("kinetic")]
    return abs(e[-1] - e[0]) / (abs(e[0]) + k0)


def test_cli_evolve_and_dt_refinement(tmp_path):
    base = LOCAL_PROBLEM + GRID + """
[run]
t_end = 0.5
dt = %g
initial = "gaussian"
amplitude = 0.2
diagnostics_every = 100

[diagnostics]
cutoff_R = [5.0]
"""
    cfg1 = _write(tmp_path, "e1.toml", base % 1e-3)
    cfg2 = _write(tmp_path, "e2.toml", base % 5e-4)
    out1, out2 = tmp_path / "run1", tmp_path / "run2"
    assert main(["evolve", "--config", cfg1, "--out", str(out1)]) == 0
    assert main(["evolve", "--config", cfg2, "--out", str(out2)]) == 0
    manifest = json.loads((out1 / "manifest.json").read_text())
    assert manifest["outcome"] == "Completed"
    assert (out1 / "snapshot_000000.bnls").exists()
    d1 = _energy_defect(out1 / "series.csv")
    d2 = _energy_defect(out2 / "series.csv")
    assert 3.0 <= d1 / d2 <= 6.0  # second-order scheme: ~4x


def test_cli_sweep(tmp_path, monkeypatch):
    monkeypatch.setenv("BNLS_WORKERS", "2")
    cfg = _write(tmp_path, "sweep.toml", """
[problem]
family = "local"
dim = 5
b = -0.5
q = 2.5

[grid]
size = 64
r_max = 10.0

[run]
t_end = 0.1
dt = 0.01
initial = "gaussian"
amplitude = 1.0

[sweep]
amplitudes = [0.1, 0.2, 0.3]
exponents = [2.2, 2.5]
""")
    out = tmp_path / "sweep"
    assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
    rows = (out / "sweep.csv").read_text().strip().splitlines()
    assert rows[0].startswith("amplitude,exponent,me,mg,outcome")
    assert len(rows) == 7
    assert all("Completed" in row for row in rows[1:])
    assert len(list(out.glob("point_*/manifest.json"))) == 6


def test_cli_sweep_all_invalid_exit_3(tmp_path, monkeypatch):
    monkeypatch.setenv("BNLS_WORKERS", "1")
    cfg = _write(tmp_path, "sweep.toml", """
[problem]
family = "local"
dim = 5
b = 0.5
q = 2.5

[grid]
size = 64
r_max = 10.0

[run]
t_end = 0.1
dt = 0.01
initial = "gaussian"

[sweep]
amplitudes = [0.1]
exponents = [2.2, 2.5]
""")
    assert main(["sweep", "--config", cfg,
                 "--out", str(tmp_path / "sweep")]) == 3
