import subprocess
import sys

import numpy as np
import pytest

from vdbtherm.cli import ExperimentConfig, emit_csv, load_config, main
from vdbtherm.errors import ConfigError

BASE = """
[system]
tau = 1.85
phi = 0.575
potentials = 6, 1.5, 4

[run]
mode = {mode}
temperature = {temperature}
out = {out}

[grid]
t_min = 2.0
t_max = 60.0
n_t = 6
n_v1 = 5
v1_max = 8.0
"""


def write_config(tmp_path, mode="single", temperature=3.0, extra=""):
    out = tmp_path / f"{mode}.csv"
    path = tmp_path / "cfg.ini"
    path.write_text(BASE.format(mode=mode, temperature=temperature, out=out) + extra)
    return path, out


def read_rows(path):
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    return header, [dict(zip(header, l.split(","))) for l in lines[1:]]


def test_missing_run_section(tmp_path):
    p = tmp_path / "bad.ini"
    p.write_text("[system]\ntau = 1.85\n")
    with pytest.raises(ConfigError, match="run"):
        load_config(str(p))


def test_bad_mode_exit_code(tmp_path):
    p = tmp_path / "bad.ini"
    p.write_text("[run]\nmode = bogus\n")
    assert main(["--config", str(p)]) == 2


def test_bad_float_reports_key(tmp_path):
    p = tmp_path / "bad.ini"
    p.write_text("[run]\nmode = single\ntemperature = hot\n")
    with pytest.raises(ConfigError, match="temperature"):
        load_config(str(p))


def test_missing_file_exit_code():
    assert main(["--config", "/nonexistent/cfg.ini"]) == 2


@pytest.mark.filterwarnings("ignore:.*maximum number.*")
@pytest.mark.filterwarnings("ignore:.*roundoff error.*")
def test_numerical_failure_exit_code(tmp_path, capsys):
    cfg, _ = write_config(tmp_path)
    assert main(["--config", str(cfg), "--tol", "1e-17"]) == 3
    assert "numerical failure" in capsys.readouterr().err


def test_single_mode(tmp_path):
    cfg, out = write_config(tmp_path)
    assert main(["--config", str(cfg)]) == 0
    header, rows = read_rows(out)
    assert header[0] == "T" and "gamma" in header and "regime" in header
    assert len(rows) == 1
    assert rows[0]["regime"] == "exponential"
    # embedded config comments present
    assert any(l.startswith("# system.tau") for l in out.read_text().splitlines())


def test_single_mode_no_dynamics_warning(tmp_path, capsys):
    out = tmp_path / "flat.csv"
    p = tmp_path / "flat.ini"
    p.write_text(f"[system]\npotentials = 2, 2, 2\n\n[run]\nmode = single\nout = {out}\n")
    assert main(["--config", str(p)]) == 0
    assert "no dynamics" in capsys.readouterr().err
    _, rows = read_rows(out)
    assert float(rows[0]["omega_dis"]) == 0.0


def test_trajectory_mode(tmp_path):
    cfg, out = write_config(tmp_path, mode="trajectory", temperature=30.0)
    assert main(["--config", str(cfg)]) == 0
    header, rows = read_rows(out)
    assert header == ["t", "P_minus", "P_zero", "P_plus", "dP_plus_rescaled"]
    assert len(rows) == 400
    sums = [sum(float(r[c]) for c in header[1:4]) for r in rows]
    assert max(abs(s - 1.0) for s in sums) < 1e-9


def test_freq_curve_mode(tmp_path):
    cfg, out = write_config(tmp_path, mode="freq_curve")
    assert main(["--config", str(cfg)]) == 0
    header, rows = read_rows(out)
    assert len(rows) == 6
    temps = [float(r["T"]) for r in rows]
    assert temps == sorted(temps)
    # gamma changes sign across the EP inside this window
    signs = {np.sign(float(r["gamma"])) for r in rows}
    assert signs == {1.0, -1.0}


def test_phase_diagram_mode(tmp_path):
    cfg, out = write_config(tmp_path, mode="phase_diagram")
    assert main(["--config", str(cfg)]) == 0
    header, rows = read_rows(out)
    assert header == ["V1", "T", "gamma", "regime", "osc_count", "c", "onset_rhs"]
    assert len(rows) == 5 * 6
    # row order: V1 outer, T inner
    assert [float(r["V1"]) for r in rows[:6]] == [0.0] * 6


def test_tep_scan_and_lowT(tmp_path):
    cfg, out = write_config(tmp_path, mode="lowT_scan",
                            extra="beta_list = 0.5, 1.0, 2.0\n")
    # beta_list belongs in [run]; append there instead
    text = cfg.read_text().replace("[grid]", "beta_list = 0.5, 1.0, 2.0\n[grid]")
    cfg.write_text(text)
    assert main(["--config", str(cfg)]) == 0
    header, rows = read_rows(out)
    assert len(rows) == 3
    assert float(rows[-1]["gamma_sign"]) == 1.0


def test_determinism_across_threads(tmp_path):
    cfg, out = write_config(tmp_path, mode="freq_curve")
    assert main(["--config", str(cfg), "--threads", "1"]) == 0
    serial = out.read_bytes()
    assert main(["--config", str(cfg), "--threads", "3"]) == 0
    assert out.read_bytes() == serial


def test_env_threads(tmp_path, monkeypatch):
    cfg, out = write_config(tmp_path, mode="freq_curve")
    monkeypatch.setenv("VDBTHERM_THREADS", "2")
    assert main(["--config", str(cfg)]) == 0


def test_emit_csv_empty_and_roundtrip(tmp_path):
    path = tmp_path / "empty.csv"
    emit_csv([], ["a", "b"], str(path))
    assert path.read_text() == "a,b\n"
    vals = [0.1, 1e-300, np.pi, 2.0 / 3.0]
    path2 = tmp_path / "vals.csv"
    emit_csv([{"x": v} for v in vals], ["x"], str(path2))
    back = [float(l) for l in path2.read_text().splitlines()[1:]]
    assert back == vals  # shortest round-trip floats


def test_console_entrypoint():
    r = subprocess.run([sys.executable, "-m", "vdbtherm.cli", "--help"],
                      capture_output=True, text=True)
    assert r.returncode == 0
    assert "--config" in r.stdout
