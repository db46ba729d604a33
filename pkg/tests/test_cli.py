import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from sinhg.cli import RunConfig, main
from sinhg.errors import ConfigError


def run(tmp_path, *args):
    return main(list(args) + ["--out", str(tmp_path)])


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_run_config_validation():
    RunConfig()
    for bad in ({"period": 0}, {"r_min": 2, "r_max": 1}, {"max_points": 0}, {"grid": 7},
                {"tolerances": {"bogus": 1}}):
        with pytest.raises(ConfigError):
            RunConfig(**bad)


def test_spectrum_vacuum(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"lambdas": [1.0, [0.0, 2.0], 0.0]}))
    assert run(tmp_path, "spectrum", "--config", str(cfg), "--grid", "64") == 0
    rows = read_csv(tmp_path / "spectrum.csv")
    assert rows[0][-1] == "status" and len(rows) == 4
    assert float(rows[1][2]) == pytest.approx(2 * math.cos(1), abs=1e-8)
    assert rows[3][-1] == "domain_error"


def test_spectrum_empty_grid(tmp_path):
    assert run(tmp_path, "spectrum", "--grid", "64") == 0
    assert len(read_csv(tmp_path / "spectrum.csv")) == 1


def test_divisor_outputs_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(d, "divisor", "--data", "random_smooth", "--params", '{"seed": 1}',
                   "--window", "0.1", "10", "--grid", "128") == 0
    assert (a / "divisor.json").read_bytes() == (b / "divisor.json").read_bytes()
    pts = json.loads((a / "divisor.json").read_text())
    assert pts and all(p["class"] == "generic" for p in pts)
    assert len(read_csv(a / "divisor.csv")) == len(pts) + 1


def test_divisor_empty_window_and_bad_window(tmp_path, capsys):
    assert run(tmp_path, "divisor", "--window", "2", "3") == 0
    assert json.loads((tmp_path / "divisor.json").read_text()) == []
    assert run(tmp_path / "x", "divisor", "--window", "2", "2") == 4
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "ConfigError" and err["exit_code"] == 4


def test_corrupt_samples_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2")
    out = tmp_path / "never"
    assert run(out, "divisor", "--samples", str(bad)) == 4
    assert not out.exists()


def test_oracle_command(tmp_path):
    assert run(tmp_path, "oracle", "--window", "0.01", "100") == 0
    rows = read_csv(tmp_path / "oracle.csv")
    assert len(rows) == 41
    lam = complex(float(rows[1][0]), float(rows[1][1]))
    assert float(rows[1][2]) == pytest.approx(2 * np.cos(np.sqrt((1 + lam) * (1 + 1 / lam)) / 2).real)
    assert len(json.loads((tmp_path / "oracle_divisor.json").read_text())) == 3


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "sinhg.cli", "oracle", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr


def test_verify_small_run(tmp_path):
    code = run(tmp_path, "verify", "--data", "random_smooth", "--params", '{"seed": 2}', "--max-points", "3",
               "--window", "0.005", "200")
    blob = json.loads((tmp_path / "verify.json").read_text())
    assert code == 0 and blob["pass"] is True
    assert (tmp_path / "verify_summary.txt").read_text().startswith(("PASS", "#", "verify", "WARN"))
