"""Tests for the figure scripts.

Inputs are produced by invoking the rabi-critic CLI as a subprocess, so
this package touches the primary component only through its files.
"""

import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from rabi_critic_plots.render import EXIT_DATA, EXIT_OK, main

pytestmark = pytest.mark.filterwarnings("ignore::DeprecationWarning")


def _cli(*args):
    proc = subprocess.run([sys.executable, "-m", "rabi_critic.cli", *args],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="module")
def grid_csv(tmp_path_factory):
    out = tmp_path_factory.mktemp("grid") / "grid.csv"
    _cli("phase-diagram", "--kappa", "3", "--tau-range", "-2:6",
         "--gtilde-range", "0:3", "--resolution", "60x40", "--output", str(out))
    return out


@pytest.fixture(scope="module")
def sweep_csv(tmp_path_factory):
    out = tmp_path_factory.mktemp("sweep") / "sweep.csv"
    _cli("sweep", "--tau", "2", "--kappa", "3", "--eta", "8,16",
         "--gtilde-range", "1.5:2.5:0.1", "--output", str(out))
    return out


@pytest.fixture(scope="module")
def fss_json(tmp_path_factory):
    out = tmp_path_factory.mktemp("fss") / "fss.json"
    _cli("fss", "--tau", "2", "--kappa", "3", "--eta", "8,16,32",
         "--t-min", "0.02", "--t-max", "0.2", "--points", "5",
         "--output", str(out))
    return out


def test_phase_diagram_render(grid_csv, tmp_path):
    out = tmp_path / "fig.png"
    assert main(["phase-diagram", "--input", str(grid_csv), "--output", str(out)]) == EXIT_OK
    assert out.stat().st_size > 10_000


def test_render_is_deterministic(grid_csv, tmp_path):
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    assert main(["phase-diagram", "--input", str(grid_csv), "--output", str(a)]) == EXIT_OK
    assert main(["phase-diagram", "--input", str(grid_csv), "--output", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_sweep_render(sweep_csv, tmp_path):
    out = tmp_path / "sweep.png"
    assert main(["sweep", "--input", str(sweep_csv), "--output", str(out)]) == EXIT_OK
    assert out.stat().st_size > 10_000
    out1 = tmp_path / "sweep_d1.png"
    assert main(["sweep", "--input", str(sweep_csv), "--derivative-order", "1",
                 "--output", str(out1)]) == EXIT_OK


def test_fss_render(fss_json, tmp_path):
    out = tmp_path / "fss.png"
    assert main(["fss", "--input", str(fss_json), "--output", str(out)]) == EXIT_OK
    assert out.stat().st_size > 10_000


def test_missing_sidecar_rejected(sweep_csv, tmp_path):
    bare = tmp_path / "bare.csv"
    bare.write_text(sweep_csv.read_text())
    out = tmp_path / "x.png"
    assert main(["sweep", "--input", str(bare), "--output", str(out)]) == EXIT_DATA
    assert not out.exists()


def test_schema_mismatch_names_column(sweep_csv, tmp_path, capsys):
    broken = tmp_path / "broken.csv"
    rows = sweep_csv.read_text().splitlines()
    rows[0] = rows[0].replace("x2_b", "x2_weird")
    broken.write_text("\n".join(rows) + "\n")
    Path(str(broken) + ".meta.json").write_text(
        Path(str(sweep_csv) + ".meta.json").read_text())
    out = tmp_path / "x.png"
    assert main(["sweep", "--input", str(broken), "--output", str(out)]) == EXIT_DATA
    assert "x2_b" in capsys.readouterr().err
    assert not out.exists()


def test_empty_csv_clean_error(sweep_csv, tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text(sweep_csv.read_text().splitlines()[0] + "\n")
    Path(str(empty) + ".meta.json").write_text(
        Path(str(sweep_csv) + ".meta.json").read_text())
    out = tmp_path / "x.png"
    assert main(["sweep", "--input", str(empty), "--output", str(out)]) == EXIT_DATA
    assert not out.exists()


def test_conventions_printed_from_sidecar(grid_csv, tmp_path, monkeypatch):
    # the conventions line comes from the sidecar; a tampered sidecar without
    # conventions is rejected
    meta_path = Path(str(grid_csv) + ".meta.json")
    meta = json.loads(meta_path.read_text())
    stripped = tmp_path / "grid.csv"
    stripped.write_text(grid_csv.read_text())
    Path(str(grid_csv) + ".boundaries.json").exists()
    meta2 = dict(meta)
    meta2.pop("conventions")
    Path(str(stripped) + ".meta.json").write_text(json.dumps(meta2))
    assert main(["phase-diagram", "--input", str(stripped),
                 "--output", str(tmp_path / "y.png")]) == EXIT_DATA
