"""Preset pipelines: primary CLI presets -> figure scripts.

Checklist encoded programmatically: fig1c shows all three phases meeting at
(tau, gtilde) = (3, 1); fig2 shows the p-quadrature taking off beyond the
transition while x stays flat (growing with system size); fig4 collapses
three sizes onto one curve.  The rendered images are also produced.
"""

import csv
import json
import subprocess
import sys

import pytest

from rabi_critic_plots.render import EXIT_OK, main


def _cli(*args):
    proc = subprocess.run([sys.executable, "-m", "rabi_critic.cli", *args],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


def test_fig1c_pipeline(tmp_path):
    grid = tmp_path / "fig1c.csv"
    _cli("phase-diagram", "--preset", "fig1c", "--output", str(grid))
    with open(grid, newline="") as fh:
        rows = list(csv.DictReader(fh))
    window = {int(r["label"]) for r in rows
              if abs(float(r["tau"]) - 3.0) <= 0.12 and abs(float(r["gtilde"]) - 1.0) <= 0.12}
    assert window == {0, 1, 2}, "three phases must meet around (3, 1)"
    overlay = json.loads((tmp_path / "fig1c.csv.boundaries.json").read_text())
    tri = [c for c in overlay["curves"] if c["kind"] == "triple"][0]
    assert tri["tau"] == [3.0] and tri["gtilde"] == [pytest.approx(1.0)]
    out = tmp_path / "fig1c.png"
    assert main(["phase-diagram", "--input", str(grid), "--output", str(out)]) == EXIT_OK
    assert out.stat().st_size > 10_000


def test_fig2_pipeline(tmp_path):
    sweep = tmp_path / "fig2.csv"
    _cli("sweep", "--preset", "fig2", "--jobs", "2", "--output", str(sweep))
    with open(sweep, newline="") as fh:
        rows = list(csv.DictReader(fh))
    by_eta = {}
    for r in rows:
        by_eta.setdefault(float(r["eta"]), {})[float(r["gtilde"])] = r
    assert set(by_eta) == {64.0, 256.0, 1024.0}
    for eta, pts in by_eta.items():
        pre, post = pts[1.5], pts[2.5]
        # normal phase: both quadratures O(1); p-type SRP: p2_b dominates
        assert float(pre["p2_b"]) < 3.0 and float(pre["x2_b"]) < 3.0
        assert float(post["p2_b"]) > 5.0 * float(post["x2_b"])
    # macroscopic excitation grows with system size
    assert (float(by_eta[1024.0][2.5]["p2_b"])
            > 4.0 * float(by_eta[64.0][2.5]["p2_b"]))
    out = tmp_path / "fig2.png"
    assert main(["sweep", "--input", str(sweep), "--output", str(out)]) == EXIT_OK
    assert out.stat().st_size > 10_000


def test_fig4_pipeline(tmp_path):
    report_path = tmp_path / "fig4.json"
    _cli("fss", "--preset", "fig4", "--jobs", "2", "--output", str(report_path))
    report = json.loads(report_path.read_text())
    for obs in ("n0", "gap"):
        entry = report["observables"][obs]
        assert len(entry["scaled_curves"]) >= 3
        # the paper-exponent collapse beats the alternate pair clearly
        assert entry["residual"] * 5.0 <= entry["residual_alt"]
    out = tmp_path / "fig4.png"
    assert main(["fss", "--input", str(report_path), "--output", str(out)]) == EXIT_OK
    assert out.stat().st_size > 10_000
