"""Render phase diagrams, sweep panels and scaling collapses to image files.

Usage:
    rabi-critic-plots phase-diagram --input grid.csv --output fig1.png
    rabi-critic-plots sweep --input sweep.csv --output fig2.png [--derivative-order 2]
    rabi-critic-plots fss --input report.json --output fig4.png

Inputs are rabi-critic CLI outputs together with their .meta.json sidecars;
the frame/derivative conventions from the sidecar are printed on every
figure.  Identical inputs give byte-identical images.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .io import SchemaError, conventions_line, read_fss_report, read_sidecar, read_table  # noqa: E402

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

# Fig-1 colouring convention: p-type blue, x-type yellow, normal green
PHASE_COLORS = {0: "#58a868", 1: "#e8c84a", 2: "#4a7fc0"}
PHASE_NAMES = {0: "normal", 1: "x-type SRP", 2: "p-type SRP"}
ETA_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"]
SAVE_OPTS = dict(dpi=150, metadata={"Software": "rabi-critic-plots"})


@dataclass(frozen=True)
class FigureSpec:
    kind: str                       # phase_diagram | sweep | fss
    inputs: list[str]
    output: str
    axis_ranges: dict = field(default_factory=dict)
    derivative_order: int = 2


def _annotate_conventions(fig, meta: dict) -> None:
    fig.text(0.01, 0.005, conventions_line(meta), fontsize=5, color="0.35")


def _eta_groups(rows, columns):
    groups = {}
    for r in rows:
        groups.setdefault(float(r["eta"]), []).append(
            tuple(float(r[c]) if r[c] != "" else np.nan for c in columns))
    return {eta: np.array(sorted(vals)) for eta, vals in sorted(groups.items())}


def render_phase_diagram(spec: FigureSpec) -> None:
    path = Path(spec.inputs[0])
    meta = read_sidecar(path)
    rows = read_table(path, ["tau", "gtilde", "label"])
    taus = np.array([float(r["tau"]) for r in rows])
    gts = np.array([float(r["gtilde"]) for r in rows])
    labels = np.array([int(r["label"]) for r in rows])
    utau, ugt = np.unique(taus), np.unique(gts)
    if utau.size * ugt.size != len(rows):
        raise SchemaError(f"{path.name}: rows do not form a full tau x gtilde grid")
    grid = labels.reshape(utau.size, ugt.size)

    fig, ax = plt.subplots(figsize=(6.4, 4.6))
    cmap = matplotlib.colors.ListedColormap([PHASE_COLORS[i] for i in (0, 1, 2)])
    norm = matplotlib.colors.BoundaryNorm([-0.5, 0.5, 1.5, 2.5], cmap.N)
    ax.pcolormesh(utau, ugt, grid.T, cmap=cmap, norm=norm, shading="nearest",
                  rasterized=True)

    overlay_name = meta.get("config", {}).get("boundary_overlay")
    overlay_path = path.with_name(overlay_name) if overlay_name else Path(str(path) + ".boundaries.json")
    if overlay_path.exists():
        overlay = json.loads(overlay_path.read_text())
        for curve in overlay.get("curves", []):
            if not curve["tau"]:
                continue
            if curve["kind"] == "gc_1":
                # red solid: the kappa = kappa_c first-order line
                ax.plot(curve["tau"], curve["gtilde"], "r-", lw=1.8, label="first-order line")
            elif curve["kind"] == "triple":
                ax.plot(curve["tau"], curve["gtilde"], "k*", ms=12, label="triple point")
            else:
                ax.plot(curve["tau"], curve["gtilde"], "k-", lw=1.2)

    handles = [matplotlib.patches.Patch(color=PHASE_COLORS[i], label=PHASE_NAMES[i])
               for i in (0, 1, 2)]
    h2, l2 = ax.get_legend_handles_labels()
    ax.legend(handles=handles + h2, labels=[p.get_label() for p in handles] + l2,
              loc="upper right", fontsize=7)
    ax.set_xlabel(r"anisotropy $\tau$")
    ax.set_ylabel(r"rescaled coupling $\tilde g$")
    kappa = meta.get("config", {}).get("kappa")
    ax.set_title(rf"phase diagram, $\kappa = {kappa}$")
    _apply_ranges(ax, spec)
    _annotate_conventions(fig, meta)
    fig.tight_layout()
    fig.savefig(spec.output, **SAVE_OPTS)
    plt.close(fig)


def render_sweep(spec: FigureSpec) -> None:
    path = Path(spec.inputs[0])
    meta = read_sidecar(path)
    dcol = "d1_e0" if spec.derivative_order == 1 else "d2_e0"
    rows = read_table(path, ["eta", "gtilde", "x2_b", "p2_b", dcol])
    groups = _eta_groups(rows, ["gtilde", "x2_b", "p2_b", dcol])

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.2, 4.0))
    for i, (eta, arr) in enumerate(groups.items()):
        c = ETA_COLORS[i % len(ETA_COLORS)]
        ax1.plot(arr[:, 0], arr[:, 1], "-", color=c, lw=1.2,
                 label=rf"$\langle x^2\rangle_0$, $\eta$={eta:g}")
        ax1.plot(arr[:, 0], arr[:, 2], "--", color=c, lw=1.2,
                 label=rf"$\langle p^2\rangle_0$, $\eta$={eta:g}")
        sign = -1.0 if spec.derivative_order == 2 else 1.0
        ax2.plot(arr[:, 0], sign * arr[:, 3], "-", color=c, lw=1.2,
                 label=rf"$\eta$={eta:g}")
    ax1.set_xlabel(r"$\tilde g$")
    ax1.set_ylabel("quadrature squares (squeezed frame)")
    ax1.set_yscale("log")
    ax1.legend(fontsize=6)
    ax2.set_xlabel(r"$\tilde g$")
    ax2.set_ylabel(r"$-E_0''(g)$" if spec.derivative_order == 2 else r"$E_0'(g)$")
    ax2.legend(fontsize=7)
    cfg = meta.get("config", {})
    fig.suptitle(rf"$\tau = {cfg.get('tau')}$, $\kappa = {cfg.get('kappa')}$", fontsize=10)
    _apply_ranges(ax1, spec)
    _annotate_conventions(fig, meta)
    fig.tight_layout(rect=(0, 0.02, 1, 0.96))
    fig.savefig(spec.output, **SAVE_OPTS)
    plt.close(fig)


def render_fss(spec: FigureSpec) -> None:
    path = Path(spec.inputs[0])
    meta = read_sidecar(path)
    report = read_fss_report(path)
    obs_names = sorted(report["observables"])
    fig, axes = plt.subplots(1, len(obs_names), figsize=(4.8 * len(obs_names), 4.2))
    axes = np.atleast_1d(axes)
    for ax, obs in zip(axes, obs_names):
        entry = report["observables"][obs]
        curves = entry["scaled_curves"]
        if len(curves) < 3:
            raise SchemaError(f"{path.name}: fewer than 3 sizes for {obs!r}")
        for i, (eta, xy) in enumerate(sorted(curves.items(), key=lambda kv: float(kv[0]))):
            ax.plot(xy["x"], xy["y"], "o-", ms=3, lw=0.9,
                    color=ETA_COLORS[i % len(ETA_COLORS)], label=rf"$\eta$={float(eta):g}")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel(r"$t\,\eta^{\nu}$")
        ax.set_ylabel(rf"{obs} $\cdot\, t^{{-\beta}}$")
        ax.set_title(rf"$\beta$={entry['beta']:g}, $\nu$={entry['nu']:g}, "
                     rf"residual={entry['residual']:.2e}", fontsize=8)
        ax.legend(fontsize=7)
        if "critical_points" in entry:
            inset = ax.inset_axes([0.08, 0.08, 0.36, 0.34])
            pts = np.array(entry["critical_points"], dtype=float)
            inset.loglog(pts[:, 0], pts[:, 1], "ks", ms=3)
            gamma = entry["gamma_fit"]["exponent"]
            ref = pts[0, 1] * (pts[:, 0] / pts[0, 0]) ** (-gamma)
            inset.loglog(pts[:, 0], ref, "r-", lw=1.0)
            inset.set_title(rf"$\gamma$={gamma:.3f}", fontsize=7)
            inset.tick_params(labelsize=5)
    _annotate_conventions(fig, meta)
    fig.tight_layout(rect=(0, 0.02, 1, 1))
    fig.savefig(spec.output, **SAVE_OPTS)
    plt.close(fig)


def _apply_ranges(ax, spec: FigureSpec) -> None:
    if "x" in spec.axis_ranges:
        ax.set_xlim(*spec.axis_ranges["x"])
    if "y" in spec.axis_ranges:
        ax.set_ylim(*spec.axis_ranges["y"])


_RENDERERS = {
    "phase_diagram": render_phase_diagram,
    "sweep": render_sweep,
    "fss": render_fss,
}


def render(spec: FigureSpec) -> None:
    """Render one figure; raises SchemaError on malformed inputs."""
    if spec.kind not in _RENDERERS:
        raise ValueError(f"unknown figure kind {spec.kind!r}")
    if not spec.inputs:
        raise ValueError("at least one input file is required")
    _RENDERERS[spec.kind](spec)


def _range(spec: str) -> tuple[float, float]:
    lo, hi = spec.split(":")
    return float(lo), float(hi)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="rabi-critic-plots", description=__doc__)
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in ("phase-diagram", "sweep", "fss"):
        p = sub.add_parser(kind)
        p.add_argument("--input", required=True)
        p.add_argument("--output", required=True)
        p.add_argument("--xrange", type=_range, default=None)
        p.add_argument("--yrange", type=_range, default=None)
        if kind == "sweep":
            p.add_argument("--derivative-order", type=int, choices=[1, 2], default=2)
    args = parser.parse_args(argv)
    ranges = {}
    if args.xrange:
        ranges["x"] = args.xrange
    if args.yrange:
        ranges["y"] = args.yrange
    spec = FigureSpec(kind=args.kind.replace("-", "_"), inputs=[args.input],
                      output=args.output, axis_ranges=ranges,
                      derivative_order=getattr(args, "derivative_order", 2))
    try:
        render(spec)
    except SchemaError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_DATA
    except FileNotFoundError as exc:
        sys.stderr.write(f"missing file: {exc}\n")
        return EXIT_DATA
    print(f"wrote {spec.output}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
