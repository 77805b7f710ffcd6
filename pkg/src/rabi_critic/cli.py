"""Command-line front end.

Subcommands: boundaries, phase-diagram, sweep, fss, gap-check, verify.
Every output file is written atomically (tmp + rename) with a JSON
metadata sidecar at <output>.meta.json recording the full configuration,
the quadrature-frame and derivative conventions, and the tool version.
Floats are printed with 17 significant digits so CSV round-trips exactly,
and identical configurations produce byte-identical files regardless of
the worker count.

Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .criticality import (classify, gc_first_order, gc_p, gc_triple, gc_x,
                          phase_diagram_grid, boundary_curves)
from .effective import analytic_gap
from .model import params_from_rescaled
from .scaling import FssDataset, collapse, fit_critical_powerlaw
from .spectra import (DERIVATIVE_CONVENTION, QUADRATURE_CONVENTION,
                      SolverOptions, energy_derivative, ground_spectrum,
                      sweep_coupling)
from . import verify as verify_mod

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2

SWEEP_COLUMNS = ["eta", "gtilde", "e0", "e1", "gap", "x2_a", "p2_a", "x2_b",
                 "p2_b", "n0", "ground_parity", "n_max_used", "converged",
                 "d1_e0", "d2_e0"]

PRESETS: dict[str, dict] = {
    "fig1a": {"command": "phase-diagram", "kappa": 0.0, "tau_range": (-3.0, 3.0),
              "gtilde_range": (0.0, 3.0), "resolution": (240, 150)},
    "fig1b": {"command": "phase-diagram", "kappa": 1.0, "tau_range": (-3.0, 3.0),
              "gtilde_range": (0.0, 3.0), "resolution": (240, 150)},
    "fig1c": {"command": "phase-diagram", "kappa": 3.0, "tau_range": (-2.0, 6.0),
              "gtilde_range": (0.0, 3.0), "resolution": (240, 150)},
    "fig2": {"command": "sweep", "tau": 2.0, "kappa": 3.0,
             "eta": [64.0, 256.0, 1024.0], "gtilde_range": (1.5, 2.5, 0.05)},
    "fig3": {"command": "sweep", "tau": 3.0, "kappa": 1.0,
             "eta": [64.0, 256.0, 1024.0], "gtilde_range": (1.55, 1.9, 0.01)},
    "fig4": {"command": "fss", "tau": 2.0, "kappa": 3.0,
             "eta": [64.0, 256.0, 1024.0]},
}


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # let range specs like -2:6:0.5 pass as values, not option strings
        self._negative_number_matcher = re.compile(r"^-\d+[\d.:,]*$")

    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _write_table(path: Path, header: list[str], rows: list[list], fmt: str) -> None:
    if fmt == "csv":
        lines = [",".join(header)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        _atomic_write(path, "\n".join(lines) + "\n")
    else:
        records = [dict(zip(header, row)) for row in rows]
        _atomic_write(path, json.dumps(records, indent=1) + "\n")


def _write_sidecar(path: Path, command: str, config: dict) -> None:
    meta = {
        "tool": "rabi-critic",
        "version": __version__,
        "command": command,
        "config": config,
        "conventions": {
            "quadrature_frame": QUADRATURE_CONVENTION,
            "derivative": DERIVATIVE_CONVENTION,
            "csv_float_format": "%.17g",
            "phase_labels": {"0": "normal", "1": "x_srp", "2": "p_srp"},
        },
    }
    _atomic_write(Path(str(path) + ".meta.json"), json.dumps(meta, indent=1, sort_keys=True) + "\n")


def _parse_range(spec: str, want_step: bool) -> tuple:
    parts = spec.split(":")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise SystemExit(EXIT_USAGE)
    if want_step and len(vals) == 3:
        return tuple(vals)
    if not want_step and len(vals) == 2:
        return tuple(vals)
    sys.stderr.write(f"bad range spec {spec!r}; expected lo:hi{':step' if want_step else ''}\n")
    raise SystemExit(EXIT_USAGE)


def _grid_from_range(lo: float, hi: float, step: float) -> list[float]:
    if step <= 0 or hi <= lo:
        sys.stderr.write(f"bad range {lo}:{hi}:{step}\n")
        raise SystemExit(EXIT_USAGE)
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + k * step for k in range(count)]


def _float_list(spec: str) -> list[float]:
    return [float(p) for p in spec.split(",") if p]


def _solver_options(args) -> SolverOptions:
    kwargs = {}
    if args.n_max_ceiling is not None:
        kwargs["n_max_ceiling"] = args.n_max_ceiling
    if args.rel_tol is not None:
        kwargs["rel_tol"] = args.rel_tol
    return SolverOptions(**kwargs)


def _apply_preset(args, command: str) -> None:
    if not args.preset:
        return
    preset = PRESETS.get(args.preset)
    if preset is None:
        sys.stderr.write(f"unknown preset {args.preset!r}\n")
        raise SystemExit(EXIT_USAGE)
    if preset["command"] != command:
        sys.stderr.write(f"preset {args.preset!r} belongs to subcommand {preset['command']!r}\n")
        raise SystemExit(EXIT_USAGE)
    for key, value in preset.items():
        if key == "command":
            continue
        if getattr(args, key, None) in (None, []):
            setattr(args, key, value)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_boundaries(args) -> int:
    taus = np.array(_grid_from_range(*args.tau_range))
    rows = []
    for curve in boundary_curves(args.kappa, taus):
        for tau, gt in curve.samples:
            rows.append([curve.kind, tau, gt, curve.domain])
    path = Path(args.output)
    _write_table(path, ["kind", "tau", "gtilde", "domain"], rows, args.format)
    _write_sidecar(path, "boundaries", {"kappa": args.kappa, "tau_range": args.tau_range,
                                        "format": args.format})
    print(f"wrote {len(rows)} boundary samples to {path}")
    return EXIT_OK


def cmd_phase_diagram(args) -> int:
    n_tau, n_gt = args.resolution
    diagram = phase_diagram_grid(args.kappa, tuple(args.tau_range[:2]),
                                 tuple(args.gtilde_range[:2]), (n_tau, n_gt))
    rows = [[tau, gt, int(diagram.labels[i, j])]
            for i, tau in enumerate(diagram.taus)
            for j, gt in enumerate(diagram.gtildes)]
    path = Path(args.output)
    _write_table(path, ["tau", "gtilde", "label"], rows, args.format)
    overlay = {
        "kappa": args.kappa,
        "curves": [{"kind": c.kind, "domain": c.domain,
                    "tau": [s[0] for s in c.samples],
                    "gtilde": [s[1] for s in c.samples]}
                   for c in diagram.boundaries],
    }
    overlay_path = Path(str(path) + ".boundaries.json")
    _atomic_write(overlay_path, json.dumps(overlay, indent=1) + "\n")
    config = {"kappa": args.kappa, "tau_range": args.tau_range,
              "gtilde_range": args.gtilde_range, "resolution": list(args.resolution),
              "format": args.format, "boundary_overlay": overlay_path.name}
    _write_sidecar(path, "phase-diagram", config)
    print(f"wrote {len(rows)} grid points to {path} (+ boundary overlay)")
    return EXIT_OK


def _gtilde_grid(args) -> list[float]:
    if args.gtilde and args.gtilde_range:
        sys.stderr.write("give either --gtilde or --gtilde-range, not both\n")
        raise SystemExit(EXIT_USAGE)
    if args.gtilde:
        return sorted(args.gtilde)
    if args.gtilde_range:
        return _grid_from_range(*args.gtilde_range)
    sys.stderr.write("one of --gtilde / --gtilde-range is required\n")
    raise SystemExit(EXIT_USAGE)


def cmd_sweep(args) -> int:
    gts = _gtilde_grid(args)
    opts = _solver_options(args)
    rows = []
    unconverged = 0
    total = 0
    for eta in args.eta:
        sweep = sweep_coupling(args.tau, args.kappa, eta, args.omega, gts,
                               opts=opts, jobs=args.jobs)
        if len(sweep) >= 3:
            delta = eta * args.omega
            d1 = energy_derivative(sweep, 1, args.omega, delta)
            d2 = energy_derivative(sweep, 2, args.omega, delta)
        else:
            d1 = d2 = [None] * len(sweep)
        for (gt, res), p1, p2 in zip(sweep, d1, d2):
            total += 1
            if not res.converged:
                unconverged += 1
            rows.append([
                eta, gt, res.e0, res.e1, res.gap, res.x2_a, res.p2_a,
                res.x2_b, res.p2_b, res.n0, res.ground_parity, res.n_max_used,
                res.converged,
                None if (p1 is None or p1.one_sided) else p1.value,
                None if (p2 is None or p2.one_sided) else p2.value,
            ])
    path = Path(args.output)
    _write_table(path, SWEEP_COLUMNS, rows, args.format)
    config = {"tau": args.tau, "kappa": args.kappa, "eta": args.eta,
              "omega": args.omega, "gtilde": gts, "jobs": args.jobs,
              "format": args.format, "n_max_ceiling": opts.n_max_ceiling,
              "rel_tol": opts.rel_tol}
    _write_sidecar(path, "sweep", config)
    if unconverged:
        print(f"warning: {unconverged}/{total} points unconverged", file=sys.stderr)
    print(f"wrote {total} sweep points to {path}")
    if total and unconverged / total > 0.2:
        sys.stderr.write("systemic failure: more than 20% of points unconverged\n")
        return EXIT_NUMERICAL
    return EXIT_OK


def _analytic_gc(tau: float, kappa: float) -> float:
    for cc in (gc_triple(tau, kappa), gc_p(tau, kappa), gc_x(tau, kappa)):
        if cc.valid:
            return cc.value
    raise SystemExit(EXIT_USAGE)


def _fss_from_sweep_csv(path: str) -> dict[str, list[tuple[float, float, float]]]:
    import csv as _csv

    rows = {"n0": [], "gap": []}
    with open(path, newline="") as fh:
        reader = _csv.DictReader(fh)
        for rec in reader:
            for obs in ("n0", "gap"):
                rows[obs].append((float(rec["eta"]), float(rec["gtilde"]),
                                  float(rec[obs])))
    return rows


def cmd_fss(args) -> int:
    if len(args.eta) < 3 and not args.input:
        sys.stderr.write("fss needs at least 3 eta values\n")
        raise SystemExit(EXIT_USAGE)
    gc = args.gc if args.gc is not None else _analytic_gc(args.tau, args.kappa)
    at_triple = gc_triple(args.tau, args.kappa).valid
    pairs = {  # (beta, nu) per observable; alternate pair kept as diagnostic
        "n0": ((1.0, 1.0) if at_triple else (1.0, 2.0 / 3.0)),
        "gap": ((1.0, 1.0) if at_triple else (0.5, 2.0 / 3.0)),
    }
    alt = {"n0": (1.0, 1.0) if not at_triple else (1.0, 2.0 / 3.0),
           "gap": (1.0, 1.0) if not at_triple else (0.5, 2.0 / 3.0)}

    ts = np.geomspace(args.t_min, args.t_max, args.points)
    opts = _solver_options(args)

    if args.input:
        raw = _fss_from_sweep_csv(args.input)
        source = {}
        critical_points = {}
        for obs, rows in raw.items():
            # rows at gc exactly feed the power-law fit, the rest the collapse
            at_gc = [(e, v) for e, gt, v in rows if abs(gt - gc) <= 1e-12 * gc]
            source[obs] = [(e, gt, v) for e, gt, v in rows
                           if abs(gt - gc) > 1e-12 * gc]
            critical_points[obs] = sorted(at_gc)
    else:
        source = {"n0": [], "gap": []}
        critical_points = {"n0": [], "gap": []}
        for eta in args.eta:
            # n0 on the superradiant side, gap on the normal side; the gap of
            # the ordered phase crosses over to the parity-doublet splitting,
            # which is not the scaling observable
            gts_srp = sorted(gc * (1.0 + t) for t in ts)
            gts_norm = sorted(gc * (1.0 - t) for t in ts)
            for obs, grid in (("n0", gts_srp), ("gap", gts_norm)):
                sweep = sweep_coupling(args.tau, args.kappa, eta, args.omega,
                                       grid, opts=opts, jobs=args.jobs)
                for gt, res in sweep:
                    source[obs].append((eta, gt, getattr(res, obs)))
            crit = ground_spectrum(params_from_rescaled(gc, args.tau, args.kappa,
                                                        eta, args.omega), opts)
            critical_points["n0"].append((eta, crit.n0))
            critical_points["gap"].append((eta, crit.gap))

    report: dict = {"gc": gc, "tau": args.tau, "kappa": args.kappa,
                    "at_triple_point": bool(at_triple), "observables": {}}
    for obs in ("n0", "gap"):
        data = FssDataset(obs, source[obs], gc=gc)
        beta, nu = pairs[obs]
        col = collapse(data, beta, nu)
        col_alt = collapse(data, *alt[obs])
        entry = {
            "beta": beta, "nu": nu, "residual": col.residual,
            "residual_alt": col_alt.residual,
            "alt_pair": list(alt[obs]),
            "excluded_critical_points": col.excluded_critical_points,
            "scaled_curves": {str(e): {"x": list(map(float, x)), "y": list(map(float, y))}
                              for e, (x, y) in col.scaled_curves.items()},
        }
        if critical_points[obs]:
            fit = fit_critical_powerlaw(critical_points[obs])
            entry["critical_points"] = [[e, v] for e, v in critical_points[obs]]
            entry["gamma_fit"] = {"exponent": fit.exponent, "stderr": fit.stderr,
                                  "r2": fit.r2}
        report["observables"][obs] = entry

    path = Path(args.output)
    _atomic_write(path, json.dumps(report, indent=1, sort_keys=True) + "\n")
    config = {"tau": args.tau, "kappa": args.kappa, "eta": args.eta,
              "omega": args.omega, "gc": gc, "t_min": args.t_min,
              "t_max": args.t_max, "points": args.points, "jobs": args.jobs,
              "input": args.input}
    _write_sidecar(path, "fss", config)
    print(f"wrote finite-size-scaling report to {path}")
    return EXIT_OK


def cmd_gap_check(args) -> int:
    gts = _gtilde_grid(args)
    opts = _solver_options(args)
    rows = []
    for gt in gts:
        for eta in sorted(args.eta):
            label = classify(args.tau, args.kappa, gt)
            on_boundary = (not math.isnan(label.boundary_proximity)
                           and abs(label.boundary_proximity) < 1e-9)
            if on_boundary:
                rows.append([args.tau, args.kappa, eta, gt, "boundary",
                             None, None, None, True])
                continue
            eps, regime = analytic_gap(args.tau, args.kappa, gt, args.omega)
            res = ground_spectrum(params_from_rescaled(gt, args.tau, args.kappa,
                                                       eta, args.omega), opts)
            # the broken-phase formulas give the excitation inside one
            # parity sector; the global E1 - E0 there is the doublet splitting
            numeric = res.gap if regime == "normal" else res.sector_gap
            dev = abs(numeric - eps) / eps if eps > 0 else math.inf
            rows.append([args.tau, args.kappa, eta, gt, regime, eps, numeric,
                         dev, False])
    path = Path(args.output)
    _write_table(path, ["tau", "kappa", "eta", "gtilde", "regime",
                        "analytic_gap", "numeric_gap", "rel_deviation",
                        "on_boundary"], rows, args.format)
    _write_sidecar(path, "gap-check", {"tau": args.tau, "kappa": args.kappa,
                                       "eta": args.eta, "gtilde": gts,
                                       "omega": args.omega})
    print(f"wrote {len(rows)} gap comparisons to {path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = verify_mod.run_all(inject_fault=args.inject_fault)
    failed = 0
    for name, passed, detail in checks:
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
        failed += 0 if passed else 1
    print(f"{len(checks) - failed}/{len(checks)} invariant checks passed")
    return EXIT_OK if failed == 0 else EXIT_NUMERICAL


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _add_common(p: _Parser, needs_output=True) -> None:
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--jobs", type=int,
                   default=int(os.environ.get("RABI_CRITIC_JOBS", "1")))
    p.add_argument("--n-max-ceiling", type=int, default=None)
    p.add_argument("--rel-tol", type=float, default=None)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--preset", default=None)
    if needs_output:
        p.add_argument("--output", required=True)


def build_parser() -> _Parser:
    parser = _Parser(prog="rabi-critic",
                     description="Anisotropic Rabi model with an A^2 term: "
                                 "boundaries, spectra, scaling")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("boundaries", help="sample analytic phase boundaries")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--tau-range", type=lambda s: _parse_range(s, True),
                   default=(-3.0, 3.0, 0.05))
    _add_common(p)
    p.set_defaults(func=cmd_boundaries)

    p = sub.add_parser("phase-diagram", help="labelled (tau, gtilde) grid")
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--tau-range", type=lambda s: _parse_range(s, False), default=None)
    p.add_argument("--gtilde-range", type=lambda s: _parse_range(s, False), default=None)
    p.add_argument("--resolution", type=_parse_resolution, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_phase_diagram)

    p = sub.add_parser("sweep", help="ground-state observables along gtilde")
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--eta", type=_float_list, default=None)
    p.add_argument("--gtilde", type=_float_list, default=None)
    p.add_argument("--gtilde-range", type=lambda s: _parse_range(s, True), default=None)
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fss", help="finite-size scaling report")
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--eta", type=_float_list, default=None)
    p.add_argument("--gc", type=float, default=None)
    p.add_argument("--t-min", type=float, default=1e-3)
    p.add_argument("--t-max", type=float, default=1e-1)
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--input", default=None,
                   help="existing sweep CSV; skips diagonalization")
    _add_common(p)
    p.set_defaults(func=cmd_fss)

    p = sub.add_parser("gap-check", help="analytic vs numeric gaps")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--eta", type=_float_list, required=True)
    p.add_argument("--gtilde", type=_float_list, default=None)
    p.add_argument("--gtilde-range", type=lambda s: _parse_range(s, True), default=None)
    _add_common(p)
    p.set_defaults(func=cmd_gap_check)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--inject-fault", default=None, choices=["hermiticity"],
                   help=argparse.SUPPRESS)  # test hook
    p.set_defaults(func=cmd_verify)
    return parser


def _parse_resolution(spec: str) -> tuple[int, int]:
    try:
        a, b = spec.lower().split("x")
        return int(a), int(b)
    except ValueError:
        sys.stderr.write(f"bad resolution {spec!r}; expected NxM\n")
        raise SystemExit(EXIT_USAGE)


_REQUIRED_BY_COMMAND = {
    "phase-diagram": ("kappa", "tau_range", "gtilde_range", "resolution"),
    "sweep": ("tau", "kappa", "eta"),
    "fss": ("tau", "kappa", "eta"),
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "preset", None):
            _apply_preset(args, args.command)
        for field in _REQUIRED_BY_COMMAND.get(args.command, ()):
            if getattr(args, field, None) in (None, []):
                sys.stderr.write(f"--{field.replace('_', '-')} is required "
                                 f"(directly or via --preset)\n")
                return EXIT_USAGE
        if getattr(args, "jobs", 1) < 1:
            sys.stderr.write("--jobs must be >= 1\n")
            return EXIT_USAGE
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
