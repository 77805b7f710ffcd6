"""Finite-size scaling: data collapse and critical power-law fits.

The collapse ansatz is O(eta, gtilde) = t^beta f(t eta^nu) with the
reduced coupling t = |1 - gtilde/gc|.  Collapse quality is scored against
a monotone (PCHIP) reference curve: for each size, the reference is built
through the pooled rescaled points of all *other* sizes, and the residual
is the mean squared vertical deviation normalized by the pooled variance.
The leave-one-size-out reference keeps the score honest (an interpolant
through all pooled points would be trivially exact).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy import stats


@dataclass(frozen=True)
class FssDataset:
    """(eta, gtilde, value) rows of one observable near its critical coupling."""

    observable: str  # "n0" or "gap"
    rows: list[tuple[float, float, float]]
    gc: float

    def __post_init__(self):
        if self.observable not in ("n0", "gap"):
            raise ValueError(f"observable must be 'n0' or 'gap', got {self.observable!r}")
        if self.gc <= 0:
            raise ValueError(f"gc must be > 0, got {self.gc}")
        for eta, _, val in self.rows:
            if eta <= 0:
                raise ValueError(f"eta values must be > 0, got {eta}")
            if val < 0:
                raise ValueError(f"observable values must be >= 0, got {val}")

    def sizes(self) -> list[float]:
        return sorted({eta for eta, _, _ in self.rows})


@dataclass(frozen=True)
class CollapseResult:
    beta: float
    nu: float
    residual: float
    scaled_curves: dict[float, tuple[np.ndarray, np.ndarray]]
    excluded_critical_points: int = 0


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    stderr: float
    r2: float


def _rescale(data: FssDataset, beta: float, nu: float):
    """Per-size rescaled curves (t eta^nu, O t^-beta), t = 0 rows dropped."""
    curves: dict[float, tuple[np.ndarray, np.ndarray]] = {}
    excluded = 0
    for eta in data.sizes():
        pts = [(gt, val) for e, gt, val in data.rows if e == eta]
        t = np.array([abs(1.0 - gt / data.gc) for gt, _ in pts])
        o = np.array([val for _, val in pts])
        keep = t > 0.0
        excluded += int(np.sum(~keep))
        t, o = t[keep], o[keep]
        x = t * eta ** nu
        y = o * t ** (-beta)
        order = np.argsort(x)
        curves[eta] = (x[order], y[order])
    return curves, excluded


def _pooled_reference(curves: dict, skip: float) -> PchipInterpolator | None:
    xs, ys = [], []
    for eta, (x, y) in curves.items():
        if eta == skip:
            continue
        xs.append(x)
        ys.append(y)
    if not xs:
        return None
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    order = np.argsort(x)
    x, y = x[order], y[order]
    # average duplicated abscissae; PCHIP needs strictly increasing x
    ux, inv = np.unique(x, return_inverse=True)
    uy = np.bincount(inv, weights=y) / np.bincount(inv)
    if ux.size < 2:
        return None
    return PchipInterpolator(ux, uy, extrapolate=False)


def collapse(data: FssDataset, beta: float, nu: float) -> CollapseResult:
    """Collapse quality of the dataset under the exponent pair (beta, nu)."""
    sizes = data.sizes()
    if len(sizes) < 3:
        raise ValueError(f"need >= 3 distinct sizes, got {len(sizes)}")
    curves, excluded = _rescale(data, beta, nu)

    pooled_y = np.concatenate([y for _, y in curves.values()])
    var = float(np.var(pooled_y))
    if var == 0.0:
        return CollapseResult(beta, nu, 0.0, curves, excluded)

    sq_sum = 0.0
    n_eval = 0
    for eta in sizes:
        ref = _pooled_reference(curves, skip=eta)
        if ref is None:
            continue
        x, y = curves[eta]
        pred = ref(x)
        ok = ~np.isnan(pred)  # points outside the others' range are skipped
        sq_sum += float(np.sum((y[ok] - pred[ok]) ** 2))
        n_eval += int(np.sum(ok))
    residual = sq_sum / n_eval / var if n_eval else math.inf
    return CollapseResult(beta, nu, residual, curves, excluded)


def fit_critical_powerlaw(points: list[tuple[float, float]]) -> PowerLawFit:
    """Exponent gamma of O_c ~ eta^-gamma from a log-log least-squares fit."""
    if len(points) < 3:
        raise ValueError(f"need >= 3 sizes for a power-law fit, got {len(points)}")
    etas = np.array([e for e, _ in points], dtype=float)
    vals = np.array([v for _, v in points], dtype=float)
    if np.any(vals <= 0):
        raise ValueError("all critical values must be > 0 for a log-log fit")
    if np.any(etas <= 0):
        raise ValueError("all sizes must be > 0")
    res = stats.linregress(np.log(etas), np.log(vals))
    return PowerLawFit(exponent=-res.slope, stderr=res.stderr,
                       r2=res.rvalue ** 2)


@dataclass(frozen=True)
class ExponentScan:
    best_beta: float
    best_nu: float
    best_residual: float
    beta_grid: np.ndarray
    nu_grid: np.ndarray
    residuals: np.ndarray = field(repr=False)  # shape (len(beta_grid), len(nu_grid))


def scan_exponents(data: FssDataset, beta_grid, nu_grid) -> ExponentScan:
    """Exhaustive residual scan; argmin with ties broken toward smaller nu."""
    betas = np.asarray(beta_grid, dtype=float)
    nus = np.asarray(nu_grid, dtype=float)
    if betas.size == 0 or nus.size == 0:
        raise ValueError("exponent grids must be non-empty")
    res = np.empty((betas.size, nus.size))
    for i, b in enumerate(betas):
        for j, n in enumerate(nus):
            res[i, j] = collapse(data, b, n).residual
    # scan in ascending (nu, beta) value order so ties resolve to smaller nu
    best = None
    for j in np.argsort(nus, kind="stable"):
        for i in np.argsort(betas, kind="stable"):
            if best is None or res[i, j] < res[best[0], best[1]]:
                best = (i, j)
    return ExponentScan(best_beta=float(betas[best[0]]), best_nu=float(nus[best[1]]),
                        best_residual=float(res[best[0], best[1]]),
                        beta_grid=betas, nu_grid=nus, residuals=res)
