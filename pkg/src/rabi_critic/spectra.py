"""Exact diagonalization with adaptive Fock truncation.

The Hamiltonian conserves parity, so each parity sector is diagonalized
separately; in the sector basis (one state per boson occupation n) the
matrix is pentadiagonal.  Sectors below ``dense_threshold`` go through
LAPACK; larger ones use a shift-invert Lanczos iteration (ARPACK) whose
shift is verified to sit strictly below the spectrum with a banded
Cholesky test, so the returned pair is guaranteed to be the two lowest
eigenvalues even across near-degeneracies at first-order transitions.

Truncation n_max is doubled until observables are stable and the
ground-state weight in the top 10% of Fock levels is negligible;
failure to converge below the ceiling is reported, never hidden.

Conventions recorded here once:
  * headline quadratures are the squeezed-frame ones, x2_b = gamma x2_a
    and p2_b = p2_a / gamma (the x/p-type distinction lives in that frame);
  * energy derivatives are taken with respect to the bare coupling g,
    dg = sqrt(omega delta) / 2 * dgtilde.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .bogoliubov import gamma_factor
from .criticality import Phase, classify
from .model import FockTruncation, ModelParams, build_hamiltonian, params_from_rescaled

DERIVATIVE_CONVENTION = "d/dg with dg = sqrt(omega*delta)/2 * dgtilde"
QUADRATURE_CONVENTION = "x2_b = gamma * x2_a, p2_b = p2_a / gamma (squeezed frame is headline)"


class EigensolverError(RuntimeError):
    """The iterative eigensolver failed to converge."""


class TransitionLocationError(ValueError):
    """No interior extremum found when locating a transition."""


@dataclass(frozen=True)
class SolverOptions:
    n_max_initial: int = 32
    n_max_ceiling: int = 16384
    rel_tol: float = 1e-6
    tail_tol: float = 1e-8
    dense_threshold: int = 4096
    n_eigen: int = 2

    def __post_init__(self):
        if self.rel_tol <= 0 or self.tail_tol <= 0:
            raise ValueError("tolerances must be > 0")
        if self.n_max_initial < 2:
            raise ValueError(f"n_max_initial must be >= 2, got {self.n_max_initial}")
        if self.n_max_initial > self.n_max_ceiling:
            raise ValueError("n_max_initial must be <= n_max_ceiling")
        if self.n_eigen < 2:
            raise ValueError("n_eigen must be >= 2 (gap needs two levels)")


@dataclass
class SpectrumResult:
    """Lowest eigenpair data and ground-state observables at one point.

    gap is the global E1 - E0.  Deep in a superradiant phase that is the
    exponentially small parity-doublet splitting; sector_gap (the excitation
    energy inside the ground parity sector) is what the broken-phase
    analytic gap formulas describe there.
    """

    e0: float
    e1: float
    gap: float
    x2_a: float
    p2_a: float
    x2_b: float
    p2_b: float
    n0: float
    ground_parity: int
    n_max_used: int
    converged: bool
    sector_gap: float = math.nan


# ---------------------------------------------------------------------------
# parity sectors
# ---------------------------------------------------------------------------

def sector_indices(n_max: int, sign: int) -> np.ndarray:
    """Full-basis indices of the parity sector, ordered by occupation n.

    Each occupation contributes exactly one state per sector: sign = +1
    holds (n even, down) and (n odd, up).
    """
    k = np.arange(n_max + 1)
    if sign == +1:
        s = k % 2
    else:
        s = 1 - (k % 2)
    return 2 * k + s


def _sector_bands(h: sp.csr_matrix, idx: np.ndarray) -> tuple[np.ndarray, ...]:
    """(diag, off1, off2) of the pentadiagonal sector matrix."""
    hs = h[idx][:, idx].tocsr()
    return hs.diagonal(0), hs.diagonal(1), hs.diagonal(2)


def _gershgorin_lower(diag: np.ndarray, off1: np.ndarray, off2: np.ndarray) -> float:
    r = np.zeros_like(diag)
    a1, a2 = np.abs(off1), np.abs(off2)
    r[:-1] += a1
    r[1:] += a1
    if off2.size:
        r[:-2] += a2
        r[2:] += a2
    return float(np.min(diag - r))


def _is_below_spectrum(sigma: float, diag, off1, off2) -> bool:
    """True iff sigma < lambda_min, via Cholesky of the shifted banded matrix."""
    m = diag.size
    ab = np.zeros((3, m))
    ab[0] = diag - sigma
    ab[1, :-1] = off1
    if off2.size:
        ab[2, :-2] = off2
    try:
        sla.cholesky_banded(ab, lower=True, check_finite=False)
        return True
    except sla.LinAlgError:
        return False


def _solve_sector(diag: np.ndarray, off1: np.ndarray, off2: np.ndarray,
                  k: int, opts: SolverOptions, scale: float,
                  sigma_hint: float | None) -> tuple[np.ndarray, np.ndarray]:
    """Lowest k eigenpairs of a pentadiagonal symmetric sector matrix."""
    m = diag.size
    if m < opts.dense_threshold or m < k + 2:
        dense = np.diag(diag)
        i = np.arange(m - 1)
        dense[i, i + 1] = dense[i + 1, i] = off1
        if off2.size:
            j = np.arange(m - 2)
            dense[j, j + 2] = dense[j + 2, j] = off2
        w, v = sla.eigh(dense, subset_by_index=[0, min(k, m) - 1], check_finite=False)
        return w, v
    return _shift_invert_lowest(diag, off1, off2, k, scale, sigma_hint)


def _shift_invert_lowest(diag, off1, off2, k: int, scale: float,
                         sigma_hint: float | None) -> tuple[np.ndarray, np.ndarray]:
    m = diag.size
    mat = sp.diags([off2, off1, diag, off1, off2], [-2, -1, 0, 1, 2], format="csc")
    v0 = np.full(m, 1.0 / math.sqrt(m))
    floor = _gershgorin_lower(diag, off1, off2) - max(1.0, abs(scale))

    if sigma_hint is None:
        # cheap bootstrap: loose k=1 solve from the rigorous Gershgorin shift
        try:
            w = spla.eigsh(mat, k=1, sigma=floor, which="LM", v0=v0, tol=1e-4,
                           maxiter=50 * m, return_eigenvectors=False)
            sigma_hint = float(w[0])
        except spla.ArpackError as exc:  # pragma: no cover - defensive
            raise EigensolverError(f"bootstrap solve failed: {exc}") from exc

    margin = max(1e-3 * abs(scale), 1e-9 * abs(sigma_hint))
    sigma = sigma_hint - margin
    # back off until provably below the whole spectrum
    while not _is_below_spectrum(sigma, diag, off1, off2):
        margin *= 8.0
        sigma = sigma_hint - margin
        if sigma < floor:
            sigma = floor
            break

    try:
        w, v = spla.eigsh(mat, k=k, sigma=sigma, which="LM", v0=v0, tol=0,
                          maxiter=100 * m)
    except spla.ArpackError as exc:
        raise EigensolverError(f"shift-invert solve failed at dim {m}: {exc}") from exc
    order = np.argsort(w)
    return w[order], v[:, order]


# ---------------------------------------------------------------------------
# observables
# ---------------------------------------------------------------------------

def _sector_observables(vec: np.ndarray) -> tuple[float, float, float]:
    """(<a^dag a>, <x^2>, tail-fraction threshold data) from a sector vector.

    Returns (navg, s2, w) where s2 = <a^2 + a^dag^2>/2 and w is the
    per-occupation weight array.
    """
    w = vec * vec
    n = np.arange(vec.size, dtype=float)
    navg = float(np.dot(n, w))
    s2 = 0.0
    if vec.size > 2:
        m = n[:-2]
        s2 = float(np.dot(np.sqrt((m + 1) * (m + 2)), vec[:-2] * vec[2:]))
    return navg, s2, w


@dataclass
class _RungResult:
    n_max: int
    e0: float
    e1: float
    sector_gap: float
    navg: float
    x2_a: float
    p2_a: float
    parity: int
    tail: float
    sector_e0: dict[int, float]


def _solve_rung(params: ModelParams, n_max: int, opts: SolverOptions,
                hints: dict[int, float] | None) -> _RungResult:
    h = build_hamiltonian(params, FockTruncation(n_max)).matrix
    merged: list[tuple[float, int, int]] = []
    vecs: dict[int, np.ndarray] = {}
    sector_e0: dict[int, float] = {}
    sector_w: dict[int, np.ndarray] = {}
    for sign in (+1, -1):
        bands = _sector_bands(h, sector_indices(n_max, sign))
        hint = hints.get(sign) if hints else None
        w, v = _solve_sector(*bands, k=opts.n_eigen, opts=opts,
                             scale=params.omega, sigma_hint=hint)
        vecs[sign] = v
        sector_w[sign] = w
        sector_e0[sign] = float(w[0])
        merged.extend((float(wi), sign, j) for j, wi in enumerate(w))
    merged.sort(key=lambda t: t[0])
    e0, g_sign, g_col = merged[0]
    e1 = merged[1][0]

    gv = vecs[g_sign][:, g_col]
    navg, s2, wts = _sector_observables(gv)
    x2_a = navg + 0.5 + s2
    p2_a = navg + 0.5 - s2
    cut = int(math.floor(0.9 * (n_max + 1)))
    tail = float(np.sum(wts[cut:]))
    return _RungResult(n_max=n_max, e0=e0, e1=e1,
                       sector_gap=float(sector_w[g_sign][1] - sector_w[g_sign][0]),
                       navg=navg, x2_a=x2_a, p2_a=p2_a, parity=g_sign,
                       tail=tail, sector_e0=sector_e0)


def _rel_close(a: float, b: float, tol: float, floor: float) -> bool:
    return abs(a - b) <= tol * max(abs(a), abs(b), floor)


def _rungs_agree(prev: _RungResult, cur: _RungResult, params: ModelParams,
                 tol: float) -> bool:
    w = params.omega
    return (_rel_close(prev.e0, cur.e0, tol, w)
            and _rel_close(prev.e1, cur.e1, tol, w)
            and _rel_close(prev.x2_a, cur.x2_a, tol, 1.0)
            and _rel_close(prev.p2_a, cur.p2_a, tol, 1.0)
            and _rel_close(prev.navg, cur.navg, tol, 1.0))


def initial_n_max(params: ModelParams, opts: SolverOptions) -> int:
    """Truncation start: eta- and coupling-aware inside superradiant regions.

    Photon number grows like eta in the superradiant phases, so starting at
    ~4 eta max(1, gtilde^2) skips useless small rungs; always capped at half
    the ceiling so at least one doubling comparison happens.
    """
    start = opts.n_max_initial
    label = classify(params.tau, params.kappa, params.gtilde)
    if label.phase is not Phase.NORMAL:
        gt2 = params.gtilde ** 2
        start = max(start, math.ceil(4.0 * params.eta * max(1.0, gt2)))
    return max(2, min(start, opts.n_max_ceiling // 2))


def ground_spectrum(params: ModelParams, opts: SolverOptions | None = None) -> SpectrumResult:
    """Two lowest levels and ground-state observables, truncation-converged.

    E0, E1 are the global lowest two, taken from the merged per-sector
    solves.  converged is False when the doubling or tail test still fails
    at the ceiling; the last result is returned either way.
    """
    opts = opts or SolverOptions()
    n = initial_n_max(params, opts)
    prev = _solve_rung(params, n, opts, None)
    cur = prev
    converged = False
    while 2 * n <= opts.n_max_ceiling:
        n *= 2
        cur = _solve_rung(params, n, opts, prev.sector_e0)
        if _rungs_agree(prev, cur, params, opts.rel_tol) and cur.tail <= opts.tail_tol:
            converged = True
            break
        prev = cur

    gamma = gamma_factor(params.kappa, params.gtilde)
    return SpectrumResult(
        e0=cur.e0,
        e1=cur.e1,
        gap=cur.e1 - cur.e0,
        x2_a=cur.x2_a,
        p2_a=cur.p2_a,
        x2_b=gamma * cur.x2_a,
        p2_b=cur.p2_a / gamma,
        n0=cur.navg / params.eta,
        ground_parity=cur.parity,
        n_max_used=cur.n_max,
        converged=converged,
        sector_gap=cur.sector_gap,
    )


# ---------------------------------------------------------------------------
# sweeps and derivatives
# ---------------------------------------------------------------------------

def _sweep_point(args) -> SpectrumResult:
    tau, kappa, eta, omega, gt, opts = args
    return ground_spectrum(params_from_rescaled(gt, tau, kappa, eta, omega), opts)


def sweep_coupling(tau: float, kappa: float, eta: float, omega: float,
                   gtilde_list, opts: SolverOptions | None = None,
                   jobs: int = 1) -> list[tuple[float, SpectrumResult]]:
    """Ground-state data along a strictly increasing gtilde grid.

    Points are independent; with jobs > 1 they are distributed over a
    process pool and reassembled in grid order, so the output does not
    depend on the worker count.
    """
    gts = [float(g) for g in gtilde_list]
    if any(b <= a for a, b in zip(gts, gts[1:])):
        raise ValueError("gtilde_list must be strictly increasing")
    opts = opts or SolverOptions()
    work = [(tau, kappa, eta, omega, gt, opts) for gt in gts]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point, work))
    else:
        results = [_sweep_point(w) for w in work]
    return list(zip(gts, results))


@dataclass(frozen=True)
class DerivativePoint:
    gtilde: float
    value: float
    one_sided: bool


def _uniform_step(gts: np.ndarray) -> float:
    steps = np.diff(gts)
    h = float(np.mean(steps))
    if np.any(np.abs(steps - h) > 1e-9 * max(abs(h), 1e-300)):
        raise ValueError("gtilde grid must be uniform for finite differences")
    return h


def energy_derivative(sweep: list[tuple[float, SpectrumResult]], order: int,
                      omega: float = 1.0, delta: float = 1.0) -> list[DerivativePoint]:
    """Finite-difference dE0/dg or d2E0/dg2 along a uniform gtilde grid.

    Derivatives are with respect to the bare coupling g; the gtilde grid is
    converted with dg = sqrt(omega delta)/2 * dgtilde.  Interior points use
    central differences; endpoints use 3-point one-sided stencils (exact on
    quadratics) and are flagged.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    if len(sweep) < 3:
        raise ValueError("need at least 3 points for endpoint-safe differences")
    gts = np.array([g for g, _ in sweep], dtype=float)
    e = np.array([r.e0 for _, r in sweep], dtype=float)
    h_g = 0.5 * math.sqrt(omega * delta) * _uniform_step(gts)
    return _derivative_core(gts, e, h_g, order)


def _derivative_core(gts, e, h, order) -> list[DerivativePoint]:
    n = e.size
    out = []
    for i in range(n):
        one_sided = i == 0 or i == n - 1
        if order == 1:
            if i == 0:
                val = (-3 * e[0] + 4 * e[1] - e[2]) / (2 * h)
            elif i == n - 1:
                val = (3 * e[-1] - 4 * e[-2] + e[-3]) / (2 * h)
            else:
                val = (e[i + 1] - e[i - 1]) / (2 * h)
        else:
            if i == 0:
                val = (e[0] - 2 * e[1] + e[2]) / (h * h)
            elif i == n - 1:
                val = (e[-1] - 2 * e[-2] + e[-3]) / (h * h)
            else:
                val = (e[i + 1] - 2 * e[i] + e[i - 1]) / (h * h)
        out.append(DerivativePoint(float(gts[i]), float(val), one_sided))
    return out


def locate_transition(sweep: list[tuple[float, SpectrumResult]],
                      kind: str) -> float:
    """Transition coupling from a sweep that brackets exactly one candidate.

    second_order: parabolic-refined argmax of |E0''|;
    first_order: midpoint of the adjacent pair with the largest |dE0'|.
    A peak sitting on the grid edge raises TransitionLocationError.
    """
    if kind not in ("second_order", "first_order"):
        raise ValueError(f"unknown transition kind {kind!r}")
    # extremum locations are invariant under the constant dg/dgtilde factor,
    # so the gtilde-grid derivatives suffice here
    pts = energy_derivative(sweep, order=2 if kind == "second_order" else 1)
    interior = [p for p in pts if not p.one_sided]
    if len(interior) < 3:
        raise TransitionLocationError("sweep too short to bracket a transition")
    g = np.array([p.gtilde for p in interior])
    v = np.array([p.value for p in interior])

    if kind == "second_order":
        y = np.abs(v)
        i = int(np.argmax(y))
        if i == 0 or i == y.size - 1:
            raise TransitionLocationError("second-order peak at grid edge")
        denom = y[i - 1] - 2 * y[i] + y[i + 1]
        h = g[1] - g[0]
        if denom == 0:
            return float(g[i])
        return float(g[i] + 0.5 * h * (y[i - 1] - y[i + 1]) / denom)

    jumps = np.abs(np.diff(v))
    j = int(np.argmax(jumps))
    if j == 0 or j == jumps.size - 1:
        raise TransitionLocationError("first-order jump at grid edge")
    return float(0.5 * (g[j] + g[j + 1]))
