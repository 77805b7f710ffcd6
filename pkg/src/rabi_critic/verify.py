"""Small-scale invariant suite behind the ``verify`` subcommand.

Each check returns (name, passed, detail); the CLI prints one line per
check and exits nonzero if any fails.  Scales are kept small (eta <= 16,
n_max <= 512) so the whole suite runs in seconds.
"""

from __future__ import annotations

import math

import numpy as np

from . import bogoliubov, criticality, effective, scaling
from .model import FockTruncation, ModelParams, build_hamiltonian, params_from_rescaled, parity_operator
from .spectra import SolverOptions, ground_spectrum

Check = tuple[str, bool, str]


def _check(name: str, passed: bool, detail: str) -> Check:
    return name, bool(passed), detail


def _random_params(rng: np.random.Generator) -> ModelParams:
    return params_from_rescaled(
        gtilde=rng.uniform(0.0, 3.0),
        tau=rng.uniform(-2.0, 4.0),
        kappa=rng.uniform(0.0, 4.0),
        eta=rng.uniform(1.0, 16.0),
        omega=1.0,
    )


def check_hermiticity(inject_fault: str | None = None) -> Check:
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(5):
        h = build_hamiltonian(_random_params(rng), FockTruncation(64))
        mat = h.matrix
        if inject_fault == "hermiticity":
            mat = mat.tolil()
            mat[0, 3] += 0.5  # test hook: break one off-diagonal element
            mat = mat.tocsr()
            h = type(h)(dim=h.dim, matrix=mat)
        worst = max(worst, h.hermiticity_defect())
    return _check("model.hermiticity", worst < 1e-12, f"max defect {worst:.3e}")


def check_parity_commutation() -> Check:
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(5):
        params = _random_params(rng)
        h = build_hamiltonian(params, FockTruncation(40))
        p = parity_operator(FockTruncation(40))
        comm = h.matrix @ p.matrix - p.matrix @ h.matrix
        denom = h.max_norm()
        worst = max(worst, abs(comm).max() / denom if denom else 0.0)
    return _check("model.parity_commutation", worst < 1e-10, f"max |[H,P]|/|H| {worst:.3e}")


def check_matrix_real() -> Check:
    h = build_hamiltonian(params_from_rescaled(1.5, 2.0, 3.0, 8.0), FockTruncation(32))
    ok = np.isrealobj(h.matrix.data)
    return _check("model.real_matrix", ok, f"dtype {h.matrix.dtype}")


def check_truncation_monotonic() -> Check:
    params = params_from_rescaled(2.2, 2.0, 3.0, 8.0)
    e_prev = math.inf
    ok = True
    for n_max in (16, 32, 64, 128):
        h = build_hamiltonian(params, FockTruncation(n_max)).toarray()
        e0 = float(np.linalg.eigvalsh(h)[0])
        ok = ok and e0 <= e_prev + 1e-12
        e_prev = e0
    return _check("model.truncation_monotonic", ok, "E0 non-increasing under doubling")


def check_bogoliubov_identities() -> Check:
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(50):
        params = _random_params(rng)
        fr = bogoliubov.bogoliubov_frame(params)
        gt = params.gtilde
        errs = [
            abs(fr.mu ** 2 - fr.nu ** 2 - 1.0),
            abs(params.d_strength * (fr.mu - fr.nu) ** 2 - params.omega * fr.mu * fr.nu) / params.omega,
            abs(fr.gamma - math.sqrt(1.0 + params.kappa * gt * gt)),
            abs(fr.g_rot + fr.g_crot - params.g * (1.0 + params.tau) * (fr.mu - fr.nu)),
            abs(fr.g_rot - fr.g_crot - params.g * (1.0 - params.tau) * (fr.mu + fr.nu)),
        ]
        worst = max(worst, max(errs) / max(1.0, params.g))
    return _check("bogoliubov.identities", worst < 1e-12, f"max error {worst:.3e}")


def check_bogoliubov_small_kappa_limit() -> Check:
    ok = True
    for kappa in (1e-10, 1e-8, 1e-6, 1e-3):
        fr = bogoliubov.bogoliubov_frame(params_from_rescaled(1.0, 2.0, kappa, 8.0))
        k2 = kappa  # kappa gtilde^2 with gtilde = 1
        # leading order: zeta = k2/4 (1 - k2/2 + ...), gamma - 1 = k2/(1 + gamma)
        ok = ok and abs(4.0 * fr.zeta / k2 - 1.0) <= max(k2, 1e-12)
        ok = ok and 0.0 <= fr.gamma - 1.0 <= k2
    return _check("bogoliubov.small_kappa_limit", ok,
                  "zeta -> kappa gtilde^2 / 4 smoothly down to kappa = 1e-10")


def check_bogoliubov_spectrum_invariance() -> Check:
    params = params_from_rescaled(1.0, 2.0, 3.0, 8.0)
    dev = math.inf
    for n_max in (128, 256):
        a = build_hamiltonian(params, FockTruncation(n_max)).toarray()
        b = bogoliubov.transformed_hamiltonian(params, FockTruncation(n_max)).toarray()
        wa = np.linalg.eigvalsh(a)[:5]
        wb = np.linalg.eigvalsh(b)[:5]
        dev = float(np.max(np.abs(wa - wb)))
    return _check("bogoliubov.spectrum_invariance", dev < 1e-6, f"lowest-5 deviation {dev:.3e}")


def check_boundary_coalescence() -> Check:
    worst = 0.0
    eps = 1e-13
    for tau in (1.5, 2.0, 3.0, 5.0):
        vals = [criticality.gc_p(tau - eps, tau).value,
                criticality.gc_x(tau + eps, tau).value,
                criticality.gc_first_order(tau + eps, tau).value,
                criticality.gc_triple(tau, tau).value]
        worst = max(worst, max(vals) - min(vals))
    return _check("criticality.boundary_coalescence", worst < 1e-11,
                  f"all four formulas agree at tau = kappa > 1; spread {worst:.3e}")


def check_kappa_c_selfconsistency() -> Check:
    worst = 0.0
    for tau, kappa in ((3.0, 1.0), (4.0, 3.0), (2.5, 0.5), (8.0, 2.0)):
        g1 = criticality.gc_first_order(tau, kappa).value
        worst = max(worst, abs(criticality.kappa_c(tau, g1) - kappa) / kappa)
    return _check("criticality.kappa_c_selfconsistency", worst < 1e-12,
                  f"kappa_c(gc_1) = kappa; rel err {worst:.3e}")


def check_mirror_symmetry() -> Check:
    taus = np.linspace(-3.0, 3.0, 40)  # even count: avoids tau = 0 exactly
    gts = np.linspace(0.05, 3.0, 30)
    ok = True
    swap = {criticality.Phase.XSRP: criticality.Phase.PSRP,
            criticality.Phase.PSRP: criticality.Phase.XSRP,
            criticality.Phase.NORMAL: criticality.Phase.NORMAL}
    for tau in taus:
        for gt in gts:
            a = criticality.classify(tau, 0.0, gt).phase
            b = criticality.classify(-tau, 0.0, gt).phase
            ok = ok and (swap[a] == b)
    return _check("criticality.kappa0_mirror", ok, "(tau, X) <-> (-tau, P) at kappa = 0")


def check_route_agreement() -> Check:
    rng = np.random.default_rng(5)
    ok = True
    for _ in range(400):
        tau = rng.uniform(-2.0, 5.0)
        kappa = rng.uniform(0.0, 4.0)
        gt = rng.uniform(0.01, 3.0)
        lab = criticality.classify(tau, kappa, gt)
        if abs(lab.boundary_proximity) < 1e-9 or math.isnan(lab.boundary_proximity):
            continue
        ok = ok and lab.phase == _threshold_route(tau, kappa, gt)
    return _check("criticality.route_agreement", ok,
                  "coefficient signs vs critical-coupling thresholds")


def _threshold_route(tau: float, kappa: float, gt: float) -> criticality.Phase:
    """Classification by bare critical-coupling thresholds (independent route)."""
    kc = criticality.kappa_c(tau, gt)
    if tau != 1.0 and gt > 2.0 / abs(1.0 - tau) and kappa > kc:
        return criticality.Phase.PSRP
    disc = (1.0 + tau) ** 2 - 4.0 * kappa
    if disc > 0.0 and gt > 2.0 / math.sqrt(disc) and kappa < kc:
        return criticality.Phase.XSRP
    return criticality.Phase.NORMAL


def check_variational_monotonic() -> Check:
    params = params_from_rescaled(2.5, 2.0, 3.0, 16.0)
    es = []
    for n_max in (64, 128, 256, 512):
        r = ground_spectrum(params, SolverOptions(n_max_initial=n_max // 2,
                                                  n_max_ceiling=n_max))
        es.append(r.e0)
    ok = all(b <= a + 1e-10 for a, b in zip(es, es[1:]))
    return _check("spectra.variational_monotonic", ok, f"E0 sequence {es}")


def check_parity_purity() -> Check:
    params = params_from_rescaled(1.5, 2.0, 3.0, 8.0)
    h = build_hamiltonian(params, FockTruncation(128))
    w, v = np.linalg.eigh(h.toarray())
    p = parity_operator(FockTruncation(128)).matrix.diagonal()
    expect = float(np.dot(v[:, 0] ** 2, p))
    ok = abs(abs(expect) - 1.0) < 1e-8
    return _check("spectra.parity_purity", ok, f"<P> = {expect:+.12f}")


def check_oracle_equivalence_small() -> Check:
    rng = np.random.default_rng(23)
    worst = 0.0
    for _ in range(3):
        params = _random_params(rng)
        r = ground_spectrum(params, SolverOptions(n_max_initial=128, n_max_ceiling=256,
                                                  dense_threshold=1))
        h = build_hamiltonian(params, FockTruncation(r.n_max_used)).toarray()
        w = np.linalg.eigh(h)[0]
        worst = max(worst, abs(r.e0 - w[0]), abs(r.e1 - w[1]))
    return _check("spectra.oracle_equivalence", worst < 1e-8,
                  f"iterative vs dense max dev {worst:.3e}")


def check_normal_phase_flatness(eta: float = 16.0) -> Check:
    gcp = criticality.gc_p(2.0, 3.0).value
    r = ground_spectrum(params_from_rescaled(0.5 * gcp, 2.0, 3.0, eta))
    ok = r.n0 < 10.0 / eta
    return _check("spectra.normal_phase_flatness", ok,
                  f"n0 = {r.n0:.3e} < 10/eta at half critical coupling")


def check_uncertainty_bound() -> Check:
    rng = np.random.default_rng(29)
    worst = math.inf
    for _ in range(5):
        r = ground_spectrum(_random_params(rng))
        worst = min(worst, r.x2_a * r.p2_a)
    return _check("spectra.uncertainty_bound", worst >= 0.25 - 1e-9,
                  f"min x2*p2 = {worst:.9f}")


def check_gap_continuity() -> Check:
    worst = 0.0
    for tau, kappa, gcf in ((2.0, 3.0, criticality.gc_p), (4.0, 3.0, criticality.gc_x)):
        gc = gcf(tau, kappa).value
        above = (effective.psrp_gap if gcf is criticality.gc_p else effective.xsrp_gap)
        worst = max(worst,
                    effective.normal_gap(tau, kappa, gc * (1 - 1e-8)),
                    above(tau, kappa, gc * (1 + 1e-8)))
    return _check("effective.gap_continuity", worst < 1e-3,
                  f"gap -> 0 on both sides of second-order boundaries; {worst:.3e}")


def check_sqrt_criticality() -> Check:
    tau, kappa = 2.0, 3.0
    gc = criticality.gc_p(tau, kappa).value
    ratios = [effective.normal_gap(tau, kappa, gc * (1 - d)) / math.sqrt(d)
              for d in (1e-4, 1e-5, 1e-6)]
    spread = (max(ratios) - min(ratios)) / ratios[-1]
    return _check("effective.sqrt_criticality", spread < 1e-2,
                  f"normal gap ~ sqrt(distance); prefactor spread {spread:.3e}")


def check_triple_linear_criticality() -> Check:
    tau = kappa = 3.0
    gc = 1.0
    below = [effective.normal_gap(tau, kappa, gc * (1 - d)) / d for d in (1e-4, 1e-6)]
    above = [effective.psrp_gap(tau, kappa, gc * (1 + d)) / d for d in (1e-4, 1e-6)]
    ok = (abs(below[0] - below[1]) / below[1] < 1e-3
          and abs(above[0] - above[1]) / above[1] < 0.1)
    return _check("effective.triple_linear_criticality", ok,
                  f"linear gap closure at the triple point: {below}, {above}")


def check_first_order_double_zero() -> Check:
    tau, kappa = 4.0, 3.0
    g1 = criticality.gc_first_order(tau, kappa).value
    x = effective.xsrp_gap(tau, kappa, g1)
    p = effective.psrp_gap(tau, kappa, g1)
    ok = x < 1e-6 and p < 1e-6
    return _check("effective.first_order_double_zero", ok,
                  f"both branch gaps vanish on the line: {x:.2e}, {p:.2e}")


def check_scaling_recovery() -> Check:
    rows = []
    beta, nu = 1.0, 2.0 / 3.0
    for eta in (64.0, 256.0, 1024.0):
        for t in np.geomspace(1e-3, 1e-1, 10):
            rows.append((eta, 2.0 * (1 + t), (t ** beta) * (2.0 + t * eta ** nu)))
    data = scaling.FssDataset("n0", rows, gc=2.0)
    good = scaling.collapse(data, beta, nu).residual
    bad = scaling.collapse(data, 0.5, 1.0).residual
    fit = scaling.fit_critical_powerlaw([(e, 7.0 * e ** (-2.0 / 3.0)) for e in (32, 64, 128, 256)])
    ok = good < 1e-10 and bad > 100 * max(good, 1e-300) and abs(fit.exponent - 2.0 / 3.0) < 1e-10
    return _check("scaling.synthetic_recovery", ok,
                  f"residuals {good:.2e} / {bad:.2e}, gamma {fit.exponent:.6f}")


def run_all(inject_fault: str | None = None) -> list[Check]:
    checks = [
        check_hermiticity(inject_fault),
        check_parity_commutation(),
        check_matrix_real(),
        check_truncation_monotonic(),
        check_bogoliubov_identities(),
        check_bogoliubov_small_kappa_limit(),
        check_bogoliubov_spectrum_invariance(),
        check_boundary_coalescence(),
        check_kappa_c_selfconsistency(),
        check_mirror_symmetry(),
        check_route_agreement(),
        check_variational_monotonic(),
        check_parity_purity(),
        check_oracle_equivalence_small(),
        check_normal_phase_flatness(),
        check_uncertainty_bound(),
        check_gap_continuity(),
        check_sqrt_criticality(),
        check_triple_linear_criticality(),
        check_first_order_double_zero(),
        check_scaling_recovery(),
    ]
    return checks
