import math

import numpy as np
import pytest

from rabi_critic.bogoliubov import (bogoliubov_frame, gamma_factor,
                                    transformed_hamiltonian, zeta_ratio)
from rabi_critic.model import (FockTruncation, build_hamiltonian,
                               params_from_rescaled)


def test_identity_transform_at_kappa_zero():
    params = params_from_rescaled(1.3, 0.7, 0.0, 5.0)
    fr = bogoliubov_frame(params)
    assert (fr.mu, fr.nu) == (1.0, 0.0)
    assert (fr.gamma, fr.zeta) == (1.0, 0.0)
    assert fr.omega_p == params.omega
    assert fr.g_p == pytest.approx(params.g, rel=1e-15)
    assert fr.tau_p == pytest.approx(params.tau, rel=1e-15)


def test_gamma_direct_substitution():
    # kappa = 3, gtilde = 1 -> gamma = 2
    assert gamma_factor(3.0, 1.0) == pytest.approx(2.0, rel=1e-15)


def test_zeta_direct_substitution():
    # kappa = 1, gtilde = 2: zeta = 1.5 - sqrt(1.25)
    assert zeta_ratio(1.0, 2.0) == pytest.approx(1.5 - math.sqrt(1.25), rel=1e-12)


def test_zeta_matches_textbook_form(rng):
    # the square-root-difference form is fine when kappa gtilde^2 is O(1)
    for _ in range(30):
        kappa = rng.uniform(0.5, 5.0)
        gt = rng.uniform(0.5, 3.0)
        u = 2.0 / (kappa * gt * gt)
        textbook = 1.0 + u - math.sqrt((1.0 + u) ** 2 - 1.0)
        assert zeta_ratio(kappa, gt) == pytest.approx(textbook, rel=1e-12)


def test_frame_invariants(rng):
    for _ in range(60):
        params = params_from_rescaled(
            gtilde=rng.uniform(0.01, 4), tau=rng.uniform(-3, 5),
            kappa=rng.uniform(0, 5), eta=rng.uniform(0.5, 50), omega=rng.uniform(0.5, 2))
        fr = bogoliubov_frame(params)
        assert fr.mu ** 2 - fr.nu ** 2 == pytest.approx(1.0, abs=1e-12)
        assert 0.0 <= fr.zeta < 1.0
        constraint = params.d_strength * (fr.mu - fr.nu) ** 2 - params.omega * fr.mu * fr.nu
        assert constraint == pytest.approx(0.0, abs=1e-12 * params.omega)
        assert fr.gamma == pytest.approx(
            math.sqrt(1.0 + params.kappa * params.gtilde ** 2), rel=1e-12)
        # singularity-free coupling identities
        g, tau = params.g, params.tau
        assert fr.g_rot + fr.g_crot == pytest.approx(
            g * (1 + tau) * (fr.mu - fr.nu), rel=1e-12, abs=1e-12)
        assert fr.g_rot - fr.g_crot == pytest.approx(
            g * (1 - tau) * (fr.mu + fr.nu), rel=1e-12, abs=1e-12)
        # rescaled versions: gtilde'(1 - tau') = gtilde (1 - tau) etc.
        assert fr.gtilde_rot - fr.gtilde_crot == pytest.approx(
            params.gtilde * (1 - tau), rel=1e-11, abs=1e-11)
        assert fr.gtilde_rot + fr.gtilde_crot == pytest.approx(
            params.gtilde * fr.xi_x, rel=1e-11, abs=1e-11)


def test_tau_p_degenerate_on_first_order_line():
    # mu = tau nu happens exactly at the first-order coupling, where the
    # product pair stays finite while tau' blows up
    tau, kappa = 4.0, 3.0
    g1 = 2.0 * math.sqrt(tau / kappa) / abs(1.0 - tau)
    fr = bogoliubov_frame(params_from_rescaled(g1, tau, kappa, 16.0))
    assert abs(fr.g_rot) < 1e-12
    assert math.isnan(fr.tau_p) or abs(fr.tau_p) > 1e10
    assert math.isfinite(fr.g_rot + fr.g_crot)


def test_transformed_equals_original_at_kappa_zero():
    params = params_from_rescaled(1.1, 1.8, 0.0, 6.0)
    a = build_hamiltonian(params, FockTruncation(30)).toarray()
    b = transformed_hamiltonian(params, FockTruncation(30)).toarray()
    np.testing.assert_allclose(a, b, atol=1e-13)


def _stable_lowest(params, builder, n_eigs=5, tol=1e-7):
    """Lowest eigenvalues, doubling n_max until they stop moving."""
    prev = None
    for n_max in (64, 128, 256, 512, 1024):
        w = np.linalg.eigvalsh(builder(params, FockTruncation(n_max)).toarray())[:n_eigs]
        if prev is not None and np.max(np.abs(w - prev)) < tol:
            return w
        prev = w
    raise AssertionError("eigenvalues did not stabilize under truncation doubling")


@pytest.mark.parametrize("gtilde,tau,kappa,eta", [
    (1.0, 2.0, 3.0, 8.0),
    (1.0, 1.0, 1.0, 8.0),
])
def test_spectrum_invariance_under_transformation(gtilde, tau, kappa, eta):
    params = params_from_rescaled(gtilde, tau, kappa, eta)
    wa = _stable_lowest(params, build_hamiltonian)
    wb = _stable_lowest(params, transformed_hamiltonian)
    np.testing.assert_allclose(wa, wb, atol=1e-6)


def test_small_kappa_limit_no_cancellation():
    for kappa in (1e-10, 1e-8, 1e-6, 1e-4):
        k2 = kappa  # gtilde = 1
        z = zeta_ratio(kappa, 1.0)
        assert abs(4.0 * z / k2 - 1.0) <= max(k2, 1e-12)
        g = gamma_factor(kappa, 1.0)
        assert 0.0 <= g - 1.0 <= k2
