import math

import numpy as np
import pytest

from rabi_critic.model import (FockTruncation, ModelParams, build_hamiltonian,
                               params_from_rescaled, parity_operator)

from conftest import kron_hamiltonian


def test_decoupled_limit_is_diagonal():
    params = ModelParams(omega=1.0, delta=3.0, g=0.0, tau=0.7, kappa=2.0)
    h = build_hamiltonian(params, FockTruncation(12)).toarray()
    assert np.count_nonzero(h - np.diag(np.diag(h))) == 0
    w = np.sort(np.diag(h))
    expect = np.sort([n + s * 1.5 for n in range(13) for s in (-1, 1)])
    np.testing.assert_allclose(w, expect, atol=1e-15)
    assert w[0] == -1.5  # ground energy -delta/2


def test_explicit_4x4_matrix_and_eigenvalues():
    # omega=1, delta=1, g=1/2, tau=1, kappa=0, n_max=1; the two 2x2 parity
    # blocks diagonalize by hand to {0, 1} and {(1 +/- sqrt(5))/2}
    params = ModelParams(omega=1.0, delta=1.0, g=0.5, tau=1.0, kappa=0.0)
    h = build_hamiltonian(params, FockTruncation(1)).toarray()
    expect = np.array([
        [-0.5, 0.0, 0.0, 0.5],
        [0.0, 0.5, 0.5, 0.0],
        [0.0, 0.5, 0.5, 0.0],
        [0.5, 0.0, 0.0, 1.5],
    ])
    np.testing.assert_allclose(h, expect, atol=1e-15)
    w = np.linalg.eigvalsh(h)
    exact = np.sort([0.0, 1.0, 0.5 * (1 - math.sqrt(5)), 0.5 * (1 + math.sqrt(5))])
    np.testing.assert_allclose(w, exact, atol=1e-14)


def test_matches_kron_oracle(rng):
    for _ in range(8):
        params = params_from_rescaled(
            gtilde=rng.uniform(0, 3), tau=rng.uniform(-2, 4),
            kappa=rng.uniform(0, 4), eta=rng.uniform(0.5, 20), omega=rng.uniform(0.5, 2))
        h = build_hamiltonian(params, FockTruncation(40)).toarray()
        np.testing.assert_allclose(h, kron_hamiltonian(params, 40), atol=1e-12)


def test_hermitian_and_real(rng):
    params = params_from_rescaled(1.7, 2.5, 3.5, 12.0)
    h = build_hamiltonian(params, FockTruncation(64))
    assert h.hermiticity_defect() < 1e-12
    assert h.matrix.dtype == np.float64


def test_parity_n0_block():
    p = parity_operator(FockTruncation(0)).toarray()
    np.testing.assert_array_equal(p, np.diag([1.0, -1.0]))


def test_parity_involution():
    p = parity_operator(FockTruncation(7)).matrix
    np.testing.assert_array_equal((p @ p).toarray(), np.eye(16))


def test_parity_commutes_with_hamiltonian(rng):
    for _ in range(5):
        params = params_from_rescaled(
            gtilde=rng.uniform(0, 3), tau=rng.uniform(-2, 4),
            kappa=rng.uniform(0, 4), eta=rng.uniform(0.5, 20))
        h = build_hamiltonian(params, FockTruncation(40))
        p = parity_operator(FockTruncation(40))
        comm = h.matrix @ p.matrix - p.matrix @ h.matrix
        defect = abs(comm).max() if comm.nnz else 0.0
        assert defect < 1e-10 * h.max_norm()


def test_no_level_collapse_at_no_go_point():
    # tau = 1 with kappa >= 1: the gap never closes (here eta = 64)
    for gtilde in (1.0, 3.0, 5.0):
        params = params_from_rescaled(gtilde, 1.0, 1.0, 64.0)
        w = np.linalg.eigvalsh(build_hamiltonian(params, FockTruncation(256)).toarray())
        assert w[1] - w[0] > 0.1 * params.omega


def test_truncation_variational_monotonicity():
    params = params_from_rescaled(2.2, 2.0, 3.0, 8.0)
    e_prev = math.inf
    diffs = []
    for n_max in (16, 32, 64, 128, 256):
        w = np.linalg.eigvalsh(build_hamiltonian(params, FockTruncation(n_max)).toarray())
        assert w[0] <= e_prev + 1e-12
        diffs.append(e_prev - w[0])
        e_prev = w[0]
    assert diffs[-1] < 1e-6  # converged at the top of the ladder


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(omega=0.0, delta=1.0, g=0.1, tau=1.0, kappa=0.0)
    with pytest.raises(ValueError):
        ModelParams(omega=1.0, delta=-1.0, g=0.1, tau=1.0, kappa=0.0)
    with pytest.raises(ValueError):
        ModelParams(omega=1.0, delta=1.0, g=-0.1, tau=1.0, kappa=0.0)
    with pytest.raises(ValueError):
        ModelParams(omega=1.0, delta=1.0, g=0.1, tau=1.0, kappa=-2.0)
    with pytest.raises(ValueError):
        ModelParams(omega=math.nan, delta=1.0, g=0.1, tau=1.0, kappa=0.0)
    with pytest.raises(ValueError):
        params_from_rescaled(1.0, 1.0, 0.0, eta=-3.0)
    with pytest.raises(ValueError):
        build_hamiltonian(ModelParams(1.0, 1.0, 0.1, 1.0, 0.0), FockTruncation(0))
    with pytest.raises(ValueError):
        FockTruncation(-1)


def test_derived_quantities():
    params = ModelParams(omega=2.0, delta=8.0, g=1.0, tau=0.3, kappa=1.5)
    assert params.d_strength == pytest.approx(1.5 / 8.0, rel=1e-15)
    assert params.gtilde == pytest.approx(2.0 / 4.0, rel=1e-15)
    assert params.eta == pytest.approx(4.0, rel=1e-15)


def test_rescaled_round_trip(rng):
    assert params_from_rescaled(0.0, 1.0, 1.0, 2.0).g == 0.0
    p = params_from_rescaled(2.0, 1.0, 0.0, 100.0, 1.0)
    assert p.g == pytest.approx(10.0, rel=1e-15)
    assert p.delta == pytest.approx(100.0, rel=1e-15)
    for _ in range(20):
        gt, tau, kappa = rng.uniform(0, 4), rng.uniform(-3, 5), rng.uniform(0, 5)
        eta, omega = rng.uniform(0.1, 2000), rng.uniform(0.1, 10)
        p = params_from_rescaled(gt, tau, kappa, eta, omega)
        assert p.gtilde == pytest.approx(gt, rel=1e-14, abs=1e-300)
        assert p.eta == pytest.approx(eta, rel=1e-14)
        assert (p.tau, p.kappa, p.omega) == (tau, kappa, omega)
