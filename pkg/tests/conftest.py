"""Shared test fixtures and independent dense oracles.

The oracle Hamiltonian is assembled from Kronecker products of explicit
boson/qubit operator matrices, a deliberately different construction from
the production banded assembly, so agreement is a real cross-check.
"""

import numpy as np
import pytest

from rabi_critic.model import ModelParams


def kron_hamiltonian(params: ModelParams, n_max: int) -> np.ndarray:
    """Dense reference Hamiltonian via operator Kronecker products."""
    nb = n_max + 1
    a = np.diag(np.sqrt(np.arange(1.0, nb)), 1)
    ad = a.T
    num = ad @ a
    eye_b = np.eye(nb)
    eye_q = np.eye(2)
    sz = np.diag([-1.0, 1.0])                  # (down, up) ordering
    s_plus = np.array([[0.0, 0.0], [1.0, 0.0]])   # |up><down|
    s_minus = s_plus.T
    d = params.kappa * params.g ** 2 / params.delta
    h = params.omega * np.kron(num, eye_q)
    h += 0.5 * params.delta * np.kron(eye_b, sz)
    h += params.g * (np.kron(a, s_plus) + np.kron(ad, s_minus))
    h += params.g * params.tau * (np.kron(a, s_minus) + np.kron(ad, s_plus))
    # (a + a^dag)^2 restricted to the truncated basis keeps the exact
    # diagonal 2n + 1; the matrix-product square would corrupt the edge
    h += d * (np.kron(a @ a + ad @ ad + 2.0 * num + eye_b, eye_q))
    return h


def dense_ground_observables(params: ModelParams, n_max: int) -> dict:
    """Full-matrix reference: lowest two levels plus ground observables."""
    h = kron_hamiltonian(params, n_max)
    w, v = np.linalg.eigh(h)
    psi = v[:, 0]
    nb = n_max + 1
    a = np.diag(np.sqrt(np.arange(1.0, nb)), 1)
    num_f = np.kron(a.T @ a, np.eye(2))
    s2_f = np.kron(a @ a + (a @ a).T, np.eye(2))
    navg = float(psi @ num_f @ psi)
    s2 = 0.5 * float(psi @ s2_f @ psi)
    return {
        "e0": float(w[0]),
        "e1": float(w[1]),
        "x2_a": navg + 0.5 + s2,
        "p2_a": navg + 0.5 - s2,
        "n0": navg / params.eta,
    }


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
