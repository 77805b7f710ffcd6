"""Anisotropic quantum Rabi model with a diamagnetic A^2 term.

Hamiltonian (energy units of omega unless stated otherwise):

    H = omega a^dag a + (delta/2) sigma_z
        + g [ (a sigma_+ + a^dag sigma_-) + tau (a sigma_- + a^dag sigma_+) ]
        + D (a + a^dag)^2,          D = kappa g^2 / delta

Basis convention: index = 2 n + s with boson occupation n and qubit state
s in {0 = |down>, 1 = |up>}; sigma_z |up> = +|up>.  In this basis the matrix
is real symmetric and banded (offsets 0, 1, 3, 4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the model.

    omega: cavity frequency (> 0)
    delta: qubit splitting (> 0)
    g:     coupling strength (>= 0)
    tau:   anisotropy, ratio of counter-rotating to rotating coupling
    kappa: A^2 strength ratio (>= 0), D = kappa g^2 / delta
    """

    omega: float
    delta: float
    g: float
    tau: float
    kappa: float = 0.0

    def __post_init__(self):
        for name in ("omega", "delta", "g", "tau", "kappa"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        if self.omega <= 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if self.delta <= 0:
            raise ValueError(f"delta must be > 0, got {self.delta}")
        if self.g < 0:
            raise ValueError(f"g must be >= 0, got {self.g}")
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")

    @property
    def d_strength(self) -> float:
        """A^2 coefficient D = kappa g^2 / delta."""
        return self.kappa * self.g * self.g / self.delta

    @property
    def gtilde(self) -> float:
        """Dimensionless coupling 2 g / sqrt(omega delta)."""
        return 2.0 * self.g / math.sqrt(self.omega * self.delta)

    @property
    def eta(self) -> float:
        """Effective system size delta / omega."""
        return self.delta / self.omega


def params_from_rescaled(gtilde: float, tau: float, kappa: float,
                         eta: float, omega: float = 1.0) -> ModelParams:
    """Build ModelParams from the dimensionless control parameters.

    delta = eta * omega and g = gtilde * sqrt(omega delta) / 2, so that
    the round trip through ModelParams.gtilde/.eta is the identity.
    """
    if not (math.isfinite(eta) and eta > 0):
        raise ValueError(f"eta must be > 0, got {eta!r}")
    if not (math.isfinite(omega) and omega > 0):
        raise ValueError(f"omega must be > 0, got {omega!r}")
    if not (math.isfinite(gtilde) and gtilde >= 0):
        raise ValueError(f"gtilde must be >= 0, got {gtilde!r}")
    delta = eta * omega
    g = 0.5 * gtilde * math.sqrt(omega * delta)
    return ModelParams(omega=omega, delta=delta, g=g, tau=tau, kappa=kappa)


@dataclass(frozen=True)
class FockTruncation:
    """Highest retained boson occupation; Hilbert dimension is 2 (n_max + 1)."""

    n_max: int

    def __post_init__(self):
        if self.n_max < 0:
            raise ValueError(f"n_max must be >= 0, got {self.n_max}")

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Real symmetric matrix in the interleaved (boson-major) basis."""

    dim: int
    matrix: sp.csr_matrix

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def max_norm(self) -> float:
        return abs(self.matrix).max() if self.matrix.nnz else 0.0

    def hermiticity_defect(self) -> float:
        """Largest asymmetry |H - H^T| relative to the largest element."""
        d = abs(self.matrix - self.matrix.T).max()
        norm = self.max_norm()
        return d / norm if norm > 0 else d


def _assemble(omega: float, delta: float, g_rot: float, g_crot: float,
              d_strength: float, n_max: int, e_offset: float = 0.0) -> sp.csr_matrix:
    """Assemble the generic two-coupling Hamiltonian matrix.

    g_rot multiplies (a sigma_+ + h.c.), g_crot multiplies (a sigma_- + h.c.),
    d_strength multiplies (a + a^dag)^2 with exact truncated-basis elements
    (diagonal 2n + 1 plus the n <-> n+2 block); e_offset is a c-number shift.
    """
    n_states = n_max + 1
    dim = 2 * n_states
    n = np.arange(n_states, dtype=float)

    rows = [np.arange(dim)]
    cols = [np.arange(dim)]
    diag = np.empty(dim)
    diag[0::2] = omega * n + d_strength * (2 * n + 1) - 0.5 * delta + e_offset
    diag[1::2] = omega * n + d_strength * (2 * n + 1) + 0.5 * delta + e_offset
    vals = [diag]

    if n_max >= 1:
        sq1 = np.sqrt(n[1:])
        # a sigma_+ : |n, down> -> |n-1, up>
        rows.append(2 * n[1:].astype(int) - 1)
        cols.append(2 * n[1:].astype(int))
        vals.append(g_rot * sq1)
        # a sigma_- : |n, up> -> |n-1, down>
        rows.append(2 * n[1:].astype(int) - 2)
        cols.append(2 * n[1:].astype(int) + 1)
        vals.append(g_crot * sq1)

    if d_strength != 0.0 and n_max >= 2:
        m = n[:-2]
        sq2 = d_strength * np.sqrt((m + 1) * (m + 2))
        for s in (0, 1):
            rows.append(2 * m.astype(int) + s)
            cols.append(2 * m.astype(int) + 4 + s)
            vals.append(sq2)

    r = np.concatenate(rows)
    c = np.concatenate(cols)
    v = np.concatenate(vals)
    upper = sp.coo_matrix((v, (r, c)), shape=(dim, dim))
    full = upper + sp.triu(upper, k=1).T
    return full.tocsr()


def build_hamiltonian(params: ModelParams, trunc: FockTruncation) -> HamiltonianMatrix:
    """Hamiltonian of the anisotropic Rabi model with the A^2 term."""
    if trunc.n_max < 1:
        raise ValueError(f"n_max must be >= 1 to include any coupling, got {trunc.n_max}")
    mat = _assemble(params.omega, params.delta, params.g, params.g * params.tau,
                    params.d_strength, trunc.n_max)
    return HamiltonianMatrix(dim=trunc.dim, matrix=mat)


def parity_operator(trunc: FockTruncation) -> HamiltonianMatrix:
    """Z2 parity P = -sigma_z exp(i pi a^dag a); diagonal, P^2 = 1."""
    n = np.arange(trunc.n_max + 1)
    diag = np.empty(trunc.dim)
    diag[0::2] = (-1.0) ** n        # |down>: -sigma_z = +1
    diag[1::2] = -((-1.0) ** n)     # |up>:   -sigma_z = -1
    return HamiltonianMatrix(dim=trunc.dim, matrix=sp.diags(diag).tocsr())


def parity_signs(n_max: int) -> np.ndarray:
    """Parity eigenvalue of every basis state, ordered as the basis."""
    return parity_operator(FockTruncation(n_max)).matrix.diagonal()
