"""Squeeze transformation that removes the A^2 term.

New bosons b = mu a + nu a^dag with mu^2 - nu^2 = 1 and
D (mu - nu)^2 - omega mu nu = 0 turn the model into a plain anisotropic
Rabi Hamiltonian with renormalized omega', g', tau'.  The pair
(g', g' tau') is regular everywhere, while tau' alone diverges where
mu = tau nu (which is exactly the first-order line), so couplings are
carried internally as that product pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import FockTruncation, HamiltonianMatrix, ModelParams, _assemble


@dataclass(frozen=True)
class BogoliubovFrame:
    """Squeeze coefficients and transformed model parameters.

    g_rot = g' = g (mu - tau nu) and g_crot = g' tau' = g (tau mu - nu) are
    the regular representation of the transformed couplings; tau_p is NaN
    when g_rot vanishes.
    """

    mu: float
    nu: float
    gamma: float
    zeta: float
    omega_p: float
    g_rot: float
    g_crot: float
    eta_p: float
    xi_x: float

    @property
    def g_p(self) -> float:
        return self.g_rot

    @property
    def tau_p(self) -> float:
        if self.g_rot == 0.0:
            return math.nan
        return self.g_crot / self.g_rot

    @property
    def gtilde_p(self) -> float:
        return self._gtilde_of(self.g_rot)

    def _gtilde_of(self, g: float) -> float:
        return 2.0 * g / math.sqrt(self.omega_p * self.eta_p * self.omega_p)

    @property
    def gtilde_rot(self) -> float:
        """g~' = 2 g' / sqrt(omega' delta)."""
        return self.gtilde_p

    @property
    def gtilde_crot(self) -> float:
        """g~' tau' = 2 g' tau' / sqrt(omega' delta)."""
        return self._gtilde_of(self.g_crot)


def gamma_factor(kappa: float, gtilde: float) -> float:
    """Squeeze factor gamma = (mu + nu)^2 = sqrt(1 + kappa gtilde^2)."""
    return math.sqrt(1.0 + kappa * gtilde * gtilde)


def zeta_ratio(kappa: float, gtilde: float) -> float:
    """Coefficient ratio zeta = nu / mu in [0, 1).

    Evaluated as kappa gtilde^2 / (1 + gamma)^2, which is algebraically
    identical to the textbook square-root difference but free of
    cancellation as kappa gtilde^2 -> 0.
    """
    k2 = kappa * gtilde * gtilde
    return k2 / (1.0 + gamma_factor(kappa, gtilde)) ** 2


def bogoliubov_frame(params: ModelParams) -> BogoliubovFrame:
    """Squeeze frame for the given parameters."""
    gt = params.gtilde
    gamma = gamma_factor(params.kappa, gt)
    zeta = zeta_ratio(params.kappa, gt)
    mu = 1.0 / math.sqrt(1.0 - zeta * zeta)
    nu = zeta * mu
    omega_p = gamma * params.omega
    g_rot = params.g * (mu - params.tau * nu)
    g_crot = params.g * (params.tau * mu - nu)
    xi_x = (1.0 + params.tau) * (1.0 - zeta) / (1.0 + zeta)
    return BogoliubovFrame(
        mu=mu,
        nu=nu,
        gamma=gamma,
        zeta=zeta,
        omega_p=omega_p,
        g_rot=g_rot,
        g_crot=g_crot,
        eta_p=params.delta / omega_p,
        xi_x=xi_x,
    )


def transformed_hamiltonian(params: ModelParams, trunc: FockTruncation) -> HamiltonianMatrix:
    """Hamiltonian in the squeezed frame: no (b + b^dag)^2 term.

    Unitary on the untruncated space, so its low-lying spectrum agrees with
    the original Hamiltonian once both truncations are converged.  The
    c-number D - omega' nu^2 left over from normal ordering the squeeze is
    kept so spectra match level by level, not only gap by gap.
    """
    if trunc.n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {trunc.n_max}")
    frame = bogoliubov_frame(params)
    e_offset = params.d_strength - frame.omega_p * frame.nu ** 2
    mat = _assemble(frame.omega_p, params.delta, frame.g_rot, frame.g_crot,
                    0.0, trunc.n_max, e_offset=e_offset)
    return HamiltonianMatrix(dim=trunc.dim, matrix=mat)
