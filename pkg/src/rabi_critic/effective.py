"""Closed-form effective description of the superradiant phases.

A displacement plus rotations (number-phase angle theta_1, qubit angles
theta_2, theta_3) map the squeezed-frame Hamiltonian back onto its own
form with renormalized size eta'' and couplings.  Two branch solutions
exist, one per superradiant type, and they yield analytic energy gaps in
all three phases.  Everything here is leading order in 1/eta.

All formulas are evaluated through the regular coupling combinations

    A = gtilde (1 + tau) / gamma      (x channel)
    B = gtilde (1 - tau)              (p channel)

with gamma = sqrt(1 + kappa gtilde^2); the branch angles satisfy
cos(theta_3) = 4 / A^2 (x branch) and 4 / B^2 (p branch).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bogoliubov import gamma_factor
from .criticality import Phase, classify, gc_p, gc_x


@dataclass(frozen=True)
class EffectiveFrame:
    """Branch solution of the displaced-rotated frame.

    branch is "x_srp" or "p_srp".  x0/p0 is the quadrature displacement of
    the macroscopically excited channel (the other one is exactly zero);
    eta_pp, gtilde_pp, tau_pp are the renormalized model parameters.
    """

    branch: str
    theta1: float
    theta2: float
    theta3: float
    x0: float
    p0: float
    eta: float
    eta_pp: float
    gtilde_pp: float
    tau_pp: float


@dataclass(frozen=True)
class GapPrediction:
    epsilon: float
    c_eps_x: float
    c_eps_p: float
    regime: str


def _channels(tau: float, kappa: float, gtilde: float) -> tuple[float, float, float]:
    gamma = gamma_factor(kappa, gtilde)
    a = gtilde * (1.0 + tau) / gamma
    b = gtilde * (1.0 - tau)
    return gamma, a, b


def effective_frame(tau: float, kappa: float, gtilde: float, eta: float,
                    branch: str) -> EffectiveFrame:
    """Branch solution; valid only where cos(theta_3) lies in (0, 1]."""
    if branch not in ("x_srp", "p_srp"):
        raise ValueError(f"branch must be 'x_srp' or 'p_srp', got {branch!r}")
    gamma, a, b = _channels(tau, kappa, gtilde)

    if branch == "x_srp":
        if a == 0.0:
            raise ValueError("x branch undefined at gtilde (1 + tau) = 0")
        cos3 = 4.0 / (a * a)  # = 4 gamma^2 / (gtilde^2 (1+tau)^2)
    else:
        if b == 0.0:
            raise ValueError("p branch undefined at gtilde (1 - tau) = 0")
        cos3 = 4.0 / (b * b)
    if not 0.0 < cos3 <= 1.0:
        raise ValueError(
            f"{branch} branch invalid: cos(theta_3) = {cos3:.6g} outside (0, 1] "
            "(point is subcritical for this branch)")

    theta3 = math.acos(cos3)
    sin3 = math.sin(theta3)
    if branch == "x_srp":
        theta1 = theta2 = 0.0
        x0 = math.sqrt(eta / (8.0 * gamma ** 3)) * gtilde * (1.0 + tau) * sin3
        p0 = 0.0
        cplus = 1.0   # cos(theta_1 + theta_2)
        num = a * cos3 - b
        den = a * cos3 + b
        g_rot_term = den
    else:
        theta1 = theta2 = math.pi / 2.0
        x0 = 0.0
        p0 = -math.sqrt(eta / (8.0 * gamma)) * gtilde * (1.0 - tau) * sin3
        cplus = -1.0
        num = b * cos3 - a
        den = b * cos3 + a
        g_rot_term = den

    eta_p = eta / gamma
    eta_pp = eta_p / cos3
    gtilde_pp = 0.5 * math.sqrt(cos3) * g_rot_term
    tau_pp = num / den if den != 0.0 else math.nan
    return EffectiveFrame(branch=branch, theta1=theta1, theta2=theta2,
                          theta3=theta3, x0=x0, p0=p0, eta=eta, eta_pp=eta_pp,
                          gtilde_pp=gtilde_pp, tau_pp=tau_pp)


def predict_order_parameter(frame: EffectiveFrame) -> float:
    """Leading-order excited-quadrature square per unit size: x0^2/eta or p0^2/eta.

    The displacement scales as sqrt(eta), so this ratio is eta-free:
    gtilde^2 (1+tau)^2 sin^2(theta_3) / (8 gamma^3) on the x branch and
    gtilde^2 (1-tau)^2 sin^2(theta_3) / (8 gamma) on the p branch.
    """
    disp = frame.x0 if frame.branch == "x_srp" else frame.p0
    return disp * disp / frame.eta


def _nonneg_factor(value: float, scale: float, msg: str) -> float:
    """Clip float noise at boundary zeros; raise on genuine sign violations."""
    if value < -1e-12 * max(1.0, abs(scale)):
        raise ValueError(msg)
    return max(value, 0.0)


def normal_gap(tau: float, kappa: float, gtilde: float, omega: float = 1.0) -> float:
    """Gap in the normal phase:
    (omega/4) sqrt({4 - [(1+tau)^2 - 4 kappa] g^2} [4 - (1-tau)^2 g^2])."""
    g2 = gtilde * gtilde
    msg = (f"normal-phase gap undefined at (tau={tau}, kappa={kappa}, gtilde={gtilde}): "
           "negative radical factor (point is outside the normal phase)")
    f1 = _nonneg_factor(4.0 - ((1.0 + tau) ** 2 - 4.0 * kappa) * g2,
                        (1.0 + tau) ** 2 * g2, msg)
    f2 = _nonneg_factor(4.0 - (1.0 - tau) ** 2 * g2, (1.0 - tau) ** 2 * g2, msg)
    return 0.25 * omega * math.sqrt(f1 * f2)


def xsrp_gap(tau: float, kappa: float, gtilde: float, omega: float = 1.0) -> float:
    """Gap in the x-type superradiant phase.

    Vanishes both at the second-order boundary gc_x and on the first-order
    line where 4 tau - (1-tau)^2 kappa gtilde^2 = 0.
    """
    crit = gc_x(tau, kappa)
    if not crit.valid:
        raise ValueError(f"x-type gap undefined: {crit.reason}")
    gcx = crit.value
    gamma = gamma_factor(kappa, gtilde)
    g2 = gtilde * gtilde
    above = _nonneg_factor(
        g2 - gcx * gcx, g2,
        f"x-type gap requires gtilde >= gc_x = {gcx:.6g}, got {gtilde}")
    bracket = _nonneg_factor(
        4.0 * tau - (1.0 - tau) ** 2 * kappa * g2, 4.0 * tau,
        f"x-type gap undefined at gtilde={gtilde}: beyond the first-order line")
    rad = (g2 * (1.0 + tau) ** 2 + 4.0 * gamma * gamma) * above * bracket
    pref = 2.0 * gamma * omega / ((1.0 + tau) ** 3 * gcx * g2)
    return pref * math.sqrt(rad)


def psrp_gap(tau: float, kappa: float, gtilde: float, omega: float = 1.0) -> float:
    """Gap in the p-type superradiant phase.

    Vanishes at the second-order boundary gc_p and on the first-order line
    where (1-tau)^2 kappa gtilde^2 - 4 tau = 0; near the triple point it
    closes linearly in gtilde - gc_tri.
    """
    if tau == 1.0:
        raise ValueError("p-type gap undefined at tau = 1 (p-type forbidden)")
    gcp = 2.0 / abs(1.0 - tau)
    g2 = gtilde * gtilde
    above = _nonneg_factor(
        g2 - gcp * gcp, g2,
        f"p-type gap requires gtilde >= gc_p = {gcp:.6g}, got {gtilde}")
    bracket = _nonneg_factor(
        (1.0 - tau) ** 2 * kappa * g2 - 4.0 * tau, 4.0 * abs(tau) + 1.0,
        f"p-type gap undefined at gtilde={gtilde}: below the first-order line")
    rad = (g2 * (1.0 - tau) ** 2 + 4.0) * above * bracket
    pref = 2.0 * omega / (abs(1.0 - tau) ** 3 * gcp * g2)
    return pref * math.sqrt(rad)


def analytic_gap(tau: float, kappa: float, gtilde: float, omega: float = 1.0) -> tuple[float, str]:
    """(gap, regime) using the phase-appropriate formula."""
    label = classify(tau, kappa, gtilde)
    if label.phase is Phase.NORMAL:
        return normal_gap(tau, kappa, gtilde, omega), "normal"
    if label.phase is Phase.XSRP:
        return xsrp_gap(tau, kappa, gtilde, omega), "x_srp"
    return psrp_gap(tau, kappa, gtilde, omega), "p_srp"


def gap_prediction(tau: float, kappa: float, gtilde: float, omega: float = 1.0) -> GapPrediction:
    """Gap plus the channel coefficients C_eps of the general expression."""
    eps, regime = analytic_gap(tau, kappa, gtilde, omega)
    gamma, a, b = _channels(tau, kappa, gtilde)
    if regime == "x_srp":
        c_x, c_p = a, b
    elif regime == "p_srp":
        c_x, c_p = b, a
    else:
        c_x, c_p = a, b  # normal phase: no rotation, channels unmixed
    return GapPrediction(epsilon=eps, c_eps_x=c_x, c_eps_p=c_p, regime=regime)
