"""Analytic phase boundaries and phase classification.

In the squeezed frame the low-energy oscillator coefficients are

    c_x = 4 - gtilde^2 (1 + tau)^2 / (1 + kappa gtilde^2)
    c_p = 4 - gtilde^2 (1 - tau)^2

Both nonnegative -> normal phase.  Otherwise the macroscopically excited
quadrature is decided by kappa against kappa_c = 4 tau / ((1-tau)^2 gtilde^2):
kappa > kappa_c -> p-type superradiant, kappa < kappa_c -> x-type.
Tie-breaks: second-order boundaries (c = 0) classify as normal, the
first-order line (kappa = kappa_c) as x-type.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import NamedTuple

import numpy as np


class Phase(IntEnum):
    NORMAL = 0
    XSRP = 1
    PSRP = 2


@dataclass(frozen=True)
class PhaseLabel:
    phase: Phase
    boundary_proximity: float  # gtilde minus the nearest valid critical coupling; NaN if none


class CriticalCoupling(NamedTuple):
    """A critical-coupling value, or an explicit invalid marker with reason."""

    value: float
    valid: bool
    reason: str = ""


def _valid(value: float) -> CriticalCoupling:
    return CriticalCoupling(value, True)


def _invalid(reason: str) -> CriticalCoupling:
    return CriticalCoupling(math.nan, False, reason)


def kappa_c(tau: float, gtilde: float) -> float:
    """A^2 strength at which the x- and p-instabilities swap dominance.

    kappa_c = 4 tau / ((1 - tau)^2 gtilde^2); negative for tau < 0 and
    divergent (inf) at tau = 1.
    """
    if gtilde <= 0:
        raise ValueError(f"gtilde must be > 0, got {gtilde}")
    if tau == 1.0:
        return math.inf
    return 4.0 * tau / ((1.0 - tau) ** 2 * gtilde * gtilde)


def gc_p(tau: float, kappa: float) -> CriticalCoupling:
    """Second-order boundary to the p-type superradiant phase: 2 / |1 - tau|."""
    if tau == 1.0:
        return _invalid("p-type forbidden at tau = 1")
    if tau >= kappa:
        return _invalid("x-type dominates at onset (requires tau < kappa)")
    return _valid(2.0 / abs(1.0 - tau))


def gc_x(tau: float, kappa: float) -> CriticalCoupling:
    """Second-order boundary to the x-type phase: 2 / sqrt((1+tau)^2 - 4 kappa)."""
    disc = (1.0 + tau) ** 2 - 4.0 * kappa
    if disc <= 0.0:
        return _invalid("no real solution ((1+tau)^2 <= 4 kappa)")
    if tau <= kappa:
        return _invalid("p-type dominates at onset (requires tau > kappa)")
    return _valid(2.0 / math.sqrt(disc))


def gc_first_order(tau: float, kappa: float) -> CriticalCoupling:
    """First-order x-type -> p-type line: 2 sqrt(tau / kappa) / |1 - tau|."""
    if kappa <= 0.0:
        return _invalid("requires kappa > 0")
    if tau <= kappa:
        return _invalid("requires tau > kappa")
    if tau == 1.0:
        return _invalid("degenerate at tau = 1")
    return _valid(2.0 * math.sqrt(tau / kappa) / abs(1.0 - tau))


def gc_triple(tau: float, kappa: float) -> CriticalCoupling:
    """Triple point 2 / (tau - 1), existing only on the line kappa = tau > 1."""
    if abs(kappa - tau) > 1e-12 * max(1.0, abs(tau)):
        return _invalid("requires kappa = tau")
    if tau <= 1.0:
        return _invalid("requires tau > 1")
    return _valid(2.0 / (tau - 1.0))


def oscillator_coefficients(tau: float, kappa: float, gtilde: float) -> tuple[float, float]:
    """(c_x, c_p) of the projected low-energy oscillator."""
    g2 = gtilde * gtilde
    c_x = 4.0 - g2 * (1.0 + tau) ** 2 / (1.0 + kappa * g2)
    c_p = 4.0 - g2 * (1.0 - tau) ** 2
    return c_x, c_p


def _boundary_proximity(tau: float, kappa: float, gtilde: float) -> float:
    candidates = [b.value for b in (gc_x(tau, kappa), gc_p(tau, kappa),
                                    gc_first_order(tau, kappa)) if b.valid]
    if not candidates:
        return math.nan
    nearest = min(candidates, key=lambda b: abs(gtilde - b))
    return gtilde - nearest


def classify(tau: float, kappa: float, gtilde: float) -> PhaseLabel:
    """Phase of a (tau, kappa, gtilde) point."""
    if gtilde < 0:
        raise ValueError(f"gtilde must be >= 0, got {gtilde}")
    if kappa < 0:
        raise ValueError(f"kappa must be >= 0, got {kappa}")
    prox = _boundary_proximity(tau, kappa, gtilde)
    if gtilde == 0.0:
        return PhaseLabel(Phase.NORMAL, prox)
    c_x, c_p = oscillator_coefficients(tau, kappa, gtilde)
    if c_x >= 0.0 and c_p >= 0.0:
        return PhaseLabel(Phase.NORMAL, prox)
    if kappa > kappa_c(tau, gtilde):
        return PhaseLabel(Phase.PSRP, prox)
    return PhaseLabel(Phase.XSRP, prox)


@dataclass(frozen=True)
class BoundaryCurve:
    """Samples of one boundary kind at fixed kappa.

    kind is one of "gc_x", "gc_p", "gc_1", "triple"; samples hold (tau,
    gtilde) pairs restricted to the curve's validity domain.
    """

    kind: str
    samples: list[tuple[float, float]]
    domain: str


_BOUNDARY_FUNCS = {
    "gc_x": gc_x,
    "gc_p": gc_p,
    "gc_1": gc_first_order,
}

_DOMAINS = {
    "gc_x": "(1+tau)^2 > 4 kappa and tau > kappa",
    "gc_p": "tau != 1 and tau < kappa",
    "gc_1": "tau > kappa > 0 and tau != 1",
    "triple": "kappa = tau > 1",
}


def boundary_curves(kappa: float, taus: np.ndarray) -> list[BoundaryCurve]:
    """All four boundary kinds sampled over the given tau values."""
    curves = []
    for kind, func in _BOUNDARY_FUNCS.items():
        samples = []
        for tau in np.asarray(taus, dtype=float):
            c = func(tau, kappa)
            if c.valid:
                samples.append((float(tau), c.value))
        curves.append(BoundaryCurve(kind, samples, _DOMAINS[kind]))
    tri = gc_triple(kappa, kappa)
    tri_samples = [(kappa, tri.value)] if tri.valid else []
    curves.append(BoundaryCurve("triple", tri_samples, _DOMAINS["triple"]))
    return curves


@dataclass(frozen=True)
class PhaseDiagram:
    """Row-major labelled grid: labels[i, j] classifies (taus[i], gtildes[j])."""

    kappa: float
    taus: np.ndarray
    gtildes: np.ndarray
    labels: np.ndarray
    boundaries: list[BoundaryCurve] = field(default_factory=list)


def phase_diagram_grid(kappa: float, tau_range: tuple[float, float],
                       gtilde_range: tuple[float, float],
                       resolution: tuple[int, int]) -> PhaseDiagram:
    """Classify a rectangular (tau, gtilde) grid and attach boundary curves."""
    n_tau, n_gt = resolution
    if n_tau < 2 or n_gt < 2:
        raise ValueError(f"resolution must be >= 2 per axis, got {resolution}")
    lo_t, hi_t = tau_range
    lo_g, hi_g = gtilde_range
    if not (math.isfinite(lo_t) and math.isfinite(hi_t) and lo_t < hi_t):
        raise ValueError(f"bad tau range {tau_range}")
    if not (math.isfinite(lo_g) and math.isfinite(hi_g) and lo_g < hi_g):
        raise ValueError(f"bad gtilde range {gtilde_range}")
    taus = np.linspace(lo_t, hi_t, n_tau)
    gtildes = np.linspace(lo_g, hi_g, n_gt)
    labels = np.empty((n_tau, n_gt), dtype=int)
    for i, tau in enumerate(taus):
        for j, gt in enumerate(gtildes):
            labels[i, j] = int(classify(tau, kappa, gt).phase)
    return PhaseDiagram(kappa=kappa, taus=taus, gtildes=gtildes, labels=labels,
                        boundaries=boundary_curves(kappa, taus))
