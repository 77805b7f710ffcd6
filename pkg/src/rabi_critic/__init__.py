"""Anisotropic quantum Rabi model with an A^2 term: phase diagram, exact
diagonalization and finite-size scaling."""

from .model import (FockTruncation, HamiltonianMatrix, ModelParams,
                    build_hamiltonian, params_from_rescaled, parity_operator)
from .bogoliubov import BogoliubovFrame, bogoliubov_frame, transformed_hamiltonian
from .criticality import (BoundaryCurve, CriticalCoupling, Phase, PhaseDiagram,
                          PhaseLabel, classify, gc_first_order, gc_p, gc_triple,
                          gc_x, kappa_c, phase_diagram_grid)
from .spectra import (SolverOptions, SpectrumResult, energy_derivative,
                      ground_spectrum, locate_transition, sweep_coupling)
from .effective import (EffectiveFrame, GapPrediction, effective_frame,
                        normal_gap, predict_order_parameter, psrp_gap, xsrp_gap)
from .scaling import (CollapseResult, FssDataset, PowerLawFit, collapse,
                      fit_critical_powerlaw, scan_exponents)

__version__ = "0.1.0"

__all__ = [
    "BogoliubovFrame", "BoundaryCurve", "CollapseResult", "CriticalCoupling",
    "EffectiveFrame", "FockTruncation", "FssDataset", "GapPrediction",
    "HamiltonianMatrix", "ModelParams", "Phase", "PhaseDiagram", "PhaseLabel",
    "PowerLawFit", "SolverOptions", "SpectrumResult", "bogoliubov_frame",
    "build_hamiltonian", "classify", "collapse", "effective_frame",
    "energy_derivative", "fit_critical_powerlaw", "gc_first_order", "gc_p",
    "gc_triple", "gc_x", "ground_spectrum", "kappa_c", "locate_transition",
    "normal_gap", "params_from_rescaled", "parity_operator",
    "phase_diagram_grid", "predict_order_parameter", "psrp_gap",
    "scan_exponents", "sweep_coupling", "transformed_hamiltonian", "xsrp_gap",
    "__version__",
]
