"""Entanglement dynamics of a two-mode cavity driven by a pumped
double-Lambda atomic medium.

Pipeline: pump steady state -> gain coefficients -> 13-moment dynamics and
witness, with closed-form (beam-splitter / amplifier) references and a
truncated-Fock-space master-equation integrator as independent oracles.
"""

from .params import PumpParams, SystemParams
from .pump import (DegenerateDenominator, DiscrepancyReport, PumpSteadyState,
                   SingularSystem, pump_steady_state_closed_form,
                   pump_steady_state_numeric, reconcile_steady_paths)
from .coefficients import (DegenerateD, DriftMatrix, GainCoefficients,
                           RegimeTag, classify_regime, drift_matrix,
                           gain_coefficients)
from .moments import (MomentState, NonConverged, Overflow, WitnessSample,
                      entanglement_witness, initial_moments_coherent,
                      initial_moments_fock, integrate, moment_derivative)
from .su2 import (FockAmplitudes, SU2Params, entanglement_condition,
                  resonant_witness_fock, su2_coherent_evolution,
                  su2_state_0N, su2_witness_fock)
from .fock import (TruncationLeak, TwoModeDensityMatrix, coherent_density,
                   evolve_density, fock_density, liouvillian_apply,
                   moments_from_density)

__version__ = "0.1.0"

__all__ = [
    "PumpParams", "SystemParams",
    "PumpSteadyState", "DiscrepancyReport",
    "DegenerateDenominator", "SingularSystem",
    "pump_steady_state_closed_form", "pump_steady_state_numeric",
    "reconcile_steady_paths",
    "DriftMatrix", "GainCoefficients", "RegimeTag", "DegenerateD",
    "drift_matrix", "gain_coefficients", "classify_regime",
    "MomentState", "WitnessSample", "NonConverged", "Overflow",
    "initial_moments_fock", "initial_moments_coherent",
    "moment_derivative", "integrate", "entanglement_witness",
    "SU2Params", "FockAmplitudes", "su2_state_0N",
    "su2_coherent_evolution", "su2_witness_fock",
    "entanglement_condition", "resonant_witness_fock",
    "TwoModeDensityMatrix", "TruncationLeak",
    "fock_density", "coherent_density", "liouvillian_apply",
    "evolve_density", "moments_from_density",
]
