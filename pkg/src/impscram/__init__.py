"""Random-circuit simulations of a mobile impurity in a chaotic qubit medium.

Operator spreading, backflow order parameters, coherent-information channel
diagnostics, and finite-time scaling analysis for the swap-coupled impurity
model, plus a reproducible Monte-Carlo sweep harness.
"""

__version__ = "1.0.0"

from .clifford import CliffordGate2, conjugate, sample_clifford2
from .geometry import (ModelParams, Schedule, Schedule2D, build_schedule,
                       build_schedule_2d, build_schedule_truncated, sample_drift,
                       touched_sites)
from .hydro import CollapseResult, collapse, erf_profile, estimate_vB, p1_profile
from .info import (InfoRecord, echo_decoder_fidelity, fast_coherent_info, run_info,
                   simulate_teleportation_decoder, teleportation_fidelity)
from .otoc import (Otoc2DRecord, OtocRecord, backflow_B, backflow_record,
                   evolve_pauli, front_positions, medium_density, run_2d)
from .sites import PauliString, SiteId, anticommutes
from .tableau import (StabilizerState, apply_gate, bell_fidelity,
                      coherent_information, init_purified, postselect,
                      subsystem_entropy)

__all__ = [
    "CliffordGate2", "CollapseResult", "InfoRecord", "ModelParams",
    "Otoc2DRecord", "OtocRecord", "PauliString", "Schedule", "Schedule2D",
    "SiteId", "StabilizerState", "anticommutes", "apply_gate", "backflow_B",
    "backflow_record", "bell_fidelity", "build_schedule", "build_schedule_2d",
    "build_schedule_truncated", "coherent_information", "collapse", "conjugate",
    "echo_decoder_fidelity", "erf_profile", "estimate_vB", "evolve_pauli",
    "fast_coherent_info", "front_positions", "init_purified", "medium_density",
    "p1_profile", "postselect", "run_2d", "run_info", "sample_clifford2",
    "sample_drift", "simulate_teleportation_decoder", "subsystem_entropy",
    "teleportation_fidelity", "touched_sites",
]
