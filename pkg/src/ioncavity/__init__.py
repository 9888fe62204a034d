"""Trapped ions coupled to a shared cavity mode: pulse propagators, bosonic
qubit gates, two-trap protocols and cavity-decay fidelity."""

__version__ = "0.1.0"

from .errors import (
    GatePreconditionError,
    OutOfRangeError,
    StepSizeError,
    TruncationRiskError,
    ValidationError,
    ZeroCouplingError,
)
from .hilbert import PhysicalParams, PureState, SystemConfig, basis_state, parse_label, superposition
from .propagators import Pulse, analytic_propagate, expm_propagate
from .gates import GateKind, GateSpec, PulseProgram, compile_gate, run_program

__all__ = [
    "GateKind", "GatePreconditionError", "GateSpec", "OutOfRangeError", "PhysicalParams",
    "Pulse", "PulseProgram", "PureState", "StepSizeError", "SystemConfig", "TruncationRiskError",
    "ValidationError", "ZeroCouplingError", "analytic_propagate", "basis_state", "compile_gate",
    "expm_propagate", "parse_label", "run_program", "superposition",
]
