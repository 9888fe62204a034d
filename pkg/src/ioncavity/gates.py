"""Pulse programs for gates on the bosonic qubits.

The photon (``a``) and phonon (``b``) of one trap each hold a qubit in Fock
states {0, 1}; the ion must start in ``|g>``.  Sequences are taken verbatim,
residual phases included (CNOT_BA leaves a factor ``i`` on inputs with
``b = 1``), because downstream protocols consume them unchanged.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import GatePreconditionError, ValidationError, ZeroCouplingError
from .hilbert import PhysicalParams, PureState, SystemConfig, build_operator, product_state
from .propagators import Pulse, analytic_propagate, coupling_rate, expm_propagate

HALF_PI = math.pi / 2
THREE_HALF_PI = 3 * math.pi / 2
SEVEN_QUARTER_PI = 7 * math.pi / 4


class GateKind(enum.Enum):
    CNOT_AB = "cnot_ab"
    CNOT_BA = "cnot_ba"
    H_A = "h_a"
    H_B = "h_b"
    SWAP_AB = "swap_ab"
    PRIMITIVE = "primitive"


NAMED_GATES = frozenset(k.name for k in GateKind if k is not GateKind.PRIMITIVE)


@dataclass(frozen=True)
class GateSpec:
    kind: GateKind
    trap: int = 0
    case_id: int | None = None
    theta: float | None = None

    def __post_init__(self):
        if self.trap < 0:
            raise ValidationError(f"trap must be >= 0, got {self.trap}")
        if self.kind is GateKind.PRIMITIVE and (self.case_id is None or self.theta is None):
            raise ValidationError("PRIMITIVE gates need case_id and theta")

    @classmethod
    def named(cls, name: str, trap: int = 0) -> "GateSpec":
        try:
            return cls(GateKind(name.lower()), trap)
        except ValueError:
            choices = ", ".join(k.value for k in GateKind if k is not GateKind.PRIMITIVE)
            raise ValidationError(f"unknown gate {name!r}; expected one of {choices}") from None


@dataclass(frozen=True)
class PulseProgram:
    pulses: tuple[Pulse, ...]
    label: str = ""

    def __add__(self, other: "PulseProgram") -> "PulseProgram":
        return PulseProgram(self.pulses + other.pulses, f"{self.label}+{other.label}")

    def to_json(self) -> str:
        return json.dumps([p.to_dict() for p in self.pulses])

    @classmethod
    def from_json(cls, text: str, label: str = "") -> "PulseProgram":
        records = json.loads(text)
        if isinstance(records, dict) and "result" in records:
            # the envelope written by ``compile --out``
            label = label or records.get("summary", {}).get("label", "")
            records = records["result"]
        if not isinstance(records, list):
            raise ValidationError("pulse program JSON must be an array")
        return cls(tuple(Pulse.from_dict(r) for r in records), label)


@dataclass(frozen=True)
class TimingReport:
    per_pulse: tuple[tuple[Pulse, float], ...]
    total: float
    delay: float = 0.0


_SEQUENCES = {
    GateKind.CNOT_AB: ((4, HALF_PI), (7, THREE_HALF_PI), (4, HALF_PI)),
    GateKind.CNOT_BA: ((4, THREE_HALF_PI), (2, THREE_HALF_PI), (4, HALF_PI)),
    GateKind.H_A: ((7, HALF_PI), (1, SEVEN_QUARTER_PI), (7, HALF_PI)),
    GateKind.H_B: ((2, HALF_PI), (1, SEVEN_QUARTER_PI), (2, HALF_PI)),
}


def compile_gate(spec: GateSpec) -> PulseProgram:
    if spec.kind is GateKind.PRIMITIVE:
        pulse = Pulse(spec.case_id, spec.trap, spec.theta)
        return PulseProgram((pulse,), f"R{spec.case_id}({spec.theta:g})")
    if spec.kind is GateKind.SWAP_AB:
        ab = compile_gate(GateSpec(GateKind.CNOT_AB, spec.trap)).pulses
        ba = compile_gate(GateSpec(GateKind.CNOT_BA, spec.trap)).pulses
        return PulseProgram(ab + ba + ab, GateKind.SWAP_AB.name)
    pulses = tuple(Pulse(case, spec.trap, theta) for case, theta in _SEQUENCES[spec.kind])
    return PulseProgram(pulses, spec.kind.name)


def _check_ground(state: PureState, program: PulseProgram) -> None:
    for trap in sorted({p.trap for p in program.pulses}):
        excited = build_operator(state.config, "sigma_plus", trap) @ build_operator(
            state.config, "sigma_minus", trap
        )
        population = float(np.real(np.vdot(state.amplitudes, excited @ state.amplitudes)))
        if population > 1e-12:
            raise GatePreconditionError(
                f"{program.label} needs ion {trap} in |g>, found excited population {population:.3g}"
            )


def run_program(state: PureState, program: PulseProgram, method: str = "analytic") -> PureState:
    """Apply pulses left to right.

    ``method="expm"`` replays the same pulses through the matrix-exponential
    oracle.
    """
    if program.label in NAMED_GATES:
        _check_ground(state, program)
    for pulse in program.pulses:
        if method == "analytic":
            state = analytic_propagate(state, pulse)
        elif method == "expm":
            state = expm_propagate(state, pulse.case_id, pulse.theta, trap=pulse.trap)
        else:
            raise ValidationError(f"unknown method {method!r}")
    return state


def trace_program(state: PureState, program: PulseProgram) -> list[PureState]:
    """States after each pulse, starting with the input."""
    states = [state]
    for pulse in program.pulses:
        states.append(analytic_propagate(states[-1], pulse))
    return states


QUBIT_INPUTS = ((0, 0), (0, 1), (1, 0), (1, 1))


def qubit_ket(config: SystemConfig, photon: int, phonon: int, trap: int = 0) -> PureState:
    """Ion(s) in ``|g>``, other phonons in vacuum, photon and target phonon as given."""
    phonons = [[1.0] for _ in range(config.trap_count)]
    phonons[trap] = [0.0] * phonon + [1.0]
    return product_state(
        config,
        ions=[[1.0, 0.0]] * config.trap_count,
        phonons=phonons,
        photon=[0.0] * photon + [1.0],
    )


def truth_table(
    spec: GateSpec, config: SystemConfig | None = None, method: str = "analytic"
) -> list[tuple[tuple[int, int], PureState]]:
    """Rows ``((a, b), output)`` over the four computational inputs ``|ab>``."""
    config = SystemConfig() if config is None else config
    program = compile_gate(spec)
    return [
        ((a, b), run_program(qubit_ket(config, a, b, spec.trap), program, method))
        for a, b in QUBIT_INPUTS
    ]


def qubit_matrix(spec: GateSpec, config: SystemConfig | None = None, method: str = "analytic") -> np.ndarray:
    """4x4 gate matrix on ``{|00>, |01>, |10>, |11>}_ab`` with the ion in ``|g>``."""
    config = SystemConfig() if config is None else config
    rows = truth_table(spec, config, method)
    basis = [qubit_ket(config, a, b, spec.trap).amplitudes for a, b in QUBIT_INPUTS]
    return np.array([[np.vdot(basis[i], out.amplitudes) for (_, out) in rows] for i in range(4)])


def program_duration(program: PulseProgram, params: PhysicalParams, delay: float = 0.0) -> TimingReport:
    """Seconds per pulse (theta / rate) and in total.

    ``delay`` is a fixed retuning pause between adjacent pulses.
    """
    if delay < 0:
        raise ValidationError(f"delay must be >= 0, got {delay}")
    per_pulse = []
    for index, pulse in enumerate(program.pulses):
        rate = coupling_rate(pulse.case_id, params)
        if rate <= 0:
            raise ZeroCouplingError(
                f"pulse {index} ({program.label}: case {pulse.case_id}, theta={pulse.theta:g}) "
                "has zero coupling rate"
            )
        per_pulse.append((pulse, pulse.theta / rate))
    total = sum(seconds for _, seconds in per_pulse)
    if per_pulse and delay:
        total += delay * (len(per_pulse) - 1)
    return TimingReport(tuple(per_pulse), total, delay)


SWEEP_AXES = {"g": "g", "G": "G_cap"}


def timing_sweep(
    gates: Iterable[str | GateSpec],
    params: PhysicalParams,
    axis: str,
    values: Sequence[float],
    delay: float = 0.0,
) -> list[tuple[float, str, float]]:
    """Rows ``(coupling rad/s, gate name, seconds)``, ordered by value then gate."""
    if axis not in SWEEP_AXES:
        raise ValidationError(f"sweep axis must be 'g' or 'G', got {axis!r}")
    specs = [GateSpec.named(g) if isinstance(g, str) else g for g in gates]
    rows = []
    for value in values:
        if not value > 0:
            raise ValidationError(f"sweep values must be positive, got {value!r}")
        swept = replace(params, **{SWEEP_AXES[axis]: float(value)})
        for spec in specs:
            seconds = program_duration(compile_gate(spec), swept, delay).total
            rows.append((float(value), spec.kind.name, seconds))
    return rows
