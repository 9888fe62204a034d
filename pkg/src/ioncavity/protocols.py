"""Two-trap protocols mediated by the shared cavity photon.

Trap indices are 0-based: ion/phonon ``0`` is the first trap and ``1`` the
second.  Each protocol is a list of stages (single pulses or compiled gates)
run in order.  The result keeps the state after every stage and compares the
final state against the closed-form target ket, phases included.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .gates import GateKind, GateSpec, PulseProgram, compile_gate, program_duration, run_program
from .hilbert import (
    PhysicalParams,
    PureState,
    SystemConfig,
    max_amplitude_difference,
    product_state,
    superposition,
)
from .propagators import Pulse

HALF_PI = math.pi / 2
THREE_HALF_PI = 3 * math.pi / 2
NORM_TOL = 1e-12

TWO_TRAPS = SystemConfig(trap_count=2, phonon_cutoff=5, photon_cutoff=5)


@dataclass(frozen=True)
class AmplitudePair:
    C: complex
    D: complex

    def __post_init__(self):
        norm = abs(self.C) ** 2 + abs(self.D) ** 2
        if abs(norm - 1) > NORM_TOL:
            raise ValidationError(f"|C|^2 + |D|^2 = {norm!r}, expected 1")

    @property
    def vector(self) -> list[complex]:
        return [complex(self.C), complex(self.D)]


@dataclass(frozen=True, eq=False)
class ProtocolResult:
    label: str
    final: PureState
    expected: PureState
    deviation: float
    stages: tuple[PureState, ...]
    duration: float

    def to_dict(self) -> dict:
        def pairs(state):
            return [[float(z.real), float(z.imag)] for z in state.amplitudes]

        return {
            "label": self.label,
            "final_amplitudes": pairs(self.final),
            "expected_amplitudes": pairs(self.expected),
            "deviation": self.deviation,
        }


def _pair(value) -> AmplitudePair:
    if isinstance(value, AmplitudePair):
        return value
    c, d = value
    return AmplitudePair(c, d)


def _config(config: SystemConfig | None) -> SystemConfig:
    config = TWO_TRAPS if config is None else config
    if config.trap_count != 2:
        raise ValidationError("protocols need a two-trap SystemConfig")
    return config


def pulse_stage(case_id: int, trap: int, theta: float) -> PulseProgram:
    return PulseProgram((Pulse(case_id, trap, theta),), f"R{case_id}[{trap}]")


def gate_stage(kind: GateKind, trap: int) -> PulseProgram:
    return compile_gate(GateSpec(kind, trap))


def _run(
    label: str,
    initial: PureState,
    stages: Sequence[PulseProgram],
    expected: PureState,
    params: PhysicalParams | None,
    trap_params: Sequence[PhysicalParams] | None,
    method: str,
) -> ProtocolResult:
    states = [initial]
    for stage in stages:
        states.append(run_program(states[-1], stage, method))
    params = PhysicalParams() if params is None else params
    per_trap = list(trap_params) if trap_params is not None else [params, params]
    duration = 0.0
    for stage in stages:
        for pulse in stage.pulses:
            single = PulseProgram((pulse,), stage.label)
            duration += program_duration(single, per_trap[pulse.trap]).total
    final = states[-1]
    return ProtocolResult(
        label=label,
        final=final,
        expected=expected,
        deviation=max_amplitude_difference(final, expected),
        stages=tuple(states),
        duration=duration,
    )


G, E = [1.0, 0.0], [0.0, 1.0]
VAC = [1.0]


def state_transfer(pair, params=None, config=None, method="analytic", trap_params=None) -> ProtocolResult:
    """Move ``C|g> + D|e>`` from ion 0 to ion 1 through the cavity."""
    pair, config = _pair(pair), _config(config)
    initial = product_state(config, ions=[pair.vector, G], phonons=[VAC, VAC], photon=VAC)
    expected = product_state(config, ions=[G, pair.vector], phonons=[VAC, VAC], photon=VAC)
    stages = [pulse_stage(7, 0, HALF_PI), pulse_stage(7, 1, THREE_HALF_PI)]
    return _run("state_transfer", initial, stages, expected, params, trap_params, method)


def internal_swap(pairs, params=None, config=None, method="analytic", trap_params=None) -> ProtocolResult:
    """Exchange the internal states of the two ions.

    ``pairs`` is ``(C, D, E, F)`` for ion 0 in ``C|g> + D|e>`` and ion 1 in
    ``E|g> + F|e>``.  The motional swap uses the literal three-CNOT S_ab,
    so the single-excitation ``i`` phases of CNOT_BA carry through.
    """
    c, d, e, f = pairs
    first, second = AmplitudePair(c, d), AmplitudePair(e, f)
    config = _config(config)
    initial = product_state(config, ions=[first.vector, second.vector], phonons=[VAC, VAC], photon=VAC)
    expected = product_state(config, ions=[second.vector, first.vector], phonons=[VAC, VAC], photon=VAC)
    swap = GateKind.SWAP_AB
    stages = [
        pulse_stage(2, 0, HALF_PI),
        pulse_stage(2, 1, HALF_PI),
        gate_stage(swap, 0),
        gate_stage(swap, 1),
        gate_stage(swap, 0),
        pulse_stage(2, 0, THREE_HALF_PI),
        pulse_stage(2, 1, THREE_HALF_PI),
    ]
    return _run("internal_swap", initial, stages, expected, params, trap_params, method)


def internal_swap_motional_target(pairs, config=None) -> PureState:
    """Closed-form state after the two opening sideband pulses, or after the
    three swaps with the motional qubits exchanged (pass ``(E, F, C, D)``)."""
    c, d, e, f = pairs
    config = _config(config)
    return product_state(config, ions=[G, G], phonons=[[c, -d], [e, -f]], photon=VAC)


def _ghz_stages() -> list[PulseProgram]:
    return [pulse_stage(7, 0, HALF_PI), gate_stage(GateKind.CNOT_AB, 0), gate_stage(GateKind.CNOT_AB, 1)]


def prepare_ghz(pair, params=None, config=None, method="analytic", trap_params=None) -> ProtocolResult:
    """``|g>|g>(C|000> - iD|111>)`` over (phonon 0, phonon 1, photon)."""
    pair, config = _pair(pair), _config(config)
    initial = product_state(config, ions=[pair.vector, G], phonons=[VAC, VAC], photon=VAC)
    expected = superposition(config, {"g,0;g,0;a=0": pair.C, "g,1;g,1;a=1": -1j * pair.D})
    return _run("ghz", initial, _ghz_stages(), expected, params, trap_params, method)


def bell_from_ghz(
    pair, params=None, config=None, apply_hadamards=False, method="analytic", trap_params=None
) -> ProtocolResult:
    """Disentangle the photon from the GHZ state with CNOT_BA on trap 0,
    optionally followed by H_B on both traps."""
    pair, config = _pair(pair), _config(config)
    c, d = complex(pair.C), complex(pair.D)
    initial = product_state(config, ions=[pair.vector, G], phonons=[VAC, VAC], photon=VAC)
    stages = _ghz_stages() + [gate_stage(GateKind.CNOT_BA, 0)]
    if apply_hadamards:
        stages += [gate_stage(GateKind.H_B, 0), gate_stage(GateKind.H_B, 1)]
        plus, minus = (c - 1j * d) / 2, -(c + 1j * d) / 2
        expected = superposition(
            config,
            {"g,0;g,0;a=0": plus, "g,1;g,1;a=0": plus, "g,0;g,1;a=0": minus, "g,1;g,0;a=0": minus},
        )
        label = "bell_hadamard"
    else:
        expected = superposition(config, {"g,0;g,0;a=0": c, "g,1;g,1;a=0": -1j * d})
        label = "bell"
    return _run(label, initial, stages, expected, params, trap_params, method)


def entangle_internal(pair, params=None, config=None, method="analytic", trap_params=None) -> ProtocolResult:
    """Map the phonon-0 qubit ``C|0> + D|1>`` onto ``C|eg> - D|ge>`` of the ions."""
    pair, config = _pair(pair), _config(config)
    initial = product_state(config, ions=[E, G], phonons=[pair.vector, VAC], photon=VAC)
    expected = superposition(config, {"e,0;g,0;a=0": pair.C, "g,0;e,0;a=0": -pair.D})
    stages = [pulse_stage(6, 0, HALF_PI), gate_stage(GateKind.CNOT_AB, 1), pulse_stage(4, 1, HALF_PI)]
    return _run("entangle_internal", initial, stages, expected, params, trap_params, method)


@dataclass(frozen=True, eq=False)
class SwapTableRow:
    inputs: tuple[int, int]
    final: PureState
    occupations: tuple[int, int, int]
    phase: complex


def motional_cnot_stages() -> list[PulseProgram]:
    """S_ab on trap 0, CNOT_AB on trap 1, S_ab on trap 0: the phonon-0 qubit is
    parked in the cavity, controls phonon 1, and is swapped back."""
    return [
        gate_stage(GateKind.SWAP_AB, 0),
        gate_stage(GateKind.CNOT_AB, 1),
        gate_stage(GateKind.SWAP_AB, 0),
    ]


def motional_cnot_via_swaps(params=None, config=None, method="analytic") -> list[SwapTableRow]:
    """Rows ``|x>_b0 |y>_b1 -> |x>_b0 |y xor x>_b1`` with the photon back in vacuum."""
    config = _config(config)
    rows = []
    for x in (0, 1):
        for y in (0, 1):
            state = superposition(config, {f"g,{x};g,{y};a=0": 1.0})
            for stage in motional_cnot_stages():
                state = run_program(state, stage, method)
            index = int(np.argmax(np.abs(state.amplitudes)))
            amp = complex(state.amplitudes[index])
            tensor_index = np.unravel_index(index, config.shape)
            digits = dict(zip(config.factors, (int(i) for i in tensor_index)))
            occ = (digits["phonon0"], digits["phonon1"], digits["photon"])
            rows.append(SwapTableRow((x, y), state, occ, amp / abs(amp) if abs(amp) else 0j))
    return rows


PROTOCOLS = {
    "transfer": state_transfer,
    "swap": internal_swap,
    "ghz": prepare_ghz,
    "bell": bell_from_ghz,
    "entangle": entangle_internal,
}


def random_pair(rng: np.random.Generator) -> AmplitudePair:
    """Haar-random qubit amplitudes."""
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v = v / np.linalg.norm(v)
    return AmplitudePair(complex(v[0]), complex(v[1]))
