import math
from dataclasses import replace

import numpy as np
import pytest

from ioncavity.errors import GatePreconditionError, ValidationError, ZeroCouplingError
from ioncavity.gates import (
    QUBIT_INPUTS,
    GateKind,
    GateSpec,
    PulseProgram,
    compile_gate,
    program_duration,
    qubit_ket,
    qubit_matrix,
    run_program,
    timing_sweep,
    trace_program,
    truth_table,
)
from ioncavity.hilbert import PhysicalParams, SystemConfig, all_labels, basis_state

DEFAULTS = PhysicalParams()
S = 1 / math.sqrt(2)

# printed gate tables over (a, b) = (photon, phonon), ion in |g>
CNOT_AB_TABLE = {(1, 0): {(1, 1): 1}, (0, 1): {(0, 1): 1}, (1, 1): {(1, 0): 1}, (0, 0): {(0, 0): 1}}
CNOT_BA_TABLE = {(1, 0): {(1, 0): 1}, (0, 1): {(1, 1): 1j}, (1, 1): {(0, 1): 1j}, (0, 0): {(0, 0): 1}}
H_A_TABLE = {(1, 0): {(0, 0): S, (1, 0): -S}, (0, 0): {(0, 0): S, (1, 0): S}}


def table_deviation(spec, table, config=None):
    config = SystemConfig() if config is None else config
    worst = 0.0
    for inputs, out in truth_table(spec, config):
        if inputs not in table:
            continue
        want = sum(amp * qubit_ket(config, a, b).amplitudes for (a, b), amp in table[inputs].items())
        worst = max(worst, float(np.max(np.abs(out.amplitudes - want))))
    return worst


@pytest.mark.parametrize(
    "kind, cases, thetas",
    [
        (GateKind.CNOT_AB, (4, 7, 4), (1, 3, 1)),
        (GateKind.CNOT_BA, (4, 2, 4), (3, 3, 1)),
        (GateKind.H_A, (7, 1, 7), (1, 3.5, 1)),
        (GateKind.H_B, (2, 1, 2), (1, 3.5, 1)),
    ],
)
def test_sequences(kind, cases, thetas):
    program = compile_gate(GateSpec(kind, trap=1))
    assert tuple(p.case_id for p in program.pulses) == cases
    assert tuple(p.theta for p in program.pulses) == pytest.approx(tuple(t * math.pi / 2 for t in thetas))
    assert all(p.trap == 1 for p in program.pulses)


def test_swap_is_three_cnots():
    swap = compile_gate(GateSpec(GateKind.SWAP_AB)).pulses
    ab = compile_gate(GateSpec(GateKind.CNOT_AB)).pulses
    ba = compile_gate(GateSpec(GateKind.CNOT_BA)).pulses
    assert swap == ab + ba + ab and len(swap) == 9


def test_primitive_zero_angle_identity():
    program = compile_gate(GateSpec(GateKind.PRIMITIVE, case_id=2, theta=0.0))
    assert len(program.pulses) == 1
    state = qubit_ket(SystemConfig(), 1, 1)
    assert np.array_equal(run_program(state, program).amplitudes, state.amplitudes)
    with pytest.raises(ValidationError):
        GateSpec(GateKind.PRIMITIVE, case_id=2)


@pytest.mark.parametrize(
    "kind, table", [(GateKind.CNOT_AB, CNOT_AB_TABLE), (GateKind.CNOT_BA, CNOT_BA_TABLE), (GateKind.H_A, H_A_TABLE)]
)
def test_printed_tables(kind, table):
    assert table_deviation(GateSpec(kind), table) <= 1e-10


def test_h_b_against_oracle():
    # no printed table: compare the two execution routes
    analytic = qubit_matrix(GateSpec(GateKind.H_B))
    oracle = qubit_matrix(GateSpec(GateKind.H_B), method="expm")
    assert np.max(np.abs(analytic - oracle)) <= 1e-10
    assert np.allclose(np.abs(analytic), S * np.kron(np.eye(2), np.ones((2, 2))))


@pytest.mark.parametrize("kind", list(GateKind)[:5])
@pytest.mark.parametrize("config", [SystemConfig(1, 2, 2), SystemConfig(1, 5, 5), SystemConfig(2, 3, 3)])
def test_qubit_matrices_unitary(kind, config):
    m = qubit_matrix(GateSpec(kind), config)
    assert np.max(np.abs(m.conj().T @ m - np.eye(4))) <= 1e-10


def test_squares():
    ab = qubit_matrix(GateSpec(GateKind.CNOT_AB))
    assert np.allclose(ab @ ab, np.eye(4), atol=1e-10)
    ha = qubit_matrix(GateSpec(GateKind.H_A))
    assert np.allclose(ha @ ha, np.eye(4), atol=1e-10)
    ba = qubit_matrix(GateSpec(GateKind.CNOT_BA))
    assert np.allclose(ba @ ba, np.diag([1, -1, 1, -1]), atol=1e-10)


def test_cnot_ab_twice_by_composition():
    program = compile_gate(GateSpec(GateKind.CNOT_AB))
    for a, b in QUBIT_INPUTS:
        start = qubit_ket(SystemConfig(), a, b)
        twice = run_program(run_program(start, program), program)
        assert np.allclose(twice.amplitudes, start.amplitudes, atol=1e-10)


def test_swap_against_oracle_route():
    analytic = qubit_matrix(GateSpec(GateKind.SWAP_AB))
    oracle = qubit_matrix(GateSpec(GateKind.SWAP_AB), method="expm")
    assert np.max(np.abs(analytic - oracle)) <= 1e-10
    # occupations are exchanged
    assert np.allclose(np.abs(analytic), np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]))


@pytest.mark.parametrize("kind", list(GateKind)[:5])
def test_occupation_stays_low(kind):
    config = SystemConfig()
    labels = all_labels(config)
    for a, b in QUBIT_INPUTS:
        for state in trace_program(qubit_ket(config, a, b), compile_gate(GateSpec(kind))):
            for index in np.flatnonzero(np.abs(state.amplitudes) > 1e-12):
                assert labels[index].photon <= 2 and labels[index].phonon[0] <= 2


def test_ground_precondition():
    excited = basis_state(SystemConfig(), "e,0;a=0")
    with pytest.raises(GatePreconditionError):
        run_program(excited, compile_gate(GateSpec(GateKind.CNOT_AB)))


def test_unknown_gate_name():
    with pytest.raises(ValidationError, match="unknown gate"):
        GateSpec.named("toffoli")


def test_program_json_round_trip():
    program = compile_gate(GateSpec(GateKind.SWAP_AB, trap=1))
    back = PulseProgram.from_json(program.to_json(), program.label)
    assert back == program
    with pytest.raises(ValidationError):
        PulseProgram.from_json('{"case": 1}')


# --- timing --------------------------------------------------------------------


def test_durations_at_default_point():
    t = {k: program_duration(compile_gate(GateSpec(k)), DEFAULTS).total for k in GateKind if k.name != "PRIMITIVE"}
    assert t[GateKind.CNOT_AB] == pytest.approx(1.5e-7, rel=0.05)
    assert t[GateKind.CNOT_BA] == pytest.approx(7.8e-6, rel=0.02)
    assert t[GateKind.H_B] == pytest.approx(6.8e-6, rel=0.02)
    # sequence formula for the photon Hadamard
    assert t[GateKind.H_A] == pytest.approx(2 * (math.pi / 2) / DEFAULTS.Omega_prime + (7 * math.pi / 4) / DEFAULTS.G_cap)
    assert t[GateKind.H_A] == pytest.approx(1.77e-6, rel=0.01)


def test_report_additive_and_delay():
    report = program_duration(compile_gate(GateSpec(GateKind.SWAP_AB)), DEFAULTS)
    assert report.total == sum(s for _, s in report.per_pulse)
    assert all(s >= 0 for _, s in report.per_pulse)
    delayed = program_duration(compile_gate(GateSpec(GateKind.CNOT_AB)), DEFAULTS, delay=1e-6)
    assert delayed.total == pytest.approx(program_duration(compile_gate(GateSpec(GateKind.CNOT_AB)), DEFAULTS).total + 2e-6)
    assert program_duration(PulseProgram(()), DEFAULTS).total == 0


def test_case2_pulse_dominates_cnot_ba():
    report = program_duration(compile_gate(GateSpec(GateKind.CNOT_BA)), DEFAULTS)
    sideband = report.per_pulse[1][1]
    assert sideband == pytest.approx((3 * math.pi / 2) / DEFAULTS.W)
    assert sideband == pytest.approx(7.5e-6, rel=0.01)
    assert sideband / report.total > 0.95


def test_zero_coupling_names_pulse():
    with pytest.raises(ZeroCouplingError, match="pulse 1"):
        program_duration(compile_gate(GateSpec(GateKind.CNOT_AB)), PhysicalParams(phi=0.0))


def test_doubling_g_halves_cnot_ab():
    base = program_duration(compile_gate(GateSpec(GateKind.CNOT_AB)), DEFAULTS).total
    doubled = program_duration(compile_gate(GateSpec(GateKind.CNOT_AB)), replace(DEFAULTS, g=2 * DEFAULTS.g)).total
    assert doubled == pytest.approx(base / 2, rel=1e-14)


@pytest.mark.parametrize("axis, gates", [("g", ["cnot_ab", "cnot_ba", "h_a"]), ("G", ["cnot_ba", "h_a", "h_b"])])
def test_sweep_monotone(axis, gates):
    unit = DEFAULTS.g if axis == "g" else DEFAULTS.G_cap
    values = [unit * x for x in (0.25, 0.5, 1, 2, 4)]
    rows = timing_sweep(gates, DEFAULTS, axis, values)
    assert [r[0] for r in rows] == [v for v in values for _ in gates]
    for gate in gates:
        series = [r[2] for r in rows if r[1] == gate.upper()]
        assert all(b < a for a, b in zip(series, series[1:]))


def test_fig1_ordering_at_default_point():
    rows = timing_sweep(["cnot_ab", "cnot_ba", "h_a"], DEFAULTS, "g", [DEFAULTS.g])
    seconds = {name: s for _, name, s in rows}
    assert seconds["CNOT_BA"] > seconds["H_A"] > seconds["CNOT_AB"]


def test_sweep_rejects_bad_axis_and_values():
    with pytest.raises(ValidationError):
        timing_sweep(["cnot_ab"], DEFAULTS, "nu", [1.0])
    with pytest.raises(ValidationError):
        timing_sweep(["cnot_ab"], DEFAULTS, "g", [0.0])
