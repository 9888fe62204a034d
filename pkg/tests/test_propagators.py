import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ioncavity.errors import OutOfRangeError, StepSizeError, TruncationRiskError, ValidationError
from ioncavity.hilbert import PhysicalParams, PureState, SystemConfig, all_labels, basis_state
from ioncavity.propagators import (
    CASES,
    DerivedCouplings,
    Pulse,
    analytic_propagate,
    case_generator,
    case_hamiltonian,
    coupling_rate,
    expm_propagate,
    expm_unitary,
    free_frame,
    full_hamiltonian_evolve,
    lab_propagator,
    rwa_deviation,
    rwa_regime,
)

DEFAULTS = PhysicalParams()
CFG = SystemConfig(1, 3, 3)


def random_state(config, rng, max_quanta=None):
    """Random normalized state; with ``max_quanta`` only low Fock levels are
    populated so no pulse can reach the cutoff."""
    amps = rng.normal(size=config.dimension) + 1j * rng.normal(size=config.dimension)
    if max_quanta is not None:
        for i, label in enumerate(all_labels(config)):
            if label.photon > max_quanta or any(n > max_quanta for n in label.phonon):
                amps[i] = 0
    return PureState(config, amps / np.linalg.norm(amps))


def test_derived_couplings():
    c = DerivedCouplings.from_params(DEFAULTS)
    assert c.Omega == pytest.approx(2.665e7, rel=1e-3)
    assert c.W == pytest.approx(0.2 * 2 * math.pi * 5e5)
    assert c.Omega_prime == pytest.approx(2 * math.pi * 3e7 * math.sin(math.pi / 4))
    assert coupling_rate(7, PhysicalParams(phi=0.0)) == 0
    assert coupling_rate(4, PhysicalParams(phi=math.pi / 2)) == pytest.approx(0, abs=1e-6)
    with pytest.raises(OutOfRangeError):
        coupling_rate(8, DEFAULTS)


@pytest.mark.parametrize("case_id", CASES)
def test_hamiltonians_hermitian(case_id):
    h = case_hamiltonian(case_id, DEFAULTS, SystemConfig(2, 2, 2), trap=1)
    assert np.max(np.abs(h - h.conj().T)) <= 1e-14 * max(1.0, np.max(np.abs(h)))


def test_case2_matrix_element_from_kron():
    # independent build: kron(ion, phonon, photon) at N_b = 2
    config = SystemConfig(1, 2, 1)
    b = np.diag(np.sqrt([1.0, 2.0]), 1)
    sp = np.array([[0, 0], [1, 0]])  # |e><g| with g=0, e=1
    i_a = np.eye(2)
    expected = 1j * DEFAULTS.W * (np.kron(np.kron(sp, b), i_a) - np.kron(np.kron(sp.T, b.T), i_a))
    h = case_hamiltonian(2, DEFAULTS, config)
    assert np.allclose(h, expected)
    e0 = basis_state(config, "e,0;a=0").amplitudes
    g1 = basis_state(config, "g,1;a=0").amplitudes
    assert np.vdot(e0, h @ g1) == pytest.approx(1j * DEFAULTS.W)


def test_case7_ladder():
    h = case_hamiltonian(7, DEFAULTS, CFG)
    out = h @ basis_state(CFG, "e,0;a=0").amplitudes
    assert np.allclose(out, DEFAULTS.Omega_prime * basis_state(CFG, "g,0;a=1").amplitudes)


def test_case4_first_cnot_arrow():
    out = analytic_propagate(basis_state(CFG, "g,1;a=1"), Pulse(4, 0, math.pi / 2))
    assert np.allclose(out.amplitudes, -1j * basis_state(CFG, "e,0;a=0").amplitudes, atol=1e-15)


def test_case1_pi_flips_sign():
    out = expm_propagate(basis_state(CFG, "g,2;a=1"), 1, math.pi)
    assert out.amplitude("g,2;a=1") == pytest.approx(-1, abs=1e-12)


def test_case7_printed_form():
    theta = 0.37
    for m in range(3):
        out = analytic_propagate(basis_state(CFG, f"e,0;a={m}"), Pulse(7, 0, theta))
        k = math.sqrt(m + 1)
        assert out.amplitude(f"e,0;a={m}") == pytest.approx(math.cos(k * theta))
        assert out.amplitude(f"g,0;a={m + 1}") == pytest.approx(-1j * math.sin(k * theta))


def test_case3_against_oracle():
    start = basis_state(CFG, "g,0;a=0")
    fast = analytic_propagate(start, Pulse(3, 0, math.pi / 2))
    slow = expm_propagate(start, 3, math.pi / 2)
    assert np.max(np.abs(fast.amplitudes - slow.amplitudes)) <= 1e-9
    assert abs(fast.amplitude("e,1;a=0")) == pytest.approx(1)


@pytest.mark.parametrize("case_id", CASES)
def test_zero_angle_is_identity(case_id):
    state = random_state(CFG, np.random.default_rng(case_id), max_quanta=1)
    assert np.array_equal(analytic_propagate(state, Pulse(case_id)).amplitudes, state.amplitudes)
    assert np.allclose(expm_unitary(case_id, 0.0, CFG), np.eye(CFG.dimension))


def test_randomized_oracle_agreement():
    rng = np.random.default_rng(20240611)
    config = SystemConfig(2, 3, 3)
    worst = 0.0
    for trial in range(140):
        case_id = CASES[trial % 7]
        trap = int(rng.integers(2))
        theta = float(rng.uniform(0, 4 * math.pi))
        state = random_state(config, rng, max_quanta=2)
        fast = analytic_propagate(state, Pulse(case_id, trap, theta))
        slow = expm_propagate(state, case_id, theta, trap=trap)
        worst = max(worst, float(np.max(np.abs(fast.amplitudes - slow.amplitudes))))
    assert worst <= 1e-9


@given(
    case_id=st.sampled_from(CASES),
    t1=st.floats(0, 2 * math.pi),
    t2=st.floats(0, 2 * math.pi),
    seed=st.integers(0, 2**32 - 1),
)
@settings(max_examples=50, deadline=None)
def test_composition_and_unitarity(case_id, t1, t2, seed):
    state = random_state(CFG, np.random.default_rng(seed), max_quanta=2)
    once = analytic_propagate(state, Pulse(case_id, 0, t1 + t2))
    twice = analytic_propagate(analytic_propagate(state, Pulse(case_id, 0, t1)), Pulse(case_id, 0, t2))
    assert np.max(np.abs(once.amplitudes - twice.amplitudes)) <= 1e-10
    assert once.norm() == pytest.approx(1, abs=1e-12)


def test_case4_support_moves_both_modes_together():
    u = expm_unitary(4, 0.9, CFG)
    labels = all_labels(CFG)
    for j, src in enumerate(labels):
        for i in np.flatnonzero(np.abs(u[:, j]) > 1e-12):
            dst = labels[i]
            dm, dn = dst.photon - src.photon, dst.phonon[0] - src.phonon[0]
            assert dm == dn
            assert (dm != 0) == (dst.internal != src.internal)


def test_truncation_guard():
    config = SystemConfig(1, 2, 2)
    top = basis_state(config, "g,0;a=2")
    # case 7 only lowers the photon from |g>, so the top level is safe here
    analytic_propagate(top, Pulse(7, 0, 1.0))
    with pytest.raises(TruncationRiskError):
        analytic_propagate(basis_state(config, "e,0;a=2"), Pulse(7, 0, 1.0))
    with pytest.raises(TruncationRiskError):
        expm_propagate(basis_state(config, "g,2;a=0"), 3, 1.0)
    # a zero-angle pulse cannot leak
    analytic_propagate(basis_state(config, "e,0;a=2"), Pulse(7, 0, 0.0))


@pytest.mark.parametrize("bad", [{"case_id": 0}, {"case_id": 1, "theta": -1.0}, {"case_id": 1, "trap": -1}])
def test_pulse_validation(bad):
    with pytest.raises((OutOfRangeError, ValidationError)):
        Pulse(**bad)


def test_pulse_record_round_trip():
    p = Pulse(5, 1, 2.5)
    assert Pulse.from_dict(p.to_dict()) == p
    with pytest.raises(ValidationError):
        Pulse.from_dict({"case": 1, "theta": 0.0})


def test_generator_cached_and_read_only():
    h = case_generator(4, CFG, 0)
    assert case_generator(4, CFG, 0) is h
    with pytest.raises(ValueError):
        h[0, 0] = 1


# --- lab frame -------------------------------------------------------------


def test_lab_zero_duration_identity():
    assert np.allclose(lab_propagator(DEFAULTS, SystemConfig(1, 1, 1), 0.0, 1e-9), np.eye(8))


def test_lab_free_evolution_only_phases():
    config = SystemConfig(1, 2, 2)
    params = PhysicalParams(omega0=3.0, omega_c=1.5, nu=1.0, g=0.0, G_cap=0.0)
    state = random_state(config, np.random.default_rng(3))
    t = 2.7
    out = full_hamiltonian_evolve(state, params, None, t, 1e-3)
    # each basis amplitude only picks up exp(-iEt)
    assert np.allclose(out.amplitudes, free_frame(params, config, t) * state.amplitudes, atol=1e-9)


def test_lab_step_too_large():
    params = rwa_regime(7, 0.5)
    with pytest.raises(StepSizeError):
        full_hamiltonian_evolve(basis_state(SystemConfig(1, 1, 1), "e,0;a=0"), params, None, 10.0, 1.0)


def test_rwa_zero_coupling():
    params = rwa_regime(7, 1e-3)
    assert rwa_deviation(7, params, SystemConfig(1, 1, 1), 0.0, 1e-2) == 0


def test_rwa_requires_resonance():
    with pytest.raises(ValidationError):
        rwa_deviation(7, PhysicalParams(omega0=3.0, nu=1.0, omega_c=2.0), SystemConfig(1, 1, 1), 1.0, 1e-2)


def test_rwa_deviation_shrinks_with_coupling():
    config = SystemConfig(1, 2, 2)
    devs = [rwa_deviation(7, rwa_regime(7, s), config, math.pi / 2, 5e-4) for s in (1e-2, 1e-3, 1e-4)]
    assert devs[0] > devs[1] > devs[2]
    assert devs[-1] <= 1e-2
