"""Cavity photon loss during gate pulses.

The master equation is the zero-temperature damped cavity,

    drho/dt = -i[H, rho] + kappa (a rho a^+ - {a^+ a, rho} / 2),

with ``T_d = 1/kappa``.  By default only the last pulse of CNOT_BA (the
closing ``R4(pi/2)``) runs under decay; earlier pulses stay unitary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import StepSizeError, ValidationError
from .gates import GateKind, GateSpec, PulseProgram, compile_gate, program_duration, qubit_ket, run_program
from .hilbert import PhysicalParams, PureState, SystemConfig, build_operator
from .propagators import analytic_propagate, case_hamiltonian, coupling_rate

TRACE_TOL = 1e-8
HERMITIAN_TOL = 1e-10
POSITIVITY_TOL = 1e-9
DEFAULT_STEPS_PER_PULSE = 400


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    config: SystemConfig
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        dim = self.config.dimension
        if rho.shape != (dim, dim):
            raise ValueError(f"density matrix has shape {rho.shape}, expected ({dim}, {dim})")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))

    def min_eigenvalue(self) -> float:
        hermitian = (self.entries + self.entries.conj().T) / 2
        return float(np.linalg.eigvalsh(hermitian)[0])

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def expectation(self, state: PureState) -> float:
        """``<psi| rho |psi>``."""
        return float(np.real(np.vdot(state.amplitudes, self.entries @ state.amplitudes)))


@dataclass(frozen=True)
class DecaySpec:
    kappa: float
    decay_window: tuple[int, ...] | None = None  # pulse indices; None = last pulse only

    def __post_init__(self):
        if not (math.isfinite(self.kappa) and self.kappa >= 0):
            raise ValidationError(f"kappa must be finite and >= 0, got {self.kappa!r}")

    def window(self, program: PulseProgram) -> tuple[int, ...]:
        count = len(program.pulses)
        if self.decay_window is None:
            return (count - 1,) if count else ()
        for index in self.decay_window:
            if not 0 <= index < count:
                raise ValidationError(f"decay window index {index} outside program of {count} pulses")
        return tuple(sorted(set(self.decay_window)))


def to_density(state: PureState) -> DensityMatrix:
    psi = state.amplitudes
    return DensityMatrix(state.config, np.outer(psi, psi.conj()))


def _check(rho: np.ndarray, trace0: complex, where: str) -> None:
    drift = abs(np.trace(rho) - trace0)
    if drift > TRACE_TOL:
        raise StepSizeError(f"trace drift {drift:.3g} at {where} exceeds {TRACE_TOL}; reduce dt")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > HERMITIAN_TOL:
        raise StepSizeError(f"hermiticity error {herm:.3g} at {where} exceeds {HERMITIAN_TOL}; reduce dt")


def _reachable(rho: np.ndarray, operators) -> np.ndarray:
    """Basis indices connected to the support of ``rho`` through the nonzero
    pattern of the operators (and their adjoints)."""
    links = np.zeros(rho.shape, dtype=bool)
    for op in operators:
        links |= (op != 0) | (op.conj().T != 0)
    seen = np.any(rho != 0, axis=0) | np.any(rho != 0, axis=1)
    while True:
        grown = seen | np.any(links[:, seen], axis=1)
        if np.array_equal(grown, seen):
            return np.flatnonzero(seen)
        seen = grown


def lindblad_evolve(
    rho: DensityMatrix, hamiltonian: np.ndarray, kappa: float, duration: float, dt: float
) -> DensityMatrix:
    """Fixed-step RK4 over ``duration``; the step is shrunk to divide it evenly."""
    if not dt > 0:
        raise ValidationError(f"dt must be > 0, got {dt!r}")
    if not duration >= 0:
        raise ValidationError(f"duration must be >= 0, got {duration!r}")
    if kappa < 0:
        raise ValidationError(f"kappa must be >= 0, got {kappa!r}")
    config = rho.config
    a = build_operator(config, "a")
    ad = a.conj().T
    number = ad @ a
    # fold the anticommutator into a non-Hermitian effective Hamiltonian
    h_eff = np.asarray(hamiltonian) - 0.5j * kappa * number
    h_eff_dag = h_eff.conj().T

    # integrate only on the basis states the dynamics can reach; the result is
    # identical, the matrices are much smaller
    keep = _reachable(rho.entries, (h_eff, a))
    full = rho.entries
    h_eff, h_eff_dag = h_eff[np.ix_(keep, keep)], h_eff_dag[np.ix_(keep, keep)]
    a, ad = a[np.ix_(keep, keep)], ad[np.ix_(keep, keep)]

    def rhs(r):
        return -1j * (h_eff @ r - r @ h_eff_dag) + kappa * (a @ r @ ad)

    state = full[np.ix_(keep, keep)].copy()
    trace0 = np.trace(state)
    steps = max(1, math.ceil(duration / dt)) if duration > 0 else 0
    h = duration / steps if steps else 0.0
    for step in range(steps):
        k1 = rhs(state)
        k2 = rhs(state + h / 2 * k1)
        k3 = rhs(state + h / 2 * k2)
        k4 = rhs(state + h * k3)
        state = state + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        _check(state, trace0, f"step {step + 1}/{steps}")
    entries = np.zeros_like(full)
    entries[np.ix_(keep, keep)] = state
    out = DensityMatrix(config, entries)
    if out.min_eigenvalue() < -POSITIVITY_TOL:
        raise StepSizeError(f"density matrix lost positivity ({out.min_eigenvalue():.3g}); reduce dt")
    return out


def run_program_open(
    state: PureState,
    program: PulseProgram,
    params: PhysicalParams,
    decay: DecaySpec,
    dt: float | None = None,
) -> DensityMatrix:
    """Unitary pulses outside the decay window, Lindblad pulses inside it.

    Pulses before the first decaying one act on the ket; after that the
    density matrix is carried through (unitary pulses as ``U rho U^+``).
    """
    window = set(decay.window(program))
    ket: PureState | None = state
    rho: DensityMatrix | None = None
    for index, pulse in enumerate(program.pulses):
        rate = coupling_rate(pulse.case_id, params)
        duration = pulse.theta / rate if pulse.theta else 0.0
        h = case_hamiltonian(pulse.case_id, params, state.config, pulse.trap)
        if index in window:
            rho = to_density(ket) if rho is None else rho
            step = dt if dt is not None else (duration / DEFAULT_STEPS_PER_PULSE or 1.0)
            rho = lindblad_evolve(rho, h, decay.kappa, duration, step)
        elif rho is None:
            ket = analytic_propagate(ket, pulse)
        else:
            evals, evecs = np.linalg.eigh(h)
            u = (evecs * np.exp(-1j * duration * evals)) @ evecs.conj().T
            rho = DensityMatrix(rho.config, u @ rho.entries @ u.conj().T)
    return to_density(ket) if rho is None else rho


CNOT_BA = GateSpec(GateKind.CNOT_BA)
QUBIT_INPUTS = ((0, 0), (0, 1), (1, 0), (1, 1))


def cnot_ba_fidelity(
    params: PhysicalParams,
    kappa: float,
    input_ket: tuple[int, int] | None = None,
    average: bool = False,
    config: SystemConfig | None = None,
    dt: float | None = None,
    decay_window: tuple[int, ...] | None = None,
) -> float:
    """State fidelity of CNOT_BA under cavity decay.

    ``input_ket`` is the ``(photon, phonon)`` computational input; with
    ``average`` the fidelity is the mean over all four inputs.
    """
    config = SystemConfig() if config is None else config
    if average == (input_ket is not None):
        raise ValidationError("pass exactly one of input_ket or average=True")
    program = compile_gate(CNOT_BA)
    decay = DecaySpec(kappa, decay_window)
    inputs = QUBIT_INPUTS if average else (input_ket,)
    values = []
    for a, b in inputs:
        start = qubit_ket(config, a, b)
        ideal = run_program(start, program)
        rho = run_program_open(start, program, params, decay, dt)
        values.append(rho.expectation(ideal))
    return float(np.mean(values))


def implementation_time(params: PhysicalParams) -> float:
    return program_duration(compile_gate(CNOT_BA), params).total


def fidelity_curve(
    params: PhysicalParams,
    ratios: Sequence[float],
    config: SystemConfig | None = None,
    dt: float | None = None,
    decay_window: tuple[int, ...] | None = None,
    average: bool = True,
    input_ket: tuple[int, int] | None = None,
) -> list[tuple[float, float]]:
    """Rows ``(T_im / T_d, F)`` with ``kappa = ratio / T_im``."""
    t_im = implementation_time(params)
    rows = []
    for ratio in ratios:
        if not ratio > 0:
            raise ValidationError(f"ratios must be positive, got {ratio!r}")
        kappa = ratio / t_im
        f = cnot_ba_fidelity(
            params,
            kappa,
            input_ket=None if average else input_ket,
            average=average,
            config=config,
            dt=dt,
            decay_window=decay_window,
        )
        rows.append((float(ratio), f))
    return rows


def full_window(program: PulseProgram | None = None) -> tuple[int, ...]:
    program = compile_gate(CNOT_BA) if program is None else program
    return tuple(range(len(program.pulses)))
