"""Resonance-case Hamiltonians and their propagators.

Each of the seven rotating-wave cases couples a ground-state ket to exactly
one excited-state ket, so every case propagator is a direct sum of 2x2
rotations.  Pulses are parameterized by the dimensionless angle
``theta = rate * t``; absolute durations live in :mod:`ioncavity.gates`.

Two independent routes are provided:

* :func:`analytic_propagate` walks basis labels and applies the closed-form
  rotations (cases 3 and 5 follow from the same two-level reduction as the
  printed ones).
* :func:`expm_propagate` diagonalizes the case generator matrix.

:func:`full_hamiltonian_evolve` integrates the untransformed time-dependent
Hamiltonian so the rotating-wave reduction itself can be checked.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import hilbert
from .errors import OutOfRangeError, StepSizeError, TruncationRiskError, ValidationError
from .hilbert import BasisLabel, PhysicalParams, PureState, SystemConfig, build_operator

CASES = (1, 2, 3, 4, 5, 6, 7)

# population allowed on a ket whose closed-form partner lies above the cutoff
TRUNCATION_TOL = 1e-10
NORM_DRIFT_TOL = 1e-8


@dataclass(frozen=True)
class Pulse:
    case_id: int
    trap: int = 0
    theta: float = 0.0

    def __post_init__(self):
        if self.case_id not in CASES:
            raise OutOfRangeError(f"case_id must be in 1..7, got {self.case_id!r}")
        if self.trap < 0:
            raise OutOfRangeError(f"trap must be >= 0, got {self.trap}")
        if not (math.isfinite(self.theta) and self.theta >= 0):
            raise ValidationError(f"theta must be finite and >= 0, got {self.theta!r}")

    def to_dict(self) -> dict:
        return {"case": self.case_id, "trap": self.trap, "theta": self.theta}

    @classmethod
    def from_dict(cls, record: dict) -> "Pulse":
        if set(record) != {"case", "trap", "theta"}:
            raise ValidationError(f"pulse record needs keys case, trap, theta; got {sorted(record)}")
        return cls(int(record["case"]), int(record["trap"]), float(record["theta"]))


@dataclass(frozen=True)
class DerivedCouplings:
    W: float
    Omega: float
    Omega_prime: float

    @classmethod
    def from_params(cls, params: PhysicalParams) -> "DerivedCouplings":
        return cls(params.W, params.Omega, params.Omega_prime)


def coupling_rate(case_id: int, params: PhysicalParams) -> float:
    """Rate (rad/s) whose product with time is the pulse angle."""
    if case_id == 1:
        return params.G_cap
    if case_id in (2, 3):
        return params.W
    if case_id in (4, 5, 6):
        return params.Omega
    if case_id == 7:
        return params.Omega_prime
    raise OutOfRangeError(f"case_id must be in 1..7, got {case_id!r}")


# --- matrix route ------------------------------------------------------------


@functools.lru_cache(maxsize=64)
def case_generator(case_id: int, config: SystemConfig, trap: int = 0) -> np.ndarray:
    """Case Hamiltonian divided by its coupling rate."""
    config.check_trap(trap)

    def op(symbol):
        return build_operator(config, symbol, trap)

    a, ad = op("a"), op("a_dag")
    b, bd = op("b"), op("b_dag")
    sp, sm = op("sigma_plus"), op("sigma_minus")
    if case_id == 1:
        h = sp + sm
    elif case_id == 2:
        h = 1j * (b @ sp - bd @ sm)
    elif case_id == 3:
        h = 1j * (bd @ sp - b @ sm)
    elif case_id == 4:
        h = ad @ bd @ sm + a @ b @ sp
    elif case_id == 5:
        h = a @ bd @ sm + ad @ b @ sp
    elif case_id == 6:
        h = a @ bd @ sp + ad @ b @ sm
    elif case_id == 7:
        h = ad @ sm + a @ sp
    else:
        raise OutOfRangeError(f"case_id must be in 1..7, got {case_id!r}")
    h.setflags(write=False)
    return h


def case_hamiltonian(
    case_id: int, params: PhysicalParams, config: SystemConfig, trap: int = 0
) -> np.ndarray:
    return coupling_rate(case_id, params) * case_generator(case_id, config, trap)


@functools.lru_cache(maxsize=64)
def _eigensystem(case_id: int, config: SystemConfig, trap: int):
    h = case_generator(case_id, config, trap)
    if np.max(np.abs(h - h.conj().T)) > 1e-14:
        raise RuntimeError(f"case {case_id} generator is not Hermitian")
    return np.linalg.eigh(h)


def expm_unitary(case_id: int, theta: float, config: SystemConfig, trap: int = 0) -> np.ndarray:
    evals, evecs = _eigensystem(case_id, config, trap)
    return (evecs * np.exp(-1j * theta * evals)) @ evecs.conj().T


def expm_propagate(
    state: PureState, case_id: int, theta: float, config: SystemConfig | None = None, trap: int = 0
) -> PureState:
    config = state.config if config is None else config
    if config != state.config:
        raise ValueError(f"state config {state.config} does not match {config}")
    pulse = Pulse(case_id, trap, theta)
    _check_truncation(state, pulse)
    evals, evecs = _eigensystem(case_id, config, trap)
    # same exponential, applied to the vector without forming the matrix
    out = evecs @ (np.exp(-1j * theta * evals) * (evecs.conj().T @ state.amplitudes))
    return PureState(config, out)


# --- closed-form route -----------------------------------------------------------

# ground-state ket (m photons, n phonons) -> excited partner shift and factor
_G_RULES = {
    1: (0, 0, lambda m, n: 1.0),
    2: (0, -1, lambda m, n: math.sqrt(n)),
    3: (0, +1, lambda m, n: math.sqrt(n + 1)),
    4: (-1, -1, lambda m, n: math.sqrt(m * n)),
    5: (+1, -1, lambda m, n: math.sqrt((m + 1) * n)),
    6: (-1, +1, lambda m, n: math.sqrt(m * (n + 1))),
    7: (-1, 0, lambda m, n: math.sqrt(m)),
}


def _factor(case_id: int, m: int, n: int) -> float:
    if m < 0 or n < 0:
        return 0.0
    return _G_RULES[case_id][2](m, n)


def _with(label: BasisLabel, trap: int, internal: str, photon: int, phonon: int) -> BasisLabel:
    levels = list(label.internal)
    levels[trap] = internal
    phonons = list(label.phonon)
    phonons[trap] = phonon
    return BasisLabel(tuple(levels), tuple(phonons), photon)


def _in_range(config: SystemConfig, photon: int, phonon: int) -> bool:
    return 0 <= photon <= config.photon_cutoff and 0 <= phonon <= config.phonon_cutoff


@functools.lru_cache(maxsize=64)
def _closed_form_blocks(case_id: int, config: SystemConfig, trap: int):
    """Index arrays (ground, excited, factor) for every coupled pair, plus the
    kets whose partner would sit above the cutoff."""
    config.check_trap(trap)
    dm, dn, _ = _G_RULES[case_id]
    ground, excited, factors, orphans = [], [], [], []
    for index, label in enumerate(hilbert.all_labels(config)):
        m, n = label.photon, label.phonon[trap]
        if label.internal[trap] == "g":
            k = _factor(case_id, m, n)
            pm, pn = m + dm, n + dn
            if k == 0.0:
                continue
            if _in_range(config, pm, pn):
                ground.append(index)
                excited.append(hilbert.basis_index(config, _with(label, trap, "e", pm, pn)))
                factors.append(k)
            else:
                orphans.append(index)
        else:
            pm, pn = m - dm, n - dn
            k = _factor(case_id, pm, pn)
            if k != 0.0 and not _in_range(config, pm, pn):
                orphans.append(index)
    return (
        np.array(ground, dtype=int),
        np.array(excited, dtype=int),
        np.array(factors, dtype=float),
        np.array(orphans, dtype=int),
    )


def _check_truncation(state: PureState, pulse: Pulse) -> None:
    state.config.check_trap(pulse.trap)
    if pulse.theta == 0:
        return
    orphans = _closed_form_blocks(pulse.case_id, state.config, pulse.trap)[3]
    if orphans.size == 0:
        return
    at_risk = float(np.sum(np.abs(state.amplitudes[orphans]) ** 2))
    if at_risk > TRUNCATION_TOL:
        raise TruncationRiskError(
            f"case {pulse.case_id} on trap {pulse.trap} would lift population {at_risk:.3g} "
            f"past the cutoff ({state.config}); raise the cutoffs"
        )


def analytic_propagate(state: PureState, pulse: Pulse) -> PureState:
    _check_truncation(state, pulse)
    ground, excited, k, _ = _closed_form_blocks(pulse.case_id, state.config, pulse.trap)
    c = np.cos(k * pulse.theta)
    s = np.sin(k * pulse.theta)
    x_g = state.amplitudes[ground]
    x_e = state.amplitudes[excited]
    out = state.amplitudes.copy()
    if pulse.case_id in (2, 3):
        # sideband cases carry real rotations: |g> gains +sin, |e> loses -sin
        out[ground] = c * x_g - s * x_e
        out[excited] = s * x_g + c * x_e
    else:
        out[ground] = c * x_g - 1j * s * x_e
        out[excited] = -1j * s * x_g + c * x_e
    return PureState(state.config, out)


# --- lab frame ---------------------------------------------------------------------


def _hermitian_function(matrix: np.ndarray, fn) -> np.ndarray:
    evals, evecs = np.linalg.eigh(matrix)
    return (evecs * fn(evals)) @ evecs.conj().T


def _lab_terms(params: PhysicalParams, config: SystemConfig, lamb_dicke_linearized: bool):
    """Static part and the laser operator ``A`` in H(t) = H_s + e^{-iw_L t} A + h.c."""
    static = params.omega_c * build_operator(config, "a_dag") @ build_operator(config, "a")
    laser = np.zeros((config.dimension,) * 2, dtype=complex)
    field_quadrature = build_operator(config, "a") + build_operator(config, "a_dag")
    for trap in range(config.trap_count):
        b = build_operator(config, "b", trap)
        x = b + b.conj().T
        static = static + 0.5 * params.omega0 * build_operator(config, "sigma_z", trap)
        static = static + params.nu * b.conj().T @ b
        displacement = _hermitian_function(x, lambda v: np.exp(1j * params.eta_L * v))
        laser = laser + params.G_cap * build_operator(config, "sigma_plus", trap) @ displacement
        if lamb_dicke_linearized:
            mode = params.eta_c * math.cos(params.phi) * x + math.sin(params.phi) * np.eye(config.dimension)
        else:
            mode = _hermitian_function(x, lambda v: np.sin(params.eta_c * v + params.phi))
        static = static + params.g * build_operator(config, "sigma_x", trap) @ field_quadrature @ mode
    return static, laser


def _rk4_propagator(static, laser, omega_L, t0, span, steps) -> np.ndarray:
    dt = span / steps
    u = np.eye(static.shape[0], dtype=complex)
    laser_dag = laser.conj().T

    def rhs(t, m):
        phase = np.exp(-1j * omega_L * t)
        return -1j * ((static + phase * laser + phase.conjugate() * laser_dag) @ m)

    t = t0
    for _ in range(steps):
        k1 = rhs(t, u)
        k2 = rhs(t + dt / 2, u + dt / 2 * k1)
        k3 = rhs(t + dt / 2, u + dt / 2 * k2)
        k4 = rhs(t + dt, u + dt * k3)
        u = u + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += dt
    return u


def lab_propagator(
    params: PhysicalParams,
    config: SystemConfig,
    duration: float,
    dt: float,
    lamb_dicke_linearized: bool = True,
) -> np.ndarray:
    """Lab-frame propagator over ``[0, duration]`` by fixed-step RK4.

    H(t) is periodic with the laser period (constant when the laser is off),
    so one period is integrated once and raised to the number of whole
    periods; the leftover fraction is integrated directly.
    """
    if not dt > 0:
        raise ValidationError(f"dt must be > 0, got {dt!r}")
    if not duration >= 0:
        raise ValidationError(f"duration must be >= 0, got {duration!r}")
    dim = config.dimension
    if duration == 0:
        return np.eye(dim, dtype=complex)
    static, laser = _lab_terms(params, config, lamb_dicke_linearized)
    if params.G_cap > 0 and params.omega_L != 0:
        period = 2 * math.pi / abs(params.omega_L)
    elif params.nu > 0:
        period = 2 * math.pi / params.nu
    else:
        period = duration
    whole = int(duration // period)
    remainder = duration - whole * period
    u = np.eye(dim, dtype=complex)
    if whole:
        one = _rk4_propagator(static, laser, params.omega_L, 0.0, period, max(1, math.ceil(period / dt)))
        u = np.linalg.matrix_power(one, whole)
    if remainder > 0:
        # H(t) repeats every period, so the tail starts at phase zero
        tail = _rk4_propagator(static, laser, params.omega_L, 0.0, remainder, max(1, math.ceil(remainder / dt)))
        u = tail @ u
    return u


def full_hamiltonian_evolve(
    state: PureState,
    params: PhysicalParams,
    config: SystemConfig | None,
    duration: float,
    dt: float,
    lamb_dicke_linearized: bool = True,
) -> PureState:
    config = state.config if config is None else config
    u = lab_propagator(params, config, duration, dt, lamb_dicke_linearized)
    out = u @ state.amplitudes
    drift = abs(np.linalg.norm(out) - np.linalg.norm(state.amplitudes))
    if drift > NORM_DRIFT_TOL:
        raise StepSizeError(f"norm drift {drift:.3g} exceeds {NORM_DRIFT_TOL}; reduce dt={dt}")
    return PureState(config, out)


def free_frame(params: PhysicalParams, config: SystemConfig, t: float) -> np.ndarray:
    """Diagonal of exp(-i t (w0/2 sz + nu b^+b + wc a^+a))."""
    energies = np.zeros(config.dimension)
    for index, label in enumerate(hilbert.all_labels(config)):
        e = params.omega_c * label.photon
        for level, n in zip(label.internal, label.phonon):
            e += 0.5 * params.omega0 * (1 if level == "e" else -1) + params.nu * n
        energies[index] = e
    return np.exp(-1j * t * energies)


_RESONANCES = {
    1: ("omega_L", lambda p: p.omega0),
    2: ("omega_L", lambda p: p.omega0 - p.nu),
    3: ("omega_L", lambda p: p.omega0 + p.nu),
    4: ("omega_c", lambda p: p.omega0 - p.nu),
    5: ("omega_c", lambda p: p.nu - p.omega0),
    6: ("omega_c", lambda p: p.omega0 + p.nu),
    7: ("omega_c", lambda p: p.omega0),
}


def check_resonance(case_id: int, params: PhysicalParams, rtol: float = 1e-12) -> None:
    name, target = _RESONANCES[case_id]
    actual, wanted = getattr(params, name), target(params)
    scale = max(abs(params.omega0), abs(params.nu), abs(actual), 1.0)
    if abs(actual - wanted) > rtol * scale:
        raise ValidationError(f"case {case_id} needs {name} = {wanted!r}, got {actual!r}")


def low_occupation_labels(config: SystemConfig) -> list[BasisLabel]:
    return [
        label
        for label in hilbert.all_labels(config)
        if label.photon <= 1 and all(n <= 1 for n in label.phonon)
    ]


def rwa_deviation(
    case_id: int,
    params: PhysicalParams,
    config: SystemConfig,
    theta: float,
    dt: float,
    trap: int = 0,
    lamb_dicke_linearized: bool = True,
) -> float:
    """Worst max-amplitude gap between the lab-frame run (moved back to the
    interaction picture) and the closed-form case propagator, over all basis
    kets with at most one quantum per mode."""
    check_resonance(case_id, params)
    rate = coupling_rate(case_id, params)
    duration = theta / rate if theta else 0.0
    u = lab_propagator(params, config, duration, dt, lamb_dicke_linearized)
    back = free_frame(params, config, duration).conj()
    worst = 0.0
    for label in low_occupation_labels(config):
        start = hilbert.basis_state(config, label)
        lab = u @ start.amplitudes
        drift = abs(np.linalg.norm(lab) - 1.0)
        if drift > NORM_DRIFT_TOL:
            raise StepSizeError(f"norm drift {drift:.3g} exceeds {NORM_DRIFT_TOL}; reduce dt={dt}")
        expected = analytic_propagate(start, Pulse(case_id, trap, theta)).amplitudes
        worst = max(worst, float(np.max(np.abs(back * lab - expected))))
    return worst


def rwa_regime(
    case_id: int,
    coupling_over_nu: float,
    eta: float = 0.02,
    omega0_over_nu: float = 3.0,
    phi: float = math.pi / 4,
) -> PhysicalParams:
    """Resonant parameters in units of the trap frequency (nu = 1).

    Cases 1-3 switch the cavity coupling off and drive the laser with
    ``G = coupling_over_nu``; cases 4-7 switch the laser off and set
    ``g = coupling_over_nu``.  The idle mode is parked at zero frequency.
    """
    nu = 1.0
    omega0 = omega0_over_nu * nu
    base = dict(omega0=omega0, nu=nu, eta_c=eta, eta_L=eta, phi=phi, kappa=0.0)
    name, _ = _RESONANCES[case_id]
    if name == "omega_L":
        draft = PhysicalParams(**base, omega_c=0.0, omega_L=0.0, g=0.0, G_cap=coupling_over_nu)
    else:
        draft = PhysicalParams(**base, omega_c=0.0, omega_L=0.0, g=coupling_over_nu, G_cap=0.0)
    return PhysicalParams(**{**draft.__dict__, name: _RESONANCES[case_id][1](draft)})
