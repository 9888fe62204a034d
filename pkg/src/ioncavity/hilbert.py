"""Truncated tensor-product space of ion internal levels, trap phonons and
cavity photons.

Basis ordering is mixed radix with the photon number varying fastest, then
the phonon and internal level of trap 0, then (when present) the phonon and
internal level of trap 1.  Internal levels are coded ``g -> 0`` and
``e -> 1``.  In ``numpy.kron`` terms the factors run, slowest first::

    (ion1, phonon1,) ion0, phonon0, photon

All operators are dense complex matrices; nothing here mutates its inputs.
"""
from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import OutOfRangeError, ValidationError

INTERNAL_LEVELS = ("g", "e")

OPERATOR_SYMBOLS = (
    "identity",
    "a",
    "a_dag",
    "b",
    "b_dag",
    "sigma_plus",
    "sigma_minus",
    "sigma_z",
    "sigma_x",
)


@dataclass(frozen=True)
class SystemConfig:
    trap_count: int = 1
    phonon_cutoff: int = 5
    photon_cutoff: int = 5

    def __post_init__(self):
        if self.trap_count not in (1, 2):
            raise OutOfRangeError(f"trap_count must be 1 or 2, got {self.trap_count!r}")
        for name in ("phonon_cutoff", "photon_cutoff"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise OutOfRangeError(f"{name} must be an integer >= 1, got {value!r}")

    @property
    def factors(self) -> tuple[str, ...]:
        """Tensor factor names, slowest varying first."""
        names: list[str] = []
        for trap in reversed(range(self.trap_count)):
            names += [f"ion{trap}", f"phonon{trap}"]
        names.append("photon")
        return tuple(names)

    @property
    def shape(self) -> tuple[int, ...]:
        dims = {"ion": 2, "phonon": self.phonon_cutoff + 1, "photon": self.photon_cutoff + 1}
        return tuple(dims[name.rstrip("0123456789")] for name in self.factors)

    @property
    def dimension(self) -> int:
        return math.prod(self.shape)

    def axis(self, factor: str) -> int:
        try:
            return self.factors.index(factor)
        except ValueError:
            raise OutOfRangeError(f"unknown factor {factor!r} for {self}") from None

    def check_trap(self, trap: int) -> None:
        if not 0 <= trap < self.trap_count:
            raise OutOfRangeError(f"trap index {trap} out of range for trap_count={self.trap_count}")


@dataclass(frozen=True)
class PhysicalParams:
    """Angular frequencies in rad/s, ``kappa`` in 1/s.

    Coupling defaults are the §IV operating point of the scheme
    (g = 2π·30 MHz, G = 2π·0.5 MHz, η = 0.2, φ = π/4).  The bare
    frequencies ``omega0``, ``omega_c``, ``omega_L`` and ``nu`` only enter
    the lab-frame integrator and default to zero.
    """

    omega0: float = 0.0
    omega_c: float = 0.0
    omega_L: float = 0.0
    nu: float = 0.0
    g: float = 2 * math.pi * 3e7
    G_cap: float = 2 * math.pi * 5e5
    eta_c: float = 0.2
    eta_L: float = 0.2
    phi: float = math.pi / 4
    kappa: float = 0.0

    def __post_init__(self):
        for name in ("g", "G_cap", "nu", "kappa"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValidationError(f"{name} must be finite and >= 0, got {value!r}")
        for name in ("eta_c", "eta_L"):
            value = getattr(self, name)
            if not 0 <= value < 1:
                raise ValidationError(f"{name} must lie in [0, 1), got {value!r}")
        for name in ("omega0", "omega_c", "omega_L", "phi"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")

    @property
    def W(self) -> float:
        return self.G_cap * self.eta_L

    @property
    def Omega(self) -> float:
        return self.eta_c * self.g * math.cos(self.phi)

    @property
    def Omega_prime(self) -> float:
        return self.g * math.sin(self.phi)


@dataclass(frozen=True)
class BasisLabel:
    internal: tuple[str, ...]
    phonon: tuple[int, ...]
    photon: int

    def __str__(self):
        return format_label(self)


def _validate_label(config: SystemConfig, label: BasisLabel) -> None:
    if len(label.internal) != config.trap_count:
        raise OutOfRangeError(
            f"internal has {len(label.internal)} entries, expected trap_count={config.trap_count}"
        )
    if len(label.phonon) != config.trap_count:
        raise OutOfRangeError(
            f"phonon has {len(label.phonon)} entries, expected trap_count={config.trap_count}"
        )
    for trap, level in enumerate(label.internal):
        if level not in INTERNAL_LEVELS:
            raise OutOfRangeError(f"internal[{trap}]={level!r} is not one of {INTERNAL_LEVELS}")
    for trap, n in enumerate(label.phonon):
        if not 0 <= n <= config.phonon_cutoff:
            raise OutOfRangeError(
                f"phonon[{trap}]={n} outside [0, phonon_cutoff={config.phonon_cutoff}]"
            )
    if not 0 <= label.photon <= config.photon_cutoff:
        raise OutOfRangeError(
            f"photon={label.photon} outside [0, photon_cutoff={config.photon_cutoff}]"
        )


def _digits(config: SystemConfig, label: BasisLabel) -> list[int]:
    digits = []
    for name in config.factors:
        if name == "photon":
            digits.append(label.photon)
        elif name.startswith("ion"):
            digits.append(INTERNAL_LEVELS.index(label.internal[int(name[3:])]))
        else:
            digits.append(label.phonon[int(name[6:])])
    return digits


def basis_index(config: SystemConfig, label: BasisLabel) -> int:
    _validate_label(config, label)
    index = 0
    for digit, dim in zip(_digits(config, label), config.shape):
        index = index * dim + digit
    return index


def basis_label(config: SystemConfig, index: int) -> BasisLabel:
    if not 0 <= index < config.dimension:
        raise OutOfRangeError(f"index {index} outside [0, {config.dimension})")
    digits = dict(zip(config.factors, np.unravel_index(index, config.shape)))
    return BasisLabel(
        internal=tuple(INTERNAL_LEVELS[int(digits[f"ion{t}"])] for t in range(config.trap_count)),
        phonon=tuple(int(digits[f"phonon{t}"]) for t in range(config.trap_count)),
        photon=int(digits["photon"]),
    )


def all_labels(config: SystemConfig) -> list[BasisLabel]:
    return [basis_label(config, i) for i in range(config.dimension)]


_LABEL_RE = re.compile(r"^\s*([ge])\s*,\s*(\d+)\s*$")


def parse_label(config: SystemConfig, text: str) -> BasisLabel:
    """Parse ``"g,0;e,1;a=0"``: per-trap ``internal,phonon`` pairs, photon last."""
    parts = [p.strip() for p in text.split(";")]
    if not parts or not parts[-1].startswith("a="):
        raise ValidationError(f"label {text!r} must end with the photon field 'a=N'")
    try:
        photon = int(parts[-1][2:])
    except ValueError:
        raise ValidationError(f"bad photon field in label {text!r}") from None
    internal, phonon = [], []
    for part in parts[:-1]:
        match = _LABEL_RE.match(part)
        if match is None:
            raise ValidationError(f"bad trap field {part!r} in label {text!r}")
        internal.append(match.group(1))
        phonon.append(int(match.group(2)))
    label = BasisLabel(tuple(internal), tuple(phonon), photon)
    _validate_label(config, label)
    return label


def format_label(label: BasisLabel) -> str:
    traps = [f"{s},{n}" for s, n in zip(label.internal, label.phonon)]
    return ";".join(traps + [f"a={label.photon}"])


# --- operators -------------------------------------------------------------


def _single_factor(symbol: str, dim: int) -> np.ndarray:
    if symbol in ("a", "b"):
        return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)
    if symbol in ("a_dag", "b_dag"):
        return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=-1).astype(complex)
    if symbol == "sigma_plus":
        return np.array([[0, 0], [1, 0]], dtype=complex)
    if symbol == "sigma_minus":
        return np.array([[0, 1], [0, 0]], dtype=complex)
    if symbol == "sigma_z":
        return np.diag([-1.0, 1.0]).astype(complex)
    if symbol == "sigma_x":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    raise OutOfRangeError(f"unknown operator symbol {symbol!r}")


def embed(config: SystemConfig, factor: str, matrix: np.ndarray) -> np.ndarray:
    """Tensor ``matrix`` into the full space acting on ``factor`` only."""
    axis = config.axis(factor)
    out = np.ones((1, 1), dtype=complex)
    for i, dim in enumerate(config.shape):
        out = np.kron(out, matrix if i == axis else np.eye(dim, dtype=complex))
    return out


@functools.lru_cache(maxsize=256)
def build_operator(config: SystemConfig, symbol: str, trap: int = 0) -> np.ndarray:
    """Dense matrix of ``symbol`` on the full space; read-only and cached.

    Ladder operators annihilate above the cutoff. ``sigma_z`` gives +1 on
    ``|e>``. ``trap`` selects the ion/phonon factor and is ignored for the
    photon operators and the identity.
    """
    if symbol not in OPERATOR_SYMBOLS:
        raise OutOfRangeError(f"unknown operator symbol {symbol!r}; expected one of {OPERATOR_SYMBOLS}")
    if symbol == "identity":
        out = np.eye(config.dimension, dtype=complex)
    elif symbol in ("a", "a_dag"):
        out = embed(config, "photon", _single_factor(symbol, config.photon_cutoff + 1))
    else:
        config.check_trap(trap)
        if symbol in ("b", "b_dag"):
            out = embed(config, f"phonon{trap}", _single_factor(symbol, config.phonon_cutoff + 1))
        else:
            out = embed(config, f"ion{trap}", _single_factor(symbol, 2))
    out.setflags(write=False)
    return out


# --- states ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PureState:
    config: SystemConfig
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.config.dimension,):
            raise ValueError(
                f"amplitude vector has shape {amps.shape}, expected ({self.config.dimension},)"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.config.shape)

    def amplitude(self, label: BasisLabel | str) -> complex:
        if isinstance(label, str):
            label = parse_label(self.config, label)
        return complex(self.amplitudes[basis_index(self.config, label)])


def basis_state(config: SystemConfig, label: BasisLabel | str) -> PureState:
    if isinstance(label, str):
        label = parse_label(config, label)
    amps = np.zeros(config.dimension, dtype=complex)
    amps[basis_index(config, label)] = 1.0
    return PureState(config, amps)


def superposition(config: SystemConfig, terms: Mapping[str | BasisLabel, complex]) -> PureState:
    """State with the given amplitudes on basis labels; not renormalized."""
    amps = np.zeros(config.dimension, dtype=complex)
    for label, amp in terms.items():
        if isinstance(label, str):
            label = parse_label(config, label)
        amps[basis_index(config, label)] += amp
    return PureState(config, amps)


def product_state(
    config: SystemConfig,
    ions: Sequence[Sequence[complex]],
    phonons: Sequence[Sequence[complex]],
    photon: Sequence[complex],
) -> PureState:
    """Product of per-factor vectors; short vectors are zero-padded."""
    if len(ions) != config.trap_count or len(phonons) != config.trap_count:
        raise OutOfRangeError("need one ion and one phonon vector per trap")
    pieces = {"photon": photon}
    for trap in range(config.trap_count):
        pieces[f"ion{trap}"] = ions[trap]
        pieces[f"phonon{trap}"] = phonons[trap]
    out = np.ones(1, dtype=complex)
    for name, dim in zip(config.factors, config.shape):
        vec = np.asarray(pieces[name], dtype=complex)
        if vec.size > dim:
            raise OutOfRangeError(f"{name} vector of length {vec.size} exceeds dimension {dim}")
        out = np.kron(out, np.pad(vec, (0, dim - vec.size)))
    return PureState(config, out)


def inner(x: PureState, y: PureState) -> complex:
    """``<x|y>``, antilinear in ``x``."""
    if x.config != y.config or x.amplitudes.shape != y.amplitudes.shape:
        raise ValueError(f"shape mismatch: {x.config} vs {y.config}")
    return complex(np.vdot(x.amplitudes, y.amplitudes))


def fidelity_pure(x: PureState, y: PureState) -> float:
    return min(1.0, abs(inner(x, y)) ** 2)


def max_amplitude_difference(x: PureState, y: PureState) -> float:
    if x.config != y.config:
        raise ValueError(f"shape mismatch: {x.config} vs {y.config}")
    return float(np.max(np.abs(x.amplitudes - y.amplitudes)))


def reduced_density(state: PureState, keep: Sequence[str]) -> np.ndarray:
    """Partial trace of ``|psi><psi|`` onto the named factors (in given order)."""
    config = state.config
    axes = [config.axis(name) for name in keep]
    rest = [i for i in range(len(config.shape)) if i not in axes]
    psi = np.transpose(state.tensor(), axes + rest)
    kept = math.prod(config.shape[i] for i in axes)
    matrix = psi.reshape(kept, -1)
    return matrix @ matrix.conj().T


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy in nats; eigenvalues below 1e-15 are dropped."""
    evals = np.linalg.eigvalsh(rho)
    evals = evals[evals > 1e-15]
    return float(-np.sum(evals * np.log(evals)))
