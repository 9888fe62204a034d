"""Run configuration: parsing, validation, defaults and the echo that
reproduces a run.

Config files are JSON::

    {
      "command": "fidelity",
      "params": {"g_hz": 3e7, "G_cap_hz": 5e5, "eta_c": 0.2, "phi": 0.785},
      "system": {"trap_count": 1, "phonon_cutoff": 5, "photon_cutoff": 5},
      "options": {"ratio_grid": [0.1, 0.5], "average": true}
    }

Frequencies may be given in Hz with a ``_hz`` suffix (multiplied by 2*pi)
or in rad/s under the bare name.  The echo always uses rad/s so it parses
back to an identical config.
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .errors import ValidationError
from .hilbert import PhysicalParams, SystemConfig

FREQUENCY_FIELDS = ("omega0", "omega_c", "omega_L", "nu", "g", "G_cap")
PARAM_FIELDS = tuple(f.name for f in dataclasses.fields(PhysicalParams))
SYSTEM_FIELDS = tuple(f.name for f in dataclasses.fields(SystemConfig))

COMMANDS = ("verify", "compile", "timing", "protocol", "fidelity", "rwa-check")


def hz_to_rad(hz: float) -> float:
    return 2 * math.pi * hz


def rad_to_hz(rad: float) -> float:
    return rad / (2 * math.pi)


def _grid(start: float, stop: float, count: int) -> list[float]:
    return [start + (stop - start) * i / (count - 1) for i in range(count)]


# every option each command understands, with its default
OPTION_DEFAULTS: dict[str, dict[str, Any]] = {
    "verify": {"gate": "cnot_ab"},
    "compile": {"gate": "cnot_ab", "trap": 0},
    "timing": {
        "gates": ["cnot_ab", "cnot_ba", "h_a", "h_b"],
        "axis": "g",
        "values": None,  # rad/s; None selects the default grid for the axis
        "delay": 0.0,
    },
    "protocol": {"name": "ghz", "c": 1.0, "d": 0.0, "e": 1.0, "f": 0.0, "hadamards": False, "tolerance": 1e-10},
    "fidelity": {
        "ratio_grid": _grid(0.01, 2.0, 20),
        "kappa": None,
        "dt": None,
        "decay_window": "last",
        "average": True,
        "input": None,
    },
    "rwa-check": {
        "case": 7,
        "scales": None,  # coupling / nu; None selects a per-case default
        "eta": 0.02,
        "theta": math.pi / 2,
        "dt": 5e-4,
        "tolerance": 1e-2,
        "phonon_cutoff": 3,
        "photon_cutoff": 2,
    },
}

DEFAULT_RWA_SCALES = {1: [1e-2, 1e-3, 1e-4], 2: [1e-3, 1e-4, 1e-5], 3: [1e-3, 1e-4, 1e-5]}
DEFAULT_RWA_SCALES.update({c: [1e-2, 1e-3, 1e-4] for c in (4, 5, 6, 7)})


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: PhysicalParams = field(default_factory=PhysicalParams)
    system: SystemConfig = field(default_factory=SystemConfig)
    options: Mapping[str, Any] = field(default_factory=dict)

    def echo(self) -> dict:
        return {
            "command": self.command,
            "params": dataclasses.asdict(self.params),
            "system": dataclasses.asdict(self.system),
            "options": _jsonable(dict(self.options)),
        }


def _jsonable(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _complex(name: str, value) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValidationError(f"options.{name}: complex values are [re, im], got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", ""))
        except ValueError:
            raise ValidationError(f"options.{name}: cannot parse {value!r} as a number") from None
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    raise ValidationError(f"options.{name}: expected a number, got {value!r}")


AMPLITUDE_RENORM_TOL = 1e-6


def _normalized(n1: str, n2: str, x: complex, y: complex) -> tuple[complex, complex]:
    """Rescale amplitudes typed with a few digits (0.70710678) onto the unit
    circle; anything further off than ``AMPLITUDE_RENORM_TOL`` is an error."""
    norm = math.sqrt(abs(x) ** 2 + abs(y) ** 2)
    if abs(norm - 1) > AMPLITUDE_RENORM_TOL:
        raise ValidationError(f"options.{n1}, options.{n2}: |{n1}|^2 + |{n2}|^2 = {norm**2!r}, expected 1")
    if abs(norm - 1) > 1e-12:
        return x / norm, y / norm
    return x, y


def _params(raw: Mapping[str, Any]) -> PhysicalParams:
    values: dict[str, float] = {}
    for key, value in raw.items():
        name = key[:-3] if key.endswith("_hz") else key
        if name not in PARAM_FIELDS or (key.endswith("_hz") and name not in FREQUENCY_FIELDS):
            raise ValidationError(f"params: unknown key {key!r}")
        if name in values:
            raise ValidationError(f"params: {name!r} given twice")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(f"params.{key}: expected a number, got {value!r}")
        values[name] = hz_to_rad(float(value)) if key.endswith("_hz") else float(value)
    try:
        return PhysicalParams(**values)
    except ValidationError as exc:
        raise ValidationError(f"params: {exc}") from None


def _system(raw: Mapping[str, Any]) -> SystemConfig:
    unknown = set(raw) - set(SYSTEM_FIELDS)
    if unknown:
        raise ValidationError(f"system: unknown key(s) {sorted(unknown)}")
    for key, value in raw.items():
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValidationError(f"system.{key}: expected an integer, got {value!r}")
    try:
        return SystemConfig(**raw)
    except ValueError as exc:
        raise ValidationError(f"system: {exc}") from None


def _options(command: str, raw: Mapping[str, Any]) -> dict[str, Any]:
    defaults = OPTION_DEFAULTS[command]
    unknown = set(raw) - set(defaults)
    if unknown:
        raise ValidationError(f"options: unknown key(s) {sorted(unknown)} for {command!r}")
    options = {**defaults, **raw}
    if command == "protocol":
        for key in ("c", "d", "e", "f"):
            options[key] = _complex(key, options[key])
        for first, second in (("c", "d"), ("e", "f")):
            options[first], options[second] = _normalized(first, second, options[first], options[second])
        if options["name"] not in ("transfer", "swap", "ghz", "bell", "entangle", "swap-table"):
            raise ValidationError(f"options.name: unknown protocol {options['name']!r}")
    if command == "fidelity":
        if options["decay_window"] not in ("last", "all"):
            raise ValidationError("options.decay_window must be 'last' or 'all'")
        if options["kappa"] is not None and options["kappa"] < 0:
            raise ValidationError(f"options.kappa must be >= 0, got {options['kappa']!r}")
        if any(r <= 0 for r in options["ratio_grid"]):
            raise ValidationError("options.ratio_grid entries must be positive")
        if options["input"] is not None:
            options["input"] = [int(v) for v in options["input"]]
    if command == "timing" and options["axis"] not in ("g", "G"):
        raise ValidationError(f"options.axis must be 'g' or 'G', got {options['axis']!r}")
    if command == "rwa-check":
        if options["case"] not in range(1, 8):
            raise ValidationError(f"options.case must be in 1..7, got {options['case']!r}")
        if options["scales"] is None:
            options["scales"] = list(DEFAULT_RWA_SCALES[options["case"]])
    return options


def parse_config(source: str | Path | Mapping[str, Any] | None = None, overrides: Mapping[str, Any] | None = None) -> RunConfig:
    """Build a validated :class:`RunConfig` from a JSON path, a JSON string,
    a mapping, or nothing (all defaults).  ``overrides`` has the same shape
    and wins key by key."""
    if source is None:
        raw: dict = {}
    elif isinstance(source, Mapping):
        raw = dict(source)
    else:
        text = str(source)
        if not text.lstrip().startswith("{"):
            text = Path(source).read_text()
        try:
            raw = json.loads(text) if text.strip() else {}
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config parse error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ValidationError("config must be a JSON object")
    overrides = dict(overrides or {})
    unknown = (set(raw) | set(overrides)) - {"command", "params", "system", "options"}
    if unknown:
        raise ValidationError(f"unknown top-level key(s) {sorted(unknown)}")
    command = overrides.get("command", raw.get("command", "verify"))
    if command not in COMMANDS:
        raise ValidationError(f"unknown command {command!r}; expected one of {COMMANDS}")
    params_raw = {**raw.get("params", {}), **overrides.get("params", {})}
    # the echo stores rad/s; an override in Hz replaces a stored rad/s value
    for key in overrides.get("params", {}):
        if key.endswith("_hz"):
            params_raw.pop(key[:-3], None)
    return RunConfig(
        command=command,
        params=_params(params_raw),
        system=_system({**raw.get("system", {}), **overrides.get("system", {})}),
        options=_options(command, {**raw.get("options", {}), **overrides.get("options", {})}),
    )
