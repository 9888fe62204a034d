"""Command-line front end.

Exit codes: 0 when every checked value is within tolerance, 2 on a
tolerance breach, 1 on usage or configuration errors.
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__, gates, open_system, propagators, protocols, reference
from .config import RunConfig, parse_config
from .errors import ValidationError
from .hilbert import PureState, SystemConfig

EXIT_OK, EXIT_USAGE, EXIT_TOLERANCE = 0, 1, 2
TABLE_TOL = 1e-10


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def envelope(run: RunConfig, result, summary: dict) -> dict:
    return {"tool_version": __version__, "config": run.echo(), "result": result, "summary": summary}


def dump_json(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def dump_csv(run: RunConfig, header: str, rows) -> str:
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(run.echo(), sort_keys=True) + "\n")
    buf.write(header + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n")
    return buf.getvalue()


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


# --- subcommands -------------------------------------------------------------


def _ket_text(state: PureState, trap: int = 0) -> str:
    terms = []
    config = state.config
    for index in np.flatnonzero(np.abs(state.amplitudes) > 1e-12):
        digits = dict(zip(config.factors, np.unravel_index(index, config.shape)))
        amp = state.amplitudes[index]
        ion = "ge"[digits[f"ion{trap}"]]
        terms.append(f"({amp.real:+.6f}{amp.imag:+.6f}j)|{ion}>|{digits['photon']}{digits[f'phonon{trap}']}>_ab")
    return " ".join(terms) if terms else "0"


def cmd_verify(run: RunConfig, out: Path | None) -> int:
    spec = gates.GateSpec.named(run.options["gate"])
    config = run.system
    rows = gates.truth_table(spec, config)
    oracle = dict(gates.truth_table(spec, config, method="expm"))
    ref_value = reference.TRUTH_TABLES.get(spec.kind.name)
    worst_ref, worst_oracle = 0.0, 0.0
    lines, records = [], []
    for inputs, state in rows:
        worst_oracle = max(worst_oracle, float(np.max(np.abs(state.amplitudes - oracle[inputs].amplitudes))))
        expected = None
        if ref_value and inputs in ref_value:
            expected = _expected_ket(config, ref_value[inputs])
            worst_ref = max(worst_ref, float(np.max(np.abs(state.amplitudes - expected))))
        lines.append(f"|g>|{inputs[0]}{inputs[1]}>_ab -> {_ket_text(state)}")
        records.append({"input": list(inputs), "output": _ket_text(state), "reference": expected is not None})
    ok = worst_oracle <= TABLE_TOL and worst_ref <= TABLE_TOL
    summary = {"max_dev_reference": worst_ref, "max_dev_oracle": worst_oracle, "within_tolerance": ok}
    if out is None:
        print(f"{spec.kind.name} truth table (photon a, phonon b; ion in |g>)")
        print("\n".join(lines))
        print(f"max deviation vs reference table: {worst_ref:.3g}; vs expm oracle: {worst_oracle:.3g}")
    else:
        _emit(dump_json(envelope(run, records, summary)), out)
    return EXIT_OK if ok else EXIT_TOLERANCE


def _expected_ket(config: SystemConfig, terms) -> np.ndarray:
    vec = np.zeros(config.dimension, dtype=complex)
    for (a, b), amp in terms.items():
        vec += amp * gates.qubit_ket(config, a, b).amplitudes
    return vec


def cmd_compile(run: RunConfig, out: Path | None) -> int:
    program = gates.compile_gate(gates.GateSpec.named(run.options["gate"], run.options["trap"]))
    pulses = [p.to_dict() for p in program.pulses]
    if out is None:
        print(json.dumps(pulses))
    else:
        _emit(dump_json(envelope(run, pulses, {"label": program.label, "pulses": len(pulses)})), out)
    return EXIT_OK


def cmd_timing(run: RunConfig, out: Path | None) -> int:
    opts = run.options
    params = run.params
    status = EXIT_OK
    at_defaults = params == type(params)()
    report_lines = []
    for name in opts["gates"]:
        spec = gates.GateSpec.named(name)
        seconds = gates.program_duration(gates.compile_gate(spec), params, opts["delay"]).total
        line = f"{spec.kind.name}: {seconds:.4g} s"
        ref_value = reference.GATE_TIMES.get(spec.kind.name)
        if ref_value and at_defaults:
            value, tol = ref_value
            rel = seconds / value - 1
            if tol is None:
                line += f" (reference {value:.2g} s, differs by {rel:+.0%}; not asserted)"
            else:
                ok = abs(rel) <= tol
                line += f" (reference {value:.2g} s, {rel:+.1%}, tolerance {tol:.0%}: {'ok' if ok else 'BREACH'})"
                status = status if ok else EXIT_TOLERANCE
        report_lines.append(line)
    values = opts["values"]
    if values is None:
        unit = reference.SWEEP_G_UNIT if opts["axis"] == "g" else reference.SWEEP_GCAP_UNIT
        values = [unit * (0.2 + 0.1 * i) for i in range(19)]
    rows = gates.timing_sweep(opts["gates"], params, opts["axis"], values, opts["delay"])
    sys.stderr.write("\n".join(report_lines) + "\n")
    _emit(dump_csv(run, "coupling,gate,seconds", rows), out)
    return status


def cmd_protocol(run: RunConfig, out: Path | None) -> int:
    opts = run.options
    name = opts["name"]
    config = run.system if run.system.trap_count == 2 else protocols.TWO_TRAPS
    if name == "swap-table":
        rows = protocols.motional_cnot_via_swaps(run.params, config)
        result = [
            {"input": list(r.inputs), "occupations": list(r.occupations), "phase": [r.phase.real, r.phase.imag]}
            for r in rows
        ]
        ok = all(r.occupations == (r.inputs[0], r.inputs[1] ^ r.inputs[0], 0) for r in rows)
        _emit(dump_json(envelope(run, result, {"within_tolerance": ok})), out)
        return EXIT_OK if ok else EXIT_TOLERANCE
    pair = (opts["c"], opts["d"])
    if name == "swap":
        result = protocols.internal_swap((opts["c"], opts["d"], opts["e"], opts["f"]), run.params, config)
    elif name == "bell":
        result = protocols.bell_from_ghz(pair, run.params, config, apply_hadamards=opts["hadamards"])
    else:
        result = protocols.PROTOCOLS[name](pair, run.params, config)
    ok = result.deviation <= opts["tolerance"]
    summary = {"deviation": result.deviation, "tolerance": opts["tolerance"], "within_tolerance": ok}
    _emit(dump_json(envelope(run, result.to_dict(), summary)), out)
    if not ok:
        sys.stderr.write(f"{result.label}: deviation {result.deviation:.3g} exceeds {opts['tolerance']:.3g}\n")
    return EXIT_OK if ok else EXIT_TOLERANCE


def cmd_fidelity(run: RunConfig, out: Path | None) -> int:
    opts = run.options
    window = open_system.full_window() if opts["decay_window"] == "all" else None
    config = run.system if run.system.trap_count == 1 else SystemConfig()
    average = opts["average"]
    input_ket = tuple(opts["input"]) if opts["input"] is not None else None
    if opts["kappa"] is not None:
        f = open_system.cnot_ba_fidelity(
            run.params, opts["kappa"], input_ket=None if average else input_ket,
            average=average, config=config, dt=opts["dt"], decay_window=window,
        )
        ratio = opts["kappa"] * open_system.implementation_time(run.params)
        rows = [(ratio, f)]
    else:
        rows = open_system.fidelity_curve(
            run.params, opts["ratio_grid"], config=config, dt=opts["dt"],
            decay_window=window, average=average, input_ket=input_ket,
        )
    ordered = sorted(rows)
    monotone = all(b[1] <= a[1] for a, b in zip(ordered, ordered[1:]))
    bounded = all(0 <= f <= 1 + 1e-10 for _, f in rows)
    _emit(dump_csv(run, "ratio,fidelity", rows), out)
    return EXIT_OK if monotone and bounded else EXIT_TOLERANCE


def cmd_rwa(run: RunConfig, out: Path | None) -> int:
    opts = run.options
    config = SystemConfig(1, opts["phonon_cutoff"], opts["photon_cutoff"])
    rows = []
    for scale in opts["scales"]:
        params = propagators.rwa_regime(opts["case"], scale, eta=opts["eta"])
        dev = propagators.rwa_deviation(opts["case"], params, config, opts["theta"], opts["dt"])
        rows.append((opts["case"], float(scale), dev))
    by_scale = sorted(rows, key=lambda r: -r[1])
    decreasing = all(b[2] < a[2] for a, b in zip(by_scale, by_scale[1:]))
    ok = decreasing and by_scale[-1][2] <= opts["tolerance"]
    _emit(dump_csv(run, "case,coupling_over_nu,deviation", rows), out)
    return EXIT_OK if ok else EXIT_TOLERANCE


HANDLERS = {
    "verify": cmd_verify,
    "compile": cmd_compile,
    "timing": cmd_timing,
    "protocol": cmd_protocol,
    "fidelity": cmd_fidelity,
    "rwa-check": cmd_rwa,
}


# --- argument parsing -------------------------------------------------------------


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ioncavity", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON config file")
    common.add_argument("--out", type=Path, help="write CSV/JSON here instead of stdout")
    common.add_argument(
        "--param", action="append", default=[], metavar="KEY=VALUE",
        help="physical parameter override, e.g. g_hz=3e7 or phi=0.5 (repeatable)",
    )
    common.add_argument("--trap-count", type=int)
    common.add_argument("--phonon-cutoff", type=int)
    common.add_argument("--photon-cutoff", type=int)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="print and check a gate truth table")
    p.add_argument("--gate")

    p = sub.add_parser("compile", parents=[common], help="emit a gate's pulse program as JSON")
    p.add_argument("--gate")
    p.add_argument("--trap", type=int)

    p = sub.add_parser("timing", parents=[common], help="gate durations and coupling sweeps")
    p.add_argument("--gates", type=lambda s: [g for g in s.split(",") if g])
    p.add_argument("--axis", choices=["g", "G"])
    p.add_argument("--values", type=_floats, help="comma-separated coupling values in rad/s")
    p.add_argument("--delay", type=float)

    p = sub.add_parser("protocol", parents=[common], help="run a two-trap protocol")
    p.add_argument("--name", choices=["transfer", "swap", "ghz", "bell", "entangle", "swap-table"])
    for key in ("c", "d", "e", "f"):
        p.add_argument(f"--{key}", help="amplitude, e.g. 0.6 or 0.5+0.5j")
    p.add_argument("--hadamards", action="store_true", default=None)
    p.add_argument("--tolerance", type=float)

    p = sub.add_parser("fidelity", parents=[common], help="CNOT_BA fidelity under cavity decay")
    p.add_argument("--ratios", type=_floats, help="comma-separated T_im/T_d values")
    p.add_argument("--kappa", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--decay-window", choices=["last", "all"])
    p.add_argument("--per-input", type=lambda s: [int(v) for v in s.split(",")], metavar="A,B",
                   help="report a single computational input instead of the average")

    p = sub.add_parser("rwa-check", parents=[common], help="lab-frame check of the rotating-wave cases")
    p.add_argument("--case", type=int)
    p.add_argument("--scales", type=_floats, help="comma-separated coupling/nu values")
    p.add_argument("--eta", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--tolerance", type=float)
    return parser


_OPTION_FLAGS = {
    "gate": "gate", "trap": "trap", "gates": "gates", "axis": "axis", "values": "values",
    "delay": "delay", "name": "name", "c": "c", "d": "d", "e": "e", "f": "f",
    "hadamards": "hadamards", "tolerance": "tolerance", "ratios": "ratio_grid", "kappa": "kappa",
    "dt": "dt", "decay_window": "decay_window", "case": "case", "scales": "scales", "eta": "eta",
}


def overrides_from_args(args: argparse.Namespace) -> dict:
    params = {}
    for item in args.param:
        key, sep, value = item.partition("=")
        if not sep:
            raise ValidationError(f"--param expects KEY=VALUE, got {item!r}")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise ValidationError(f"--param {key}: {value!r} is not a number") from None
    system = {
        key: getattr(args, key)
        for key in ("trap_count", "phonon_cutoff", "photon_cutoff")
        if getattr(args, key) is not None
    }
    options = {
        option: getattr(args, flag)
        for flag, option in _OPTION_FLAGS.items()
        if getattr(args, flag, None) is not None
    }
    if getattr(args, "per_input", None) is not None:
        options["input"] = args.per_input
        options["average"] = False
    return {"command": args.command, "params": params, "system": system, "options": options}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        run = parse_config(args.config, overrides_from_args(args))
        return HANDLERS[run.command](run, args.out)
    except (ValidationError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
