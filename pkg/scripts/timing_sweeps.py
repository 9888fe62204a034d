"""Gate durations against the cavity coupling g and the laser coupling G.

Writes one CSV per swept coupling through the ``timing``
command, so the files carry the usual config echo.
"""
import argparse
from pathlib import Path

from ioncavity import reference
from ioncavity.cli import main


def grid(unit, start=0.2, stop=2.0, count=19):
    return ",".join(repr(unit * (start + (stop - start) * i / (count - 1))) for i in range(count))


def run(outdir: Path) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    panels = [
        ("timing_g_sweep.csv", "g", reference.SWEEP_G_GATES, reference.SWEEP_G_UNIT),
        ("timing_G_sweep.csv", "G", reference.SWEEP_GCAP_GATES, reference.SWEEP_GCAP_UNIT),
    ]
    status = 0
    for name, axis, gates, unit in panels:
        argv = ["timing", "--axis", axis, "--gates", ",".join(gates), "--values", grid(unit), "--out", str(outdir / name)]
        status = max(status, main(argv))
        print(f"wrote {outdir / name}")
    return status


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--outdir", type=Path, default=Path("results"))
    raise SystemExit(run(parser.parse_args().outdir))
