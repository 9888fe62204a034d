"""CNOT_BA fidelity against T_im/T_d, decay during the closing pulse only
(the default) and, for comparison, during every pulse."""
import argparse
from pathlib import Path

from ioncavity.cli import main


def run(outdir: Path, points: int) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    ratios = ",".join(repr(0.01 + (2 - 0.01) * i / (points - 1)) for i in range(points))
    status = 0
    for window in ("last", "all"):
        out = outdir / f"fidelity_{window}_window.csv"
        status = max(status, main(["fidelity", "--ratios", ratios, "--decay-window", window, "--out", str(out)]))
        print(f"wrote {out}")
    return status


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--outdir", type=Path, default=Path("results"))
    parser.add_argument("--points", type=int, default=20)
    args = parser.parse_args()
    raise SystemExit(run(args.outdir, args.points))
