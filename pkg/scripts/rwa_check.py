"""Lab-frame check of the rotating-wave cases: deviation from the closed-form
propagator as the couplings shrink at fixed pulse angle."""
import argparse
from pathlib import Path

from ioncavity.cli import main


def run(outdir: Path, cases) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    status = 0
    for case in cases:
        out = outdir / f"rwa_case{case}.csv"
        status = max(status, main(["rwa-check", "--case", str(case), "--out", str(out)]))
        print(f"wrote {out}")
    return status


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--outdir", type=Path, default=Path("results"))
    parser.add_argument("--cases", type=lambda s: [int(c) for c in s.split(",")], default=[2, 7])
    args = parser.parse_args()
    raise SystemExit(run(args.outdir, args.cases))
