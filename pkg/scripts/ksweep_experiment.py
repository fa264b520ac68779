#!/usr/bin/env python3
"""K(lambda_max) sweeps for a family of rough observation weights.

Writes one ksweep CSV per weight plus a combined JSON summary, the inputs
for the plotkit `ksweep` figure.
"""

import argparse
from pathlib import Path

from torusctl import TorusGeometry, sweep_constants
from torusctl.observability import SWEEP_HEADER, sweep_rows
from torusctl.reporting import write_csv, write_json
from torusctl.weights import WeightSpec, build_weight

WEIGHTS = {
    "strip": WeightSpec("strip", {}),
    "disk": WeightSpec("disk", {}),
    "checkerboard": WeightSpec("checkerboard", {"blocks": 4}),
    "fat_cantor": WeightSpec("fat_cantor", {"depth": 4, "ratio": 0.5}),
    "power_singularity": WeightSpec("power_singularity", {"beta": 0.4}),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/ksweep", help="output directory")
    parser.add_argument("--grid", type=int, default=64)
    parser.add_argument("--horizon", type=float, default=1.0)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--lambdas", type=float, nargs="+", default=[4.0, 8.0, 16.0, 32.0, 64.0]
    )
    parser.add_argument("--weights", nargs="+", default=sorted(WEIGHTS), choices=sorted(WEIGHTS))
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    geo = TorusGeometry.square(n=args.grid)
    summary = {}
    for name in args.weights:
        weight = build_weight(WEIGHTS[name], geo)
        reports = sweep_constants(
            weight, args.horizon, args.lambdas, seed=args.seed
        )
        write_csv(out / f"ksweep_{name}.csv", SWEEP_HEADER, sweep_rows(reports))
        ks = [r.observability_constant for r in reports]
        summary[name] = {"lambda_values": args.lambdas, "K": ks}
        print(f"{name:18s} K: " + "  ".join(f"{k:.4g}" for k in ks))
    write_json(out / "ksweep_summary.json", summary)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
