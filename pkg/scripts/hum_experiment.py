#!/usr/bin/env python3
"""Synthesize a HUM null control and record the controlled trajectory."""

import argparse
from pathlib import Path

import numpy as np

from torusctl import TorusGeometry, random_state, synthesize_control
from torusctl.geometry import SpatialField
from torusctl.hum import controlled_trajectory_norms
from torusctl.reporting import write_csv, write_json
from torusctl.weights import WeightSpec, build_weight


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/hum")
    parser.add_argument("--grid", type=int, default=64)
    parser.add_argument("--lambda-max", type=float, default=64.0)
    parser.add_argument("--horizon", type=float, default=1.0)
    parser.add_argument("--nt", type=int, default=256)
    parser.add_argument("--tol", type=float, default=1e-8)
    parser.add_argument("--radius-fraction", type=float, default=0.25)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    geo = TorusGeometry.square(n=args.grid)
    a = build_weight(
        WeightSpec("disk", {"r": args.radius_fraction * geo.periods[0]}), geo
    )
    rng = np.random.default_rng(args.seed)
    u0 = random_state(geo, rng, lambda_max=args.lambda_max)
    solution = synthesize_control(
        u0,
        a,
        horizon=args.horizon,
        lambda_max=args.lambda_max,
        tol=args.tol,
        nt=args.nt,
    )
    avals = a.values.real
    sources = [SpatialField(geo, avals * f.values) for f in solution.control]
    u_norms = controlled_trajectory_norms(u0, sources, solution.tgrid)
    rows = list(
        zip(solution.tgrid.nodes, u_norms, [f.norm() for f in solution.control])
    )
    write_csv(out / "control.csv", ("t", "u_norm", "f_norm"), rows)
    write_json(out / "control.json", solution.describe())
    print(
        f"dim={solution.setup['subspace_dim']} cg={solution.cg_iterations} "
        f"subspace residual={solution.forward_residual_subspace:.2e} "
        f"fine residual={solution.fine.residual_subspace:.2e}"
    )
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
