#!/usr/bin/env python3
"""Zygmund ratio sweep over all lattice circles up to a cutoff."""

import argparse
from pathlib import Path

from torusctl import zygmund_sweep
from torusctl.inequalities import ZYGMUND_BOUND, ZYGMUND_HEADER
from torusctl.reporting import write_csv


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/zygmund")
    parser.add_argument("--limit", type=int, default=2000)
    parser.add_argument("--min-circle", type=int, default=8)
    parser.add_argument("--trials", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = zygmund_sweep(
        args.limit, min_circle=args.min_circle, trials=args.trials, seed=args.seed
    )
    write_csv(out / "zygmund.csv", ZYGMUND_HEADER, rows)
    max_ratio = max(r[2] for r in rows)
    print(
        f"{len(rows)} circles, max ratio {max_ratio:.6f} "
        f"(bound sqrt(5) = {ZYGMUND_BOUND:.6f})"
    )
    print(f"wrote {out / 'zygmund.csv'}")


if __name__ == "__main__":
    main()
