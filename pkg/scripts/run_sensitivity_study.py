#!/usr/bin/env python3
"""Run the full Monte Carlo sensitivity study over one or more prior scenarios.

Each scenario sweeps the default (d0, nu0) grid (4 x 5 = 20 cells).  Desk-scale
sampler settings (6000 iterations, burn-in 1000, unthinned) finish in around
ten minutes per scenario on one core; add --workers to parallelize cells.

Example:
    python scripts/run_sensitivity_study.py --cases C1 C4.1 C5.1 --seed 11 \
        --out-dir runs/study --workers 2
"""

import argparse
import sys
from pathlib import Path

from fiegarch_mcmc import RunConfig, run_study


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--cases", nargs="+", default=["C1"],
                        help="prior scenario labels (C1, C2.1, ..., C5.2)")
    parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--out-dir", default="runs/study")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--replicates", type=int, default=1)
    parser.add_argument("--n", type=int, default=2000)
    parser.add_argument("--n-iter", type=int, default=6000)
    parser.add_argument("--burn-in", type=int, default=1000)
    parser.add_argument("--save-chains", action="store_true")
    args = parser.parse_args()

    for case in args.cases:
        out = Path(args.out_dir) / case.replace(".", "_")
        cfg = RunConfig(
            mode="study", case=case, seed=args.seed, n=args.n,
            n_iter=args.n_iter, burn_in=args.burn_in,
            replicates=args.replicates, workers=args.workers,
            save_chains=args.save_chains, out_dir=str(out),
        )
        print(f"== {case}: 20-cell grid -> {out}", flush=True)
        result = run_study(cfg)
        print(f"   {len(result['rows'])} summary rows, {len(result['failures'])} failed cells")
        for failure in result["failures"]:
            print(f"   failed cell {failure['d0']}/{failure['nu0']}: {failure['error']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
