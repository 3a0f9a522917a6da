#!/usr/bin/env python3
"""Error rate vs search-list size at k = 14, q = 0.15: the wrong-guess rate
stabilizes once the list grows past a few hundred programs."""

import argparse
import sys
import time
from pathlib import Path

from pseudomix.harness import ExperimentConfig, sweep_lmax, write_lmax_sweep_csv


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=10_000)
    parser.add_argument("--lmax-hi", type=int, default=11)
    parser.add_argument("--master-seed", type=int, default=1)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out", default="out/sweep")
    args = parser.parse_args()

    base = ExperimentConfig(
        l_max=args.lmax_hi,
        k_values=(14,),
        q="0.15",
        f=0.03,
        reps=args.reps,
        master_seed=args.master_seed,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    rows = sweep_lmax(
        base, list(range(1, args.lmax_hi + 1)), k=14, q="0.15", workers=args.workers
    )
    print(f"completed in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    write_lmax_sweep_csv(rows, out / "lmax_sweep.csv")
    for row in rows:
        print(f"l_max={row.l_max:2d} programs={2 ** (row.l_max + 1) - 2:5d} "
              f"P_err={row.error_rate:.5f}")


if __name__ == "__main__":
    main()
