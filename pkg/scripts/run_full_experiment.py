#!/usr/bin/env python3
"""Full desk-scale experiment: 3100 reps per k over k = 1..16, with both
bounds, stair-step diagnostics and per-length error attribution in the
aggregate CSV. Takes a couple of minutes on one core."""

import argparse
import sys
import time
from pathlib import Path

from pseudomix.harness import (
    ExperimentConfig,
    run_experiment,
    write_aggregate_csv,
    write_runs_csv,
)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=3100)
    parser.add_argument("--master-seed", type=int, default=1)
    parser.add_argument("--f", type=float, default=0.03)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out", default="out/full")
    args = parser.parse_args()

    config = ExperimentConfig(
        l_max=10,
        k_values=tuple(range(1, 17)),
        q="0.15",
        f=args.f,
        reps=args.reps,
        master_seed=args.master_seed,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    result = run_experiment(config, workers=args.workers)
    print(f"completed in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    write_runs_csv(result.runs, out / "runs.csv")
    write_aggregate_csv(result.per_k, out / "aggregate.csv")
    for k in config.k_values:
        s = result.per_k[k]
        print(
            f"k={k:2d} R_err={s.error_rate:.5f} "
            f"[{s.wilson_lo:.5f}, {s.wilson_hi:.5f}] "
            f"inconclusive={s.inconclusive_rate:.5f} "
            f"errors_from_l1={s.errors_from_l1}/{s.errors}"
        )


if __name__ == "__main__":
    main()
