#!/usr/bin/env python3
"""Run every bound-validation experiment at its default size and print a
pass/fail table.  Exits 1 if any check fails.

Usage: python scripts/run_theorem_suite.py [--seed S] [--quick]

--quick shrinks every experiment to 30 trials for a fast wiring check.
"""

import argparse
import sys
import time

from bvattack.experiments import (
    ALL_EXPERIMENTS,
    ExperimentConfig,
    default_shape,
    run_experiment,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=20240901)
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()

    all_ok = True
    for which in ALL_EXPERIMENTS:
        n, trials = default_shape(which)
        if args.quick:
            trials = 30
        cfg = ExperimentConfig(which=which, n=n, trials=trials, seed=args.seed)
        t0 = time.perf_counter()
        res = run_experiment(cfg)
        dt = time.perf_counter() - t0
        status = "PASS" if res.passed else "FAIL"
        print(f"{which}  n={n:<2d} trials={trials:<5d} {status}  ({dt:.1f}s)")
        for c in res.checks:
            mark = "ok " if c.passed else "BAD"
            print(f"    [{mark}] {c.label}: {c.observed:.4f} {c.direction} "
                  f"{c.bound:.4f} (margin {c.margin:.4f}, trials {c.trials})")
        all_ok = all_ok and res.passed
    print("all experiments passed" if all_ok else "SOME EXPERIMENTS FAILED")
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
