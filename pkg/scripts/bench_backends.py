#!/usr/bin/env python3
"""Backend cost vs pointer size: the case for the reduced system.

The full backends integrate N+2 coupled equations; the reduced backend
integrates 3 regardless of N and reconstructs the N pointer trajectories
afterwards in closed form.  This script prints the wall-clock comparison
on single slit-center trajectories.
"""

import argparse
import sys

from bohmsim.bench import run_bench


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--full-n", default="1,10,50,200",
                        help="N values for the full backends")
    parser.add_argument("--reduced-n", default="1,100,10000,1000000",
                        help="N values for the reduced backend")
    parser.add_argument("--repetitions", type=int, default=3)
    args = parser.parse_args()

    print(f"{'backend':<14} {'N':>9} {'core median':>12} {'reconstruct':>12}")
    full = run_bench([int(v) for v in args.full_n.split(",")],
                     backends=("full-analytic",), repetitions=args.repetitions)
    reduced = run_bench([int(v) for v in args.reduced_n.split(",")],
                        backends=("reduced",), repetitions=args.repetitions)
    for rec in (*full.records, *reduced.records):
        extra = f"{rec.reconstruct_s * 1e3:9.2f} ms" if rec.reconstruct_s is not None else "-"
        print(f"{rec.backend:<14} {rec.n_particles:>9} "
              f"{rec.median_core_s * 1e3:>9.2f} ms {extra:>12}")
    print(f"\nreduced core max/min ratio: {reduced.reduced_core_ratio:.2f} "
          f"({'N-independent' if reduced.reduced_n_independent else 'N-DEPENDENT'})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
