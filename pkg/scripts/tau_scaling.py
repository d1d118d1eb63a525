#!/usr/bin/env python3
"""Measure the empty-wave suppression time against pointer size N.

For each N the reference trajectory (upper slit center, neutral pointer)
is integrated with the reduced backend, and the first time at which the
pointer factor of the branch ratio drops below the threshold is recorded.
The fitted log-log slope should sit at -1/2: the pointer acquires an
effective velocity Xi sqrt(N), so its which-way record forms sqrt(N)
times faster.
"""

import argparse
import sys

import numpy as np

from bohmsim.analysis import tau_scaling_fit, threshold_crossing_times
from bohmsim.scenario import preset


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--preset", default="fig3", help="base scenario (single pointer)")
    parser.add_argument("--n-list", default="4,16,64,256,1024")
    parser.add_argument("--threshold", type=float, default=1e-3)
    args = parser.parse_args()

    params = preset(args.preset).params
    n_list = [int(v) for v in args.n_list.split(",")]
    times = threshold_crossing_times(params, n_list, args.threshold)

    print(f"{'N':>8} {'t_threshold':>14} {'t * sqrt(N)':>14}")
    for n, t in zip(n_list, times):
        print(f"{n:>8} {t:>14.6f} {t * np.sqrt(n):>14.6f}")
    slope = tau_scaling_fit(params, n_list, args.threshold)
    print(f"\nfitted exponent: {slope:+.4f}   (prediction: -0.5)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
