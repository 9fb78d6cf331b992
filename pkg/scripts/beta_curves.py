"""Completion probability vs. slots for a few (k, p_e) pairs, with genie Monte Carlo overlay."""

import argparse
import csv
import sys

import numpy as np

from smartcast.analytic import DiscreteParams, beta_discrete, first_time_discrete
from smartcast.sim import sample_genie_times


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["k", "p_e", "t", "beta", "genie_ecdf"])
    for k, p_e in [(10, 0.2), (10, 0.5), (100, 0.1)]:
        prm = DiscreteParams(k, p_e, args.n)
        times = sample_genie_times(rng, args.n, k, p_e, args.trials)
        for t in range(k, first_time_discrete(0.999, prm) + 1):
            w.writerow([k, p_e, t, f"{beta_discrete(t, prm):.6f}", f"{(times <= t).mean():.6f}"])


if __name__ == "__main__":
    main()
