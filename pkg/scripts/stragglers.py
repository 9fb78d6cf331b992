"""Expected number of incomplete receivers around the first feedback time."""

import argparse
import csv
import sys

from smartcast.analytic import DiscreteParams, first_time_discrete, straggler_stats

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--k", type=int, default=100)
ap.add_argument("--p-e", type=float, default=0.1)
ap.add_argument("--n", type=int, default=1000)
args = ap.parse_args()

prm = DiscreteParams(args.k, args.p_e, args.n)
t0 = first_time_discrete(0.9, prm)
w = csv.writer(sys.stdout, lineterminator="\n")
w.writerow(["t", "mean_stragglers", "p_none", "p_at_most_5"])
for t in range(max(args.k, t0 - 30), t0 + 10):
    s = straggler_stats(t, prm)
    w.writerow([t, f"{s.mean:.4f}", f"{s.pmf[0]:.4f}", f"{s.pmf[:6].sum():.4f}"])
