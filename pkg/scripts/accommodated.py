"""How many receivers fit under a completion target by a given time (continuous model)."""

import csv
import sys

import numpy as np

from smartcast.analytic import ContinuousParams, SaturatedError, accommodated_n, t_star_continuous

K, LAM = 100, 0.9

w = csv.writer(sys.stdout, lineterminator="\n")
w.writerow(["beta_star", "lambda_t", "n"])
for bs in (0.1, 0.5, 0.9):
    for lt in np.arange(90.0, 150.5, 1.0):
        try:
            n = accommodated_n(lt / LAM, K, LAM, bs)
        except SaturatedError:
            n = 0.0
        w.writerow([bs, lt, f"{n:.6g}"])

# reference points: where n = 10 and n = 1000 are reached
for n in (10, 1000):
    lo, hi = (t_star_continuous(bs, ContinuousParams(K, LAM, n)) for bs in (0.1, 0.9))
    print(f"# n={n}: lambda*t = {LAM * lo:.2f} (beta*=0.1), {LAM * hi:.2f} (beta*=0.9), ratio {hi / lo:.4f}",
          file=sys.stderr)
