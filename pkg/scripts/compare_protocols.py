"""Per-packet time of SMART, genie and NORM over a (k, p_e) grid on paired seeds."""

import argparse
import os

from smartcast.config import ScenarioConfig
from smartcast.sim import run_paired

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--trials", type=int, default=100)
ap.add_argument("--n", type=int, default=1000)
ap.add_argument("--seed", type=int, default=0)
ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
args = ap.parse_args()

print("k,p_e,genie,smart,norm,smart_cycles")
for p_e in (0.01, 0.1, 0.3):
    for k in (10, 50, 100, 250, 1000):
        res = run_paired(ScenarioConfig(n=args.n, k=k, p_e=p_e), ("genie", "smart", "norm"),
                         args.trials, args.seed, args.workers)
        g, s, nm = (res[p].mean("per_packet_time") for p in ("genie", "smart", "norm"))
        print(f"{k},{p_e},{g:.4f},{s:.4f},{nm:.4f},{res['smart'].mean('cycles'):.3f}", flush=True)
