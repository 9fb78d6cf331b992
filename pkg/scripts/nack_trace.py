"""Slot-by-slot log of one SMART trial: data bursts, feedback slots and worst receiver deficit."""

import argparse

from smartcast import protocols as P
from smartcast.channel import ChannelConfig, ReceptionHistory, feedback_slot
from smartcast.sim import _streams, encode_nacks_or_zero, trial_seed
import numpy as np

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--n", type=int, default=1000)
ap.add_argument("--k", type=int, default=100)
ap.add_argument("--p-e", type=float, default=0.2)
ap.add_argument("--p-nack", type=float, default=0.0)
ap.add_argument("--seed", type=int, default=0)
args = ap.parse_args()

seed = trial_seed(args.seed, 0)
rng_data, rng_fb = _streams(seed)
history = ReceptionHistory(rng_data, args.n, ChannelConfig(args.p_e, args.p_nack))
cfg = P.SmartConfig(beta_star=0.9, p_hat=args.p_e, k=args.k)
held = np.zeros(args.n, dtype=np.int64)
phase = P.InitialBurst(P.schedule_initial_feedback(cfg, args.k, args.n))
slot = sent = 0
while P.action_for(phase) is not P.Action.STOP:
    slot += 1
    if P.action_for(phase) is P.Action.SEND_DATA:
        held = np.minimum(held + history.pattern(sent), args.k)
        sent += 1
        phase, _ = P.smart_step(phase, None, cfg)
        continue
    missing = args.k - held
    word = P.decode_nack(feedback_slot(rng_fb, encode_nacks_or_zero(missing, cfg), args.p_nack) - 1, cfg)
    print(f"slot {slot:4d}  {type(phase).__name__:<10} stragglers={int((missing > 0).sum()):4d} "
          f"worst={int(missing.max()):3d} heard={'-' if word.empty else word.max_request_bucket}")
    phase, _ = P.smart_step(phase, word, cfg)
print(f"done after {slot} slots ({sent} data)")
