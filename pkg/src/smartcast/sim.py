"""Seeded slotted-time trial executor and experiment aggregation.

Every trial draws from generators keyed by (trial seed, stream id): stream 0
feeds the data channel, stream 1 the NACK erasures. Running different
protocols with the same trial seed therefore pairs them on an identical
data-channel realisation.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import protocols as P
from .channel import ChannelConfig, ReceptionHistory, feedback_slot
from .coding import ReceiverState, absorb, encode_packet
from .config import ScenarioConfig

DATA_STREAM = 0
FEEDBACK_STREAM = 1

METRIC_FIELDS = (
    "total_slots",
    "data_slots",
    "feedback_slots",
    "cycles",
    "premature_termination",
    "per_packet_time",
    "data_per_packet",
    "dependent_absorptions",
    "erasure_hazard",
)


@dataclass
class TrialMetrics:
    total_slots: int
    data_slots: int
    feedback_slots: int
    cycles: int
    k: int
    premature_termination: bool = False
    nack_timeline: list = field(default_factory=list)
    dependent_absorptions: int = 0
    # summed per-opportunity probability that every straggler's NACK is lost twice in a row
    erasure_hazard: float = 0.0

    @property
    def per_packet_time(self) -> float:
        return self.total_slots / self.k

    @property
    def data_per_packet(self) -> float:
        return self.data_slots / self.k

    def row(self) -> dict:
        return {name: getattr(self, name) for name in METRIC_FIELDS}


def trial_seed(master_seed: int, index: int) -> int:
    """Counter-mode seed for trial ``index``; independent of execution order."""
    return int(np.random.SeedSequence([master_seed, index]).generate_state(1, dtype=np.uint64)[0])


def _streams(seed):
    return (
        np.random.default_rng([seed, DATA_STREAM]),
        np.random.default_rng([seed, FEEDBACK_STREAM]),
    )


def _packet_seed(seed: int, d: int) -> int:
    return (seed << 32) | d


class _Receivers:
    """Per-receiver dof bookkeeping in either coding mode."""

    def __init__(self, n, k, mode, seed):
        self.k = k
        self.mode = mode
        self.seed = seed
        self.counts = np.zeros(n, dtype=np.int64)
        self.states = [ReceiverState(k=k, mode="rank") for _ in range(n)] if mode == "rank" else None
        self.dependent = 0

    def receive(self, d: int, pattern: np.ndarray):
        if self.mode == "dof":
            self.counts += pattern
            np.minimum(self.counts, self.k, out=self.counts)
            return
        pkt = None
        for i in np.flatnonzero(pattern & (self.counts < self.k)):
            pkt = pkt or encode_packet(_packet_seed(self.seed, d), self.k)
            st = self.states[i]
            before = st.dofs_received
            absorb(st, pkt)
            if st.dofs_received == before:
                self.dependent += 1
            self.counts[i] = st.dofs_received

    @property
    def missing(self) -> np.ndarray:
        return self.k - self.counts

    @property
    def all_done(self) -> bool:
        return bool((self.counts >= self.k).all())


def _smart_config(sc: ScenarioConfig) -> P.SmartConfig:
    return P.SmartConfig(
        beta_star=sc.beta_star, p_hat=sc.p_hat, k=sc.k,
        subslot_count=sc.subslot_count, reestimate=sc.reestimate,
    )


def run_smart(sc: ScenarioConfig, seed: int, t0: int | None = None) -> TrialMetrics:
    rng_data, rng_fb = _streams(seed)
    chan = ChannelConfig(sc.p_e, sc.p_nack, sc.rho)
    history = ReceptionHistory(rng_data, sc.n, chan)
    rx = _Receivers(sc.n, sc.k, sc.coding_mode, seed)
    cfg = _smart_config(sc)
    if t0 is None:
        t0 = P.schedule_initial_feedback(cfg, sc.k, sc.n)

    phase = P.InitialBurst(t0)
    slot = data = fb_slots = cycles = 0
    hazard = 0.0
    timeline = []
    first_feedback = True
    while True:
        action = P.action_for(phase)
        if action is P.Action.STOP:
            break
        slot += 1
        if action is P.Action.SEND_DATA:
            rx.receive(data, history.pattern(data))
            data += 1
            phase, _ = P.smart_step(phase, None, cfg)
            continue
        fb_slots += 1
        timeline.append((slot, 1))
        missing = rx.missing
        if isinstance(phase, P.Listening):
            cycles += 1
            stragglers = int((missing > 0).sum())
            if stragglers:
                hazard += sc.p_nack ** (2 * stragglers)
        survivors = feedback_slot(rng_fb, encode_nacks_or_zero(missing, cfg), sc.p_nack)
        # subslot indices were shifted by one so zero can mean silence
        word = P.decode_nack(survivors - 1, cfg)
        if cfg.reestimate and first_feedback and not word.empty:
            cfg = _with_p_hat(cfg, P.reestimate_p(data, word.max_request_bucket, sc.k, sc.n))
        if isinstance(phase, P.Listening):
            first_feedback = False
        phase, _ = P.smart_step(phase, word, cfg)
    return TrialMetrics(
        total_slots=slot, data_slots=data, feedback_slots=fb_slots, cycles=cycles, k=sc.k,
        premature_termination=not rx.all_done, nack_timeline=timeline,
        dependent_absorptions=rx.dependent, erasure_hazard=hazard,
    )


def encode_nacks_or_zero(missing: np.ndarray, cfg: P.SmartConfig) -> np.ndarray:
    """Per-receiver request symbols: 0 for silent receivers, else subslot index + 1."""
    out = np.zeros(missing.shape, dtype=np.int64)
    active = missing > 0
    if active.any():
        out[active] = P.encode_nacks(missing[active], cfg) + 1
    return out


def _with_p_hat(cfg: P.SmartConfig, p_hat: float) -> P.SmartConfig:
    return P.SmartConfig(
        beta_star=cfg.beta_star, p_hat=min(max(p_hat, 0.0), 0.99), k=cfg.k,
        subslot_count=cfg.subslot_count, reestimate=cfg.reestimate, bucket_bounds=cfg.bucket_bounds,
    )


def run_genie(sc: ScenarioConfig, seed: int) -> TrialMetrics:
    rng_data, _ = _streams(seed)
    history = ReceptionHistory(rng_data, sc.n, ChannelConfig(sc.p_e, sc.p_nack, sc.rho))
    rx = _Receivers(sc.n, sc.k, sc.coding_mode, seed)
    data = 0
    while not rx.all_done:
        rx.receive(data, history.pattern(data))
        data += 1
    return TrialMetrics(
        total_slots=data, data_slots=data, feedback_slots=0, cycles=0, k=sc.k,
        dependent_absorptions=rx.dependent,
    )


def run_norm(sc: ScenarioConfig, seed: int) -> TrialMetrics:
    """NORM-like sender; Reed-Solomon blocks are MDS, so distinct receptions are counted directly."""
    rng_data, _ = _streams(seed)
    history = ReceptionHistory(rng_data, sc.n, ChannelConfig(sc.p_e, sc.p_nack, sc.rho))
    ncfg = P.NormConfig(sc.norm_block_size, sc.norm_aggregation_slots)
    state = P.norm_initial(sc.k, ncfg)
    block_counts = np.zeros(sc.n, dtype=np.int64)
    slot = data = fb_slots = cycles = 0
    timeline = []
    while True:
        action = P.norm_action(state)
        if action is P.Action.STOP:
            break
        slot += 1
        if action is P.Action.SEND_DATA:
            block_counts += history.pattern(data)
            data += 1
            state, _ = P.norm_step(state, None, ncfg)
            continue
        fb_slots += 1
        if state.remaining == ncfg.aggregation_slots:
            cycles += 1
            timeline.append((slot, ncfg.aggregation_slots))
        feedback = None
        if state.awaiting_feedback:
            np.minimum(block_counts, state.block_size, out=block_counts)
            feedback = int((state.block_size - block_counts).max())
        prev_block = state.block_index
        state, _ = P.norm_step(state, feedback, ncfg)
        if state.block_index != prev_block:
            block_counts[:] = 0
    return TrialMetrics(
        total_slots=slot, data_slots=data, feedback_slots=fb_slots, cycles=cycles, k=sc.k,
        nack_timeline=timeline,
    )


RUNNERS = {"smart": run_smart, "genie": run_genie, "norm": run_norm}


def run_trial(scenario: ScenarioConfig, seed: int) -> TrialMetrics:
    return RUNNERS[scenario.protocol](scenario, seed)


def sample_genie_times(rng: np.random.Generator, n: int, k: int, p_e: float, trials: int) -> np.ndarray:
    """Genie completion times for independent receivers, one draw per receiver.

    A receiver's k-th reception falls at slot k + F with F ~ NegBin(k, 1 - p_e)
    failures, so the genie time is k plus the maximum of n such draws. Used
    where slot-by-slot simulation of 1e4 receivers x 1e4 trials is too slow.
    """
    out = np.empty(trials, dtype=np.int64)
    if p_e == 0.0:
        out[:] = k
        return out
    for i in range(trials):
        out[i] = k + rng.negative_binomial(k, 1.0 - p_e, size=n).max()
    return out


# -- experiments --------------------------------------------------------------


@dataclass
class ExperimentSummary:
    config: ScenarioConfig
    trials: int
    master_seed: int
    stats: dict
    metrics: list = field(default_factory=list, repr=False)

    def mean(self, name: str) -> float:
        return self.stats[name]["mean"]


def summarize(values) -> dict:
    """Mean, sample std and normal-approximation 95% interval."""
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    half = 1.96 * std / math.sqrt(arr.size)
    return {"mean": mean, "std": std, "ci_low": mean - half, "ci_high": mean + half}


def _run_chunk(args):
    protocols, scenario, seeds = args
    return [[run_trial(scenario.replace(protocol=p), s) for p in protocols] for s in seeds]


def run_paired(scenario: ScenarioConfig, protocols, trials: int, master_seed: int, workers: int = 1) -> dict:
    """Run each protocol on the same per-trial seeds; returns protocol -> ExperimentSummary."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    protocols = tuple(protocols)
    seeds = [trial_seed(master_seed, i) for i in range(trials)]
    if workers <= 1:
        rows = _run_chunk((protocols, scenario, seeds))
    else:
        size = max(1, math.ceil(trials / (4 * workers)))
        chunks = [(protocols, scenario, seeds[i:i + size]) for i in range(0, trials, size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = [r for part in pool.map(_run_chunk, chunks) for r in part]
    out = {}
    for j, p in enumerate(protocols):
        metrics = [r[j] for r in rows]
        stats = {name: summarize([m.row()[name] for m in metrics]) for name in METRIC_FIELDS}
        out[p] = ExperimentSummary(scenario.replace(protocol=p), trials, master_seed, stats, metrics)
    return out


def run_experiment(scenario: ScenarioConfig, trials: int, master_seed: int, workers: int = 1) -> ExperimentSummary:
    return run_paired(scenario, (scenario.protocol,), trials, master_seed, workers)[scenario.protocol]


def summary_dict(summary: ExperimentSummary) -> dict:
    return {
        "config": asdict(summary.config),
        "trials": summary.trials,
        "master_seed": summary.master_seed,
        "stats": summary.stats,
    }
