"""Transmitter state machines: SMART, an omniscient genie, and a NORM-like baseline.

Both state machines are pure: ``smart_step`` and ``norm_step`` take a phase
plus whatever feedback was observed in the slot just finished, and return the
next phase and the action it implies. The slot loop that drives them against
a channel lives in :mod:`smartcast.sim`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import analytic


class Action(enum.Enum):
    SEND_DATA = "send-data"
    OPEN_FEEDBACK = "open-feedback-slot"
    STOP = "stop"


# -- NACK codec ---------------------------------------------------------------


def geometric_buckets(k: int, subslots: int) -> tuple[int, ...]:
    """Upper dof bounds per subslot, subslot 0 holding the largest bucket (== k).

    Bounds grow roughly geometrically from an exact bucket for one missing
    dof up to k. With ``subslots >= k`` every dof count gets its own subslot.
    """
    if k < 1 or subslots < 1:
        raise ValueError("k and subslots must be >= 1")
    s = min(subslots, k)
    if s == 1:
        return (k,)
    ascending = []
    prev = 0
    for i in range(s):
        target = round(k ** (i / (s - 1)))
        # leave room for the buckets still to come
        b = min(max(prev + 1, target), k - (s - 1 - i))
        ascending.append(b)
        prev = b
    return tuple(reversed(ascending))


@dataclass(frozen=True)
class SmartConfig:
    beta_star: float
    p_hat: float
    k: int
    subslot_count: int = 16
    reestimate: bool = False
    bucket_bounds: tuple = None

    def __post_init__(self):
        if not (0.0 < self.beta_star < 1.0):
            raise ValueError(f"beta_star must lie in (0, 1), got {self.beta_star!r}")
        if not (0.0 <= self.p_hat < 1.0):
            raise ValueError(f"p_hat must lie in [0, 1), got {self.p_hat!r}")
        if self.k < 1 or self.subslot_count < 1:
            raise ValueError("k and subslot_count must be >= 1")
        if self.bucket_bounds is None:
            object.__setattr__(self, "bucket_bounds", geometric_buckets(self.k, self.subslot_count))
        b = self.bucket_bounds
        if b[0] != self.k or b[-1] < 1 or any(x <= y for x, y in zip(b, b[1:])):
            raise ValueError(f"bucket_bounds must strictly decrease from k to >= 1, got {b}")

    @cached_property
    def _ascending(self) -> np.ndarray:
        return np.asarray(self.bucket_bounds[::-1])


@dataclass(frozen=True)
class FeedbackWord:
    empty: bool
    max_request_bucket: int | None = None

    @classmethod
    def silence(cls) -> "FeedbackWord":
        return cls(True, None)


def encode_nack(missing: int, config: SmartConfig) -> int:
    """Subslot for a receiver short ``missing`` dofs; buckets round up."""
    if not (1 <= missing <= config.k):
        raise ValueError(f"missing must lie in [1, {config.k}], got {missing}")
    asc = config._ascending
    i = int(np.searchsorted(asc, missing, side="left"))
    return len(asc) - 1 - i


def encode_nacks(missing, config: SmartConfig) -> np.ndarray:
    missing = np.asarray(missing)
    asc = config._ascending
    return len(asc) - 1 - np.searchsorted(asc, missing, side="left")


def decode_nack(survivors, config: SmartConfig) -> FeedbackWord:
    """The earliest occupied subslot determines the requested bound."""
    survivors = np.asarray(list(survivors) if isinstance(survivors, (set, frozenset)) else survivors)
    if survivors.size == 0:
        return FeedbackWord.silence()
    return FeedbackWord(False, config.bucket_bounds[int(survivors.min())])


def retransmit_count(decoded_bound: int, p_hat: float) -> int:
    """Loss-compensated repair budget ceil(bound / (1 - p_hat))."""
    if decoded_bound < 1:
        raise ValueError(f"decoded_bound must be >= 1, got {decoded_bound}")
    if not (0.0 <= p_hat < 1.0):
        raise ValueError(f"p_hat must lie in [0, 1), got {p_hat!r}")
    return max(1, math.ceil(decoded_bound / (1.0 - p_hat) - 1e-9))


def schedule_initial_feedback(config: SmartConfig, k: int, n: int) -> int:
    return analytic.first_time_discrete(config.beta_star, analytic.DiscreteParams(k=k, p_e=config.p_hat, n=n))


def reestimate_p(t: int, max_missing: int, k: int, n: int) -> float:
    """Erasure probability at which the expected worst-receiver shortfall after t slots equals ``max_missing``."""
    if max_missing <= 0:
        return 0.0

    def excess(p):
        return analytic.expected_max_missing(t, analytic.DiscreteParams(k=k, p_e=p, n=n)) - max_missing

    lo, hi = 0.0, 1.0 - 1e-6
    if excess(hi) < 0:
        return hi
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        if excess(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# -- SMART transmitter --------------------------------------------------------


@dataclass(frozen=True)
class InitialBurst:
    remaining: int


@dataclass(frozen=True)
class Listening:
    pass


@dataclass(frozen=True)
class Retransmitting:
    remaining: int


@dataclass(frozen=True)
class Confirming:
    pass


@dataclass(frozen=True)
class Done:
    pass


def action_for(phase) -> Action:
    if isinstance(phase, (InitialBurst, Retransmitting)):
        return Action.SEND_DATA
    if isinstance(phase, (Listening, Confirming)):
        return Action.OPEN_FEEDBACK
    if isinstance(phase, Done):
        return Action.STOP
    raise TypeError(f"unknown phase {phase!r}")


def smart_step(phase, feedback: FeedbackWord | None, config: SmartConfig):
    """Advance the SMART transmitter past one slot.

    Returns ``(next_phase, action)`` where ``action`` is what the transmitter
    does in the following slot.
    """
    listening = isinstance(phase, (Listening, Confirming))
    if listening != (feedback is not None):
        raise ValueError(f"feedback must be given exactly in feedback phases (phase={phase!r})")
    if isinstance(phase, (InitialBurst, Retransmitting)):
        if phase.remaining < 1:
            raise ValueError(f"invalid phase {phase!r}")
        left = phase.remaining - 1
        nxt = type(phase)(left) if left else Listening()
    elif listening:
        if feedback.empty:
            nxt = Confirming() if isinstance(phase, Listening) else Done()
        else:
            nxt = Retransmitting(retransmit_count(feedback.max_request_bucket, config.p_hat))
    elif isinstance(phase, Done):
        raise ValueError("Done is absorbing; no further steps")
    else:
        raise TypeError(f"unknown phase {phase!r}")
    return nxt, action_for(nxt)


# -- genie --------------------------------------------------------------------


def genie_completion_time(history, k: int, mode: str = "dof", packet_seed=None) -> int:
    """First slot count by which every receiver is complete; no feedback is charged.

    ``history`` is a (slots, n) boolean reception matrix. In ``rank`` mode
    ``packet_seed(d)`` gives the coefficient seed of data transmission d.
    Returns -1 if the history is too short.
    """
    history = np.asarray(history, dtype=bool)
    if history.ndim == 1:
        history = history[:, None]
    if mode == "dof":
        counts = np.cumsum(history, axis=0)
        done = counts >= k
        if not done[-1].all():
            return -1
        return int(done.argmax(axis=0).max()) + 1
    from .coding import ReceiverState, absorb, encode_packet

    states = [ReceiverState(k=k, mode="rank") for _ in range(history.shape[1])]
    pending = history.shape[1]
    for d, row in enumerate(history):
        pkt = None
        for i in np.flatnonzero(row):
            st = states[i]
            if st.complete:
                continue
            pkt = pkt or encode_packet(packet_seed(d), k)
            absorb(st, pkt)
            if st.complete:
                pending -= 1
        if pending == 0:
            return d + 1
    return -1


# -- NORM-like baseline -------------------------------------------------------


@dataclass(frozen=True)
class NormConfig:
    block_size: int = 250
    aggregation_slots: int = 10

    def blocks(self, k: int) -> tuple[int, ...]:
        full, rest = divmod(k, self.block_size)
        return (self.block_size,) * full + ((rest,) if rest else ())


@dataclass(frozen=True)
class NormState:
    blocks: tuple
    block_index: int = 0
    phase: str = "send"  # send | aggregate | done
    remaining: int = field(default=None)

    def __post_init__(self):
        if self.remaining is None:
            object.__setattr__(self, "remaining", self.blocks[self.block_index])

    @property
    def block_size(self) -> int:
        return self.blocks[self.block_index]

    @property
    def awaiting_feedback(self) -> bool:
        """True when the slot about to elapse closes an aggregation window."""
        return self.phase == "aggregate" and self.remaining == 1


def norm_initial(k: int, config: NormConfig = NormConfig()) -> NormState:
    return NormState(blocks=config.blocks(k))


def norm_action(state: NormState) -> Action:
    return {"send": Action.SEND_DATA, "aggregate": Action.OPEN_FEEDBACK, "done": Action.STOP}[state.phase]


def norm_step(state: NormState, feedback: int | None, config: NormConfig = NormConfig()):
    """Advance the NORM-like sender past one slot.

    ``feedback`` is the aggregated maximum number of packets still missing in
    the current block; it is supplied only on the last slot of an aggregation
    window.
    """
    if (feedback is not None) != state.awaiting_feedback:
        raise ValueError(f"feedback must be given exactly when an aggregation window closes ({state!r})")
    if state.phase == "send":
        left = state.remaining - 1
        if left:
            nxt = NormState(state.blocks, state.block_index, "send", left)
        else:
            nxt = NormState(state.blocks, state.block_index, "aggregate", config.aggregation_slots)
    elif state.phase == "aggregate":
        if feedback is None:
            nxt = NormState(state.blocks, state.block_index, "aggregate", state.remaining - 1)
        elif feedback < 0 or feedback > state.block_size:
            raise ValueError(f"feedback {feedback} outside [0, {state.block_size}]")
        elif feedback > 0:
            nxt = NormState(state.blocks, state.block_index, "send", feedback)
        elif state.block_index + 1 < len(state.blocks):
            nxt = NormState(state.blocks, state.block_index + 1, "send")
        else:
            nxt = NormState(state.blocks, state.block_index, "done", 0)
    else:
        raise ValueError("done is absorbing; no further steps")
    return nxt, norm_action(nxt)
