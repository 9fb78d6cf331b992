"""Slotted broadcast erasure channel, NACK erasure channel, and correlated-loss overlay."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CHUNK_SLOTS = 64


@dataclass(frozen=True)
class ChannelConfig:
    p_e: float
    p_nack: float = 0.0
    rho: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.p_e < 1.0):
            raise ValueError(f"p_e must lie in [0, 1), got {self.p_e!r}")
        if not (0.0 <= self.p_nack <= 1.0):
            raise ValueError(f"p_nack must lie in [0, 1], got {self.p_nack!r}")
        if not (0.0 <= self.rho <= 1.0):
            raise ValueError(f"rho must lie in [0, 1], got {self.rho!r}")


def broadcast_slots(rng: np.random.Generator, n: int, config: ChannelConfig, slots: int) -> np.ndarray:
    """Reception patterns for ``slots`` consecutive data slots, shape (slots, n), True = received.

    Each slot is, with probability rho, a common event (one Bernoulli outcome
    shared by every receiver) and otherwise n independent draws.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    ok = 1.0 - config.p_e
    common = rng.random(slots) < config.rho
    shared = rng.random(slots) < ok
    indep = rng.random((slots, n)) < ok
    return np.where(common[:, None], shared[:, None], indep)


def broadcast_slot(rng: np.random.Generator, n: int, config: ChannelConfig) -> np.ndarray:
    """One slot's ErasurePattern: a length-n boolean vector."""
    return broadcast_slots(rng, n, config, 1)[0]


def feedback_slot(rng: np.random.Generator, requests, p_nack: float) -> np.ndarray:
    """Surviving nonzero NACK requests after independent per-receiver erasure."""
    requests = np.asarray(requests)
    if np.any(requests < 0):
        raise ValueError("requests must be nonnegative")
    active = requests[requests > 0]
    keep = rng.random(active.size) >= p_nack
    return active[keep]


class ReceptionHistory:
    """Lazily materialised reception record indexed by data transmission number.

    Feedback slots do not consume rows, so every protocol run from the same
    generator state sees the same outcome for its d-th data packet.
    """

    def __init__(self, rng: np.random.Generator, n: int, config: ChannelConfig):
        self.rng = rng
        self.n = n
        self.config = config
        self._chunks: list[np.ndarray] = []
        self._length = 0

    def __len__(self):
        return self._length

    def _extend_to(self, length: int):
        while self._length < length:
            chunk = broadcast_slots(self.rng, self.n, self.config, CHUNK_SLOTS)
            self._chunks.append(chunk)
            self._length += CHUNK_SLOTS

    def pattern(self, d: int) -> np.ndarray:
        """Reception vector of the d-th data transmission (0-based)."""
        self._extend_to(d + 1)
        return self._chunks[d // CHUNK_SLOTS][d % CHUNK_SLOTS]

    def matrix(self, length: int) -> np.ndarray:
        self._extend_to(length)
        return np.concatenate(self._chunks, axis=0)[:length]
