"""Degrees-of-freedom bookkeeping for random linear network coding.

Two receiver modes share one interface. ``dof`` counts every reception as
innovative, which is the abstraction the completion-time model uses.
``rank`` keeps a reduced row-echelon basis over GF(256) and only credits
linearly independent coefficient vectors, so the two can be compared on the
same reception history.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import gf256

Mode = Literal["dof", "rank"]

SEED_HEADER_BYTES = 4


@dataclass(frozen=True)
class CodedPacket:
    k: int
    seed: int | None = None
    explicit: np.ndarray | None = None

    @property
    def coefficients(self) -> np.ndarray:
        if self.explicit is not None:
            return self.explicit
        return expand_seed(self.seed, self.k)

    def header_bytes(self, seeded: bool = True) -> int:
        """Coefficient overhead carried on the wire: a seed, or one byte per coefficient."""
        return SEED_HEADER_BYTES if seeded and self.seed is not None else self.k


def expand_seed(seed: int, k: int) -> np.ndarray:
    rng = np.random.default_rng([int(seed), int(k)])
    return rng.integers(0, 256, size=k, dtype=np.uint8)


def encode_packet(seed: int, k: int) -> CodedPacket:
    """A coded packet whose k GF(256) coefficients are a deterministic function of (seed, k)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return CodedPacket(k=k, seed=int(seed))


def packet_from_coefficients(coefficients) -> CodedPacket:
    c = np.asarray(coefficients, dtype=np.uint8)
    return CodedPacket(k=len(c), explicit=c)


@dataclass
class ReceiverState:
    k: int
    mode: Mode = "dof"
    dofs_received: int = 0
    rows: np.ndarray = field(default=None, repr=False)
    pivots: list = field(default_factory=list)
    dependent: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.mode not in ("dof", "rank"):
            raise ValueError(f"mode must be 'dof' or 'rank', got {self.mode!r}")
        if self.rows is None:
            self.rows = np.zeros((0, self.k), dtype=np.uint8)

    @property
    def rank(self) -> int:
        return self.dofs_received

    @property
    def complete(self) -> bool:
        return self.dofs_received >= self.k


def reduce_row(row: np.ndarray, rows: np.ndarray, pivots) -> np.ndarray:
    """Eliminate every pivot column of ``rows`` from ``row``."""
    row = row.copy()
    for basis_row, p in zip(rows, pivots):
        c = row[p]
        if c:
            row ^= gf256.MUL[c][basis_row]
    return row


def absorb(state: ReceiverState, packet: CodedPacket) -> ReceiverState:
    """Credit one received packet to ``state`` (mutated in place and returned)."""
    if packet.k != state.k:
        raise ValueError(f"packet has {packet.k} coefficients, receiver expects {state.k}")
    if state.mode == "dof":
        state.dofs_received = min(state.k, state.dofs_received + 1)
        return state
    if state.complete:
        state.dependent += 1
        return state
    row = reduce_row(packet.coefficients, state.rows, state.pivots)
    nz = np.flatnonzero(row)
    if nz.size == 0:
        state.dependent += 1
        return state
    p = int(nz[0])
    row = gf256.MUL[gf256.INV[row[p]]][row]
    # clear the new pivot column from existing rows to stay fully reduced
    rows = state.rows
    for i in range(rows.shape[0]):
        c = rows[i, p]
        if c:
            rows[i] ^= gf256.MUL[c][row]
    order = int(np.searchsorted(state.pivots, p))
    state.rows = np.insert(rows, order, row, axis=0)
    state.pivots.insert(order, p)
    state.dofs_received += 1
    return state


def dofs_missing(state: ReceiverState) -> int:
    return state.k - state.dofs_received


def rref(rows: np.ndarray) -> tuple[np.ndarray, list]:
    """Reduced row-echelon form of an arbitrary GF(256) matrix by repeated absorption."""
    rows = np.asarray(rows, dtype=np.uint8)
    st = ReceiverState(k=rows.shape[1], mode="rank")
    for r in rows:
        absorb(st, packet_from_coefficients(r))
    return st.rows, list(st.pivots)
