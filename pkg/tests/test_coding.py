import math

import numpy as np
import pytest

from smartcast import gf256
from smartcast.coding import (
    ReceiverState,
    absorb,
    dofs_missing,
    encode_packet,
    expand_seed,
    packet_from_coefficients,
    reduce_row,
    rref,
)

A = np.arange(256)


def test_mul_table_matches_shift_and_add():
    ref = np.array([[gf256.mul_slow(a, b) for b in range(256)] for a in range(256)], dtype=np.uint8)
    np.testing.assert_array_equal(gf256.MUL, ref)


def test_commutativity_and_inverses_exhaustive():
    np.testing.assert_array_equal(gf256.MUL, gf256.MUL.T)
    nz = A[1:]
    np.testing.assert_array_equal(gf256.MUL[nz, gf256.INV[nz]], np.ones(255, dtype=np.uint8))
    np.testing.assert_array_equal(gf256.MUL[1], A.astype(np.uint8))
    assert not gf256.MUL[0].any()
    with pytest.raises(ZeroDivisionError):
        gf256.inv(0)


def test_associativity_and_distributivity_sampled():
    rng = np.random.default_rng(0)
    a, b, c = rng.integers(0, 256, size=(3, 10_000))
    M = gf256.MUL
    np.testing.assert_array_equal(M[M[a, b], c], M[a, M[b, c]])
    np.testing.assert_array_equal(M[a, b ^ c], M[a, b] ^ M[a, c])


def test_generator_has_full_order():
    assert len(set(gf256.EXP[:255].tolist())) == 255


def test_encode_packet_deterministic():
    p1, p2 = encode_packet(123, 4), encode_packet(123, 4)
    np.testing.assert_array_equal(p1.coefficients, p2.coefficients)
    assert p1.coefficients.shape == (4,)
    assert encode_packet(9, 1).coefficients.shape == (1,)


def test_distinct_seeds_give_distinct_vectors():
    rng = np.random.default_rng(1)
    for _ in range(100):
        s1, s2 = rng.choice(2**40, size=2, replace=False)
        assert not np.array_equal(expand_seed(int(s1), 64), expand_seed(int(s2), 64))


def test_seed_header_is_compact():
    p = encode_packet(5, 200)
    assert p.header_bytes(seeded=True) == 4
    assert p.header_bytes(seeded=False) == 200


def test_identity_rows_reach_full_rank():
    st = ReceiverState(k=8, mode="rank")
    assert dofs_missing(st) == 8
    for i in range(8):
        absorb(st, packet_from_coefficients(np.eye(8, dtype=np.uint8)[i] * (i + 3)))
        assert dofs_missing(st) == 8 - i - 1
    assert st.complete and st.rank == 8
    np.testing.assert_array_equal(st.rows, np.eye(8, dtype=np.uint8))


def test_duplicate_packet_is_not_innovative():
    st = ReceiverState(k=6, mode="rank")
    p = encode_packet(77, 6)
    absorb(st, p)
    absorb(st, p)
    assert st.rank == 1 and st.dependent == 1


def test_dof_mode_caps_at_k():
    st = ReceiverState(k=3)
    for s in range(5):
        absorb(st, encode_packet(s, 3))
    assert st.dofs_received == 3 and dofs_missing(st) == 0


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        absorb(ReceiverState(k=4), encode_packet(1, 5))


def test_rank_never_decreases_and_rows_stay_reduced():
    rng = np.random.default_rng(2)
    st = ReceiverState(k=12, mode="rank")
    prev = 0
    for _ in range(40):
        # mix in low-rank rows to exercise dependence
        row = rng.integers(0, 256, 12) if rng.random() < 0.5 else (st.rows[0] if st.rank else np.zeros(12))
        absorb(st, packet_from_coefficients(row))
        assert st.rank >= prev
        prev = st.rank
        piv = st.rows[:, st.pivots]
        np.testing.assert_array_equal(piv, np.eye(st.rank, dtype=np.uint8))


def test_rref_idempotent():
    rng = np.random.default_rng(3)
    m = rng.integers(0, 256, size=(9, 12), dtype=np.uint8)
    m[4] = m[1] ^ gf256.MUL[7][m[2]]
    r1, piv1 = rref(m)
    r2, piv2 = rref(r1)
    np.testing.assert_array_equal(r1, r2)
    assert piv1 == piv2 and len(piv1) == 8
    for row in r1:
        assert not reduce_row(row, r1, piv1).any()


def test_innovation_failure_rate_k16():
    """Dependent absorptions match sum over absorptions of 256^(rank - k)."""
    rng = np.random.default_rng(5)
    k = 16
    failures = 0
    expected = 0.0
    variance = 0.0
    absorptions = 0
    while absorptions < 10_000:
        st = ReceiverState(k=k, mode="rank")
        while not st.complete:
            p = 256.0 ** (st.rank - k)
            expected += p
            variance += p * (1 - p)
            before = st.rank
            absorb(st, packet_from_coefficients(rng.integers(0, 256, k, dtype=np.uint8)))
            failures += st.rank == before
            absorptions += 1
    assert abs(failures - expected) <= 3 * math.sqrt(variance) + 1e-9
