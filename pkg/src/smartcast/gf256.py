"""Table-driven GF(2^8) arithmetic over x^8 + x^4 + x^3 + x + 1 (0x11B)."""

import numpy as np

POLY = 0x11B
GENERATOR = 0x03


def _build_tables():
    exp = np.zeros(512, dtype=np.uint8)
    log = np.zeros(256, dtype=np.int32)
    x = 1
    for i in range(255):
        exp[i] = x
        log[x] = i
        # multiply by the generator 0x03 = x + 1
        x2 = x << 1
        if x2 & 0x100:
            x2 ^= POLY
        x = x2 ^ x
    exp[255:510] = exp[0:255]
    mul = np.zeros((256, 256), dtype=np.uint8)
    nz = np.arange(1, 256)
    mul[1:, 1:] = exp[(log[nz][:, None] + log[nz][None, :]) % 255]
    inv = np.zeros(256, dtype=np.uint8)
    inv[1:] = exp[(255 - log[nz]) % 255]
    return exp, log, mul, inv


EXP, LOG, MUL, INV = _build_tables()


def add(a, b):
    return np.bitwise_xor(a, b)


def mul(a, b):
    return MUL[a, b]


def inv(a):
    if np.any(np.asarray(a) == 0):
        raise ZeroDivisionError("0 has no inverse in GF(256)")
    return INV[a]


def mul_slow(a: int, b: int) -> int:
    """Carry-less shift-and-add product; reference for the tables."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        if a & 0x100:
            a ^= POLY
        b >>= 1
    return r
