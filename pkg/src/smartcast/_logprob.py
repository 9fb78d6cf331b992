"""Log-domain binomial and Poisson point masses and tails.

Point masses use Loader's saddle-point form (Stirling remainder plus the
deviance term ``bd0``) so each log-mass keeps full relative precision even
for trial counts around 1e5, where ``lgamma`` differences would lose
several digits. Tails are summed over the *smaller* side of the mode and the
other side is obtained as ``log1p(-x)``, which keeps both the probability of
completion and the probability of failure accurate when either is tiny.
"""

from __future__ import annotations

import math

import numpy as np

_LN_2PI = math.log(2.0 * math.pi)

# Stirling series coefficients for log(n!) - log(sqrt(2 pi n) (n/e)^n)
_S0 = 1.0 / 12.0
_S1 = 1.0 / 360.0
_S2 = 1.0 / 1260.0
_S3 = 1.0 / 1680.0
_S4 = 1.0 / 1188.0


def stirlerr(n):
    """Stirling remainder ``log(n!) - log(sqrt(2*pi*n) * (n/e)**n)`` for integer ``n >= 0``."""
    n = np.asarray(n, dtype=float)
    out = np.empty_like(n)
    small = n <= 15
    if np.any(small):
        ns = n[small]
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = np.array([math.lgamma(v + 1.0) for v in ns.ravel()]).reshape(ns.shape)
            vals = lg - (ns + 0.5) * np.log(ns) + ns - 0.5 * _LN_2PI
        out[small] = np.where(ns == 0, 0.0, vals)
    big = ~small
    if np.any(big):
        nb = n[big]
        nn = nb * nb
        out[big] = (_S0 - (_S1 - (_S2 - (_S3 - _S4 / nn) / nn) / nn) / nn) / nb
    return out


def bd0(x, m):
    """Deviance ``x*log(x/m) + m - x`` without cancellation when ``x ~ m``."""
    x = np.asarray(x, dtype=float)
    m = np.broadcast_to(np.asarray(m, dtype=float), x.shape)
    out = np.empty_like(x)
    near = np.abs(x - m) < 0.1 * (x + m)
    if np.any(near):
        xs, ms = x[near], m[near]
        v = (xs - ms) / (xs + ms)
        s = (xs - ms) * v
        ej = 2.0 * xs * v
        v2 = v * v
        # |v| < 1/21, so 12 terms put the remainder far below double epsilon
        for j in range(1, 13):
            ej = ej * v2
            s = s + ej / (2 * j + 1)
        out[near] = s
    far = ~near
    if np.any(far):
        xf, mf = x[far], m[far]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out[far] = np.where(xf == 0, mf, xf * np.log(xf / mf) + mf - xf)
    return out


def log_binom_pmf(j, t, s, f):
    """log P(X = j) for X ~ Bin(t, s), given success prob ``s`` and failure prob ``f = 1 - s``.

    Both ``s`` and ``f`` are passed so the caller controls which one is exact.
    """
    j = np.atleast_1d(np.asarray(j, dtype=float))
    t = float(t)
    out = np.full(j.shape, -np.inf)
    inside = (j >= 0) & (j <= t)
    if t == 0:
        out[inside] = 0.0
        return out
    if s == 0.0:
        out[j == 0] = 0.0
        return out
    if f == 0.0:
        out[j == t] = 0.0
        return out
    lo = inside & (j == 0)
    hi = inside & (j == t)
    mid = inside & ~lo & ~hi
    out[lo] = t * math.log(f)
    out[hi] = t * math.log(s)
    if np.any(mid):
        jm = j[mid]
        lc = (
            stirlerr(t)
            - stirlerr(jm)
            - stirlerr(t - jm)
            - bd0(jm, t * s)
            - bd0(t - jm, t * f)
        )
        lf = _LN_2PI + np.log(jm) + np.log1p(-jm / t)
        out[mid] = lc - 0.5 * lf
    return out


def log_poisson_pmf(j, lam):
    """log P(X = j) for X ~ Poisson(lam)."""
    j = np.atleast_1d(np.asarray(j, dtype=float))
    if lam == 0.0:
        return np.where(j == 0, 0.0, -np.inf)
    out = np.empty(j.shape)
    zero = j == 0
    out[zero] = -lam
    pos = ~zero
    if np.any(pos):
        jp = j[pos]
        out[pos] = -stirlerr(jp) - bd0(jp, lam) - 0.5 * (_LN_2PI + np.log(jp))
    return out


def logsumexp_fsum(logs) -> float:
    """log(sum(exp(logs))) with a compensated (fsum) accumulation."""
    logs = np.asarray(logs, dtype=float)
    if logs.size == 0:
        return -math.inf
    top = float(np.max(logs))
    if top == -math.inf:
        return -math.inf
    return top + math.log(math.fsum(np.exp(logs - top)))


def log1mexp(a: float) -> float:
    """log(1 - exp(a)) for a <= 0, switching branches at -ln 2."""
    if a > 0:
        raise ValueError("log1mexp requires a <= 0")
    if a == 0:
        return -math.inf
    if a > -math.log(2.0):
        return math.log(-math.expm1(a))
    return math.log1p(-math.exp(a))


def binom_log_tails(t: int, k: int, s: float, f: float) -> tuple[float, float]:
    """Return ``(log P(X <= k-1), log P(X >= k))`` for X ~ Bin(t, s)."""
    if k <= 0:
        return -math.inf, 0.0
    if t < k:
        return 0.0, -math.inf
    if f == 0.0:
        return -math.inf, 0.0
    if s == 0.0:
        return 0.0, -math.inf
    mean = t * s
    if k - 1 < mean:
        lower = logsumexp_fsum(log_binom_pmf(np.arange(0, k), t, s, f))
        return lower, log1mexp(min(lower, 0.0))
    upper = logsumexp_fsum(log_binom_pmf(np.arange(k, t + 1), t, s, f))
    return log1mexp(min(upper, 0.0)), upper


def poisson_log_tails(k: int, lam: float) -> tuple[float, float]:
    """Return ``(log P(X <= k-1), log P(X >= k))`` for X ~ Poisson(lam)."""
    if k <= 0:
        return -math.inf, 0.0
    if lam == 0.0:
        return 0.0, -math.inf
    if k - 1 < lam:
        lower = logsumexp_fsum(log_poisson_pmf(np.arange(0, k), lam))
        return lower, log1mexp(min(lower, 0.0))
    # past k >= lam the terms fall by at least exp(-m^2 / 2 lam) after m steps
    stop = k + int(math.ceil(40.0 * math.sqrt(lam) + 60.0)) + 1
    upper = logsumexp_fsum(log_poisson_pmf(np.arange(k, stop), lam))
    return log1mexp(min(upper, 0.0)), upper
