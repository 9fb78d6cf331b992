"""Closed-form completion-time model for coded broadcast over erasure channels.

Discrete model: every receiver sees an independent Bernoulli(1 - p_e)
reception process, and a receiver is done once it holds k packets.
Continuous model: receptions are Poisson with rate lambda = 1 - p_e.

All probabilities are carried in the log domain internally; ``beta`` for
n = 1e7 receivers and per-node failure probabilities around 1e-12 are both
routine here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from ._logprob import binom_log_tails, log_binom_pmf, poisson_log_tails


class SaturatedError(ValueError):
    """No receiver count n >= 1 can be accommodated by the requested time."""


@dataclass(frozen=True)
class DiscreteParams:
    k: int
    p_e: float
    n: int = 1

    def __post_init__(self):
        _check_int("k", self.k, 1)
        _check_int("n", self.n, 1)
        _check_pe("p_e", self.p_e)


@dataclass(frozen=True)
class ContinuousParams:
    k: int
    lam: float
    n: float = 1

    def __post_init__(self):
        _check_int("k", self.k, 1)
        if not (0.0 < self.lam <= 1.0):
            raise ValueError(f"lam must lie in (0, 1], got {self.lam!r}")
        if not self.n >= 1:
            raise ValueError(f"n must be >= 1, got {self.n!r}")

    @classmethod
    def from_erasure(cls, k: int, p_e: float, n: float = 1) -> "ContinuousParams":
        _check_pe("p_e", p_e)
        return cls(k=k, lam=1.0 - p_e, n=n)


@dataclass(frozen=True)
class BetaCurve:
    t_values: np.ndarray
    beta_values: np.ndarray
    model_tag: Literal["discrete", "continuous"]


@dataclass(frozen=True)
class StragglerStats:
    t: int
    pmf: np.ndarray
    mean: float

    @property
    def tail_sum_mean(self) -> float:
        """Mean via sum_{i>=1} P(N >= i), the integer form of the survival integral."""
        survival = np.cumsum(self.pmf[::-1])[::-1]
        return math.fsum(survival[1:])


def _check_int(name, value, lo):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < lo:
        raise ValueError(f"{name} must be an integer >= {lo}, got {value!r}")


def _check_pe(name, value):
    if not (0.0 <= value < 1.0):
        raise ValueError(f"{name} must lie in [0, 1), got {value!r}")


def _check_t(t):
    if isinstance(t, bool) or not isinstance(t, (int, np.integer)) or t < 0:
        raise ValueError(f"t must be a nonnegative integer, got {t!r}")


# -- discrete model -----------------------------------------------------------


def log_node_tails_discrete(t: int, k: int, p_e: float) -> tuple[float, float]:
    """``(log P(node incomplete), log P(node complete))`` after ``t`` slots."""
    _check_t(t)
    _check_int("k", k, 1)
    _check_pe("p_e", p_e)
    return binom_log_tails(int(t), int(k), 1.0 - p_e, p_e)


def per_node_completion_discrete(t: int, k: int, p_e: float) -> float:
    """Probability that one receiver holds at least ``k`` packets after ``t`` slots."""
    return math.exp(log_node_tails_discrete(t, k, p_e)[1])


def log_beta_discrete(t: int, params: DiscreteParams) -> float:
    _, log_done = log_node_tails_discrete(t, params.k, params.p_e)
    if log_done == -math.inf:
        return -math.inf
    return params.n * log_done


def beta_discrete(t: int, params: DiscreteParams) -> float:
    """Probability that all ``n`` receivers are done after ``t`` slots."""
    return math.exp(log_beta_discrete(t, params))


def beta_curve_discrete(t_values, params: DiscreteParams) -> BetaCurve:
    ts = np.asarray(list(t_values), dtype=np.int64)
    vals = np.array([beta_discrete(int(t), params) for t in ts])
    return BetaCurve(ts, vals, "discrete")


def first_time_discrete(beta_star: float, params: DiscreteParams) -> int:
    """Smallest integer t with beta_discrete(t) >= beta_star.

    Exponential growth from t = k (beta is zero below k), then bisection.
    """
    if not (0.0 < beta_star < 1.0):
        raise ValueError(f"beta_star must lie in (0, 1), got {beta_star!r}")
    target = math.log(beta_star)

    def ok(t):
        return log_beta_discrete(t, params) >= target

    lo, hi = params.k - 1, params.k
    while not ok(hi):
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def straggler_stats(t: int, params: DiscreteParams) -> StragglerStats:
    """Distribution of the number of receivers still incomplete after ``t`` slots."""
    log_fail, log_done = log_node_tails_discrete(t, params.k, params.p_e)
    q = math.exp(log_fail)
    n = params.n
    pmf = np.exp(log_binom_pmf(np.arange(n + 1), n, q, math.exp(log_done)))
    return StragglerStats(t=int(t), pmf=pmf, mean=n * q)


def missing_after(m_outstanding: int, p_e: float) -> int:
    """Default per-straggler missing-dof bound: ceil(m_outstanding * (1 - p_e))."""
    return max(1, math.ceil(m_outstanding * (1.0 - p_e) - 1e-9))


def beta_hat(m_outstanding: int, n1: float, params: DiscreteParams, m_missing: int | None = None) -> float:
    """Probability that ``n1`` stragglers, each short ``m_missing`` dofs, all finish
    within ``m_outstanding`` further slots.

    ``m_missing`` defaults to ``ceil(m_outstanding * (1 - p_e))``; callers that
    know the decoded NACK bound should pass it explicitly.
    """
    _check_int("m_outstanding", m_outstanding, 1)
    if not n1 >= 1:
        raise ValueError(f"n1 must be >= 1, got {n1!r}")
    if m_missing is None:
        m_missing = missing_after(m_outstanding, params.p_e)
    _check_int("m_missing", m_missing, 1)
    _, log_done = binom_log_tails(m_outstanding, m_missing, 1.0 - params.p_e, params.p_e)
    return math.exp(n1 * log_done) if log_done > -math.inf else 0.0


# -- continuous model ---------------------------------------------------------


def _check_gamma_args(k, x):
    _check_int("k", k, 1)
    if not x >= 0:
        raise ValueError(f"x must be >= 0, got {x!r}")


def log_regularized_gamma_tails(k: int, x: float) -> tuple[float, float]:
    """``(log Q(k, x), log P(k, x))`` with Q = Gamma(k, x) / Gamma(k) and P = 1 - Q."""
    _check_gamma_args(k, x)
    return poisson_log_tails(int(k), float(x))


def regularized_upper_gamma(k: int, x: float) -> float:
    """Gamma(k, x) / Gamma(k) for integer k, i.e. the Poisson(x) CDF at k - 1."""
    return math.exp(log_regularized_gamma_tails(k, x)[0])


def log_beta_continuous(t: float, params: ContinuousParams) -> float:
    if not t >= 0:
        raise ValueError(f"t must be >= 0, got {t!r}")
    _, log_p = log_regularized_gamma_tails(params.k, params.lam * t)
    if log_p == -math.inf:
        return -math.inf
    return params.n * log_p


def beta_continuous(t: float, params: ContinuousParams) -> float:
    return math.exp(log_beta_continuous(t, params))


def beta_curve_continuous(t_values, params: ContinuousParams) -> BetaCurve:
    ts = np.asarray(list(t_values), dtype=float)
    vals = np.array([beta_continuous(float(t), params) for t in ts])
    return BetaCurve(ts, vals, "continuous")


def t_star_continuous(beta_star: float, params: ContinuousParams, tol: float = 1e-9) -> float:
    """Earliest time at which the continuous-model completion probability reaches ``beta_star``.

    Solves Q(k, lam t) = 1 - beta_star**(1/n) by bisection on the decreasing
    map t -> Q(k, lam t), comparing in the log domain. The returned point sits
    on the feasible side (beta >= beta_star) of the bracket.
    """
    if not (0.0 < beta_star < 1.0):
        raise ValueError(f"beta_star must lie in (0, 1), got {beta_star!r}")
    # 1 - beta^(1/n), exact for large n
    log_target = math.log(-math.expm1(math.log(beta_star) / params.n))

    def feasible(t):
        return log_regularized_gamma_tails(params.k, params.lam * t)[0] <= log_target

    lo, hi = 0.0, params.k / params.lam
    while not feasible(hi):
        lo, hi = hi, 2.0 * hi
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def accommodated_n(t: float, k: int, lam: float, beta_star: float) -> float:
    """Number of receivers that reach completion probability ``beta_star`` by time ``t``.

    Raises SaturatedError when t is so small that Q(k, lam t) == 1 in working precision.
    """
    if not (0.0 < beta_star < 1.0):
        raise ValueError(f"beta_star must lie in (0, 1), got {beta_star!r}")
    if not (0.0 < lam <= 1.0):
        raise ValueError(f"lam must lie in (0, 1], got {lam!r}")
    if not t > 0:
        raise SaturatedError(f"t={t!r}: no arrivals yet, no n >= 1 is achievable")
    log_q, log_p = log_regularized_gamma_tails(k, lam * t)
    if math.exp(log_q) == 1.0:
        raise SaturatedError(f"t={t!r}: Gamma(k, lam t)/Gamma(k) == 1 in working precision")
    if log_p == 0.0:
        return math.inf
    return math.log(beta_star) / log_p


def log_node_incomplete_continuous(t: float, k: int, lam: float) -> float:
    """log Q(k, lam t): probability that one receiver is still incomplete at time t."""
    return log_regularized_gamma_tails(k, lam * t)[0]


def expected_max_missing(t: int, params: DiscreteParams) -> float:
    """E[max_i missing_i] after ``t`` slots, as sum over m >= 1 of P(max >= m)."""
    total = 0.0
    for m in range(1, params.k + 1):
        # P(one node missing < m) = P(received >= k - m + 1)
        _, log_ok = binom_log_tails(int(t), params.k - m + 1, 1.0 - params.p_e, params.p_e)
        log_all_ok = params.n * log_ok if log_ok > -math.inf else -math.inf
        term = -math.expm1(log_all_ok) if log_all_ok > -math.inf else 1.0
        total += term
        if term < 1e-16:
            break
    return total
