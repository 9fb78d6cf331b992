"""Acceptance gate: ten criteria, each reported as one PASS/FAIL line.

The lines are collected in ``REPORT`` and echoed by the terminal-summary hook
in ``conftest.py``; running this file directly prints them as well.
"""

import functools
import math

import numpy as np
import pytest

from smartcast.analytic import (
    ContinuousParams,
    DiscreteParams,
    accommodated_n,
    beta_discrete,
    first_time_discrete,
    t_star_continuous,
)
from smartcast.cli import main
from smartcast.coding import ReceiverState, absorb, packet_from_coefficients
from smartcast.config import ScenarioConfig
from smartcast.sim import run_paired, sample_genie_times

REPORT = {}


def report(n, ok, detail):
    REPORT[n] = f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {detail}"
    print(REPORT[n])
    assert ok, REPORT[n]


def test_c01_first_feedback_anchors():
    a = first_time_discrete(0.7, DiscreteParams(10, 0.2, 1000))
    b = first_time_discrete(0.7, DiscreteParams(10, 0.5, 1000))
    report(1, abs(a - 21) <= 1 and abs(b - 40) <= 1, f"first_time(0.7) = {a} (p_e=0.2), {b} (p_e=0.5)")


def test_c02_beta_against_genie_monte_carlo():
    rng = np.random.default_rng(20240)
    trials, z = 10_000, 3.0
    misses, worst = [], 0.0
    for _ in range(20):
        k = int(rng.integers(1, 101))
        n = int(round(10 ** rng.uniform(1, 4)))
        p_e = float(rng.uniform(0.01, 0.5))
        prm = DiscreteParams(k, p_e, n)
        times = sample_genie_times(rng, n, k, p_e, trials)
        grid = sorted({first_time_discrete(q, prm) for q in (0.1, 0.3, 0.5, 0.7, 0.9)})
        for t in grid:
            b = beta_discrete(t, prm)
            phat = float((times <= t).mean())
            se = math.sqrt(max(b * (1 - b), 1e-12) / trials)
            worst = max(worst, abs(phat - b) / se)
            if abs(phat - b) > z * se:
                misses.append((k, n, round(p_e, 3), t))
    report(2, not misses, f"20 sets x 5 times, max |z| = {worst:.2f}, outside 99.7%: {misses}")


def test_c03_accommodation_round_trip():
    worst = 0.0
    for n in (10, 1e3, 1e6):
        for k in (10, 100, 1000):
            for bs in (0.1, 0.5, 0.9):
                t = t_star_continuous(bs, ContinuousParams(k, 0.9, n))
                worst = max(worst, abs(accommodated_n(t, k, 0.9, bs) - n) / n)
    report(3, worst <= 1e-4, f"max relative error {worst:.2e}")


def test_c04_relative_increase():
    lam = 0.9
    r10 = t_star_continuous(0.9, ContinuousParams(100, lam, 10)) / t_star_continuous(0.1, ContinuousParams(100, lam, 10))
    r1k = t_star_continuous(0.9, ContinuousParams(100, lam, 1000)) / t_star_continuous(0.1, ContinuousParams(100, lam, 1000))
    ok = abs(r10 - 1.157) <= 0.02 and abs(r1k - 1.092) <= 0.02
    report(4, ok, f"t ratio 0.9/0.1: {r10:.4f} (n=10), {r1k:.4f} (n=1000)")


def test_c05_robust_to_misestimated_loss():
    sc = ScenarioConfig(protocol="smart", n=1000, k=100, p_e=0.2, p_hat=0.2)
    a = run_paired(sc, ("smart",), 1000, 5)["smart"].mean("total_slots")
    b = run_paired(sc.replace(p_hat=0.1), ("smart",), 1000, 5)["smart"].mean("total_slots")
    ok = 148 <= a <= 155 and 148 <= b <= 155 and abs(a - b) <= 2
    report(5, ok, f"mean slots {a:.2f} (p_hat=0.2), {b:.2f} (p_hat=0.1)")


@functools.lru_cache(maxsize=None)
def grid_results():
    out = {}
    for k in (10, 50, 100, 250, 1000):
        for p_e in (0.01, 0.1, 0.3):
            sc = ScenarioConfig(n=1000, k=k, p_e=p_e)
            out[k, p_e] = run_paired(sc, ("genie", "smart", "norm"), 100, 6)
    return out


@pytest.mark.slow
def test_c06_ordering_on_paired_seeds():
    bad = []
    for (k, p_e), res in grid_results().items():
        g, s, nm = (res[p].mean("per_packet_time") for p in ("genie", "smart", "norm"))
        if not g <= s <= nm:
            bad.append((k, p_e, round(g, 3), round(s, 3), round(nm, 3)))
    s1000 = grid_results()[1000, 0.1]["smart"].mean("per_packet_time")
    bound = 1.2 / (1 - 0.1)
    ok = not bad and s1000 <= bound
    report(6, ok, f"genie <= SMART <= NORM in 15/15 cells" if not bad else f"violations {bad}")
    print(f"  SMART per-packet at k=1000, p_e=0.1: {s1000:.4f} (bound {bound:.4f})")


@pytest.mark.slow
def test_c07_feedback_cycles():
    worst = max(res["smart"].mean("cycles") for (k, p_e), res in grid_results().items() if p_e <= 0.2)
    report(7, worst <= 2, f"max mean SMART cycles for p_e <= 0.2: {worst:.3f}")


def test_c08_nack_erasure_safety():
    sc = ScenarioConfig(protocol="smart", n=10, k=20, p_e=0.1, p_nack=0.3)
    res = run_paired(sc, ("smart",), 10_000, 8)["smart"]
    observed = res.mean("premature_termination")
    predicted = res.mean("erasure_hazard")
    se = math.sqrt(predicted * (1 - predicted) / 10_000)
    ok = abs(observed - predicted) <= 3 * se
    report(8, ok, f"premature {observed:.4f} vs predicted {predicted:.4f} (3 SE = {3 * se:.4f})")


def test_c09_coding_oracle():
    sc = ScenarioConfig(n=20, k=16, p_e=0.2)
    disagree = compared = 0
    for proto in ("genie", "smart"):
        dof = run_paired(sc, (proto,), 300, 9)[proto].metrics
        rank = run_paired(sc.replace(coding_mode="rank"), (proto,), 300, 9)[proto].metrics
        for d, r in zip(dof, rank):
            if r.dependent_absorptions == 0:
                compared += 1
                disagree += d.total_slots != r.total_slots

    rng = np.random.default_rng(16)
    failures = absorptions = 0
    expected = variance = 0.0
    while absorptions < 10_000:
        st = ReceiverState(k=16, mode="rank")
        while not st.complete:
            p = 256.0 ** (st.rank - 16)
            expected += p
            variance += p * (1 - p)
            before = st.rank
            absorb(st, packet_from_coefficients(rng.integers(0, 256, 16, dtype=np.uint8)))
            failures += st.rank == before
            absorptions += 1
    rate_ok = abs(failures - expected) <= 3 * math.sqrt(variance)
    ok = disagree == 0 and compared > 0 and rate_ok
    report(9, ok, f"{disagree}/{compared} paired trials disagree; dependent {failures} vs expected {expected:.2f}")


def test_c10_compare_is_deterministic(tmp_path):
    args = ["compare", "--k-list", "10,50", "--p-e-list", "0.1,0.3", "--n", "100", "--trials", "20", "--seed", "10"]
    outs = []
    for i, workers in enumerate(("1", "1", "2")):
        path = tmp_path / f"c{i}.csv"
        assert main([*args, "--workers", workers, "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    report(10, outs[0] == outs[1] == outs[2], "serial, serial and 2-worker compare CSVs byte-identical")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
