import math

import numpy as np
import pytest

from smartcast.channel import ChannelConfig, ReceptionHistory, broadcast_slot, broadcast_slots, feedback_slot


def rng(seed=0):
    return np.random.default_rng(seed)


def test_lossless_all_received():
    for rho in (0.0, 0.4, 1.0):
        assert broadcast_slots(rng(), 50, ChannelConfig(0.0, rho=rho), 20).all()


def test_fully_common_slots():
    pats = broadcast_slots(rng(1), 30, ChannelConfig(0.4, rho=1.0), 500)
    per_slot = pats.all(axis=1) | ~pats.any(axis=1)
    assert per_slot.all()
    assert 0.45 < pats[:, 0].mean() < 0.75


def test_reception_fraction():
    n, slots = 10_000, 1000
    pats = broadcast_slots(rng(2), n, ChannelConfig(0.3), slots)
    frac = pats.mean(axis=1)
    se = math.sqrt(0.7 * 0.3 / (n * slots))
    assert abs(frac.mean() - 0.7) <= 3 * se


@pytest.mark.parametrize("rho", [0.0, 0.5, 0.9])
def test_marginal_reception_independent_of_rho(rho):
    n, slots = 200, 20_000
    pats = broadcast_slots(rng(3), n, ChannelConfig(0.25, rho=rho), slots)
    # slot-level outcomes are exchangeable across receivers; variance of the mean grows with rho
    means = pats.mean(axis=1)
    se = means.std(ddof=1) / math.sqrt(slots)
    assert abs(means.mean() - 0.75) <= 3 * se


def test_single_slot_shape_and_reproducibility():
    a = broadcast_slot(rng(7), 13, ChannelConfig(0.5, rho=0.2))
    b = broadcast_slot(rng(7), 13, ChannelConfig(0.5, rho=0.2))
    assert a.shape == (13,) and a.dtype == bool
    np.testing.assert_array_equal(a, b)


def test_lag_one_autocorrelation_zero():
    seq = broadcast_slots(rng(4), 1, ChannelConfig(0.3), 100_000)[:, 0].astype(float)
    x = seq - seq.mean()
    r1 = float((x[:-1] * x[1:]).mean() / x.var())
    assert abs(r1) <= 3 / math.sqrt(len(seq))


def test_feedback_survival():
    req = np.array([0, 3, 0, 5, 1])
    np.testing.assert_array_equal(np.sort(feedback_slot(rng(), req, 0.0)), [1, 3, 5])
    assert feedback_slot(rng(), req, 1.0).size == 0
    many = np.ones(1000, dtype=int)
    survivors = feedback_slot(rng(5), many, 0.5).size
    assert abs(survivors - 500) <= 3 * math.sqrt(1000 * 0.25)
    with pytest.raises(ValueError):
        feedback_slot(rng(), [-1, 2], 0.1)


def test_config_validation():
    for bad in (dict(p_e=1.0), dict(p_e=0.1, p_nack=1.5), dict(p_e=0.1, rho=-0.1)):
        with pytest.raises(ValueError):
            ChannelConfig(**bad)


def test_history_is_lazy_and_stable():
    h1 = ReceptionHistory(rng(9), 4, ChannelConfig(0.5))
    h2 = ReceptionHistory(rng(9), 4, ChannelConfig(0.5))
    late = h1.pattern(200).copy()
    early = [h2.pattern(d).copy() for d in range(201)]
    np.testing.assert_array_equal(late, early[200])
    np.testing.assert_array_equal(h1.matrix(201), np.array(early))
