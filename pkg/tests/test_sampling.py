import math

import numpy as np
import pytest

from app.bidding.core import inverse, normalized_mass, values
from app.bidding.sampling import expected_normalized_cost, make_rng, normalized_costs, sample_sequence
from app.errors import ThresholdOutOfRangeError
from app.models.tradeoff import ClassDParams
from app.strategies.classes import class_d, class_e
from app.strategies.pareto import build_algorithm_a


def test_sample_stops_at_first_bid_above_threshold():
    sample, _ = sample_sequence(class_e(1.0), rng_seed=3, threshold=math.exp(0.5), lam=0.25)
    assert sample.bids[-1] == pytest.approx(math.exp(1.25), rel=1e-12)
    assert sample.bids[-2] < math.exp(0.5)
    assert sample.lam == 0.25


def test_doubling_cost_counts_bids_below_window():
    B = class_d(ClassDParams(ell=0.0, h=math.log(2.0)))
    sample, cost = sample_sequence(B, rng_seed=0, threshold=3.0, lam=0.0)
    assert sample.bids[-3:] == pytest.approx([1.0, 2.0, 4.0])
    assert cost / 3.0 == pytest.approx(8.0 / 3.0, rel=1e-9)


def test_same_seed_same_draw():
    B = class_e(1.0)
    first, cost_a = sample_sequence(B, rng_seed=11, threshold=2.0)
    second, cost_b = sample_sequence(B, rng_seed=11, threshold=2.0)
    assert first.lam == second.lam
    assert cost_a == cost_b
    assert first.lam == float(make_rng(11).random())


def test_threshold_below_window_is_rejected():
    with pytest.raises(ThresholdOutOfRangeError):
        sample_sequence(class_e(1.0), rng_seed=1, threshold=1e-14, lam=0.5)


def test_threshold_beyond_horizon_is_rejected():
    B = class_d(ClassDParams(ell=0.0, h=math.log(2.0)))
    with pytest.raises(ThresholdOutOfRangeError):
        sample_sequence(B, rng_seed=1, threshold=2.0**60, lam=0.5)


def test_batch_costs_match_single_draws():
    B = class_e(2.0)
    lams = np.array([0.1, 0.5, 0.9])
    batch = normalized_costs(B, np.full(3, 5.0), lams)
    for lam, nc in zip(lams, batch):
        _, cost = sample_sequence(B, rng_seed=0, threshold=5.0, lam=float(lam))
        assert nc == pytest.approx(cost / 5.0, rel=1e-10)


def test_expected_cost_of_exponential_is_e():
    mean, stderr = expected_normalized_cost(class_e(1.0), math.exp(0.3), n_trials=100_000, seed=5)
    assert abs(mean - math.e) <= 4 * stderr


def test_expected_cost_matches_normalized_mass():
    B = class_d(ClassDParams(ell=0.5, h=0.5))
    u = float(values(B, 0.4))
    mean, stderr = expected_normalized_cost(B, u, n_trials=100_000, seed=9, threads=2)
    assert abs(mean - float(normalized_mass(B, 0.4))) <= 4 * stderr


def test_expected_cost_does_not_depend_on_threads():
    B = class_e(1.5)
    one = expected_normalized_cost(B, 2.0, n_trials=5000, seed=4, chunk=1000, threads=1)
    four = expected_normalized_cost(B, 2.0, n_trials=5000, seed=4, chunk=1000, threads=4)
    assert one == four


@pytest.mark.parametrize(
    "B",
    [class_e(1.5), class_d(ClassDParams(ell=0.5, h=0.5)), build_algorithm_a(4.0)],
    ids=["exponential", "periodic", "algorithm_a"],
)
def test_simulated_cost_matches_mass_at_inverse(B):
    ts = make_rng(17).uniform(-1.5, 1.5, 10)
    for index, t in enumerate(ts):
        u = float(values(B, t))
        mean, stderr = expected_normalized_cost(B, u, n_trials=100_000, seed=100 + index)
        assert abs(mean - float(normalized_mass(B, inverse(B, u)))) <= 4.5 * stderr + 1e-9
