"""Tests for prediction sets, quantile tracking and expert aggregation."""

import numpy as np
import pytest

from banditcp.conformal import (ExpertBank, QuantileBank, aggregate_all, aggregate_quantile,
                                expert_step, expert_weights, leading_expert, predict_set,
                                predict_sets, quantile_step, split_thresholds)
from banditcp.errors import InvalidInputError


def test_initial_thresholds_give_full_set():
    prediction = predict_set(np.array([0.1, 0.0, 0.9]), np.zeros(3))
    assert prediction.members == {0, 1, 2}


def test_predict_set_example():
    prediction = predict_set(np.array([0.9, 0.04, 0.2]), np.array([0.5, 0.05, 0.1]))
    assert prediction.members == {0, 2}
    assert prediction.size == 2
    assert 1 not in prediction


def test_predict_set_boundary_is_inclusive():
    scores = np.array([0.3, 0.7, 0.1])
    assert predict_set(scores, scores.copy()).members == {0, 1, 2}


def test_predict_set_length_mismatch():
    with pytest.raises(InvalidInputError):
        predict_set(np.zeros(3), np.zeros(2))


def test_predict_sets_matches_single(rng):
    scores = rng.random((50, 4))
    thresholds = rng.random(4)
    membership = predict_sets(scores, thresholds)
    for row, flags in zip(scores, membership):
        assert predict_set(row, thresholds).members == set(np.flatnonzero(flags))


def test_lowering_a_threshold_never_shrinks_the_set(rng):
    for _ in range(200):
        scores = rng.random(5)
        thresholds = rng.random(5)
        lowered = thresholds.copy()
        k = rng.integers(5)
        lowered[k] -= rng.random()
        assert predict_set(scores, thresholds).members <= predict_set(scores, lowered).members


def test_quantile_step_examples():
    bank = QuantileBank(tau=np.array([0.5]), alpha=0.05, eta2=0.1)
    quantile_step(bank, 0, 0.6, 2.0)
    assert bank.tau[0] == pytest.approx(0.51)

    bank = QuantileBank(tau=np.array([0.5]), alpha=0.05, eta2=0.1)
    quantile_step(bank, 0, 0.4, 2.0)
    assert bank.tau[0] == pytest.approx(0.31)


def test_quantile_step_zero_delta_is_noop():
    bank = QuantileBank.initial(3, alpha=0.1, eta2=0.5)
    quantile_step(bank, 1, 0.9, 0.0)
    np.testing.assert_array_equal(bank.tau, np.zeros(3))


def test_quantile_step_only_touches_one_class():
    bank = QuantileBank.initial(3, alpha=0.1, eta2=0.5)
    quantile_step(bank, 2, 0.9, 1.0)
    assert bank.tau[0] == 0.0 and bank.tau[1] == 0.0
    assert bank.tau[2] == pytest.approx(0.05)


def test_quantile_bank_validation():
    with pytest.raises(InvalidInputError):
        QuantileBank.initial(3, alpha=1.0, eta2=0.1)
    with pytest.raises(InvalidInputError):
        QuantileBank.initial(3, alpha=0.1, eta2=0.0)


def test_full_feedback_tracks_the_quantile(rng):
    """With every indicator observed the threshold settles near the alpha-quantile."""
    bank = QuantileBank.initial(1, alpha=0.1, eta2=0.002)
    scores = rng.random(40000)
    for s in scores:
        quantile_step(bank, 0, s, 1.0)
    assert bank.tau[0] == pytest.approx(0.1, abs=0.04)


def test_expert_weights_start_uniform():
    bank = ExpertBank.initial(2, alpha=0.1, rates=[0.01, 0.1, 1.0])
    np.testing.assert_allclose(expert_weights(bank, 0), np.full(3, 1 / 3))


def test_expert_weights_example():
    bank = ExpertBank.initial(1, alpha=0.1, rates=[0.01, 0.1])
    bank.losses[:, 0] = [0.0, 10.0]
    weights = expert_weights(bank, 0)
    np.testing.assert_allclose(weights, [0.9999546, 4.54e-5], rtol=1e-3)
    assert weights.sum() == pytest.approx(1.0)


def test_expert_weights_stable_for_large_losses():
    bank = ExpertBank.initial(1, alpha=0.1, rates=[0.01, 0.1])
    bank.losses[:, 0] = [5000.0, 5000.0]
    np.testing.assert_allclose(expert_weights(bank, 0), [0.5, 0.5])


def test_aggregate_equal_losses_is_average():
    bank = ExpertBank.initial(1, alpha=0.1, rates=[0.01, 0.1])
    bank.taus[:, 0] = [0.2, 0.6]
    assert aggregate_quantile(bank, 0) == pytest.approx(0.4)


def test_aggregate_follows_the_leader():
    bank = ExpertBank.initial(1, alpha=0.1, rates=[0.01, 0.1])
    bank.taus[:, 0] = [0.2, 0.6]
    bank.losses[:, 0] = [20.0, 0.0]
    assert abs(aggregate_quantile(bank, 0) - 0.6) < 1e-7
    assert leading_expert(bank, 0) == 1


def test_aggregate_identical_taus():
    bank = ExpertBank.initial(2, alpha=0.1, rates=[0.01, 0.1, 1.0])
    bank.taus[:, 1] = 0.37
    bank.losses[:, 1] = [3.0, 0.5, 9.0]
    assert aggregate_quantile(bank, 1) == pytest.approx(0.37)
    np.testing.assert_allclose(aggregate_all(bank), [0.0, 0.37])


def test_aggregate_stays_within_expert_range(rng):
    bank = ExpertBank.initial(3, alpha=0.1, rates=[0.01, 0.05, 0.2, 1.0])
    for _ in range(500):
        k = int(rng.integers(3))
        expert_step(bank, k, float(rng.random()), float(rng.choice([0.0, 3.0])))
        tau_bar = aggregate_all(bank)
        assert np.all(tau_bar >= bank.taus.min(axis=0))
        assert np.all(tau_bar <= bank.taus.max(axis=0))
        assert aggregate_quantile(bank, k) == pytest.approx(tau_bar[k])


def test_expert_step_example():
    bank = ExpertBank.initial(1, alpha=0.05, rates=[0.01, 0.01])
    bank.taus[:, 0] = 0.5
    expert_step(bank, 0, 0.6, 2.0)
    np.testing.assert_allclose(bank.taus[:, 0], [0.501, 0.501])
    np.testing.assert_allclose(bank.losses[:, 0], [0.01, 0.01])
    assert bank.step == 1


def test_expert_step_zero_delta_only_advances_step():
    bank = ExpertBank.initial(2, alpha=0.05, rates=[0.01, 0.1])
    expert_step(bank, 0, 0.6, 0.0)
    assert bank.step == 1
    assert not bank.taus.any() and not bank.losses.any()


def test_single_expert_rejected():
    with pytest.raises(InvalidInputError):
        ExpertBank.initial(3, alpha=0.1, rates=[0.1])


def test_identical_rate_experts_match_single_tracker(rng):
    bank = ExpertBank.initial(2, alpha=0.1, rates=[0.05, 0.05])
    single = QuantileBank.initial(2, alpha=0.1, eta2=0.05)
    for _ in range(300):
        k = int(rng.integers(2))
        s = float(rng.random())
        delta = float(rng.choice([0.0, 2.0]))
        expert_step(bank, k, s, delta)
        quantile_step(single, k, s, delta)
        np.testing.assert_array_equal(bank.taus[0], single.tau)
        np.testing.assert_array_equal(bank.taus[1], single.tau)
        np.testing.assert_allclose(aggregate_all(bank), single.tau)


def test_split_thresholds_rank():
    scores = np.array([[0.1, 0.0], [0.4, 0.0], [0.3, 0.0], [0.2, 0.0], [0.0, 0.5]])
    labels = np.array([0, 0, 0, 0, 1])
    thresholds = split_thresholds(scores, labels, alpha=0.25)
    # floor(4 * 0.25) + 1 = 2nd smallest of class 0
    assert thresholds[0] == pytest.approx(0.2)
    assert thresholds[1] == pytest.approx(0.5)


def test_split_thresholds_empty_class():
    scores = np.array([[0.5, 0.5, 0.0]])
    thresholds = split_thresholds(scores, np.array([0]), alpha=0.1)
    assert thresholds[0] == 0.5
    assert thresholds[1] == -np.inf and thresholds[2] == -np.inf


def test_split_thresholds_cover_calibration_data(rng):
    scores = rng.random((2000, 3))
    labels = rng.integers(0, 3, size=2000)
    thresholds = split_thresholds(scores, labels, alpha=0.1)
    for k in range(3):
        true_scores = scores[labels == k, k]
        assert np.mean(true_scores >= thresholds[k]) >= 0.9 - 1e-9
