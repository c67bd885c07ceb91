"""Tests for the softmax classifier, its bandit loss and updates."""

import numpy as np
import pytest

from banditcp.errors import DataFormatError, InvalidInputError
from banditcp.model import (GradientBundle, LossMonitor, ModelParameters, bandit_ce_gradient,
                            bandit_ce_loss, batch_update, forward, init_parameters,
                            load_parameters, save_parameters, sgd_step)
from banditcp.policy.feedback import DeltaEstimate, sample_arm


def _loss_at(params: ModelParameters, x: np.ndarray, delta: DeltaEstimate) -> float:
    _, probs = forward(params, x)
    return bandit_ce_loss(probs, delta)


def test_forward_zero_weights_gives_uniform():
    params = ModelParameters({"W1": np.zeros((4, 3)), "b1": np.zeros(4)})
    _, probs = forward(params, np.array([1.0, -2.0, 0.5]))
    np.testing.assert_allclose(probs, np.full(4, 0.25))


def test_forward_identity_weights_example():
    params = ModelParameters({"W1": np.eye(2), "b1": np.zeros(2)})
    logits, probs = forward(params, np.array([0.0, np.log(3.0)]))
    np.testing.assert_allclose(logits, [0.0, np.log(3.0)])
    np.testing.assert_allclose(probs, [0.25, 0.75])


def test_forward_is_pure(linear_params):
    x = np.array([0.3, -1.2])
    first = forward(linear_params, x)
    second = forward(linear_params, x)
    np.testing.assert_array_equal(first[1], second[1])


def test_forward_rejects_dimension_mismatch(linear_params):
    with pytest.raises(InvalidInputError):
        forward(linear_params, np.array([1.0, 2.0, 3.0]))


def test_init_parameters_shapes_and_bounds(rng):
    params = init_parameters(5, 3, 4, rng)
    assert params.hidden_units == 4 and params.n_classes == 3 and params.n_features == 5
    assert np.all(np.abs(params.tensors["W1"]) <= 1 / np.sqrt(5))
    assert np.all(np.abs(params.tensors["W2"]) <= 1 / np.sqrt(4))
    assert not np.any(params.tensors["b1"]) and not np.any(params.tensors["b2"])
    assert init_parameters(5, 3, 0, rng).is_linear


def test_bandit_ce_loss_examples():
    probs = np.array([0.5, 0.5])
    assert bandit_ce_loss(probs, DeltaEstimate(arm=0, weight=0.0, n_classes=2)) == 0.0
    assert bandit_ce_loss(probs, DeltaEstimate(arm=0, weight=2.0, n_classes=2)) == pytest.approx(
        1.386294, abs=1e-6
    )
    assert bandit_ce_loss(np.array([1.0, 0.0]), DeltaEstimate(0, 1.0, 2)) == 0.0


def test_bandit_ce_loss_clamps_zero_probability():
    monitor = LossMonitor()
    loss = bandit_ce_loss(np.array([1.0, 0.0]), DeltaEstimate(1, 1.0, 2), monitor)
    assert loss == pytest.approx(-np.log(1e-12))
    assert monitor.saturated == 1


def test_bandit_ce_loss_full_feedback_is_cross_entropy():
    probs = np.array([0.2, 0.7, 0.1])
    assert bandit_ce_loss(probs, DeltaEstimate(1, 1.0, 3)) == pytest.approx(-np.log(0.7))


def test_gradient_logit_layer_example():
    """With W = I and x = (0, ln 3) the weight gradient rows equal w (p - e_A) x."""
    params = ModelParameters({"W1": np.eye(2), "b1": np.zeros(2)})
    grad = bandit_ce_gradient(params, np.array([0.0, np.log(3.0)]), DeltaEstimate(0, 2.0, 2))
    np.testing.assert_allclose(grad.tensors["b1"], [-1.5, 1.5])


def test_gradient_zero_delta_is_zero(linear_params):
    grad = bandit_ce_gradient(linear_params, np.array([1.0, 2.0]), DeltaEstimate(1, 0.0, 3))
    for value in grad.tensors.values():
        assert not np.any(value)


def test_gradient_matches_finite_differences(rng):
    """Backprop agrees with central differences on random small models."""
    step = 1e-5
    for _ in range(100):
        d = int(rng.integers(1, 11))
        K = int(rng.integers(2, 6))
        hidden = int(rng.integers(0, 9))
        params = init_parameters(d, K, hidden, rng)
        for name, value in params.items():
            params.tensors[name] = value + rng.normal(scale=0.3, size=value.shape)
        x = rng.normal(size=d)
        delta = DeltaEstimate(arm=int(rng.integers(K)), weight=float(rng.uniform(0.5, 3.0)), n_classes=K)
        grad = bandit_ce_gradient(params, x, delta)

        numeric = {}
        for name, value in params.items():
            approx = np.zeros_like(value)
            for idx in np.ndindex(value.shape):
                plus, minus = params.copy(), params.copy()
                plus.tensors[name][idx] += step
                minus.tensors[name][idx] -= step
                approx[idx] = (_loss_at(plus, x, delta) - _loss_at(minus, x, delta)) / (2 * step)
            numeric[name] = approx

        analytic = np.concatenate([grad.tensors[n].ravel() for n in numeric])
        approx = np.concatenate([numeric[n].ravel() for n in numeric])
        error = np.linalg.norm(analytic - approx) / max(
            np.linalg.norm(analytic) + np.linalg.norm(approx), 1e-12
        )
        assert error <= 1e-5


def test_sgd_step_examples(linear_params):
    zero = GradientBundle.zeros_like(linear_params)
    unchanged = sgd_step(linear_params, zero, 0.1)
    np.testing.assert_array_equal(unchanged.tensors["W1"], linear_params.tensors["W1"])

    single = ModelParameters({"W1": np.ones((2, 1)), "b1": np.zeros(2)})
    grad = GradientBundle({"W1": np.full((2, 1), 0.5), "b1": np.zeros(2)})
    stepped = sgd_step(single, grad, 1e-4)
    assert stepped.tensors["W1"][0, 0] == pytest.approx(0.99995)
    np.testing.assert_array_equal(sgd_step(single, grad, 0.0).tensors["W1"], single.tensors["W1"])


def test_sgd_step_rejects_mismatched_gradient(linear_params):
    grad = GradientBundle({"W1": np.zeros((2, 2)), "b1": np.zeros(2)})
    with pytest.raises(InvalidInputError):
        sgd_step(linear_params, grad, 0.1)


def test_batch_update_of_one_equals_sgd_step(linear_params):
    x = np.array([0.4, -0.7])
    delta = DeltaEstimate(2, 1.5, 3)
    expected = sgd_step(linear_params, bandit_ce_gradient(linear_params, x, delta), 0.1)
    updated, loss = batch_update(linear_params, x[None, :], [delta], 0.1)
    np.testing.assert_allclose(updated.tensors["W1"], expected.tensors["W1"])
    assert loss == pytest.approx(_loss_at(linear_params, x, delta))


def test_batch_update_zero_deltas_leaves_params(linear_params):
    features = np.array([[0.1, 0.2], [0.3, 0.4]])
    deltas = [DeltaEstimate(0, 0.0, 3), DeltaEstimate(1, 0.0, 3)]
    updated, loss = batch_update(linear_params, features, deltas, 0.5)
    np.testing.assert_array_equal(updated.tensors["W1"], linear_params.tensors["W1"])
    assert loss == 0.0


def test_batch_update_duplicate_instance_is_idempotent(linear_params):
    x = np.array([[0.4, -0.7]])
    delta = DeltaEstimate(1, 2.0, 3)
    once, _ = batch_update(linear_params, x, [delta], 0.1)
    twice, _ = batch_update(linear_params, np.vstack([x, x]), [delta, delta], 0.1)
    np.testing.assert_allclose(once.tensors["W1"], twice.tensors["W1"])
    np.testing.assert_allclose(once.tensors["b1"], twice.tensors["b1"])


def test_batch_update_rejects_empty_batch(linear_params):
    with pytest.raises(InvalidInputError):
        batch_update(linear_params, np.zeros((0, 2)), [], 0.1)


def test_bandit_loss_is_unbiased_for_cross_entropy(rng, linear_params):
    """Averaging the bandit loss over resampled uniform arms recovers -log p(y|x)."""
    x = np.array([0.3, 0.8])
    y = 1
    _, probs = forward(linear_params, x)
    pi = np.full(3, 1 / 3)
    losses = []
    for _ in range(20000):
        arm = sample_arm(pi, rng)
        weight = 1 / pi[arm] if arm == y else 0.0
        losses.append(bandit_ce_loss(probs, DeltaEstimate(arm, weight, 3)))
    losses = np.array(losses)
    target = -np.log(probs[y])
    assert abs(losses.mean() - target) <= 4 * losses.std() / np.sqrt(losses.size)


def test_snapshot_roundtrip_is_exact(tmp_path, rng):
    params = init_parameters(3, 4, 5, rng)
    path = str(tmp_path / "params.txt")
    save_parameters(params, path)
    loaded = load_parameters(path)
    for name, value in params.items():
        np.testing.assert_array_equal(loaded.tensors[name], value)


def test_snapshot_rejects_malformed_line(tmp_path):
    path = tmp_path / "params.txt"
    path.write_text("W1\t2,2\n")
    with pytest.raises(DataFormatError) as excinfo:
        load_parameters(str(path))
    assert excinfo.value.line == 1
