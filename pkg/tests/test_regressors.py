import warnings

import numpy as np
import pytest

from opsurrogate.regressors import (
    SELU_ALPHA,
    SELU_LAMBDA,
    LinearModel,
    TrainConfig,
    TrainingError,
    fit_linear,
    init_mlp,
    mlp_forward,
    mlp_loss,
    mlp_loss_and_grads,
    nesterov_step,
    predict,
    selu,
    train_mlp,
)


def test_selu_values():
    assert selu(0.0) == 0.0
    assert selu(1.0) == pytest.approx(1.0507009873554805, rel=1e-15)
    assert selu(-60.0) == pytest.approx(-SELU_LAMBDA * SELU_ALPHA, rel=1e-12)


def test_fit_linear_recovers_affine_map():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((4, 6))
    b = rng.standard_normal(4)
    x = rng.standard_normal((50, 6))
    y = x @ A.T + b
    model = fit_linear(x, y)
    assert np.max(np.abs(model.matrix - A)) < 1e-8 * max(1, np.max(np.abs(A)))
    assert np.max(np.abs(model.bias - b)) < 1e-8


def test_fit_linear_zero_targets():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((20, 3))
    model = fit_linear(x, np.zeros((20, 2)))
    assert np.max(np.abs(model.matrix)) < 1e-10
    assert np.max(np.abs(model.bias)) < 1e-10


def test_fit_linear_one_dimensional_case():
    model = fit_linear(np.array([[0.0], [1.0]]), np.array([[1.0], [3.0]]))
    assert model.matrix[0, 0] == pytest.approx(2.0, rel=1e-10)
    assert model.bias[0] == pytest.approx(1.0, rel=1e-10)


def test_fit_linear_residual_orthogonal_to_inputs():
    rng = np.random.default_rng(2)
    x = rng.standard_normal((40, 5))
    y = rng.standard_normal((40, 3))
    model = fit_linear(x, y)
    resid = y - (x @ model.matrix.T + model.bias)
    design = np.concatenate([x, np.ones((40, 1))], axis=1)
    assert np.max(np.abs(design.T @ resid)) < 1e-8 * np.max(np.abs(design.T @ y))


def test_fit_linear_warns_on_rank_deficiency():
    rng = np.random.default_rng(3)
    col = rng.standard_normal((20, 1))
    x = np.concatenate([col, col], axis=1)  # duplicated feature
    with pytest.warns(RuntimeWarning):
        fit_linear(x, rng.standard_normal((20, 2)))


def test_init_mlp_statistics():
    model = init_mlp([100, 500, 1000, 50], seed=4)
    for w in model.weights:
        fan_in = w.shape[1]
        v = np.var(w)
        assert abs(v - 1.0 / fan_in) < 0.2 / fan_in
    for b in model.biases:
        assert np.max(np.abs(b)) == 0.0
    again = init_mlp([100, 500, 1000, 50], seed=4)
    for w1, w2 in zip(model.weights, again.weights):
        assert np.array_equal(w1, w2)


def test_backprop_matches_finite_differences():
    rng = np.random.default_rng(5)
    model = init_mlp([3, 5, 4, 2], seed=6)
    x = rng.standard_normal((10, 3))
    y = rng.standard_normal((10, 2))
    _, gw, gb = mlp_loss_and_grads(model, x, y)
    eps = 1e-6
    worst = 0.0
    for p, g in zip(model.weights + model.biases, gw + gb):
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            orig = p[idx]
            p[idx] = orig + eps
            lp = mlp_loss(model, x, y)
            p[idx] = orig - eps
            lm = mlp_loss(model, x, y)
            p[idx] = orig
            fd = (lp - lm) / (2 * eps)
            worst = max(worst, abs(fd - g[idx]) / max(abs(g[idx]), 1e-8))
    assert worst < 1e-5


def test_nesterov_hand_step():
    # L = theta^2/2, one step from theta=1, v=0, m=0.99, eta=0.1
    theta, vel = nesterov_step([np.array([1.0])], [np.array([0.0])],
                               lambda look: [look[0]], 0.1, 0.99)
    assert vel[0][0] == pytest.approx(-0.1, rel=1e-14)
    assert theta[0][0] == pytest.approx(0.9, rel=1e-14)


def test_full_batch_step_decreases_quadratic():
    # L(theta) = mean of (theta x - y)^2 over fixed data; stability at
    # eta < 1/L_smooth. momentum 0 reduces Nesterov to plain GD.
    rng = np.random.default_rng(7)
    x = rng.standard_normal(30)
    y = 2.0 * x
    theta = np.array([5.0])

    def grad(look):
        return [np.array([np.mean(2 * (look[0][0] * x - y) * x)])]

    smooth = 2 * np.mean(x ** 2)
    eta = 0.9 / smooth
    loss0 = np.mean((theta[0] * x - y) ** 2)
    theta2, _ = nesterov_step([theta], [np.array([0.0])], grad, eta, 0.0)
    loss1 = np.mean((theta2[0][0] * x - y) ** 2)
    assert loss1 < loss0


def test_training_on_self_generated_targets_starts_at_zero():
    rng = np.random.default_rng(8)
    model = init_mlp([4, 8, 3], seed=9)
    x = rng.standard_normal((32, 4))
    y = mlp_forward(model, x)
    cfg = TrainConfig(epochs=3, batch_size=16, seed=1)
    result = train_mlp(model.copy(), x, y, cfg)
    assert result.train_loss[0] == pytest.approx(0.0, abs=1e-20)
    assert np.all(np.isfinite(result.train_loss))


def test_training_is_reproducible():
    rng = np.random.default_rng(10)
    x = rng.standard_normal((64, 5))
    y = np.tanh(x @ rng.standard_normal((5, 5)))
    cfg = TrainConfig(epochs=5, batch_size=16, seed=2, learning_rates=(1e-3,))
    r1 = train_mlp(init_mlp([5, 16, 5], seed=3), x, y, cfg)
    r2 = train_mlp(init_mlp([5, 16, 5], seed=3), x, y, cfg)
    for w1, w2 in zip(r1.model.weights, r2.model.weights):
        assert np.array_equal(w1, w2)
    assert r1.learning_rate == r2.learning_rate


def test_learning_rate_walk_skips_blowup():
    # absurdly large first candidate must blow up and fall through
    rng = np.random.default_rng(11)
    x = 10 * rng.standard_normal((64, 3))
    y = 10 * rng.standard_normal((64, 3))
    cfg = TrainConfig(epochs=8, batch_size=16, seed=4,
                      learning_rates=(1e6, 1e-4))
    result = train_mlp(init_mlp([3, 16, 3], seed=5), x, y, cfg)
    assert result.learning_rate == 1e-4
    assert np.all(np.isfinite(result.train_loss))


def test_all_rates_blowing_up_raises():
    rng = np.random.default_rng(12)
    x = 10 * rng.standard_normal((64, 3))
    y = 10 * rng.standard_normal((64, 3))
    cfg = TrainConfig(epochs=8, batch_size=16, seed=6,
                      learning_rates=(1e8, 1e7))
    with pytest.raises(TrainingError) as exc:
        train_mlp(init_mlp([3, 16, 3], seed=7), x, y, cfg)
    assert "1e+08" in str(exc.value) or "rate" in str(exc.value)


def test_predict_linear_identity_and_mlp_bias_propagation():
    ident = LinearModel(np.eye(3), np.zeros(3))
    s = np.array([1.0, -2.0, 0.5])
    assert np.array_equal(predict(ident, s), s)

    model = init_mlp([2, 3, 2], seed=8)
    for w in model.weights:
        w[:] = 0.0
    model.biases[0][:] = np.array([1.0, -1.0, 0.0])
    model.biases[1][:] = np.array([0.25, 0.5])
    # hidden = selu(bias); output = 0 * hidden + final bias
    out = predict(model, np.array([3.0, 4.0]))
    assert np.max(np.abs(out - np.array([0.25, 0.5]))) < 1e-15
    assert np.array_equal(out, predict(model, np.array([3.0, 4.0])))
