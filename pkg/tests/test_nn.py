"""Network, gradient, optimizer, and spectral-norm contracts.

Central finite differences and dense SVD serve as the independent
oracles for backprop and the power-iteration estimates.
"""

import numpy as np
import pytest

from wtest.errors import ConfigurationError, DimensionError, NumericError
from wtest.nn import (
    CriticNet,
    LayerParams,
    TrainConfig,
    batch_forward,
    batch_gradient,
    forward,
    init_critic,
    init_optimizer_state,
    lipschitz_upper_bound,
    optimizer_step,
    parameter_count,
    spectral_normalize,
)


def make_net(weights, biases=None):
    layers = []
    for i, w in enumerate(weights):
        w = np.asarray(w, dtype=np.float64)
        b = np.zeros(w.shape[0]) if biases is None else np.asarray(biases[i], float)
        layers.append(LayerParams(w, b, np.ones(w.shape[0]) / np.sqrt(w.shape[0])))
    return CriticNet(layers)


def flatten_params(net):
    return np.concatenate([np.concatenate([l.weight.ravel(), l.bias]) for l in net.layers])


def set_params(net, theta):
    pos = 0
    for layer in net.layers:
        k = layer.weight.size
        layer.weight = theta[pos : pos + k].reshape(layer.weight.shape).copy()
        pos += k
        k = layer.bias.size
        layer.bias = theta[pos : pos + k].copy()
        pos += k


def fd_gradient(net, weights, X, h=1e-6):
    """Central-difference oracle for the weighted-sum objective."""
    theta0 = flatten_params(net)
    grad = np.empty_like(theta0)
    probe = net.copy()
    for j in range(theta0.size):
        theta = theta0.copy()
        theta[j] = theta0[j] + h
        set_params(probe, theta)
        up = float(weights @ batch_forward(probe, X))
        theta[j] = theta0[j] - h
        set_params(probe, theta)
        down = float(weights @ batch_forward(probe, X))
        grad[j] = (up - down) / (2 * h)
    return grad


class TestInit:
    def test_shapes_match_requested_architecture(self):
        cfg = TrainConfig(hidden_widths=(100, 100, 100))
        net = init_critic(2, cfg, np.random.default_rng(0))
        shapes = [l.weight.shape for l in net.layers]
        assert shapes == [(100, 2), (100, 100), (100, 100), (1, 100)]
        assert all(np.all(l.bias == 0.0) for l in net.layers)

    def test_initial_net_is_certified(self):
        for seed in range(5):
            net = init_critic(3, TrainConfig(hidden_widths=(20, 10)), np.random.default_rng(seed))
            assert lipschitz_upper_bound(net) <= 1.0 + 1e-6

    def test_same_seed_same_parameters(self):
        cfg = TrainConfig(hidden_widths=(8, 8), seed=3)
        a = init_critic(2, cfg, np.random.default_rng(42))
        b = init_critic(2, cfg, np.random.default_rng(42))
        for la, lb in zip(a.layers, b.layers):
            assert np.array_equal(la.weight, lb.weight)
            assert np.array_equal(la.bias, lb.bias)

    def test_invalid_dimension_rejected(self):
        with pytest.raises(ConfigurationError):
            init_critic(0, TrainConfig(hidden_widths=(4,)), np.random.default_rng(0))

    def test_parameter_count_matches_built_net(self):
        cfg = TrainConfig(hidden_widths=(7, 5))
        net = init_critic(3, cfg, np.random.default_rng(1))
        assert net.parameter_count == parameter_count(3, (7, 5))
        assert net.parameter_count == (7 * 3 + 7) + (5 * 7 + 5) + (1 * 5 + 1)

    def test_nonzero_count_excludes_zero_biases(self):
        net = init_critic(2, TrainConfig(hidden_widths=(4,)), np.random.default_rng(0))
        weights_only = sum(l.weight.size for l in net.layers)
        assert net.nonzero_parameter_count() == weights_only


class TestForward:
    def test_zero_weights_return_final_bias(self):
        net = make_net([np.zeros((3, 2)), np.zeros((1, 3))], [np.zeros(3), np.array([0.7])])
        for x in np.random.default_rng(0).uniform(-2, 2, (10, 2)):
            assert forward(net, x) == 0.7

    def test_single_linear_layer(self):
        net = make_net([np.array([[1.0, 0.0]])])
        assert forward(net, np.array([0.3, 0.9])) == pytest.approx(0.3, abs=1e-15)

    def test_dimension_mismatch_raises(self):
        net = make_net([np.eye(2), np.ones((1, 2))])
        with pytest.raises(DimensionError):
            forward(net, np.array([1.0, 2.0, 3.0]))

    def test_input_gradient_matches_finite_differences(self):
        # d/dx f via central differences at non-kink points
        rng = np.random.default_rng(5)
        net = init_critic(3, TrainConfig(hidden_widths=(12, 8)), rng)
        x = rng.uniform(0.1, 0.9, 3)
        h = 1e-5
        for j in range(3):
            e = np.zeros(3)
            e[j] = h
            fd = (forward(net, x + e) - forward(net, x - e)) / (2 * h)
            # analytic input gradient via a probe: f(x + t e_j) is locally linear
            tiny = 1e-9
            analytic = (forward(net, x + tiny * np.eye(3)[j]) - forward(net, x)) / tiny
            assert abs(fd - analytic) <= 1e-5

    def test_forward_is_pure(self):
        rng = np.random.default_rng(2)
        net = init_critic(2, TrainConfig(hidden_widths=(6,)), rng)
        x = np.array([0.2, 0.4])
        before = flatten_params(net).copy()
        v1 = forward(net, x)
        v2 = forward(net, x)
        assert v1 == v2
        assert np.array_equal(flatten_params(net), before)


class TestBatchGradient:
    def test_zero_weights_give_zero_gradient(self):
        rng = np.random.default_rng(7)
        net = init_critic(2, TrainConfig(hidden_widths=(5,)), rng)
        X = rng.uniform(0, 1, (4, 2))
        grads = batch_gradient(net, np.zeros(4), X)
        assert all(np.all(gw == 0) and np.all(gb == 0) for gw, gb in grads)

    @pytest.mark.parametrize("seed", range(4))
    def test_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        net = init_critic(2, TrainConfig(hidden_widths=(5, 4)), rng)
        X = rng.uniform(0.05, 0.95, (4, 2))
        w = rng.normal(size=4)
        analytic = np.concatenate(
            [np.concatenate([gw.ravel(), gb]) for gw, gb in batch_gradient(net, w, X)]
        )
        numeric = fd_gradient(net, w, X)
        err = np.linalg.norm(analytic - numeric) / max(np.linalg.norm(numeric), 1e-12)
        assert err <= 1e-5

    def test_linearity_in_objective_weights(self):
        rng = np.random.default_rng(11)
        net = init_critic(2, TrainConfig(hidden_widths=(6,)), rng)
        X = rng.uniform(0, 1, (8, 2))
        w1 = rng.normal(size=8)
        w2 = rng.normal(size=8)
        combined = batch_gradient(net, w1 + w2, X)
        parts = [batch_gradient(net, w, X) for w in (w1, w2)]
        for i, (gw, gb) in enumerate(combined):
            np.testing.assert_allclose(gw, parts[0][i][0] + parts[1][i][0], atol=1e-12)
            np.testing.assert_allclose(gb, parts[0][i][1] + parts[1][i][1], atol=1e-12)


class TestSpectralNormalize:
    def test_diagonal_matrix_divided_by_top_value(self):
        net = make_net([np.diag([2.0, 0.5]), np.ones((1, 2)) / np.sqrt(2)])
        spectral_normalize(net, power_iterations=60)
        np.testing.assert_allclose(net.layers[0].weight, np.diag([1.0, 0.25]), atol=1e-9)

    def test_contraction_left_unchanged(self):
        w = 0.8 * np.eye(2)
        net = make_net([w, np.ones((1, 2)) / np.sqrt(2)])
        spectral_normalize(net, power_iterations=50)
        np.testing.assert_array_equal(net.layers[0].weight, w)

    def test_power_iteration_close_to_svd_oracle(self):
        rng = np.random.default_rng(1)
        w = rng.standard_normal((50, 50))
        net = make_net([np.zeros((50, 50)), np.ones((1, 50)) / np.sqrt(50)])
        net.layers[0].weight = w.copy()
        net.layers[0].power_vec = rng.standard_normal(50)
        net.layers[0].power_vec /= np.linalg.norm(net.layers[0].power_vec)
        u = net.layers[0].power_vec
        sigma = 0.0
        for _ in range(30):
            v = w.T @ u
            v /= np.linalg.norm(v)
            wu = w @ v
            sigma = np.linalg.norm(wu)
            u = wu / sigma
        top = np.linalg.svd(w, compute_uv=False)[0]
        assert abs(sigma - top) / top <= 1e-4

    def test_biases_unchanged(self):
        rng = np.random.default_rng(3)
        net = init_critic(2, TrainConfig(hidden_widths=(5,)), rng)
        for layer in net.layers:
            layer.weight = layer.weight * 3.0
            layer.bias = rng.normal(size=layer.bias.shape)
        biases = [l.bias.copy() for l in net.layers]
        spectral_normalize(net, power_iterations=10)
        for layer, b in zip(net.layers, biases):
            assert np.array_equal(layer.bias, b)


class TestLipschitzBound:
    def test_rank_one_row(self):
        row = np.array([[3.0, 0.0]])
        net = make_net([row])
        assert lipschitz_upper_bound(net) == pytest.approx(3.0, rel=1e-9)

    def test_product_over_layers(self):
        net = make_net([0.5 * np.eye(2), 0.5 * np.array([[1.0, 0.0]])])
        assert lipschitz_upper_bound(net) == pytest.approx(0.25, rel=1e-9)

    def test_normalized_net_certified(self):
        rng = np.random.default_rng(9)
        net = init_critic(2, TrainConfig(hidden_widths=(30, 30)), rng)
        for layer in net.layers:
            layer.weight = layer.weight * 7.3
        spectral_normalize(net, power_iterations=40)
        assert lipschitz_upper_bound(net) <= 1.0 + 1e-6

    def test_sampled_lipschitz_property(self):
        rng = np.random.default_rng(21)
        net = init_critic(3, TrainConfig(hidden_widths=(25, 25)), rng)
        X = rng.uniform(-1, 2, (1000, 3))
        Y = rng.uniform(-1, 2, (1000, 3))
        fx = batch_forward(net, X)
        fy = batch_forward(net, Y)
        gaps = np.abs(fx - fy)
        dists = np.linalg.norm(X - Y, axis=1)
        assert np.all(gaps <= (1.0 + 1e-6) * dists + 1e-12)


class TestOptimizerStep:
    def scalar_net(self, value=0.0):
        return make_net([np.array([[value]])])

    def test_sgd_single_step(self):
        net = self.scalar_net(0.0)
        cfg = TrainConfig(hidden_widths=(1,), optimizer="sgd", learning_rate=0.1, epochs=1)
        state = init_optimizer_state(net, cfg)
        grads = [(np.array([[1.0]]), np.array([0.0]))]
        optimizer_step(net, grads, state, cfg)
        assert net.layers[0].weight[0, 0] == pytest.approx(0.1, abs=1e-15)

    def test_adam_first_step_is_signed_lr(self):
        cfg = TrainConfig(hidden_widths=(1,), optimizer="adam", learning_rate=0.01, epochs=1)
        for g in (0.5, -2.0, 3e-4):
            net = self.scalar_net(0.0)
            state = init_optimizer_state(net, cfg)
            optimizer_step(net, [(np.array([[g]]), np.array([0.0]))], state, cfg)
            assert net.layers[0].weight[0, 0] == pytest.approx(
                0.01 * np.sign(g), rel=1e-3
            )

    def test_zero_gradient_leaves_parameters(self):
        for opt in ("sgd", "adam"):
            cfg = TrainConfig(hidden_widths=(1,), optimizer=opt, learning_rate=0.5, epochs=1)
            net = self.scalar_net(0.3)
            state = init_optimizer_state(net, cfg)
            for _ in range(3):
                optimizer_step(net, [(np.array([[0.0]]), np.array([0.0]))], state, cfg)
            assert net.layers[0].weight[0, 0] == 0.3

    def test_non_finite_gradient_names_layer(self):
        net = make_net([np.eye(2), np.ones((1, 2))])
        cfg = TrainConfig(hidden_widths=(2,), epochs=1)
        state = init_optimizer_state(net, cfg)
        grads = [
            (np.zeros((2, 2)), np.zeros(2)),
            (np.array([[np.nan, 0.0]]), np.zeros(1)),
        ]
        with pytest.raises(NumericError, match="layer 1"):
            optimizer_step(net, grads, state, cfg)


class TestTrainConfig:
    def test_rejects_bad_values(self):
        with pytest.raises(ConfigurationError):
            TrainConfig(hidden_widths=())
        with pytest.raises(ConfigurationError):
            TrainConfig(learning_rate=0.0)
        with pytest.raises(ConfigurationError):
            TrainConfig(epochs=0)
        with pytest.raises(ConfigurationError):
            TrainConfig(optimizer="lbfgs")

    def test_unknown_fields_rejected(self):
        with pytest.raises(ConfigurationError, match="momentum"):
            TrainConfig.from_dict({"momentum": 0.9})

    def test_digest_stable_and_sensitive(self):
        a = TrainConfig(seed=1)
        b = TrainConfig(seed=1)
        c = TrainConfig(seed=2)
        assert a.digest() == b.digest()
        assert a.digest() != c.digest()
