import numpy as np
import pytest

from oracles import conv1d_same_oracle, conv2d_valid_oracle, maxpool_same_oracle
from surrokit.errors import InvalidInputError, ShapeError
from surrokit.network import (
    ArchitectureDescriptor,
    Conv1D,
    Conv2D,
    Dense,
    Dropout,
    MaxPool1D,
    Scale,
    _conv1d_forward,
    _conv2d_forward,
    _maxpool_forward,
    _softmax,
    count_parameters,
    forward,
    forward_batch,
    full_architecture,
    glorot_limit,
    infer_shapes,
    init_weights,
    loss_and_gradients,
    reference_architecture,
    weight_shapes,
)
from surrokit.signals import epoch_from_array

TABLE_CHANNEL_SHAPES = [
    ("scale", (960,)),
    ("conv1", (960, 16)),
    ("pool1", (480, 16)),
    ("conv2", (480, 19)),
    ("pool2", (240, 19)),
    ("conv3", (240, 23)),
    ("pool3", (120, 23)),
    ("conv4", (120, 27)),
    ("pool4", (60, 27)),
]
TABLE_JOINED_SHAPES = [
    ("conv2d", (41, 1, 10)),
    ("dense1", (85,)),
    ("dense2", (85,)),
    ("output", (6,)),
]


def tiny_descriptor(n_classes=3, input_len=24):
    """Every layer type, two channels sharing one parameter group."""
    return ArchitectureDescriptor(
        name="tiny",
        input_len=input_len,
        channel_roles=("X1", "X2"),
        parameter_sharing=(("X1", "shared"), ("X2", "shared")),
        channel_pipe=(
            Scale("scale", init=0.5),
            Conv1D("conv_a", width=3, filters=2),
            Dropout("drop_a", rate=0.25),
            MaxPool1D("pool_a", width=3, stride=2),
            Conv1D("conv_b", width=3, filters=3),
            MaxPool1D("pool_b", width=3, stride=2),
        ),
        joined_pipe=(
            Conv2D("conv2d", height=2, width=2, filters=2),
            Dense("dense_a", units=5),
            Dropout("drop_b", rate=0.25),
            Dense("output", units=n_classes, activation="softmax"),
        ),
    )


class TestShapes:
    def test_full_architecture_matches_published_table(self):
        report = infer_shapes(full_architecture())
        assert list(report.channel) == TABLE_CHANNEL_SHAPES
        assert report.joined_input == (60, 4, 27)
        assert list(report.joined) == TABLE_JOINED_SHAPES

    def test_conv1d_same_padding_preserves_length(self):
        for length in (320, 960, 961):
            desc = full_architecture(input_len=length)
            report = infer_shapes(desc)
            assert report.channel[1][1][0] == length
        for length in (7, 24, 63):
            report = infer_shapes(tiny_descriptor(input_len=length))
            assert report.channel[1][1][0] == length

    def test_oversized_conv2d_names_the_layer(self):
        desc = tiny_descriptor(input_len=4)  # channel pipe ends with length 1
        with pytest.raises(ShapeError, match="conv2d"):
            infer_shapes(desc)


class TestParameterCounts:
    def test_published_counts(self):
        counts = count_parameters(full_architecture())
        assert counts.channel_pipe == 32_936
        assert counts.joined_pipe == 64_371
        assert counts.channel_groups == 3
        assert counts.total == 3 * 32_936 + 64_371 == 163_179

    def test_counts_match_initialized_tensors(self):
        desc = reference_architecture()
        weights = init_weights(desc, 0)
        total = sum(w.size for w in weights.values())
        counts = count_parameters(desc)
        assert total == counts.total

    def test_tiny_model_count_by_hand(self):
        # scale 1 + conv_a 3*1*2+2 + conv_b 3*2*3+3 = 30 per group
        # conv2d 2*2*3*2+2 = 26; dense_a 10*5+5 = 55; output 5*3+3 = 18
        counts = count_parameters(tiny_descriptor())
        assert counts.channel_pipe == 1 + 8 + 21
        assert counts.joined_pipe == 26 + 55 + 18
        assert counts.total == 1 * counts.channel_pipe + counts.joined_pipe


class TestInit:
    def test_glorot_bounds(self):
        weights = init_weights(full_architecture(), 1234)
        for key, tensor in weights.items():
            if key.endswith("/bias"):
                np.testing.assert_array_equal(tensor, 0.0)
            elif key.endswith("/scale"):
                np.testing.assert_array_equal(tensor, 0.05)
            else:
                if tensor.ndim == 3:
                    w, c, f = tensor.shape
                    limit = glorot_limit(w * c, w * f)
                elif tensor.ndim == 4:
                    kh, kw, c, f = tensor.shape
                    limit = glorot_limit(kh * kw * c, kh * kw * f)
                else:
                    limit = glorot_limit(*tensor.shape)
                assert np.max(np.abs(tensor)) <= limit

    def test_deterministic(self):
        a = init_weights(reference_architecture(), 7)
        b = init_weights(reference_architecture(), 7)
        assert sorted(a) == sorted(b)
        for key in a:
            np.testing.assert_array_equal(a[key], b[key])

    def test_shapes_match_contract(self):
        desc = tiny_descriptor()
        weights = init_weights(desc, 0)
        assert {k: v.shape for k, v in weights.items()} == weight_shapes(desc)


class TestLayerOracles:
    def test_conv1d_against_naive_loop(self, rng):
        x = rng.standard_normal((2, 11, 3))
        kernel = rng.standard_normal((4, 3, 5))
        bias = rng.standard_normal(5)
        z, _ = _conv1d_forward(x, kernel, bias)
        for b in range(2):
            np.testing.assert_allclose(z[b], conv1d_same_oracle(x[b], kernel, bias), atol=1e-12)

    def test_maxpool_against_naive_loop(self, rng):
        for length in (9, 10, 960):
            x = rng.standard_normal((2, length, 3))
            y, _ = _maxpool_forward(x, 3, 2)
            for b in range(2):
                np.testing.assert_array_equal(y[b], maxpool_same_oracle(x[b], 3, 2))

    def test_conv2d_against_naive_loop(self, rng):
        x = rng.standard_normal((2, 7, 4, 3))
        kernel = rng.standard_normal((3, 4, 3, 6))
        bias = rng.standard_normal(6)
        z, _ = _conv2d_forward(x, kernel, bias)
        for b in range(2):
            np.testing.assert_allclose(z[b], conv2d_valid_oracle(x[b], kernel, bias), atol=1e-12)


class TestForward:
    def test_zero_weights_give_uniform_output(self):
        desc = full_architecture()
        weights = {k: np.zeros(s) for k, s in weight_shapes(desc).items()}
        epoch = epoch_from_array(np.random.default_rng(0).standard_normal((4, 960)), 32.0, "Wake")
        probs = forward(desc, weights, epoch)
        np.testing.assert_allclose(probs, 1.0 / 6.0, atol=1e-12)

    def test_probabilities_sum_to_one(self, rng):
        desc = reference_architecture()
        weights = init_weights(desc, 3)
        for _ in range(5):
            epoch = epoch_from_array(rng.standard_normal((4, 960)) * 20, 32.0, "S2")
            probs = forward(desc, weights, epoch)
            assert probs.sum() == pytest.approx(1.0, abs=1e-9)
            assert np.all(probs >= 0)

    def test_softmax_translation_invariance(self, rng):
        z = rng.standard_normal((8, 6)) * 5
        shifted = _softmax(z + 123.456)
        np.testing.assert_allclose(_softmax(z), shifted, atol=1e-9)

    def test_inference_is_deterministic(self, rng):
        desc = reference_architecture()
        weights = init_weights(desc, 5)
        epoch = epoch_from_array(rng.standard_normal((4, 960)), 32.0, "S1")
        np.testing.assert_array_equal(forward(desc, weights, epoch), forward(desc, weights, epoch))

    def test_dropout_only_active_in_training(self, rng):
        desc = tiny_descriptor()
        weights = init_weights(desc, 1)
        x = rng.standard_normal((3, 2, 24))
        p1, _ = forward_batch(desc, weights, x, training=False)
        p2, _ = forward_batch(desc, weights, x, training=False)
        np.testing.assert_array_equal(p1, p2)
        t1, _ = forward_batch(desc, weights, x, training=True, rng=np.random.default_rng(0))
        t2, _ = forward_batch(desc, weights, x, training=True, rng=np.random.default_rng(1))
        assert not np.array_equal(t1, t2)

    def test_shape_mismatch_rejected(self, rng):
        desc = reference_architecture()
        weights = init_weights(desc, 2)
        with pytest.raises(InvalidInputError):
            forward_batch(desc, weights, rng.standard_normal((1, 4, 959)))
        with pytest.raises(InvalidInputError):
            forward_batch(desc, weights, rng.standard_normal((1, 3, 960)))

    def test_golden_regression_vector(self):
        # frozen at first implementation; guards against silent numeric drift
        desc = reference_architecture()
        weights = init_weights(desc, 2024)
        data = np.sin(np.outer(np.arange(4) + 1, np.linspace(0.0, 60.0, 960))) * 25.0
        probs = forward(desc, weights, epoch_from_array(data, 32.0, "Wake"))
        golden = GOLDEN_REFERENCE_PROBS
        np.testing.assert_allclose(probs, golden, rtol=0, atol=1e-12)


GOLDEN_REFERENCE_PROBS = np.array(
    [
        0.15246723184217692,
        0.25480592704693444,
        0.16213240468056167,
        0.21095604207107763,
        0.09640916031715131,
        0.12322923404209792,
    ]
)


class TestGradients:
    @staticmethod
    def relative_error(a, b):
        scale = max(abs(a), abs(b), 1e-8)
        return abs(a - b) / scale

    def test_analytic_gradients_match_finite_differences(self, rng):
        desc = tiny_descriptor()
        # random values for every tensor (biases included) keep pre-activations
        # away from the exact ReLU kink where subgradients and finite
        # differences legitimately disagree
        weights = {k: rng.normal(0.0, 0.35, s) for k, s in weight_shapes(desc).items()}
        x = rng.standard_normal((4, 2, 24)) * 2
        labels = np.array([0, 1, 2, 1])

        _, grads = loss_and_gradients(desc, weights, x, labels, training=False)
        keys = sorted(weights)
        coords = []
        for key in keys:
            for flat_idx in range(weights[key].size):
                coords.append((key, flat_idx))
        picked = [coords[i] for i in rng.choice(len(coords), size=100, replace=False)]

        for key, flat_idx in picked:
            w = weights[key]
            original = w.flat[flat_idx]
            h = 1e-6 * max(1.0, abs(original))
            w.flat[flat_idx] = original + h
            lp, _ = loss_and_gradients(desc, weights, x, labels, training=False)
            w.flat[flat_idx] = original - h
            lm, _ = loss_and_gradients(desc, weights, x, labels, training=False)
            w.flat[flat_idx] = original
            fd = (lp - lm) / (2 * h)
            analytic = grads[key].flat[flat_idx]
            assert self.relative_error(analytic, fd) < 1e-4, (key, flat_idx)

    def test_gradients_match_with_dropout_active(self, rng):
        # identical dropout masks per evaluation via a fixed generator seed
        desc = tiny_descriptor()
        weights = {k: rng.normal(0.0, 0.35, s) for k, s in weight_shapes(desc).items()}
        x = rng.standard_normal((3, 2, 24))
        labels = np.array([0, 2, 1])

        def eval_loss():
            loss, grads = loss_and_gradients(
                desc, weights, x, labels, training=True, rng=np.random.default_rng(99)
            )
            return loss, grads

        _, grads = eval_loss()
        key = "shared/conv_a/kernel"
        for flat_idx in rng.choice(weights[key].size, size=3, replace=False):
            original = weights[key].flat[flat_idx]
            h = 1e-6
            weights[key].flat[flat_idx] = original + h
            lp, _ = eval_loss()
            weights[key].flat[flat_idx] = original - h
            lm, _ = eval_loss()
            weights[key].flat[flat_idx] = original
            fd = (lp - lm) / (2 * h)
            assert self.relative_error(grads[key].flat[flat_idx], fd) < 1e-4

    def test_shared_group_accumulates_both_channels(self, rng):
        desc = tiny_descriptor()
        weights = init_weights(desc, 17)
        x = rng.standard_normal((2, 2, 24))
        # zero out the second channel: gradients should differ from a
        # batch where both channels carry the same data
        x_same = x.copy()
        x_same[:, 1] = x[:, 0]
        _, g1 = loss_and_gradients(desc, weights, x, np.array([0, 1]), training=False)
        _, g2 = loss_and_gradients(desc, weights, x_same, np.array([0, 1]), training=False)
        assert not np.allclose(g1["shared/conv_a/kernel"], g2["shared/conv_a/kernel"])
