"""Two-stage convolutional classifier built from a declarative descriptor.

Stage one runs each input channel through a shared-architecture pipe of
1-D convolutions and max-pools; channel roles map to parameter groups,
so e.g. two EEG channels can share one set of weights. Stage two stacks
the pipe outputs into a (length, n_channels, filters) tensor and applies
a 2-D convolution followed by dense layers and a softmax.

Shapes, parameter counts, initialization, and the forward/backward pass
are all derived from the descriptor, never hard-coded. Padding
conventions: 1-D convolutions use same-padding with unit stride (left
pad (W-1)//2), max-pool uses same-padding with the extra sample on the
right, the 2-D convolution uses valid padding.

Weights are a flat dict keyed "group/layer/param" of float64 arrays.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, ShapeError
from .signals import Epoch

DEFAULT_ROLES = ("EEG1", "EEG2", "EOG", "EMG")
DEFAULT_SHARING = {"EEG1": "eeg", "EEG2": "eeg", "EOG": "eog", "EMG": "emg"}
JOINED_GROUP = "joined"


@dataclass(frozen=True)
class Scale:
    name: str = "scale"
    init: float = 0.05


@dataclass(frozen=True)
class Conv1D:
    name: str
    width: int
    filters: int
    activation: str = "relu"


@dataclass(frozen=True)
class MaxPool1D:
    name: str
    width: int = 3
    stride: int = 2


@dataclass(frozen=True)
class Conv2D:
    name: str
    height: int
    width: int
    filters: int
    activation: str = "relu"


@dataclass(frozen=True)
class Dense:
    name: str
    units: int
    activation: str = "relu"


@dataclass(frozen=True)
class Dropout:
    name: str
    rate: float


@dataclass(frozen=True)
class ArchitectureDescriptor:
    """Declarative description of the full model.

    ``parameter_sharing`` maps each channel role to the parameter group
    its pipe draws weights from; roles mapping to the same group share
    parameters.
    """

    name: str
    input_len: int
    channel_pipe: tuple
    joined_pipe: tuple
    channel_roles: tuple = DEFAULT_ROLES
    parameter_sharing: tuple = tuple(sorted(DEFAULT_SHARING.items()))

    def sharing_map(self) -> dict:
        return dict(self.parameter_sharing)

    def channel_groups(self) -> tuple:
        seen = []
        for role in self.channel_roles:
            group = self.sharing_map()[role]
            if group not in seen:
                seen.append(group)
        return tuple(seen)

    def n_classes(self) -> int:
        last = self.joined_pipe[-1]
        if not isinstance(last, Dense):
            raise InvalidInputError("joined pipe must end with a Dense layer")
        return last.units


@dataclass(frozen=True)
class ShapeReport:
    """Per-layer output shapes, dropout layers omitted (they change nothing)."""

    channel: tuple  # ((layer_name, shape), ...)
    joined_input: tuple
    joined: tuple


def _pool_geometry(length: int, width: int, stride: int):
    out_len = -(-length // stride)
    pad_total = max(0, (out_len - 1) * stride + width - length)
    pad_left = pad_total // 2
    return out_len, pad_left, pad_total - pad_left


def infer_shapes(descriptor: ArchitectureDescriptor) -> ShapeReport:
    """Walk the descriptor and report every layer's output shape."""
    shape = (descriptor.input_len,)
    channel = []
    for layer in descriptor.channel_pipe:
        if isinstance(layer, Dropout):
            continue
        if isinstance(layer, Scale):
            pass
        elif isinstance(layer, Conv1D):
            length = shape[0]
            shape = (length, layer.filters)
        elif isinstance(layer, MaxPool1D):
            if len(shape) != 2:
                raise ShapeError(f"{layer.name}: max-pool expects (length, channels), got {shape}")
            out_len, _, _ = _pool_geometry(shape[0], layer.width, layer.stride)
            shape = (out_len, shape[1])
        else:
            raise ShapeError(f"{layer.name}: layer type not allowed in the channel pipe")
        channel.append((layer.name, shape))

    if len(shape) != 2:
        raise ShapeError("channel pipe must end with a (length, filters) shape")
    joined_input = (shape[0], len(descriptor.channel_roles), shape[1])

    shape = joined_input
    joined = []
    for layer in descriptor.joined_pipe:
        if isinstance(layer, Dropout):
            continue
        if isinstance(layer, Conv2D):
            if len(shape) != 3:
                raise ShapeError(f"{layer.name}: 2-D convolution expects a rank-3 input, got {shape}")
            h, w, _ = shape
            oh, ow = h - layer.height + 1, w - layer.width + 1
            if oh < 1 or ow < 1:
                raise ShapeError(
                    f"{layer.name}: kernel {layer.height}x{layer.width} exceeds input {h}x{w}"
                )
            shape = (oh, ow, layer.filters)
        elif isinstance(layer, Dense):
            shape = (layer.units,)
        else:
            raise ShapeError(f"{layer.name}: layer type not allowed in the joined pipe")
        joined.append((layer.name, shape))
    return ShapeReport(tuple(channel), joined_input, tuple(joined))


@dataclass(frozen=True)
class ParameterCount:
    channel_pipe: int
    joined_pipe: int
    channel_groups: int
    total: int


def _pipe_param_counts(layers, in_shape):
    """Yield (layer, n_params, fan_in_shape) walking a pipe."""
    shape = in_shape
    for layer in layers:
        if isinstance(layer, Dropout):
            continue
        if isinstance(layer, Scale):
            yield layer, 1, shape
        elif isinstance(layer, Conv1D):
            c_in = shape[1] if len(shape) == 2 else 1
            yield layer, layer.width * c_in * layer.filters + layer.filters, shape
            shape = (shape[0], layer.filters)
        elif isinstance(layer, MaxPool1D):
            out_len, _, _ = _pool_geometry(shape[0], layer.width, layer.stride)
            shape = (out_len, shape[1])
            yield layer, 0, shape
        elif isinstance(layer, Conv2D):
            c_in = shape[2]
            yield layer, layer.height * layer.width * c_in * layer.filters + layer.filters, shape
            shape = (shape[0] - layer.height + 1, shape[1] - layer.width + 1, layer.filters)
        elif isinstance(layer, Dense):
            fan_in = int(np.prod(shape))
            yield layer, fan_in * layer.units + layer.units, shape
            shape = (layer.units,)


def count_parameters(descriptor: ArchitectureDescriptor) -> ParameterCount:
    """Trainable parameter totals per pipe, derived from the descriptor."""
    shapes = infer_shapes(descriptor)
    channel = sum(n for _, n, _ in _pipe_param_counts(descriptor.channel_pipe, (descriptor.input_len,)))
    joined = sum(n for _, n, _ in _pipe_param_counts(descriptor.joined_pipe, shapes.joined_input))
    n_groups = len(descriptor.channel_groups())
    return ParameterCount(
        channel_pipe=channel,
        joined_pipe=joined,
        channel_groups=n_groups,
        total=n_groups * channel + joined,
    )


def weight_shapes(descriptor: ArchitectureDescriptor) -> dict:
    """Expected tensor shapes keyed "group/layer/param"."""
    shapes = infer_shapes(descriptor)
    out = {}

    def pipe_shapes(group, layers, in_shape):
        shape = in_shape
        for layer in layers:
            if isinstance(layer, Dropout):
                continue
            if isinstance(layer, Scale):
                out[f"{group}/{layer.name}/scale"] = (1,)
            elif isinstance(layer, Conv1D):
                c_in = shape[1] if len(shape) == 2 else 1
                out[f"{group}/{layer.name}/kernel"] = (layer.width, c_in, layer.filters)
                out[f"{group}/{layer.name}/bias"] = (layer.filters,)
                shape = (shape[0], layer.filters)
            elif isinstance(layer, MaxPool1D):
                out_len, _, _ = _pool_geometry(shape[0], layer.width, layer.stride)
                shape = (out_len, shape[1])
            elif isinstance(layer, Conv2D):
                out[f"{group}/{layer.name}/kernel"] = (layer.height, layer.width, shape[2], layer.filters)
                out[f"{group}/{layer.name}/bias"] = (layer.filters,)
                shape = (shape[0] - layer.height + 1, shape[1] - layer.width + 1, layer.filters)
            elif isinstance(layer, Dense):
                fan_in = int(np.prod(shape))
                out[f"{group}/{layer.name}/kernel"] = (fan_in, layer.units)
                out[f"{group}/{layer.name}/bias"] = (layer.units,)
                shape = (layer.units,)

    for group in descriptor.channel_groups():
        pipe_shapes(group, descriptor.channel_pipe, (descriptor.input_len,))
    pipe_shapes(JOINED_GROUP, descriptor.joined_pipe, shapes.joined_input)
    return out


def glorot_limit(fan_in: int, fan_out: int) -> float:
    return float(np.sqrt(6.0 / (fan_in + fan_out)))


def init_weights(descriptor: ArchitectureDescriptor, rng) -> dict:
    """Glorot-uniform kernels, zero biases, configured scale constants.

    ``rng`` may be a Generator or an integer seed. Iteration order is
    fixed (channel groups in first-appearance order, then the joined
    pipe), so initialization is deterministic given the seed.
    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(np.random.SeedSequence(rng))
    weights = {}

    def init_pipe(group, layers, in_shape):
        shape = in_shape
        for layer in layers:
            if isinstance(layer, Dropout):
                continue
            if isinstance(layer, Scale):
                weights[f"{group}/{layer.name}/scale"] = np.array([layer.init])
            elif isinstance(layer, Conv1D):
                c_in = shape[1] if len(shape) == 2 else 1
                limit = glorot_limit(layer.width * c_in, layer.width * layer.filters)
                weights[f"{group}/{layer.name}/kernel"] = rng.uniform(
                    -limit, limit, (layer.width, c_in, layer.filters)
                )
                weights[f"{group}/{layer.name}/bias"] = np.zeros(layer.filters)
                shape = (shape[0], layer.filters)
            elif isinstance(layer, MaxPool1D):
                out_len, _, _ = _pool_geometry(shape[0], layer.width, layer.stride)
                shape = (out_len, shape[1])
            elif isinstance(layer, Conv2D):
                receptive = layer.height * layer.width
                limit = glorot_limit(receptive * shape[2], receptive * layer.filters)
                weights[f"{group}/{layer.name}/kernel"] = rng.uniform(
                    -limit, limit, (layer.height, layer.width, shape[2], layer.filters)
                )
                weights[f"{group}/{layer.name}/bias"] = np.zeros(layer.filters)
                shape = (shape[0] - layer.height + 1, shape[1] - layer.width + 1, layer.filters)
            elif isinstance(layer, Dense):
                fan_in = int(np.prod(shape))
                limit = glorot_limit(fan_in, layer.units)
                weights[f"{group}/{layer.name}/kernel"] = rng.uniform(
                    -limit, limit, (fan_in, layer.units)
                )
                weights[f"{group}/{layer.name}/bias"] = np.zeros(layer.units)
                shape = (layer.units,)

    shapes = infer_shapes(descriptor)
    for group in descriptor.channel_groups():
        init_pipe(group, descriptor.channel_pipe, (descriptor.input_len,))
    init_pipe(JOINED_GROUP, descriptor.joined_pipe, shapes.joined_input)
    return weights


def validate_weights(descriptor: ArchitectureDescriptor, weights: dict) -> None:
    expected = weight_shapes(descriptor)
    for key, shape in expected.items():
        if key not in weights:
            raise InvalidInputError(f"missing weight tensor {key!r}")
        if tuple(weights[key].shape) != shape:
            raise InvalidInputError(
                f"tensor {key!r} has shape {tuple(weights[key].shape)}, expected {shape}"
            )
        if not np.all(np.isfinite(weights[key])):
            raise InvalidInputError(f"tensor {key!r} contains non-finite values")
    extra = set(weights) - set(expected)
    if extra:
        raise InvalidInputError(f"unexpected weight tensors: {sorted(extra)}")


# ---------------------------------------------------------------------------
# forward / backward


def _relu(z):
    return np.maximum(z, 0.0)


def _softmax(z):
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _conv1d_forward(x, kernel, bias):
    # x: (B, L, C), kernel: (W, C, F) -> (B, L, F), same padding, stride 1.
    # One matmul per kernel tap avoids materializing the W-fold im2col
    # expansion, which dominates the runtime otherwise.
    batch, length, _ = x.shape
    width, _, filters = kernel.shape
    pad_left = (width - 1) // 2
    pad_right = width - 1 - pad_left
    xp = np.pad(x, ((0, 0), (pad_left, pad_right), (0, 0)))
    z = np.zeros((batch, length, filters))
    for w in range(width):
        z += xp[:, w : w + length] @ kernel[w]
    z += bias
    return z, (xp, pad_left)


def _conv1d_backward(dz, kernel, cache):
    xp, pad_left = cache
    width, c_in, filters = kernel.shape
    batch, length, _ = dz.shape
    d_bias = dz.sum(axis=(0, 1))
    d_kernel = np.empty_like(kernel)
    for w in range(width):
        d_kernel[w] = np.matmul(xp[:, w : w + length].transpose(0, 2, 1), dz).sum(axis=0)
    dxp = np.zeros_like(xp)
    for w in range(width):
        dxp[:, w : w + length] += dz @ kernel[w].T
    return dxp[:, pad_left : pad_left + length], d_kernel, d_bias


def _maxpool_forward(x, width, stride):
    # x: (B, L, C) -> (B, out_len, C), same padding with -inf
    _, length, _ = x.shape
    out_len, pad_left, pad_right = _pool_geometry(length, width, stride)
    xp = np.pad(x, ((0, 0), (pad_left, pad_right), (0, 0)), constant_values=-np.inf)
    last_start = (out_len - 1) * stride
    stacked = np.stack(
        [xp[:, w : last_start + w + 1 : stride] for w in range(width)]
    )  # (W, B, out_len, C)
    arg = stacked.argmax(axis=0)
    y = np.take_along_axis(stacked, arg[None], axis=0)[0]
    return y, (xp.shape, pad_left, arg, out_len)


def _maxpool_backward(dy, x_shape, width, stride, cache):
    xp_shape, pad_left, arg, out_len = cache
    batch, length, chans = x_shape
    starts = np.arange(out_len) * stride
    positions = starts[None, :, None] + arg  # (B, out_len, C) indices into padded length
    flat = (
        np.arange(batch)[:, None, None] * (xp_shape[1] * chans)
        + positions * chans
        + np.arange(chans)[None, None, :]
    )
    dxp = np.bincount(
        flat.ravel(), weights=dy.ravel(), minlength=batch * xp_shape[1] * chans
    ).reshape(batch, xp_shape[1], chans)
    return dxp[:, pad_left : pad_left + length, :]


def _conv2d_forward(x, kernel, bias):
    # x: (B, H, W, C), kernel: (KH, KW, C, F), valid padding -> (B, OH, OW, F)
    batch, height, width, _ = x.shape
    kh, kw, _, filters = kernel.shape
    oh, ow = height - kh + 1, width - kw + 1
    z = np.zeros((batch, oh, ow, filters))
    for i in range(kh):
        for j in range(kw):
            z += x[:, i : i + oh, j : j + ow] @ kernel[i, j]
    z += bias
    return z, (x, (oh, ow))


def _conv2d_backward(dz, x_shape, kernel, cache):
    x, (oh, ow) = cache
    kh, kw, _, _ = kernel.shape
    d_bias = dz.sum(axis=(0, 1, 2))
    d_kernel = np.empty_like(kernel)
    dx = np.zeros_like(x)
    for i in range(kh):
        for j in range(kw):
            patch = x[:, i : i + oh, j : j + ow]
            d_kernel[i, j] = np.tensordot(patch, dz, axes=([0, 1, 2], [0, 1, 2]))
            dx[:, i : i + oh, j : j + ow] += dz @ kernel[i, j].T
    return dx, d_kernel, d_bias


def _run_pipe(layers, group, weights, x, training, rng, caches):
    """Apply a layer pipe; cache per-layer state for the backward pass."""
    for layer in layers:
        if isinstance(layer, Scale):
            k = weights[f"{group}/{layer.name}/scale"]
            caches.append((layer, group, x))
            x = k[0] * x
        elif isinstance(layer, Conv1D):
            kernel = weights[f"{group}/{layer.name}/kernel"]
            bias = weights[f"{group}/{layer.name}/bias"]
            z, cache = _conv1d_forward(x, kernel, bias)
            mask = z > 0 if layer.activation == "relu" else None
            caches.append((layer, group, (x.shape, cache, mask)))
            x = _relu(z) if layer.activation == "relu" else z
        elif isinstance(layer, MaxPool1D):
            y, cache = _maxpool_forward(x, layer.width, layer.stride)
            caches.append((layer, group, (x.shape, cache)))
            x = y
        elif isinstance(layer, Conv2D):
            kernel = weights[f"{group}/{layer.name}/kernel"]
            bias = weights[f"{group}/{layer.name}/bias"]
            z, cache = _conv2d_forward(x, kernel, bias)
            mask = z > 0 if layer.activation == "relu" else None
            caches.append((layer, group, (x.shape, cache, mask)))
            x = _relu(z) if layer.activation == "relu" else z
        elif isinstance(layer, Dense):
            kernel = weights[f"{group}/{layer.name}/kernel"]
            bias = weights[f"{group}/{layer.name}/bias"]
            flat = x.reshape(x.shape[0], -1)
            z = flat @ kernel + bias
            if layer.activation == "relu":
                mask = z > 0
                y = _relu(z)
            else:
                # softmax / linear handled by the caller via logits
                mask = None
                y = z
            caches.append((layer, group, (x.shape, flat, mask)))
            x = y
        elif isinstance(layer, Dropout):
            if training and layer.rate > 0.0:
                if rng is None:
                    raise InvalidInputError("training-mode forward needs an rng for dropout")
                keep = rng.random(x.shape) >= layer.rate
                scale = 1.0 / (1.0 - layer.rate)
                caches.append((layer, group, keep))
                x = x * keep * scale
            else:
                caches.append((layer, group, None))
        else:
            raise ShapeError(f"{layer.name}: unsupported layer type")
    return x


def _pipe_backward(caches, weights, grads, dy):
    """Walk cached layers in reverse, accumulating parameter gradients."""
    for layer, group, cache in reversed(caches):
        if isinstance(layer, Scale):
            x = cache
            k = weights[f"{group}/{layer.name}/scale"]
            _acc(grads, f"{group}/{layer.name}/scale", np.array([np.sum(dy * x)]))
            dy = k[0] * dy
        elif isinstance(layer, Conv1D):
            x_shape, conv_cache, mask = cache
            dz = dy * mask if mask is not None else dy
            kernel = weights[f"{group}/{layer.name}/kernel"]
            dx, dk, db = _conv1d_backward(dz, kernel, conv_cache)
            _acc(grads, f"{group}/{layer.name}/kernel", dk)
            _acc(grads, f"{group}/{layer.name}/bias", db)
            dy = dx
        elif isinstance(layer, MaxPool1D):
            x_shape, pool_cache = cache
            dy = _maxpool_backward(dy, x_shape, layer.width, layer.stride, pool_cache)
        elif isinstance(layer, Conv2D):
            x_shape, conv_cache, mask = cache
            dz = dy * mask if mask is not None else dy
            kernel = weights[f"{group}/{layer.name}/kernel"]
            dx, dk, db = _conv2d_backward(dz, x_shape, kernel, conv_cache)
            _acc(grads, f"{group}/{layer.name}/kernel", dk)
            _acc(grads, f"{group}/{layer.name}/bias", db)
            dy = dx
        elif isinstance(layer, Dense):
            x_shape, flat, mask = cache
            dz = dy * mask if mask is not None else dy
            kernel = weights[f"{group}/{layer.name}/kernel"]
            _acc(grads, f"{group}/{layer.name}/kernel", flat.T @ dz)
            _acc(grads, f"{group}/{layer.name}/bias", dz.sum(axis=0))
            dy = (dz @ kernel.T).reshape(x_shape)
        elif isinstance(layer, Dropout):
            if cache is not None:
                dy = dy * cache * (1.0 / (1.0 - layer.rate))
    return dy


def _acc(grads, key, value):
    if key in grads:
        grads[key] = grads[key] + value
    else:
        grads[key] = value


def _group_channels(descriptor):
    """Channel indices per parameter group, in first-appearance order."""
    sharing = descriptor.sharing_map()
    order = []
    members = {}
    for i, role in enumerate(descriptor.channel_roles):
        group = sharing[role]
        if group not in members:
            members[group] = []
            order.append(group)
        members[group].append(i)
    return [(group, tuple(members[group])) for group in order]


def forward_batch(descriptor, weights, x, training=False, rng=None, return_caches=False):
    """Forward pass over a batch.

    Args:
        x: (batch, n_channels, input_len) float64 array.
        training: enable dropout (requires rng).

    Returns:
        (probabilities, logits) or, with ``return_caches``, a third
        element holding per-channel and joined layer caches.
    """
    x = np.asarray(x, dtype=np.float64)
    n_roles = len(descriptor.channel_roles)
    if x.ndim != 3 or x.shape[1] != n_roles or x.shape[2] != descriptor.input_len:
        raise InvalidInputError(
            f"expected input (batch, {n_roles}, {descriptor.input_len}), got {x.shape}"
        )
    validate_weights(descriptor, weights)
    batch = x.shape[0]
    # channels sharing a parameter group run through the pipe as one
    # stacked batch, so shared gradients accumulate in a single pass
    group_channels = _group_channels(descriptor)
    outputs = [None] * n_roles
    group_caches = []
    for group, idxs in group_channels:
        stacked = x[:, idxs].transpose(1, 0, 2).reshape(len(idxs) * batch, descriptor.input_len, 1)
        caches = []
        h = _run_pipe(descriptor.channel_pipe, group, weights, stacked, training, rng, caches)
        h = h.reshape(len(idxs), batch, h.shape[1], h.shape[2])
        for j, idx in enumerate(idxs):
            outputs[idx] = h[j]
        group_caches.append(caches)
    joined = np.stack(outputs, axis=2)  # (B, L, n_channels, F)

    joined_caches = []
    logits = _run_pipe(
        descriptor.joined_pipe, JOINED_GROUP, weights, joined, training, rng, joined_caches
    )
    probs = _softmax(logits)
    if return_caches:
        return probs, logits, (group_channels, group_caches, joined_caches)
    return probs, logits


def forward(descriptor, weights, epoch: Epoch, inference_mode=True, rng=None) -> np.ndarray:
    """Class probabilities for one epoch.

    In inference mode (the default) dropout is disabled and the result is
    deterministic.
    """
    if tuple(epoch.channel_roles) != tuple(descriptor.channel_roles):
        raise InvalidInputError(
            f"epoch roles {epoch.channel_roles} do not match descriptor roles "
            f"{descriptor.channel_roles}"
        )
    probs, _ = forward_batch(
        descriptor, weights, epoch.to_array()[None], training=not inference_mode, rng=rng
    )
    return probs[0]


def loss_and_gradients(descriptor, weights, x, labels, training=True, rng=None):
    """Mean cross-entropy loss and parameter gradients for a batch.

    Args:
        labels: integer class indices, shape (batch,).

    Returns:
        (loss, grads) where grads mirrors the weights dict. Gradients of
        shared parameter groups accumulate over all channels using them.
    """
    labels = np.asarray(labels)
    probs, logits, (group_channels, group_caches, joined_caches) = forward_batch(
        descriptor, weights, x, training=training, rng=rng, return_caches=True
    )
    batch = logits.shape[0]
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    loss = float(-log_probs[np.arange(batch), labels].mean())

    d_logits = probs.copy()
    d_logits[np.arange(batch), labels] -= 1.0
    d_logits /= batch

    grads = {}
    d_joined = _pipe_backward(joined_caches, weights, grads, d_logits)
    for (group, idxs), caches in zip(group_channels, group_caches):
        d_stacked = np.concatenate([d_joined[:, :, i, :] for i in idxs], axis=0)
        _pipe_backward(caches, weights, grads, d_stacked)
    return loss, grads


# ---------------------------------------------------------------------------
# descriptor builders


def full_architecture(
    n_classes: int = 6,
    input_len: int = 960,
    dropout_conv: float = 0.33,
    dropout_dense: float = 0.015,
    dropout_after_conv2d: bool = True,
) -> ArchitectureDescriptor:
    """The reference two-stage architecture at publication scale.

    Channel pipe: Scale, then four Conv1D/MaxPool blocks with widths and
    filter counts 16/19/23/27 (32,936 trainable parameters per group).
    Joined pipe: a 20x4 Conv2D with 10 filters, two 85-unit dense layers
    and the softmax output (64,371 trainable parameters).
    """
    channel = [Scale("scale", init=0.05)]
    for i, (width, filters) in enumerate(((16, 16), (19, 19), (23, 23), (27, 27)), start=1):
        channel.append(Conv1D(f"conv{i}", width=width, filters=filters))
        channel.append(Dropout(f"drop{i}", rate=dropout_conv))
        channel.append(MaxPool1D(f"pool{i}", width=3, stride=2))
    joined = [Conv2D("conv2d", height=20, width=4, filters=10)]
    if dropout_after_conv2d:
        joined.append(Dropout("drop_conv2d", rate=dropout_dense))
    joined += [
        Dense("dense1", units=85),
        Dropout("drop_dense1", rate=dropout_dense),
        Dense("dense2", units=85),
        Dropout("drop_dense2", rate=dropout_dense),
        Dense("output", units=n_classes, activation="softmax"),
    ]
    return ArchitectureDescriptor(
        name="full", input_len=input_len, channel_pipe=tuple(channel), joined_pipe=tuple(joined)
    )


def reference_architecture(
    n_classes: int = 6,
    input_len: int = 960,
    dropout_conv: float = 0.33,
    dropout_dense: float = 0.015,
    dropout_after_conv2d: bool = True,
) -> ArchitectureDescriptor:
    """Width-reduced variant for desk-scale training (filters 8, dense 32)."""
    channel = [Scale("scale", init=0.05)]
    for i, width in enumerate((16, 19, 23, 27), start=1):
        channel.append(Conv1D(f"conv{i}", width=width, filters=8))
        channel.append(Dropout(f"drop{i}", rate=dropout_conv))
        channel.append(MaxPool1D(f"pool{i}", width=3, stride=2))
    joined = [Conv2D("conv2d", height=20, width=4, filters=8)]
    if dropout_after_conv2d:
        joined.append(Dropout("drop_conv2d", rate=dropout_dense))
    joined += [
        Dense("dense1", units=32),
        Dropout("drop_dense1", rate=dropout_dense),
        Dense("dense2", units=32),
        Dropout("drop_dense2", rate=dropout_dense),
        Dense("output", units=n_classes, activation="softmax"),
    ]
    return ArchitectureDescriptor(
        name="reference",
        input_len=input_len,
        channel_pipe=tuple(channel),
        joined_pipe=tuple(joined),
    )


ARCHITECTURES = {"full": full_architecture, "reference": reference_architecture}
