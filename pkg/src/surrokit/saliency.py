"""Saliency maps from moving-window partial surrogates and zero-out.

For each window position the target channels are re-drawn
``n_replacements`` times as partial FT surrogates (the other channels
stay bit-identical), the classifier is applied to every replacement, and
the class probabilities are averaged. Plotted against window position,
the averaged probabilities show which subsections of the signal drive
the prediction. The zero-out variant smoothly blends the window to zero
instead; it needs no ensemble and is provided as the naive baseline the
surrogate method improves on.

Window positions cover [0, epoch_len - window_len] with the configured
step. Crossfades are truncated at the epoch boundaries so the first and
last positions remain valid.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .seeding import NS_SALIENCY, spawn_rng
from .signals import Epoch, Signal
from .surrogates import _splice_surrogate, crossfade_weights


@dataclass(frozen=True)
class SaliencySpec:
    window_len_s: float = 5.0
    step_s: float = 0.5
    crossfade_s: float = 0.5
    n_replacements: int = 500
    target_channels: tuple = ("EEG1", "EEG2")
    seed: int = 0

    def __post_init__(self):
        if self.window_len_s <= 0 or self.step_s <= 0 or self.crossfade_s < 0:
            raise InvalidInputError("window and step must be positive, crossfade non-negative")
        if self.n_replacements < 1:
            raise InvalidInputError("n_replacements must be >= 1")


@dataclass(frozen=True)
class SaliencyMap:
    """Averaged class probabilities per window position.

    ``positions_s`` are window start times; ``mean_probabilities`` has
    one row per position. ``baseline_probabilities`` is the unmodified
    epoch's prediction.
    """

    positions_s: np.ndarray
    mean_probabilities: np.ndarray
    baseline_probabilities: np.ndarray
    labels: tuple
    std_probabilities: np.ndarray = None  # per-position ensemble stddev, None for zero-out


def window_positions(epoch_len_s: float, window_len_s: float, step_s: float) -> np.ndarray:
    """Start times 0, step, 2*step, ... while the window fits the epoch."""
    span = epoch_len_s - window_len_s
    if span < 0:
        raise InvalidInputError(
            f"window of {window_len_s} s does not fit a {epoch_len_s} s epoch"
        )
    count = int(np.floor(span / step_s + 1e-9)) + 1
    return np.arange(count) * step_s


def _window_geometry(epoch: Epoch, position_s: float, spec: SaliencySpec):
    rate = epoch.sample_rate_hz
    n = epoch.n_samples
    start = int(round(position_s * rate))
    window_len = int(round(spec.window_len_s * rate))
    crossfade = int(round(spec.crossfade_s * rate))
    cf_left = min(crossfade, start)
    cf_right = min(crossfade, n - start - window_len)
    return start, window_len, cf_left, cf_right


def _validate(epoch: Epoch, spec: SaliencySpec):
    unknown = set(spec.target_channels) - set(epoch.channel_roles)
    if unknown:
        raise InvalidInputError(f"target channels {sorted(unknown)} not present in epoch")
    if not spec.target_channels:
        raise InvalidInputError("target_channels is empty")
    if spec.window_len_s > epoch.duration_s:
        raise InvalidInputError(
            f"window of {spec.window_len_s} s exceeds the {epoch.duration_s} s epoch"
        )


def surrogate_saliency(classifier, epoch: Epoch, spec: SaliencySpec) -> SaliencyMap:
    """Partial-surrogate saliency map for one epoch.

    Replacement r at position index p for channel c draws from the
    stream keyed (seed, saliency, p, r, c), so maps are deterministic
    given the spec.
    """
    _validate(epoch, spec)
    baseline = np.asarray(classifier.predict(epoch), dtype=np.float64)
    positions = window_positions(epoch.duration_s, spec.window_len_s, spec.step_s)
    means = np.empty((positions.size, baseline.size))
    stds = np.empty((positions.size, baseline.size))
    for p_idx, pos in enumerate(positions):
        start, window_len, cf_left, cf_right = _window_geometry(epoch, pos, spec)
        probs = np.empty((spec.n_replacements, baseline.size))
        for r in range(spec.n_replacements):
            channels = []
            for c_idx, (role, ch) in enumerate(zip(epoch.channel_roles, epoch.channels)):
                if role not in spec.target_channels:
                    channels.append(ch)
                    continue
                rng = spawn_rng(spec.seed, NS_SALIENCY, p_idx, r, c_idx)
                samples = _splice_surrogate(
                    ch.samples, start, window_len, cf_left, cf_right, rng
                )
                channels.append(Signal(samples, ch.sample_rate_hz))
            replaced = Epoch(tuple(channels), epoch.label, epoch.channel_roles)
            probs[r] = classifier.predict(replaced)
        means[p_idx] = probs.mean(axis=0)
        stds[p_idx] = probs.std(axis=0, ddof=1) if spec.n_replacements > 1 else 0.0
    return SaliencyMap(positions, means, baseline, tuple(classifier.label_vocabulary), stds)


def zero_out_saliency(classifier, epoch: Epoch, spec: SaliencySpec) -> SaliencyMap:
    """Baseline saliency map: smoothly blend each window to zero.

    One deterministic evaluation per position; ``n_replacements`` is
    ignored. Uses the same cosine crossfade as the surrogate method.
    """
    _validate(epoch, spec)
    baseline = np.asarray(classifier.predict(epoch), dtype=np.float64)
    positions = window_positions(epoch.duration_s, spec.window_len_s, spec.step_s)
    means = np.empty((positions.size, baseline.size))
    for p_idx, pos in enumerate(positions):
        start, window_len, cf_left, cf_right = _window_geometry(epoch, pos, spec)
        weights = crossfade_weights(window_len, cf_left, cf_right)
        region = slice(start - cf_left, start - cf_left + weights.size)
        channels = []
        for role, ch in zip(epoch.channel_roles, epoch.channels):
            if role not in spec.target_channels:
                channels.append(ch)
                continue
            samples = ch.samples.copy()
            samples[region] = (1.0 - weights) * samples[region]
            channels.append(Signal(samples, ch.sample_rate_hz))
        means[p_idx] = classifier.predict(Epoch(tuple(channels), epoch.label, epoch.channel_roles))
    return SaliencyMap(positions, means, baseline, tuple(classifier.label_vocabulary))
