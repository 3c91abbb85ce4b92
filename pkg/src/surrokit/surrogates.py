"""Fourier-transform surrogates: plain, IAAFT, and partial.

A plain FT surrogate keeps a signal's one-sided amplitude spectrum and
replaces every interior phase with a fresh uniform draw from [0, 2*pi).
The DC bin, and the Nyquist bin for even lengths, keep their original
complex values, which makes the output structurally real and preserves
the mean.

IAAFT surrogates (iterative amplitude-adjusted FT, Schreiber & Schmitz
1996) additionally force the time-domain value distribution to match the
original exactly. The iteration here ends on the rank-ordering step, so
the sorted surrogate samples equal the sorted originals bit for bit and
the residual error lives in the amplitude spectrum. The loop stops when
the spectral discrepancy stops improving or its relative change drops
below the configured tolerance; the best iterate seen is returned, so
the reported discrepancy sequence is strictly decreasing.

Partial surrogates replace one window of a signal with surrogate content
generated from the remainder (the two flanking segments concatenated
end to end), blended in with cosine half-wave crossfades whose original
and surrogate weights sum to one.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .seeding import spawn_rng
from .signals import Epoch, Signal

KIND_FT = "ft"
KIND_IAAFT = "iaaft"
SURROGATE_KINDS = (KIND_FT, KIND_IAAFT)


@dataclass(frozen=True)
class SurrogateConfig:
    """Options for surrogate generation.

    ``iaaft_tolerance`` is the relative change of the spectral
    discrepancy between consecutive iterations below which the IAAFT
    loop is considered converged. ``share_channel_phases`` makes every
    channel of an epoch reuse one phase draw instead of drawing
    independently per channel.
    """

    kind: str = KIND_FT
    iaaft_max_iters: int = 100
    iaaft_tolerance: float = 1e-8
    seed: int = 0
    share_channel_phases: bool = False

    def __post_init__(self):
        if self.kind not in SURROGATE_KINDS:
            raise InvalidInputError(f"unknown surrogate kind {self.kind!r}")
        if self.iaaft_max_iters < 1:
            raise InvalidInputError("iaaft_max_iters must be >= 1")
        if self.iaaft_tolerance < 0:
            raise InvalidInputError("iaaft_tolerance must be non-negative")


@dataclass(frozen=True)
class IaaftReport:
    """Outcome of one IAAFT run.

    ``discrepancies`` holds the relative L2 distance between the target
    and achieved one-sided amplitude spectra after each accepted
    rank-ordering step; it is non-increasing by construction.
    ``reason`` is one of "exact", "tolerance", "stalled", "max_iters".
    """

    iterations: int
    discrepancies: tuple
    converged: bool
    reason: str

    @property
    def final_discrepancy(self) -> float:
        return self.discrepancies[-1]


@dataclass(frozen=True)
class PartialSurrogateSpec:
    """Window placement for a partial surrogate, in seconds.

    The window core is [window_start_s, window_start_s + window_len_s);
    crossfades of ``crossfade_s`` extend beyond it on both sides and must
    stay inside the signal.
    """

    window_start_s: float
    window_len_s: float
    crossfade_s: float = 0.5

    def __post_init__(self):
        if self.window_start_s < 0 or self.window_len_s < 0 or self.crossfade_s < 0:
            raise InvalidInputError("window placement values must be non-negative")


def _phase_randomize(samples: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Replace interior Fourier phases with uniform draws from [0, 2*pi)."""
    n = samples.size
    bins = np.fft.rfft(samples)
    theta = rng.uniform(0.0, 2.0 * np.pi, bins.size)
    randomized = np.abs(bins) * np.exp(1j * theta)
    randomized[0] = bins[0]
    if n % 2 == 0:
        randomized[-1] = bins[-1]
    return np.fft.irfft(randomized, n=n)


def ft_surrogate(signal: Signal, seed: int) -> Signal:
    """Plain FT surrogate: same amplitude spectrum, random phases.

    Deterministic given the seed; see :mod:`surrokit.seeding` for the
    generator used.
    """
    rng = spawn_rng(seed)
    return Signal(_phase_randomize(signal.samples, rng), signal.sample_rate_hz)


def _iaaft_core(samples, rng, max_iters, tolerance):
    n = samples.size
    target = np.abs(np.fft.rfft(samples))
    target_norm = np.linalg.norm(target)
    sorted_values = np.sort(samples)

    current = _phase_randomize(samples, rng)
    best = None
    discrepancies = []
    reason = "max_iters"
    for _ in range(max_iters):
        ranks = np.argsort(np.argsort(current))
        ranked = sorted_values[ranks]
        if target_norm > 0:
            achieved = np.abs(np.fft.rfft(ranked))
            disc = float(np.linalg.norm(achieved - target) / target_norm)
        else:
            disc = 0.0
        if discrepancies and disc >= discrepancies[-1]:
            reason = "stalled"
            break
        discrepancies.append(disc)
        best = ranked
        if disc == 0.0:
            reason = "exact"
            break
        if len(discrepancies) >= 2:
            previous = discrepancies[-2]
            if (previous - disc) / previous <= tolerance:
                reason = "tolerance"
                break
        # spectral adjustment: impose the target amplitudes, keep the phases
        bins = np.fft.rfft(ranked)
        current = np.fft.irfft(target * np.exp(1j * np.angle(bins)), n=n)

    report = IaaftReport(
        iterations=len(discrepancies),
        discrepancies=tuple(discrepancies),
        converged=reason in ("exact", "tolerance", "stalled"),
        reason=reason,
    )
    return best, report


def iaaft_surrogate(signal: Signal, config: SurrogateConfig):
    """IAAFT surrogate plus its iteration report.

    The returned surrogate's sorted sample values equal the sorted input
    values exactly. Non-convergence within ``iaaft_max_iters`` is not an
    error; the report carries the achieved discrepancy.

    Returns:
        (surrogate, IaaftReport) tuple.
    """
    if config.kind != KIND_IAAFT:
        raise InvalidInputError(f"config.kind must be {KIND_IAAFT!r}, got {config.kind!r}")
    rng = spawn_rng(config.seed)
    samples, report = _iaaft_core(
        signal.samples, rng, config.iaaft_max_iters, config.iaaft_tolerance
    )
    return Signal(samples, signal.sample_rate_hz), report


def crossfade_weights(window_len: int, crossfade_left: int, crossfade_right: int) -> np.ndarray:
    """Surrogate-side blend weights for a spliced patch.

    Returns a vector of length ``crossfade_left + window_len +
    crossfade_right``. The core is exactly 1; the fades follow
    sin^2(pi * t / (2 * crossfade)) sampled strictly inside (0, 1), so
    the complementary original-side weight is 1 minus this vector.
    """
    total = crossfade_left + window_len + crossfade_right
    weights = np.ones(total)
    if crossfade_left:
        t = np.arange(1, crossfade_left + 1) / (crossfade_left + 1.0)
        weights[:crossfade_left] = np.sin(0.5 * np.pi * t) ** 2
    if crossfade_right:
        t = np.arange(1, crossfade_right + 1) / (crossfade_right + 1.0)
        weights[total - crossfade_right :] = (np.sin(0.5 * np.pi * t) ** 2)[::-1]
    return weights


def _splice_surrogate(samples, start, window_len, crossfade_left, crossfade_right, rng):
    """Replace samples[start : start+window_len] with remainder-surrogate content.

    The modified region extends ``crossfade_left``/``crossfade_right``
    samples beyond the window core; everything outside it is returned
    bit-identical.
    """
    n = samples.size
    need = crossfade_left + window_len + crossfade_right
    if need == 0:
        return samples.copy()
    remainder = np.concatenate([samples[:start], samples[start + window_len :]])
    if remainder.size < max(need, 2):
        raise InvalidInputError(
            f"remainder of {remainder.size} samples cannot supply a {need}-sample patch"
        )
    surrogate = _phase_randomize(remainder, rng)
    offset = int(rng.integers(0, remainder.size - need + 1))
    patch = surrogate[offset : offset + need]

    weights = crossfade_weights(window_len, crossfade_left, crossfade_right)
    out = samples.copy()
    region = slice(start - crossfade_left, start - crossfade_left + need)
    out[region] = (1.0 - weights) * samples[region] + weights * patch
    return out


def partial_ft_surrogate(signal: Signal, spec: PartialSurrogateSpec, seed: int) -> Signal:
    """Replace one window of a signal with an FT surrogate of the remainder.

    The remainder is the concatenation of the two flanking segments; a
    patch of window plus both crossfades is cut from its surrogate at a
    random offset and blended in with cosine half-wave weights. Samples
    outside the window-plus-crossfade region are bit-identical to the
    input.
    """
    rate = signal.sample_rate_hz
    n = signal.samples.size
    start = int(round(spec.window_start_s * rate))
    window_len = int(round(spec.window_len_s * rate))
    crossfade = int(round(spec.crossfade_s * rate))
    if start - crossfade < 0 or start + window_len + crossfade > n:
        raise InvalidInputError(
            f"window [{spec.window_start_s}, {spec.window_start_s + spec.window_len_s}] s "
            f"with {spec.crossfade_s} s crossfades does not fit a {n / rate} s signal"
        )
    rng = spawn_rng(seed)
    out = _splice_surrogate(signal.samples, start, window_len, crossfade, crossfade, rng)
    return Signal(out, rate)


def _channel_surrogate(samples, rng, kind, max_iters=100, tolerance=1e-8):
    if kind == KIND_FT:
        return _phase_randomize(samples, rng), None
    return _iaaft_core(samples, rng, max_iters, tolerance)


def epoch_surrogate_with_reports(epoch: Epoch, config: SurrogateConfig, seed=None):
    """Per-channel surrogate of an epoch, returning IAAFT reports.

    Channel i draws from a stream derived from (seed, i), or from the
    bare seed for every channel when ``config.share_channel_phases`` is
    set. Reports are None for FT surrogates.
    """
    base = config.seed if seed is None else seed
    channels = []
    reports = []
    for i, ch in enumerate(epoch.channels):
        key = () if config.share_channel_phases else (i,)
        rng = spawn_rng(base, *key)
        samples, report = _channel_surrogate(
            ch.samples, rng, config.kind, config.iaaft_max_iters, config.iaaft_tolerance
        )
        channels.append(Signal(samples, ch.sample_rate_hz))
        reports.append(report)
    return Epoch(tuple(channels), epoch.label, epoch.channel_roles), tuple(reports)


def epoch_surrogate(epoch: Epoch, config: SurrogateConfig, seed=None) -> Epoch:
    """Per-channel surrogate of an epoch; the label is preserved."""
    surrogate, _ = epoch_surrogate_with_reports(epoch, config, seed)
    return surrogate
