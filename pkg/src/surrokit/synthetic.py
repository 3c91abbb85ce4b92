"""Synthetic labeled multichannel datasets for desk-scale experiments.

Classes come in two families: purely stationary autoregressive
processes, which FT surrogates represent faithfully, and
transient-bearing classes, whose defining feature (a localized burst) a
surrogate smears across the epoch. That contrast is what makes the
conditional-confusion and alpha-sweep behaviors reproducible at desk
scale.

A generator spec is JSON-serializable::

    {
      "sample_rate_hz": 32.0,
      "epoch_len_s": 30.0,
      "channel_roles": ["EEG1", "EEG2", "EOG", "EMG"],
      "n_records": 6,
      "classes": [
        {"name": "Wake", "prevalence": 0.26,
         "ar_coeffs": [1.59, -0.846], "noise_scale": 10.0},
        {"name": "S1", "prevalence": 0.08,
         "ar_coeffs": [1.59, -0.846], "noise_scale": 10.0,
         "transient": {"amplitude": 160.0, "width_s": 0.6,
                        "freq_hz": 10.0, "count": 1,
                        "channels": ["EEG1", "EEG2"]}}
      ]
    }

AR coefficients follow x_t = a_1 x_{t-1} + ... + a_p x_{t-p} + noise and
must describe a stable process (all roots of the characteristic
polynomial 1 - a_1 z - ... - a_p z^p outside the unit circle).
"""

import json
from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .balance import DEFAULT_VOCABULARY, Dataset
from .errors import InvalidInputError
from .seeding import NS_SYNTH, spawn_rng
from .signals import Epoch, Signal, epoch_from_array


@dataclass(frozen=True)
class TransientSpec:
    """A localized burst: Gaussian-windowed cosine added to some channels."""

    amplitude: float
    width_s: float
    freq_hz: float
    count: int = 1
    channels: tuple = ("EEG1", "EEG2")

    def __post_init__(self):
        if self.width_s <= 0 or self.count < 0:
            raise InvalidInputError("transient width must be positive and count >= 0")
        object.__setattr__(self, "channels", tuple(self.channels))


@dataclass(frozen=True)
class ClassSpec:
    """One class: AR background, optional burst injector, amplitude jitter.

    ``scale_jitter`` j in [0, 1) draws one factor per epoch uniformly
    from [1 - j, 1 + j] and applies it to the noise scale and the burst
    amplitude alike, so absolute signal energy varies across epochs while
    each epoch's internal structure is preserved.
    """

    name: str
    prevalence: float
    ar_coeffs: tuple
    noise_scale: float = 1.0
    transient: TransientSpec = None
    scale_jitter: float = 0.0

    def __post_init__(self):
        if self.prevalence <= 0:
            raise InvalidInputError(f"class {self.name!r} needs positive prevalence")
        if self.noise_scale <= 0:
            raise InvalidInputError(f"class {self.name!r} needs positive noise scale")
        if not 0.0 <= self.scale_jitter < 1.0:
            raise InvalidInputError(f"class {self.name!r} scale_jitter must lie in [0, 1)")
        object.__setattr__(self, "ar_coeffs", tuple(float(a) for a in self.ar_coeffs))
        _check_stable(self.ar_coeffs, self.name)


def _check_stable(coeffs, name):
    if not coeffs:
        return
    # companion-form roots of z^p - a_1 z^(p-1) - ... - a_p must lie inside
    # the unit circle (equivalently, roots of 1 - sum a_i B^i outside it)
    roots = np.roots([1.0] + [-a for a in coeffs])
    if roots.size and np.max(np.abs(roots)) >= 1.0:
        raise InvalidInputError(f"AR coefficients of class {name!r} describe an unstable process")


@dataclass(frozen=True)
class SyntheticSpec:
    classes: tuple
    sample_rate_hz: float = 32.0
    epoch_len_s: float = 30.0
    channel_roles: tuple = ("EEG1", "EEG2", "EOG", "EMG")
    n_records: int = 6

    def __post_init__(self):
        if not self.classes:
            raise InvalidInputError("spec needs at least one class")
        if self.n_records < 1:
            raise InvalidInputError("n_records must be >= 1")
        object.__setattr__(self, "classes", tuple(self.classes))
        object.__setattr__(self, "channel_roles", tuple(self.channel_roles))

    @property
    def epoch_len_samples(self) -> int:
        return int(round(self.epoch_len_s * self.sample_rate_hz))

    def label_vocabulary(self) -> tuple:
        names = tuple(c.name for c in self.classes)
        if set(names) == set(DEFAULT_VOCABULARY):
            return DEFAULT_VOCABULARY
        return names


def ar_resonance_coeffs(peak_hz: float, pole_radius: float, sample_rate_hz: float) -> tuple:
    """AR(2) coefficients with a spectral peak at ``peak_hz``."""
    if not 0 < pole_radius < 1:
        raise InvalidInputError("pole radius must lie in (0, 1)")
    theta = 2.0 * np.pi * peak_hz / sample_rate_hz
    return (2.0 * pole_radius * np.cos(theta), -pole_radius**2)


def transient_waveform(spec: TransientSpec, sample_rate_hz: float) -> np.ndarray:
    """Gaussian-windowed cosine burst spanning +-3 sigma."""
    sigma = spec.width_s / 2.0
    half = int(round(3.0 * sigma * sample_rate_hz))
    t = np.arange(-half, half + 1) / sample_rate_hz
    return spec.amplitude * np.exp(-0.5 * (t / sigma) ** 2) * np.cos(2.0 * np.pi * spec.freq_hz * t)


def _ar_path(coeffs, noise_scale, n, rng):
    burn = 256
    noise = rng.standard_normal(n + burn) * noise_scale
    if not coeffs:
        return noise[burn:]
    denominator = np.concatenate([[1.0], -np.asarray(coeffs)])
    return sps.lfilter([1.0], denominator, noise)[burn:]


def _inject(samples_block, roles, transient, waveform, centers):
    half = (waveform.size - 1) // 2
    for center in centers:
        lo = center - half
        hi = center + half + 1
        for i, role in enumerate(roles):
            if role in transient.channels:
                samples_block[i, lo:hi] += waveform
    return samples_block


def generate_synthetic(spec: SyntheticSpec, n_epochs: int, seed: int) -> Dataset:
    """Draw a labeled dataset from the generator spec.

    Epoch labels are sampled from the prevalence weights; record ids are
    assigned in contiguous blocks across ``spec.n_records`` synthetic
    records. Transient-bearing classes receive exactly their configured
    number of burst injections per epoch, at uniform random centers and
    at the same position on every target channel.
    """
    if n_epochs < 1:
        raise InvalidInputError("n_epochs must be >= 1")
    rng = spawn_rng(seed, NS_SYNTH)
    n = spec.epoch_len_samples
    roles = spec.channel_roles
    vocab = spec.label_vocabulary()
    prevalence = np.array([c.prevalence for c in spec.classes], dtype=np.float64)
    prevalence = prevalence / prevalence.sum()

    class_idx = rng.choice(len(spec.classes), size=n_epochs, p=prevalence)
    epochs = []
    record_ids = []
    for e in range(n_epochs):
        cls = spec.classes[class_idx[e]]
        factor = 1.0
        if cls.scale_jitter > 0.0:
            factor = rng.uniform(1.0 - cls.scale_jitter, 1.0 + cls.scale_jitter)
        block = np.empty((len(roles), n))
        for c in range(len(roles)):
            block[c] = _ar_path(cls.ar_coeffs, factor * cls.noise_scale, n, rng)
        if cls.transient is not None and cls.transient.count > 0:
            waveform = factor * transient_waveform(cls.transient, spec.sample_rate_hz)
            half = (waveform.size - 1) // 2
            if 2 * half + 1 > n:
                raise InvalidInputError("transient waveform longer than the epoch")
            centers = rng.integers(half, n - half, size=cls.transient.count)
            _inject(block, roles, cls.transient, waveform, centers)
        epochs.append(epoch_from_array(block, spec.sample_rate_hz, cls.name, roles))
        record_ids.append(f"rec{(e * spec.n_records) // n_epochs:03d}")
    return Dataset(tuple(epochs), tuple(record_ids), vocab)


def add_transient(epoch: Epoch, transient: TransientSpec, center_s: float) -> Epoch:
    """Return a copy of ``epoch`` with one burst injected at ``center_s``."""
    waveform = transient_waveform(transient, epoch.sample_rate_hz)
    half = (waveform.size - 1) // 2
    center = int(round(center_s * epoch.sample_rate_hz))
    if center - half < 0 or center + half + 1 > epoch.n_samples:
        raise InvalidInputError(f"burst at {center_s} s does not fit the epoch")
    channels = []
    for role, ch in zip(epoch.channel_roles, epoch.channels):
        if role in transient.channels:
            samples = ch.samples.copy()
            samples[center - half : center + half + 1] += waveform
            channels.append(Signal(samples, ch.sample_rate_hz))
        else:
            channels.append(ch)
    return Epoch(tuple(channels), epoch.label, epoch.channel_roles)


def default_group_labels(dataset: Dataset, n_groups: int = 2) -> dict:
    """Round-robin grouping of a dataset's records, a stand-in for age bins."""
    records = sorted(set(dataset.record_ids))
    return {rid: f"group{(i % n_groups)}" for i, rid in enumerate(records)}


# ---------------------------------------------------------------------------
# bundled spec: five stationary AR classes plus one transient-defined
# minority class (S1) sharing the Wake background, so only the burst
# separates them


def bundled_spec() -> SyntheticSpec:
    jitter = 0.35
    rate = 32.0
    alpha_band = ar_resonance_coeffs(10.0, 0.92, rate)
    return SyntheticSpec(
        classes=(
            ClassSpec("Wake", 0.30, alpha_band, noise_scale=10.0, scale_jitter=jitter),
            ClassSpec(
                "S1",
                0.04,
                alpha_band,
                noise_scale=10.0,
                scale_jitter=jitter,
                transient=TransientSpec(
                    amplitude=120.0, width_s=0.6, freq_hz=10.0, count=2,
                    channels=("EEG1", "EEG2"),
                ),
            ),
            ClassSpec("S2", 0.28, ar_resonance_coeffs(6.0, 0.90, rate), noise_scale=12.0,
                      scale_jitter=jitter),
            ClassSpec("S3", 0.11, ar_resonance_coeffs(2.5, 0.94, rate), noise_scale=14.0,
                      scale_jitter=jitter),
            ClassSpec("S4", 0.10, ar_resonance_coeffs(1.2, 0.95, rate), noise_scale=16.0,
                      scale_jitter=jitter),
            ClassSpec("REM", 0.17, ar_resonance_coeffs(13.0, 0.90, rate), noise_scale=8.0,
                      scale_jitter=jitter),
        ),
        sample_rate_hz=rate,
        epoch_len_s=30.0,
        n_records=6,
    )


def spec_to_json(spec: SyntheticSpec) -> str:
    payload = {
        "sample_rate_hz": spec.sample_rate_hz,
        "epoch_len_s": spec.epoch_len_s,
        "channel_roles": list(spec.channel_roles),
        "n_records": spec.n_records,
        "classes": [],
    }
    for cls in spec.classes:
        entry = {
            "name": cls.name,
            "prevalence": cls.prevalence,
            "ar_coeffs": list(cls.ar_coeffs),
            "noise_scale": cls.noise_scale,
            "scale_jitter": cls.scale_jitter,
        }
        if cls.transient is not None:
            entry["transient"] = {
                "amplitude": cls.transient.amplitude,
                "width_s": cls.transient.width_s,
                "freq_hz": cls.transient.freq_hz,
                "count": cls.transient.count,
                "channels": list(cls.transient.channels),
            }
        payload["classes"].append(entry)
    return json.dumps(payload, indent=2, sort_keys=True)


def spec_from_json(text: str) -> SyntheticSpec:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"malformed generator spec: {exc}") from exc
    try:
        classes = []
        for entry in payload["classes"]:
            transient = None
            if entry.get("transient") is not None:
                t = entry["transient"]
                transient = TransientSpec(
                    amplitude=t["amplitude"],
                    width_s=t["width_s"],
                    freq_hz=t["freq_hz"],
                    count=t.get("count", 1),
                    channels=tuple(t.get("channels", ("EEG1", "EEG2"))),
                )
            classes.append(
                ClassSpec(
                    name=entry["name"],
                    prevalence=entry["prevalence"],
                    ar_coeffs=tuple(entry["ar_coeffs"]),
                    noise_scale=entry.get("noise_scale", 1.0),
                    transient=transient,
                    scale_jitter=entry.get("scale_jitter", 0.0),
                )
            )
        return SyntheticSpec(
            classes=tuple(classes),
            sample_rate_hz=payload.get("sample_rate_hz", 32.0),
            epoch_len_s=payload.get("epoch_len_s", 30.0),
            channel_roles=tuple(payload.get("channel_roles", ("EEG1", "EEG2", "EOG", "EMG"))),
            n_records=payload.get("n_records", 6),
        )
    except KeyError as exc:
        raise InvalidInputError(f"generator spec is missing field {exc}") from exc
