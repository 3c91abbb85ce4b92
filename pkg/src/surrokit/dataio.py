"""File formats: epoch datasets, weight checkpoints, result tables.

Epoch dataset container (one file):

* line 1: UTF-8 JSON header terminated by a newline, with keys
  ``format`` ("surrokit-epochs"), ``version`` (1), ``n_epochs``,
  ``n_channels``, ``channel_roles``, ``sample_rate_hz``,
  ``epoch_len_samples``, ``label_vocabulary``, ``record_ids``.
* payload: raw little-endian float32 samples, epoch-major then
  channel-major (exactly n_epochs * n_channels * epoch_len_samples * 4
  bytes).
* labels: one little-endian int32 vocabulary index per epoch.

Weight checkpoint container (one file):

* line 1: UTF-8 JSON header with keys ``format`` ("surrokit-weights"),
  ``version`` (1), ``arch`` (registered architecture name),
  ``arch_config`` (builder keyword arguments), ``fingerprint`` (sha256
  of the canonical descriptor JSON), ``seed``, ``train_config``, and
  ``tensors``, an ordered list of {"key", "shape"} entries.
* payload: the tensors' float64 little-endian bytes, concatenated in
  header order.

Loading a checkpoint rebuilds the descriptor from ``arch``/
``arch_config`` and refuses to proceed if its fingerprint does not match
the stored one.

All writes are atomic: content goes to a temporary file in the target
directory which is then renamed over the destination, so an interrupted
run never leaves a truncated file under the target name.

Storage is float32 to halve file sizes; every computation after loading
runs in float64.
"""

import hashlib
import json
import os
import tempfile
from dataclasses import asdict

import numpy as np

from .balance import Dataset
from .errors import InvalidInputError
from .network import ARCHITECTURES, ArchitectureDescriptor, validate_weights
from .signals import epoch_from_array

DATASET_FORMAT = "surrokit-epochs"
WEIGHTS_FORMAT = "surrokit-weights"


def atomic_write_bytes(path, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


# ---------------------------------------------------------------------------
# epoch dataset files


def save_dataset(path, dataset: Dataset) -> None:
    if len(dataset) == 0:
        raise InvalidInputError("refusing to write an empty dataset")
    first = dataset.epochs[0]
    n_samples = first.n_samples
    roles = first.channel_roles
    rate = first.sample_rate_hz
    for ep in dataset.epochs:
        if ep.n_samples != n_samples or ep.channel_roles != roles or ep.sample_rate_hz != rate:
            raise InvalidInputError("dataset file format requires homogeneous epochs")
    header = {
        "format": DATASET_FORMAT,
        "version": 1,
        "n_epochs": len(dataset),
        "n_channels": len(roles),
        "channel_roles": list(roles),
        "sample_rate_hz": rate,
        "epoch_len_samples": n_samples,
        "label_vocabulary": list(dataset.label_vocabulary),
        "record_ids": list(dataset.record_ids),
    }
    payload = np.stack([ep.to_array() for ep in dataset.epochs]).astype("<f4").tobytes()
    labels = dataset.label_indices().astype("<i4").tobytes()
    blob = json.dumps(header, sort_keys=True).encode("utf-8") + b"\n" + payload + labels
    atomic_write_bytes(path, blob)


def load_dataset(path) -> Dataset:
    with open(path, "rb") as handle:
        header_line = handle.readline()
        rest = handle.read()
    try:
        header = json.loads(header_line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"{path}: malformed dataset header: {exc}") from exc
    if header.get("format") != DATASET_FORMAT:
        raise InvalidInputError(f"{path}: not a {DATASET_FORMAT} file")
    n_epochs = header["n_epochs"]
    n_channels = header["n_channels"]
    n_samples = header["epoch_len_samples"]
    payload_bytes = n_epochs * n_channels * n_samples * 4
    label_bytes = n_epochs * 4
    if len(rest) != payload_bytes + label_bytes:
        raise InvalidInputError(
            f"{path}: expected {payload_bytes + label_bytes} data bytes, found {len(rest)}"
        )
    samples = np.frombuffer(rest[:payload_bytes], dtype="<f4").reshape(
        n_epochs, n_channels, n_samples
    )
    labels = np.frombuffer(rest[payload_bytes:], dtype="<i4")
    vocabulary = tuple(header["label_vocabulary"])
    if labels.size and (labels.min() < 0 or labels.max() >= len(vocabulary)):
        raise InvalidInputError(f"{path}: label index outside the vocabulary")
    roles = tuple(header["channel_roles"])
    rate = float(header["sample_rate_hz"])
    epochs = tuple(
        epoch_from_array(samples[i].astype(np.float64), rate, vocabulary[labels[i]], roles)
        for i in range(n_epochs)
    )
    return Dataset(epochs, tuple(header["record_ids"]), vocabulary)


# ---------------------------------------------------------------------------
# weight checkpoints


def descriptor_fingerprint(descriptor: ArchitectureDescriptor) -> str:
    layers = {
        "name": descriptor.name,
        "input_len": descriptor.input_len,
        "channel_roles": list(descriptor.channel_roles),
        "parameter_sharing": [list(p) for p in descriptor.parameter_sharing],
        "channel_pipe": [
            {"type": type(l).__name__, **asdict(l)} for l in descriptor.channel_pipe
        ],
        "joined_pipe": [
            {"type": type(l).__name__, **asdict(l)} for l in descriptor.joined_pipe
        ],
    }
    canonical = json.dumps(layers, sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def save_weights(
    path,
    descriptor: ArchitectureDescriptor,
    weights: dict,
    arch_config: dict = None,
    train_config: dict = None,
    seed: int = None,
) -> None:
    validate_weights(descriptor, weights)
    keys = sorted(weights)
    header = {
        "format": WEIGHTS_FORMAT,
        "version": 1,
        "arch": descriptor.name,
        "arch_config": arch_config or {},
        "fingerprint": descriptor_fingerprint(descriptor),
        "seed": seed,
        "train_config": train_config,
        "tensors": [{"key": k, "shape": list(weights[k].shape)} for k in keys],
    }
    payload = b"".join(np.ascontiguousarray(weights[k], dtype="<f8").tobytes() for k in keys)
    atomic_write_bytes(path, json.dumps(header, sort_keys=True).encode("utf-8") + b"\n" + payload)


def load_weights(path):
    """Load a checkpoint; returns (descriptor, weights, header).

    The descriptor is rebuilt from the stored architecture name and
    builder arguments; a fingerprint mismatch raises InvalidInputError.
    """
    with open(path, "rb") as handle:
        header_line = handle.readline()
        payload = handle.read()
    try:
        header = json.loads(header_line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"{path}: malformed checkpoint header: {exc}") from exc
    if header.get("format") != WEIGHTS_FORMAT:
        raise InvalidInputError(f"{path}: not a {WEIGHTS_FORMAT} file")
    arch = header.get("arch")
    if arch not in ARCHITECTURES:
        raise InvalidInputError(f"{path}: unknown architecture {arch!r}")
    descriptor = ARCHITECTURES[arch](**header.get("arch_config", {}))
    fingerprint = descriptor_fingerprint(descriptor)
    if fingerprint != header.get("fingerprint"):
        raise InvalidInputError(
            f"{path}: checkpoint fingerprint {header.get('fingerprint')!r} does not match "
            f"the {arch!r} architecture ({fingerprint!r})"
        )
    weights = {}
    offset = 0
    for entry in header["tensors"]:
        shape = tuple(entry["shape"])
        size = int(np.prod(shape)) * 8
        chunk = payload[offset : offset + size]
        if len(chunk) != size:
            raise InvalidInputError(f"{path}: truncated tensor payload at {entry['key']!r}")
        weights[entry["key"]] = np.frombuffer(chunk, dtype="<f8").reshape(shape).copy()
        offset += size
    if offset != len(payload):
        raise InvalidInputError(f"{path}: {len(payload) - offset} trailing payload bytes")
    validate_weights(descriptor, weights)
    return descriptor, weights, header


# ---------------------------------------------------------------------------
# delimiter-separated tables


def format_float(value) -> str:
    return f"{float(value):.10g}"


def table_text(columns, rows) -> str:
    """Tab-separated table with one header line; floats use %.10g."""
    lines = ["\t".join(columns)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, (float, np.floating)):
                cells.append(format_float(cell))
            else:
                cells.append(str(cell))
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def confusion_text(confusion, title="confusion_counts") -> str:
    """Two matrix blocks: raw counts and row-normalized fractions."""
    labels = confusion.labels
    lines = [f"# section {title}", "\t".join(("true\\pred",) + labels)]
    for i, label in enumerate(labels):
        lines.append("\t".join([label] + [str(int(c)) for c in confusion.counts[i]]))
    lines.append("# section row_normalized")
    lines.append("\t".join(("true\\pred",) + labels))
    normalized = confusion.row_normalized()
    for i, label in enumerate(labels):
        lines.append("\t".join([label] + [format_float(v) for v in normalized[i]]))
    return "\n".join(lines) + "\n"


def saliency_text(saliency_map) -> str:
    """Header, one baseline row, then one row per window position."""
    columns = ["position_s"] + [f"p_{label}" for label in saliency_map.labels]
    lines = ["\t".join(columns)]
    lines.append(
        "\t".join(["baseline"] + [format_float(v) for v in saliency_map.baseline_probabilities])
    )
    for pos, probs in zip(saliency_map.positions_s, saliency_map.mean_probabilities):
        lines.append("\t".join([format_float(pos)] + [format_float(v) for v in probs]))
    return "\n".join(lines) + "\n"
