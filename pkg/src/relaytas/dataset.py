"""Labeled data sets: magnitude features, per-sample normalization, oracle
labels, one-hot targets, and the delimited file format.

File format (UTF-8 text, one record per line):

    # n_s 6
    # n_t 1
    # p_s 31.622776601683793
    # p_d 31.622776601683793
    # p_r 31.622776601683793
    # seed 1234
    # count 200000
    0.812...,1.03...,...,0.455...,3        <- n_s+1 magnitudes, then label

Header keys appear in exactly that order.  Floats are written with %.17g
so files re-read bit-exactly.  Raw magnitudes are stored (not normalized
features); normalization is applied at load time.
"""

from dataclasses import dataclass
from math import comb

import numpy as np

from .channel import SystemConfig, sample_batch_arrays
from .errors import DataFormatError
from .secrecy import combo_rates

_HEADER_KEYS = ("n_s", "n_t", "p_s", "p_d", "p_r", "seed", "count")


def extract_features(sample):
    """Magnitude vector [|h_1|, ..., |h_ns|, |g|] of one channel sample."""
    return np.concatenate([np.abs(sample.h), [abs(sample.g)]])


def normalize(d):
    """Shift to zero mean and scale to unit range, per sample.

    Statistics are taken across the entries of the single vector `d`.
    A constant vector has zero range and maps to all zeros.
    """
    d = np.asarray(d, dtype=float)
    if d.size < 2:
        raise ValueError("need at least 2 entries to normalize")
    spread = d.max() - d.min()
    if spread == 0.0:
        return np.zeros_like(d)
    return (d - d.mean()) / spread


def normalize_batch(features):
    """Row-wise :func:`normalize` of a (count, width) feature matrix."""
    features = np.asarray(features, dtype=float)
    spread = features.max(axis=1, keepdims=True) - features.min(axis=1, keepdims=True)
    centered = features - features.mean(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = centered / spread
    return np.where(spread > 0, t, 0.0)


def one_hot(label, size):
    """Bit vector with a single 1 at 1-based position `label`."""
    label = int(label)
    if not 1 <= label <= size:
        raise ValueError(f"label {label} out of range 1..{size}")
    bits = np.zeros(size, dtype=np.int64)
    bits[label - 1] = 1
    return bits


def one_hot_batch(labels, size):
    """(count, size) float one-hot matrix for 1-based labels."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and (labels.min() < 1 or labels.max() > size):
        raise ValueError(f"labels out of range 1..{size}")
    out = np.zeros((labels.size, size))
    out[np.arange(labels.size), labels - 1] = 1.0
    return out


@dataclass(frozen=True, eq=False)
class LabeledRecord:
    """One training/testing record: raw magnitudes, normalized features,
    oracle label, and the per-combination rate vector that produced it."""

    d: np.ndarray
    t: np.ndarray
    label: int
    rate_per_combo: np.ndarray = None


def label_sample(cfg, sample, table):
    d = extract_features(sample)
    rates = combo_rates(cfg, d[:-1] ** 2, d[-1] ** 2, table)
    label = int(np.argmax(rates)) + 1
    return LabeledRecord(d=d, t=normalize(d), label=label, rate_per_combo=rates)


@dataclass(frozen=True, eq=False)
class Dataset:
    """In-memory data set handle: raw magnitude features plus oracle labels,
    tagged with the generating configuration."""

    n_s: int
    n_t: int
    p_s: float
    p_d: float
    p_r: float
    seed: int
    features: np.ndarray  # (count, n_s+1) raw magnitudes
    labels: np.ndarray  # (count,) 1-based oracle labels

    @property
    def count(self):
        return self.features.shape[0]

    @property
    def config(self):
        return SystemConfig(
            n_s=self.n_s, n_t=self.n_t, p_s=self.p_s, p_d=self.p_d, p_r=self.p_r
        )


def build_dataset(cfg, count, seed, table):
    """Generate `count` labeled records at the configured operating point."""
    h, g = sample_batch_arrays(cfg, count, seed)
    features = np.concatenate([np.abs(h), np.abs(g)[:, None]], axis=1)
    rates = combo_rates(cfg, features[:, :-1] ** 2, features[:, -1] ** 2, table)
    labels = (rates.argmax(axis=1) + 1).astype(np.int64)
    return Dataset(
        n_s=cfg.n_s, n_t=cfg.n_t, p_s=cfg.p_s, p_d=cfg.p_d, p_r=cfg.p_r,
        seed=int(seed), features=features, labels=labels,
    )


def normalized_features(ds):
    return normalize_batch(ds.features)


def write_dataset(ds, path):
    with open(path, "w", encoding="utf-8") as fh:
        for key in _HEADER_KEYS:
            value = ds.count if key == "count" else getattr(ds, key)
            if isinstance(value, float):
                fh.write(f"# {key} {value:.17g}\n")
            else:
                fh.write(f"# {key} {int(value)}\n")
        for row, label in zip(ds.features, ds.labels):
            fields = ",".join(f"{v:.17g}" for v in row)
            fh.write(f"{fields},{int(label)}\n")


def read_dataset(path):
    """Parse a dataset file, validating header keys, record width, label
    range, and the record count declared in the header."""
    header = {}
    features = []
    labels = []
    n_combos = None

    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if len(header) >= len(_HEADER_KEYS):
                    raise DataFormatError(path, "unexpected extra header line", lineno)
                parts = line[1:].split()
                if len(parts) != 2:
                    raise DataFormatError(path, f"bad header line {line!r}", lineno)
                key, value = parts
                expected = _HEADER_KEYS[len(header)]
                if key != expected:
                    raise DataFormatError(
                        path, f"expected header key {expected!r}, got {key!r}", lineno
                    )
                header[key] = value
                continue
            if len(header) != len(_HEADER_KEYS):
                raise DataFormatError(path, "record before complete header", lineno)
            if n_combos is None:
                try:
                    n_combos = comb(int(header["n_s"]), int(header["n_t"]))
                except ValueError as exc:
                    raise DataFormatError(path, f"bad header values ({exc})") from exc
            width = int(header["n_s"]) + 2
            parts = line.split(",")
            if len(parts) != width:
                raise DataFormatError(
                    path, f"expected {width} fields, got {len(parts)}", lineno
                )
            try:
                row = [float(v) for v in parts[:-1]]
                label = int(parts[-1])
            except ValueError as exc:
                raise DataFormatError(path, f"unparseable field ({exc})", lineno) from exc
            if not 1 <= label <= n_combos:
                raise DataFormatError(
                    path, f"label {label} outside 1..{n_combos}", lineno
                )
            if not all(np.isfinite(v) and v >= 0 for v in row):
                raise DataFormatError(
                    path, "features must be finite and nonnegative", lineno
                )
            features.append(row)
            labels.append(label)

    if len(header) != len(_HEADER_KEYS):
        raise DataFormatError(path, f"incomplete header, got keys {sorted(header)}")
    n_s = int(header["n_s"])
    declared = int(header["count"])
    if declared != len(labels):
        raise DataFormatError(
            path, f"header count {declared} != {len(labels)} records in body"
        )
    return Dataset(
        n_s=n_s, n_t=int(header["n_t"]),
        p_s=float(header["p_s"]), p_d=float(header["p_d"]), p_r=float(header["p_r"]),
        seed=int(header["seed"]),
        features=np.asarray(features, dtype=float).reshape(len(labels), n_s + 1),
        labels=np.asarray(labels, dtype=np.int64),
    )
