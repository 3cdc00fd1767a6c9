"""Fully connected network trained from scratch with RMSProp.

Hidden layers apply ReLU to affine maps; the output layer applies an
elementwise logistic (sigmoid), one unit per selection label.  Targets are
one-hot vectors and the loss is mean binary cross-entropy over the output
units.  Prediction takes the argmax output unit (1-based label).

Model file format, byte exact:

    bytes 0..5    magic  b"RTMLP\\x00"
    bytes 6..9    uint32 little-endian format version (currently 1)
    bytes 10..13  uint32 little-endian header length H
    next H bytes  UTF-8 JSON header, sorted keys:
                  {"layer_dims": [...], "meta": {...}}
    then per layer, in order: W as float64 little-endian row-major
    (fan_in x fan_out), followed by b as float64 little-endian (fan_out).
    The file ends exactly after the last bias vector.
"""

import json
import struct
from dataclasses import dataclass

import numpy as np

from .errors import ModelFormatError, TrainingDivergedError

_MAGIC = b"RTMLP\x00"
_VERSION = 1
_CLIP = 1e-12


@dataclass(frozen=True, eq=False)
class MlpModel:
    layer_dims: tuple
    weights: list  # per layer, (fan_in, fan_out)
    biases: list  # per layer, (fan_out,)


@dataclass
class TrainConfig:
    learning_rate: float = 0.01
    batch_size: int = 128
    epochs: int = 30
    rmsprop_decay: float = 0.9
    rmsprop_epsilon: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if not 0 < self.rmsprop_decay < 1:
            raise ValueError("rmsprop_decay must be in (0, 1)")
        if self.rmsprop_epsilon <= 0:
            raise ValueError("rmsprop_epsilon must be > 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")


@dataclass(eq=False)
class RmspropState:
    sq_weights: list
    sq_biases: list


@dataclass(frozen=True, eq=False)
class Gradients:
    weights: list
    biases: list


def init_model(layer_dims, seed):
    """Scaled-uniform weights with bound sqrt(6/(fan_in+fan_out)), zero
    biases; layer draws happen in order so the seed pins every parameter."""
    dims = tuple(int(d) for d in layer_dims)
    if len(dims) < 2 or min(dims) < 1:
        raise ValueError(f"need >= 2 positive layer dims, got {dims}")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(layer_dims=dims, weights=weights, biases=biases)


def zero_state(model):
    return RmspropState(
        sq_weights=[np.zeros_like(w) for w in model.weights],
        sq_biases=[np.zeros_like(b) for b in model.biases],
    )


def _sigmoid(z):
    # split by sign so exp never overflows
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def forward(model, x):
    """Probabilities and the per-layer caches needed by backward.

    Accepts one vector or a (batch, in_dim) matrix; probabilities keep the
    input's arity.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    a = x[None, :] if single else x
    if a.shape[1] != model.layer_dims[0]:
        raise ValueError(
            f"input width {a.shape[1]} != model input dim {model.layer_dims[0]}"
        )
    activations = [a]
    n_layers = len(model.weights)
    for l, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = a @ w + b
        if l < n_layers - 1:
            a = np.maximum(z, 0.0)
            activations.append(a)
        else:
            probs = _sigmoid(z)
    caches = (activations, probs)
    return (probs[0] if single else probs), caches


def loss(probs, target):
    """Mean binary cross-entropy over output units (and batch rows), with
    probabilities clipped to [1e-12, 1-1e-12] inside the logs."""
    p = np.clip(np.asarray(probs, dtype=float), _CLIP, 1.0 - _CLIP)
    y = np.asarray(target, dtype=float)
    if p.shape != y.shape:
        raise ValueError(f"probs shape {p.shape} != target shape {y.shape}")
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def backward(model, caches, target):
    """Analytic gradient of :func:`loss` for the cached forward pass."""
    activations, probs = caches
    y = np.asarray(target, dtype=float)
    if y.ndim == 1:
        y = y[None, :]
    batch, out_width = probs.shape
    # d(loss)/dz at the sigmoid output; the p(1-p) factor cancels
    delta = (probs - y) / (batch * out_width)
    grads_w = [None] * len(model.weights)
    grads_b = [None] * len(model.biases)
    for l in range(len(model.weights) - 1, -1, -1):
        a_in = activations[l]
        grads_w[l] = a_in.T @ delta
        grads_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ model.weights[l].T) * (activations[l] > 0.0)
    return Gradients(weights=grads_w, biases=grads_b)


def rmsprop_step(model, state, grads, cfg):
    """One RMSProp update in place: s <- rho s + (1-rho) g^2 and
    theta <- theta - lr g / sqrt(s + eps)."""
    rho = cfg.rmsprop_decay
    lr = cfg.learning_rate
    eps = cfg.rmsprop_epsilon
    for theta, s, g in zip(
        model.weights + model.biases,
        state.sq_weights + state.sq_biases,
        grads.weights + grads.biases,
    ):
        s *= rho
        s += (1.0 - rho) * g * g
        theta -= lr * g / np.sqrt(s + eps)
    return model, state


def train(features, labels, layer_dims, cfg):
    """Mini-batch RMSProp training; returns the model and the per-epoch
    mean-loss history as (epoch, loss) pairs.

    Deterministic: parameter init uses cfg.seed and the shuffle order each
    epoch comes from an independent stream of the same seed.
    """
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels, dtype=np.int64)
    out_width = int(layer_dims[-1])
    if labels.size == 0:
        raise ValueError("empty training set")
    if labels.min() < 1 or labels.max() > out_width:
        raise ValueError(
            f"labels span {labels.min()}..{labels.max()}, "
            f"outside output width {out_width}"
        )
    targets = np.zeros((labels.size, out_width))
    targets[np.arange(labels.size), labels - 1] = 1.0

    model = init_model(layer_dims, cfg.seed)
    state = zero_state(model)
    shuffle_rng = np.random.default_rng([cfg.seed, 1])
    history = []
    for epoch in range(1, cfg.epochs + 1):
        order = shuffle_rng.permutation(labels.size)
        total = 0.0
        for start in range(0, labels.size, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            probs, caches = forward(model, features[batch])
            batch_loss = loss(probs, targets[batch])
            if not np.isfinite(batch_loss):
                raise TrainingDivergedError(
                    f"non-finite loss at epoch {epoch}, record {start}"
                )
            grads = backward(model, caches, targets[batch])
            rmsprop_step(model, state, grads, cfg)
            total += batch_loss * batch.size
        history.append((epoch, total / labels.size))
    return model, history


def predict(model, t):
    """1-based argmax label for one feature vector (ties to the smallest)."""
    probs, _ = forward(model, np.asarray(t, dtype=float))
    return int(np.argmax(probs)) + 1


def predict_batch(model, queries):
    probs, _ = forward(model, np.asarray(queries, dtype=float))
    if probs.ndim == 1:
        probs = probs[None, :]
    return (probs.argmax(axis=1) + 1).astype(np.int64)


def save_model(model, path, meta=None):
    header = json.dumps(
        {"layer_dims": list(model.layer_dims), "meta": meta or {}},
        sort_keys=True,
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", _VERSION))
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        for w, b in zip(model.weights, model.biases):
            fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_model(path):
    """Read a model file; returns (model, meta).  Raises ModelFormatError
    on a bad magic, version, truncation, or trailing bytes."""
    with open(path, "rb") as fh:
        blob = fh.read()

    def fail(msg):
        raise ModelFormatError(f"{path}: {msg}")

    if len(blob) < len(_MAGIC) + 8:
        fail("truncated file (no header)")
    if blob[: len(_MAGIC)] != _MAGIC:
        fail("bad magic, not a model file")
    version, header_len = struct.unpack_from("<II", blob, len(_MAGIC))
    if version != _VERSION:
        fail(f"unsupported format version {version}")
    off = len(_MAGIC) + 8
    if len(blob) < off + header_len:
        fail("truncated header")
    try:
        header = json.loads(blob[off : off + header_len].decode("utf-8"))
        dims = tuple(int(d) for d in header["layer_dims"])
        meta = header.get("meta", {})
    except (ValueError, KeyError, TypeError) as exc:
        fail(f"unreadable header ({exc})")
    if len(dims) < 2 or min(dims) < 1:
        fail(f"invalid layer dims {dims}")
    off += header_len
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        need = 8 * fan_in * fan_out
        if len(blob) < off + need:
            fail("truncated weight matrix")
        weights.append(
            np.frombuffer(blob, dtype="<f8", count=fan_in * fan_out, offset=off)
            .reshape(fan_in, fan_out)
            .copy()
        )
        off += need
        need = 8 * fan_out
        if len(blob) < off + need:
            fail("truncated bias vector")
        biases.append(
            np.frombuffer(blob, dtype="<f8", count=fan_out, offset=off).copy()
        )
        off += need
    if off != len(blob):
        fail(f"{len(blob) - off} trailing bytes")
    return MlpModel(layer_dims=dims, weights=weights, biases=biases), meta


def check_model_dims(model, in_dim, out_dim):
    """Reject a model whose input/output widths do not fit the task."""
    if model.layer_dims[0] != in_dim or model.layer_dims[-1] != out_dim:
        raise ModelFormatError(
            f"model dims {list(model.layer_dims)} incompatible with task "
            f"needing input {in_dim} and output {out_dim}"
        )


def param_count(model):
    return sum(w.size for w in model.weights) + sum(b.size for b in model.biases)
