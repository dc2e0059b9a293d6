"""Fully-connected flood classifier over the 512-dim LBP feature.

Architecture is fixed: 512 -> 256 -> 128 -> 64 -> 32 -> 16 -> 8 -> 1,
seven weighted layers, ReLU hidden activations with inverted dropout,
sigmoid output. Trained with mini-batch SGD on binary cross-entropy.
All numerics are float64.
"""

import struct
from dataclasses import dataclass, replace

import numpy as np

from .errors import DimensionMismatch, EmptyDataset, FormatError, InvalidDropout, ShapeError

LAYER_DIMS = (512, 256, 128, 64, 32, 16, 8, 1)
MODEL_MAGIC = b"FLMLP\x00"
MODEL_VERSION = 1


@dataclass
class MlpModel:
    weights: list  # weights[l]: (layer_dims[l+1], layer_dims[l])
    biases: list  # biases[l]: (layer_dims[l+1],)
    dropout_rate: float = 0.2
    seed: int = 0

    @property
    def layer_dims(self):
        return LAYER_DIMS

    def copy(self):
        return MlpModel(
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            dropout_rate=self.dropout_rate,
            seed=self.seed,
        )


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.05
    epochs: int = 200
    batch_size: int = 16
    dropout_rate: float = 0.2
    seed: int = 0


@dataclass(frozen=True)
class FloodDecision:
    score: float
    label: str  # "flooded" iff score > 0.5, strict


def mlp_init(seed=0, dropout_rate=0.2):
    """He-uniform weights (bound sqrt(6/fan_in)), zero biases."""
    if not 0.0 <= dropout_rate < 1.0:
        raise InvalidDropout(f"dropout_rate {dropout_rate} not in [0, 1)")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(LAYER_DIMS[:-1], LAYER_DIMS[1:]):
        bound = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpModel(weights=weights, biases=biases, dropout_rate=dropout_rate, seed=seed)


def _sigmoid(z):
    return np.where(z >= 0, 1.0 / (1.0 + np.exp(-z)), np.exp(z) / (1.0 + np.exp(z)))


def _forward_batch(model, x, train_mode=False, rng=None):
    """Forward pass on an (n, 512) batch; returns (scores, cache).

    cache holds per-layer inputs and dropout masks for backprop.
    Inverted dropout: surviving hidden units are scaled by 1/(1-p) so
    inference applies no rescaling.
    """
    if x.shape[1] != LAYER_DIMS[0]:
        raise DimensionMismatch(f"expected {LAYER_DIMS[0]} features, got {x.shape[1]}")
    p = model.dropout_rate
    a = x
    inputs, masks = [], []
    n_layers = len(model.weights)
    for l in range(n_layers - 1):
        inputs.append(a)
        z = a @ model.weights[l].T + model.biases[l]
        a = np.maximum(z, 0.0)
        if train_mode and p > 0.0:
            mask = (rng.random(a.shape) >= p) / (1.0 - p)
            a = a * mask
            masks.append(mask)
        else:
            masks.append(None)
    inputs.append(a)
    z_out = a @ model.weights[-1].T + model.biases[-1]
    scores = _sigmoid(z_out)[:, 0]
    return scores, (inputs, masks)


def forward(model, x, train_mode=False, rng=None):
    """Score a single 512-dim feature vector; returns (score, cache)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionMismatch("forward expects a single feature vector")
    scores, cache = _forward_batch(model, x[None, :], train_mode=train_mode, rng=rng)
    return float(scores[0]), cache


def predict(model, x):
    score, _ = forward(model, x, train_mode=False)
    label = "flooded" if score > 0.5 else "non-flooded"
    return FloodDecision(score=score, label=label)


def _backward_batch(model, cache, scores, y):
    """Gradients of mean BCE over the batch; sigmoid+BCE collapses the
    output delta to (score - y) / n."""
    inputs, masks = cache
    n = y.shape[0]
    delta = ((scores - y) / n)[:, None]
    grads_w = [None] * len(model.weights)
    grads_b = [None] * len(model.biases)
    for l in range(len(model.weights) - 1, -1, -1):
        grads_w[l] = delta.T @ inputs[l]
        grads_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = delta @ model.weights[l]
            if masks[l - 1] is not None:
                delta = delta * masks[l - 1]
            delta = delta * (inputs[l] > 0)
    return grads_w, grads_b


def _bce(scores, y):
    s = np.clip(scores, 1e-12, 1.0 - 1e-12)
    return float(-np.mean(y * np.log(s) + (1.0 - y) * np.log(1.0 - s)))


def train(model, data, cfg=TrainConfig()):
    """Mini-batch SGD on BCE; returns (trained copy, per-epoch mean loss).

    Shuffling and dropout are driven by cfg.seed, so training is
    deterministic for a fixed (model, data, cfg).
    """
    if len(data) == 0:
        raise EmptyDataset("no training samples")
    x = np.asarray([np.asarray(f, dtype=np.float64) for f, _ in data])
    y = np.asarray([float(label) for _, label in data])
    if len(np.unique(y)) < 2:
        import warnings

        warnings.warn("training data contains a single class", stacklevel=2)
    model = replace(model.copy(), dropout_rate=cfg.dropout_rate)
    rng = np.random.default_rng(cfg.seed)
    n = len(y)
    loss_history = []
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        epoch_losses = []
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            scores, cache = _forward_batch(model, x[idx], train_mode=True, rng=rng)
            epoch_losses.append(_bce(scores, y[idx]) * len(idx))
            grads_w, grads_b = _backward_batch(model, cache, scores, y[idx])
            for l in range(len(model.weights)):
                model.weights[l] -= cfg.learning_rate * grads_w[l]
                model.biases[l] -= cfg.learning_rate * grads_b[l]
        loss_history.append(sum(epoch_losses) / n)
    return model, loss_history


def gradient_check(model, x, y, n_params=200, sample_seed=0, h=1e-5):
    """Max relative error between backprop and central finite differences
    over a seeded random sample of parameters. Dropout is disabled."""
    x = np.asarray(x, dtype=np.float64)
    yv = np.asarray([float(y)])
    check = replace(model.copy(), dropout_rate=0.0)
    scores, cache = _forward_batch(check, x[None, :], train_mode=False)
    grads_w, grads_b = _backward_batch(check, cache, scores, yv)

    flat = []
    for l in range(len(check.weights)):
        for r in range(check.weights[l].shape[0]):
            for c in range(check.weights[l].shape[1]):
                flat.append(("w", l, r, c))
        for r in range(check.biases[l].shape[0]):
            flat.append(("b", l, r, None))
    rng = np.random.default_rng(sample_seed)
    sample = [flat[i] for i in rng.choice(len(flat), size=min(n_params, len(flat)), replace=False)]

    def loss_at():
        s, _ = _forward_batch(check, x[None, :], train_mode=False)
        return _bce(s, yv)

    max_err = 0.0
    for kind, l, r, c in sample:
        arr = check.weights[l] if kind == "w" else check.biases[l]
        key = (r, c) if kind == "w" else r
        orig = arr[key]
        arr[key] = orig + h
        loss_plus = loss_at()
        arr[key] = orig - h
        loss_minus = loss_at()
        arr[key] = orig
        g_num = (loss_plus - loss_minus) / (2 * h)
        g_ana = grads_w[l][key] if kind == "w" else grads_b[l][key]
        # floor the denominator: gradients below ~1e-6 sit at the
        # roundoff noise level of central differences with h=1e-5, so a
        # raw ratio there measures noise rather than backprop error
        err = abs(g_ana - g_num) / max(abs(g_ana), abs(g_num), 1e-6)
        max_err = max(max_err, err)
    return max_err


def save_model(model, path):
    """Versioned little-endian binary: magic, u16 version, f64 dropout,
    u32 layer count, then per layer u32 rows, u32 cols, row-major f64
    weights, f64 biases."""
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(struct.pack("<Hd", MODEL_VERSION, model.dropout_rate))
        fh.write(struct.pack("<I", len(model.weights)))
        for w, b in zip(model.weights, model.biases):
            fh.write(struct.pack("<II", w.shape[0], w.shape[1]))
            fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_model(path):
    with open(path, "rb") as fh:
        blob = fh.read()

    def take(n):
        nonlocal offset
        if offset + n > len(blob):
            raise FormatError(f"{path}: truncated model file")
        chunk = blob[offset:offset + n]
        offset += n
        return chunk

    offset = 0
    if take(len(MODEL_MAGIC)) != MODEL_MAGIC:
        raise FormatError(f"{path}: bad magic")
    version, dropout_rate = struct.unpack("<Hd", take(10))
    if version != MODEL_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    (n_layers,) = struct.unpack("<I", take(4))
    weights, biases = [], []
    for _ in range(n_layers):
        rows, cols = struct.unpack("<II", take(8))
        w = np.frombuffer(take(rows * cols * 8), dtype="<f8").reshape(rows, cols).copy()
        b = np.frombuffer(take(rows * 8), dtype="<f8").copy()
        weights.append(w)
        biases.append(b)
    dims = tuple(w.shape[1] for w in weights) + (weights[-1].shape[0],) if weights else ()
    if dims != LAYER_DIMS:
        raise ShapeError(f"{path}: layer dims {dims} do not match {LAYER_DIMS}")
    return MlpModel(weights=weights, biases=biases, dropout_rate=dropout_rate)
