"""Trainable output stack: dense sigmoid layers on top of the hidden vector.

A layer is a (fan_in + 1, fan_out) float64 array whose row 0 multiplies
the bias input 1.  A stack for LogNNet-784:P:10 is one (P+1, 10) layer;
784:P:H:10 is (P+1, H) followed by (H+1, 10).

Training is per-sample gradient descent in data order.  With the default
squared-error loss the output delta is ``(t - o) o (1 - o)``; the
cross-entropy variant uses ``t - o``.  Weights move by ``lr * input * delta``.
"""
import numpy as np

from . import kernels
from .errors import DivergenceError, ParameterError
from .rng import XorShift64Star

LOSSES = {"mse": 0, "ce": 1}
N_CLASSES = 10


def sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def init_layer(fan_in, fan_out, rng):
    """Entries ``0.5 - u`` with u uniform on (0, 1), drawn row by row."""
    if fan_in < 1 or fan_out < 1:
        raise ParameterError("layer sizes must be positive")
    if not isinstance(rng, XorShift64Star):
        rng = XorShift64Star(rng)
    return 0.5 - rng.uniform_array((fan_in + 1) * fan_out).reshape(fan_in + 1, fan_out)


def init_stack(P, shape, seed):
    """Layers for hidden width P and widths ``shape`` (ending in 10)."""
    rng = XorShift64Star(seed)
    layers = []
    fan_in = P
    for width in shape:
        layers.append(init_layer(fan_in, width, rng))
        fan_in = width
    return layers


def pack(layers):
    dims = []
    off = 0
    for w in layers:
        dims += [w.shape[0], w.shape[1], off]
        off += w.size
    flat = np.concatenate([np.ascontiguousarray(w, dtype=np.float64).ravel()
                           for w in layers])
    return flat, np.array(dims, dtype=np.int64)


def check_stack(layers, hidden_width=None):
    if not layers:
        raise ParameterError("empty classifier stack")
    if hidden_width is not None and layers[0].shape[0] != hidden_width:
        raise ParameterError(
            f"first layer expects {layers[0].shape[0]} inputs, hidden vector "
            f"has {hidden_width}")
    for a, b in zip(layers, layers[1:]):
        if b.shape[0] != a.shape[1] + 1:
            raise ParameterError(
                f"layer of width {a.shape[1]} cannot feed a layer with "
                f"{b.shape[0]} input rows")


def forward(hidden, layers):
    """Output activations for one hidden vector (P+1,) or a batch."""
    hidden = np.asarray(hidden, dtype=np.float64)
    single = hidden.ndim == 1
    H = np.ascontiguousarray(np.atleast_2d(hidden))
    check_stack(layers, H.shape[1])
    flat, dims = pack(layers)
    out = np.asarray(kernels.get().forward_batch(H, flat, dims))
    return out[0] if single else out


def predict(output):
    """Index of the largest output; ties go to the lowest index."""
    return np.argmax(np.asarray(output), axis=-1)


def _activations(h, layers):
    acts = [np.asarray(h, dtype=np.float64)]
    for k, w in enumerate(layers):
        o = sigmoid(acts[-1] @ w)
        acts.append(np.concatenate(([1.0], o)) if k < len(layers) - 1 else o)
    return acts


def loss_value(h, label, layers, loss="mse"):
    o = _activations(h, layers)[-1]
    t = np.zeros_like(o)
    t[label] = 1.0
    if loss == "mse":
        return 0.5 * float(np.sum((t - o) ** 2))
    return -float(np.sum(t * np.log(o) + (1 - t) * np.log(1 - o)))


def gradients(h, label, layers, loss="mse"):
    """d(loss)/d(weights) for one sample, one array per layer."""
    acts = _activations(h, layers)
    o = acts[-1]
    t = np.zeros_like(o)
    t[label] = 1.0
    delta = (t - o) * o * (1.0 - o) if loss == "mse" else t - o
    grads = [None] * len(layers)
    for k in range(len(layers) - 1, -1, -1):
        grads[k] = -np.outer(acts[k], delta)
        if k:
            hid = acts[k][1:]
            delta = hid * (1.0 - hid) * (layers[k][1:] @ delta)
    return grads


def train_epoch(layers, hidden, labels, learning_rate, loss="mse"):
    """One in-order pass of per-sample backprop; updates ``layers`` in place."""
    if learning_rate < 0:
        raise ParameterError("learning rate must be non-negative")
    if loss not in LOSSES:
        raise ParameterError(f"loss must be one of {sorted(LOSSES)}")
    H = np.ascontiguousarray(hidden, dtype=np.float64)
    labels = np.ascontiguousarray(labels, dtype=np.uint8)
    if len(H) == 0:
        raise ParameterError("empty training stream")
    check_stack(layers, H.shape[1])
    if learning_rate == 0:
        return layers
    flat, dims = pack(layers)
    kernels.get().sgd_epoch(H, labels, flat, dims, float(learning_rate), LOSSES[loss])
    if not np.isfinite(flat).all():
        raise DivergenceError("classifier weights became non-finite")
    for w, (rows, cols, off) in zip(layers, dims.reshape(-1, 3)):
        w[...] = flat[off:off + rows * cols].reshape(rows, cols)
    return layers
