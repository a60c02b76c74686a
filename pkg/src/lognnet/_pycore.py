"""Pure numpy fallback for :mod:`lognnet._core`.

Same functions, same argument order.  Projections vectorize over the batch
but keep the per-element accumulation order (input index ascending), so
results match the compiled kernels bit for bit.  The classifier routines
use numpy matrix products and only agree with the compiled ones to rounding.
"""
import math

import numpy as np

BACKEND = "python"

N_IN = 785


def _step(x, r, form):
    if form == 0:
        return 1.0 - r * x * x
    elif form == 1:
        return r * x * (1.0 - x)
    return x * x + r


def _deriv(x, r, form):
    if form == 0:
        return -2.0 * r * x
    elif form == 1:
        return r * (1.0 - 2.0 * x)
    return 2.0 * x


def _seed(i, A, B):
    # libm sin through math.sin; np.sin may use a different SIMD routine
    return A * math.sin((i / 784.0) * math.pi / B)


def seed_column(A, B):
    return np.array([_seed(i, A, B) for i in range(N_IN)])


def materialize(r, A, B, P, form):
    wt = np.empty((P, N_IN))
    wt[0] = seed_column(A, B)
    for j in range(1, P):
        wt[j] = _step(wt[j - 1], r, form)
    return wt


def weight_at(i, p, r, A, B, form):
    w = _seed(i, A, B)
    for _ in range(2, p + 1):
        w = _step(w, r, form)
    return w


def _check_inputs(Y):
    Y = np.ascontiguousarray(Y, dtype=np.float64)
    if Y.ndim != 2 or Y.shape[1] != N_IN:
        raise ValueError("inputs must have 785 columns")
    return Y


def project_alg1(Y, r, A, B, P, form):
    # one scalar of weight state, recomputed from the seed for every (i, j);
    # the recomputation is shared by the whole batch
    Y = _check_inputs(Y)
    out = np.empty((Y.shape[0], P))
    for j in range(1, P + 1):
        acc = np.zeros(Y.shape[0])
        for i in range(N_IN):
            w = _seed(i, A, B)
            for _ in range(2, j + 1):
                w = _step(w, r, form)
            acc = acc + Y[:, i] * w
        out[:, j - 1] = acc
    return out


def project_alg2(Y, r, A, B, P, form, scratch):
    Y = _check_inputs(Y)
    if scratch.shape[0] != N_IN:
        raise ValueError("inputs and scratch must have 785 entries")
    out = np.empty((Y.shape[0], P))
    for j in range(1, P + 1):
        if j == 1:
            scratch[:] = seed_column(A, B)
        else:
            scratch[:] = _step(scratch, r, form)
        acc = np.zeros(Y.shape[0])
        for i in range(N_IN):
            acc = acc + Y[:, i] * scratch[i]
        out[:, j - 1] = acc
    return out


def project_alg3(Y, wt):
    Y = _check_inputs(Y)
    if wt.shape[1] != N_IN:
        raise ValueError("inputs and W1 must have 785 input rows")
    acc = np.zeros((Y.shape[0], wt.shape[0]))
    for i in range(N_IN):
        acc = acc + Y[:, i:i + 1] * wt[:, i]
    return acc


def _unpack(flat, dims):
    dims = np.asarray(dims).reshape(-1, 3)
    return [flat[off:off + rows * cols].reshape(rows, cols)
            for rows, cols, off in dims]


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def _forward_all(h, layers):
    """Inputs of every layer (bias first) plus the final output."""
    acts = [h]
    a = h
    for k, w in enumerate(layers):
        o = _sigmoid(a @ w)
        if k < len(layers) - 1:
            a = np.concatenate(([1.0], o)) if o.ndim == 1 else \
                np.hstack([np.ones((o.shape[0], 1)), o])
            acts.append(a)
        else:
            acts.append(o)
    return acts


def forward_batch(H, flat, dims):
    layers = _unpack(flat, dims)
    if H.shape[1] != layers[0].shape[0]:
        raise ValueError("hidden width does not match first layer")
    return _forward_all(np.asarray(H, dtype=np.float64), layers)[-1]


def sgd_epoch(H, labels, flat, dims, lr, loss):
    layers = _unpack(flat, dims)
    if H.shape[1] != layers[0].shape[0] or len(labels) != H.shape[0]:
        raise ValueError("training arrays do not match the layer stack")
    n_out = layers[-1].shape[1]
    eye = np.eye(n_out)
    for s in range(H.shape[0]):
        acts = _forward_all(H[s], layers)
        o = acts[-1]
        t = eye[labels[s]]
        delta = (t - o) * o * (1.0 - o) if loss == 0 else t - o
        deltas = [delta]
        for k in range(len(layers) - 1, 0, -1):
            hid = acts[k][1:]
            delta = hid * (1.0 - hid) * (layers[k][1:] @ delta)
            deltas.insert(0, delta)
        for k, w in enumerate(layers):
            w += np.outer(lr * acts[k], deltas[k])


def classify(images, perm, algorithm, r, A, B, form, P, wt, scratch,
             sh_min, sh_max, usre, flat, dims):
    images = np.asarray(images)
    if images.shape[1] != 784 or len(perm) != 784:
        raise ValueError("images and pattern must have 784 entries")
    preds = np.empty(images.shape[0], dtype=np.int64)
    y = np.empty((1, N_IN))
    y[0, 0] = 1.0
    for s in range(images.shape[0]):
        y[0, 1:] = images[s, perm] / 255.0
        if algorithm == 1:
            raw = project_alg1(y, r, A, B, P, form)[0]
        elif algorithm == 2:
            raw = project_alg2(y, r, A, B, P, form, scratch)[0]
        else:
            raw = project_alg3(y, wt)[0]
        h = np.empty(P + 1)
        h[0] = 1.0
        h[1:] = ((raw - sh_min) / (sh_max - sh_min) - 0.5) - usre
        out = forward_batch(h[None, :], flat, dims)[0]
        preds[s] = int(np.argmax(out))
    return preds


def lyapunov(r, x0, transient, samples, form):
    x = float(x0)
    for _ in range(transient):
        x = _step(x, r, form)
    total = 0.0
    used = 0
    for _ in range(samples):
        d = _deriv(x, r, form)
        if d != 0.0:
            total = total + math.log(abs(d))
            used += 1
        x = _step(x, r, form)
    if used == 0:
        return float("-inf")
    return total / used


def orbit(r, x0, transient, samples, form):
    x = float(x0)
    for _ in range(transient):
        x = _step(x, r, form)
    out = np.empty(samples)
    for n in range(samples):
        out[n] = x
        x = _step(x, r, form)
    return out
