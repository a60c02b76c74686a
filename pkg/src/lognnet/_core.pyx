# cython: language_level=3
"""Compiled hot loops for LogNNet.

Every routine here has a twin in :mod:`lognnet._pycore` with the same
signature.  Floating point expressions are written in the same order in
both files so the projection results are bit-identical across backends.

Map forms are passed as small integers:

=====  =========================
0      x <- 1 - r*x*x  (shifted)
1      x <- r*x*(1 - x) (classic)
2      x <- x*x + r     (quadratic)
=====  =========================
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, exp, log, fabs, M_PI
from libc.stdlib cimport malloc, free

cnp.import_array()

BACKEND = "compiled"

cdef enum:
    N_IN = 785


cdef inline double _step(double x, double r, int form) noexcept nogil:
    if form == 0:
        return 1.0 - r * x * x
    elif form == 1:
        return r * x * (1.0 - x)
    return x * x + r


cdef inline double _deriv(double x, double r, int form) noexcept nogil:
    if form == 0:
        return -2.0 * r * x
    elif form == 1:
        return r * (1.0 - 2.0 * x)
    return 2.0 * x


cdef inline double _seed(int i, double A, double B) noexcept nogil:
    return A * sin((<double>i / 784.0) * M_PI / B)


cdef inline double _sigmoid(double z) noexcept nogil:
    return 1.0 / (1.0 + exp(-z))


def seed_column(double A, double B):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(N_IN)
    cdef int i
    for i in range(N_IN):
        out[i] = _seed(i, A, B)
    return out


def materialize(double r, double A, double B, int P, int form):
    """Return W1 transposed, shape (P, 785): row j-1 holds hidden neuron j."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] arr = np.empty((P, N_IN))
    cdef double[:, ::1] wt = arr
    cdef int i, j
    with nogil:
        for i in range(N_IN):
            wt[0, i] = _seed(i, A, B)
        for j in range(1, P):
            for i in range(N_IN):
                wt[j, i] = _step(wt[j - 1, i], r, form)
    return arr


def weight_at(int i, int p, double r, double A, double B, int form):
    cdef double w = _seed(i, A, B)
    cdef int k
    for k in range(2, p + 1):
        w = _step(w, r, form)
    return w


cdef void _alg1(const double* y, double* out, int P, double r, double A,
                double B, int form) noexcept nogil:
    cdef int i, j, k
    cdef double acc, w
    for j in range(1, P + 1):
        acc = 0.0
        for i in range(N_IN):
            w = _seed(i, A, B)
            for k in range(2, j + 1):
                w = _step(w, r, form)
            acc = acc + y[i] * w
        out[j - 1] = acc


cdef void _alg2(const double* y, double* out, double* scratch, int P,
                double r, double A, double B, int form) noexcept nogil:
    cdef int i, j
    cdef double acc
    for j in range(1, P + 1):
        acc = 0.0
        for i in range(N_IN):
            if j == 1:
                scratch[i] = _seed(i, A, B)
            else:
                scratch[i] = _step(scratch[i], r, form)
            acc = acc + y[i] * scratch[i]
        out[j - 1] = acc


cdef void _alg3(const double* y, double* out, const double* wt,
                int P) noexcept nogil:
    cdef int i, j
    cdef double acc
    cdef const double* row
    for j in range(P):
        acc = 0.0
        row = wt + j * N_IN
        for i in range(N_IN):
            acc = acc + y[i] * row[i]
        out[j] = acc


def project_alg1(const double[:, ::1] Y, double r, double A, double B,
                 int P, int form):
    cdef Py_ssize_t n = Y.shape[0], s
    if Y.shape[1] != N_IN:
        raise ValueError("inputs must have 785 columns")
    out_arr = np.empty((n, P))
    cdef double[:, ::1] out = out_arr
    with nogil:
        for s in range(n):
            _alg1(&Y[s, 0], &out[s, 0], P, r, A, B, form)
    return out_arr


def project_alg2(const double[:, ::1] Y, double r, double A, double B,
                 int P, int form, double[::1] scratch):
    cdef Py_ssize_t n = Y.shape[0], s
    if Y.shape[1] != N_IN or scratch.shape[0] != N_IN:
        raise ValueError("inputs and scratch must have 785 entries")
    out_arr = np.empty((n, P))
    cdef double[:, ::1] out = out_arr
    with nogil:
        for s in range(n):
            _alg2(&Y[s, 0], &out[s, 0], &scratch[0], P, r, A, B, form)
    return out_arr


def project_alg3(const double[:, ::1] Y, const double[:, ::1] wt):
    cdef Py_ssize_t n = Y.shape[0], s
    cdef int P = wt.shape[0]
    if Y.shape[1] != N_IN or wt.shape[1] != N_IN:
        raise ValueError("inputs and W1 must have 785 input rows")
    out_arr = np.empty((n, P))
    cdef double[:, ::1] out = out_arr
    with nogil:
        for s in range(n):
            _alg3(&Y[s, 0], &out[s, 0], &wt[0, 0], P)
    return out_arr


# --- classifier -----------------------------------------------------------
#
# The layer stack is packed into one flat buffer; dims[l] = (rows, cols,
# offset).  rows includes the bias row 0.

cdef int _forward(const double* h, const double* flat, const cnp.int64_t* dims,
                  int L, double* acts) noexcept nogil:
    """Fill acts with every layer's input (bias first) and the final output.

    acts layout: layer l input starts at sum of rows of layers < l; the
    output (no bias) follows the last layer input.  Returns output offset.
    """
    cdef int l, i, n, rows, cols, off, a_in, a_out
    cdef double z
    rows = dims[0]
    for i in range(rows):
        acts[i] = h[i]
    a_in = 0
    for l in range(L):
        rows = dims[3 * l]
        cols = dims[3 * l + 1]
        off = dims[3 * l + 2]
        a_out = a_in + rows
        if l < L - 1:
            acts[a_out] = 1.0
            for n in range(cols):
                z = 0.0
                for i in range(rows):
                    z = z + acts[a_in + i] * flat[off + i * cols + n]
                acts[a_out + 1 + n] = _sigmoid(z)
        else:
            for n in range(cols):
                z = 0.0
                for i in range(rows):
                    z = z + acts[a_in + i] * flat[off + i * cols + n]
                acts[a_out + n] = _sigmoid(z)
        a_in = a_out
    return a_in


cdef inline int _argmax(const double* v, int n) noexcept nogil:
    cdef int k, best = 0
    for k in range(1, n):
        if v[k] > v[best]:
            best = k
    return best


def forward_batch(const double[:, ::1] H, double[::1] flat, cnp.int64_t[::1] dims):
    cdef int L = dims.shape[0] // 3
    cdef Py_ssize_t n = H.shape[0], s
    cdef int total = 0, l, out_off, k
    cdef int n_out = dims[3 * (L - 1) + 1]
    for l in range(L):
        total += dims[3 * l]
    total += n_out
    if H.shape[1] != dims[0]:
        raise ValueError("hidden width does not match first layer")
    out_arr = np.empty((n, n_out))
    cdef double[:, ::1] out = out_arr
    cdef double* acts = <double*>malloc(total * sizeof(double))
    try:
        with nogil:
            for s in range(n):
                out_off = _forward(&H[s, 0], &flat[0], &dims[0], L, acts)
                for k in range(n_out):
                    out[s, k] = acts[out_off + k]
    finally:
        free(acts)
    return out_arr


def sgd_epoch(const double[:, ::1] H, const unsigned char[::1] labels,
              double[::1] flat, cnp.int64_t[::1] dims, double lr, int loss):
    """One pass of per-sample backprop over H in row order, in place.

    loss 0: squared error, delta = (t - o) o (1 - o); loss 1: cross-entropy,
    delta = t - o.  Deltas use pre-update weights; all layers then update.
    """
    cdef int L = dims.shape[0] // 3
    cdef Py_ssize_t n = H.shape[0], s
    cdef int total = 0, l, i, m, k, rows, cols, off, a_in, out_off
    cdef int n_out = dims[3 * (L - 1) + 1]
    cdef double o, t, acc
    if H.shape[1] != dims[0] or labels.shape[0] != n:
        raise ValueError("training arrays do not match the layer stack")
    for l in range(L):
        total += dims[3 * l]
    total += n_out
    cdef int dtotal = 0
    for l in range(L):
        dtotal += dims[3 * l + 1]
    cdef double* acts = <double*>malloc(total * sizeof(double))
    cdef double* deltas = <double*>malloc(dtotal * sizeof(double))
    cdef int* a_offs = <int*>malloc(L * sizeof(int))
    cdef int* d_offs = <int*>malloc(L * sizeof(int))
    try:
        a_in = 0
        k = 0
        for l in range(L):
            a_offs[l] = a_in
            d_offs[l] = k
            a_in += dims[3 * l]
            k += dims[3 * l + 1]
        with nogil:
            for s in range(n):
                out_off = _forward(&H[s, 0], &flat[0], &dims[0], L, acts)
                # output deltas
                for k in range(n_out):
                    o = acts[out_off + k]
                    t = 1.0 if k == labels[s] else 0.0
                    if loss == 0:
                        deltas[d_offs[L - 1] + k] = (t - o) * o * (1.0 - o)
                    else:
                        deltas[d_offs[L - 1] + k] = t - o
                # hidden deltas, back to front
                for l in range(L - 2, -1, -1):
                    cols = dims[3 * l + 1]
                    rows = dims[3 * (l + 1)]
                    off = dims[3 * (l + 1) + 2]
                    for m in range(cols):
                        acc = 0.0
                        for k in range(dims[3 * (l + 1) + 1]):
                            acc = acc + flat[off + (m + 1) * dims[3 * (l + 1) + 1] + k] * deltas[d_offs[l + 1] + k]
                        o = acts[a_offs[l + 1] + 1 + m]
                        deltas[d_offs[l] + m] = o * (1.0 - o) * acc
                # updates
                for l in range(L):
                    rows = dims[3 * l]
                    cols = dims[3 * l + 1]
                    off = dims[3 * l + 2]
                    for i in range(rows):
                        o = lr * acts[a_offs[l] + i]
                        for k in range(cols):
                            flat[off + i * cols + k] += o * deltas[d_offs[l] + k]
    finally:
        free(acts)
        free(deltas)
        free(a_offs)
        free(d_offs)


# --- full single-image inference -------------------------------------------

def classify(const unsigned char[:, ::1] images, const cnp.int64_t[::1] perm,
             int algorithm, double r, double A, double B, int form, int P,
             const double[:, ::1] wt, double[::1] scratch,
             const double[::1] sh_min, const double[::1] sh_max,
             const double[::1] usre, double[::1] flat, cnp.int64_t[::1] dims):
    """Pattern -> projection -> normalization -> classifier -> argmax, image
    by image.  wt is only read for algorithm 3, scratch only for 2."""
    cdef int L = dims.shape[0] // 3
    cdef Py_ssize_t n = images.shape[0], s
    cdef int total = 0, l, i, out_off
    cdef int n_out = dims[3 * (L - 1) + 1]
    if images.shape[1] != 784 or perm.shape[0] != 784:
        raise ValueError("images and pattern must have 784 entries")
    if dims[0] != P + 1:
        raise ValueError("classifier input width must be P + 1")
    if algorithm == 3 and (wt.shape[0] != P or wt.shape[1] != N_IN):
        raise ValueError("W1 shape does not match P")
    if algorithm == 2 and scratch.shape[0] != N_IN:
        raise ValueError("scratch must have 785 entries")
    for l in range(L):
        total += dims[3 * l]
    total += n_out
    pred_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] pred = pred_arr
    cdef double* y = <double*>malloc(N_IN * sizeof(double))
    cdef double* raw = <double*>malloc(P * sizeof(double))
    cdef double* h = <double*>malloc((P + 1) * sizeof(double))
    cdef double* acts = <double*>malloc(total * sizeof(double))
    try:
        with nogil:
            for s in range(n):
                y[0] = 1.0
                for i in range(784):
                    y[i + 1] = <double>images[s, perm[i]] / 255.0
                if algorithm == 1:
                    _alg1(y, raw, P, r, A, B, form)
                elif algorithm == 2:
                    _alg2(y, raw, &scratch[0], P, r, A, B, form)
                else:
                    _alg3(y, raw, &wt[0, 0], P)
                h[0] = 1.0
                for i in range(P):
                    h[i + 1] = ((raw[i] - sh_min[i]) / (sh_max[i] - sh_min[i]) - 0.5) - usre[i]
                out_off = _forward(h, &flat[0], &dims[0], L, acts)
                pred[s] = _argmax(acts + out_off, n_out)
    finally:
        free(y)
        free(raw)
        free(h)
        free(acts)
    return pred_arr


# --- chaos diagnostics -----------------------------------------------------

def lyapunov(double r, double x0, long transient, long samples, int form):
    cdef long n, used = 0
    cdef double x = x0, d, total = 0.0
    with nogil:
        for n in range(transient):
            x = _step(x, r, form)
        for n in range(samples):
            d = _deriv(x, r, form)
            if d != 0.0:
                total = total + log(fabs(d))
                used += 1
            x = _step(x, r, form)
    if used == 0:
        return float("-inf")
    return total / used


def orbit(double r, double x0, long transient, long samples, int form):
    out_arr = np.empty(samples)
    cdef double[::1] out = out_arr
    cdef double x = x0
    cdef long n
    with nogil:
        for n in range(transient):
            x = _step(x, r, form)
        for n in range(samples):
            out[n] = x
            x = _step(x, r, form)
    return out_arr
