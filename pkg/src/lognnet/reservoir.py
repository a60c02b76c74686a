"""Projection of input vectors through W1 and hidden-layer normalization.

Three interchangeable projections trade memory for recomputation:

* algorithm 1 keeps a single weight scalar and regrows every W1 entry
  from its seed value;
* algorithm 2 keeps one 785-entry working row, advanced one map step per
  hidden neuron;
* algorithm 3 reads the materialized 785 x P matrix.

All three sum ``y[i] * W1[i, j]`` over i in ascending order with the same
floating point operations, so their results are identical.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .chaos import N_IN, materialize_w1
from .errors import DegenerateNeuronError, ParameterError
from .tpattern import prepare_input

CHUNK = 4096


def _as_batch(y):
    y = np.asarray(y, dtype=np.float64)
    single = y.ndim == 1
    y = np.ascontiguousarray(np.atleast_2d(y))
    if y.shape[1] != N_IN:
        raise ParameterError(f"input vectors must have {N_IN} entries")
    return y, single


def project_alg1(y, params):
    """Raw hidden sums, shape (P,) or (N, P), recomputing every weight."""
    y, single = _as_batch(y)
    raw = kernels.get().project_alg1(y, params.r, params.A, params.B,
                                     params.P, params.form_code)
    return raw[0] if single else raw


def project_alg2(y, params, scratch=None):
    """Raw hidden sums using one reusable 785-entry working row.

    On return ``scratch`` holds column P of W1.
    """
    y, single = _as_batch(y)
    if scratch is None:
        scratch = np.empty(N_IN)
    raw = kernels.get().project_alg2(y, params.r, params.A, params.B,
                                     params.P, params.form_code, scratch)
    return raw[0] if single else raw


def project_alg3(y, w1):
    y, single = _as_batch(y)
    raw = kernels.get().project_alg3(y, w1.wt)
    return raw[0] if single else raw


def project(y, params, algorithm=3, w1=None):
    if algorithm == 1:
        return project_alg1(y, params)
    if algorithm == 2:
        return project_alg2(y, params)
    if algorithm == 3:
        if w1 is None:
            w1 = materialize_w1(params)
        elif w1.params != params:
            raise ParameterError("W1 was built with different parameters")
        return project_alg3(y, w1)
    raise ParameterError(f"algorithm must be 1, 2 or 3, got {algorithm!r}")


def project_images(images, pattern, params, algorithm=3, w1=None, chunk=CHUNK):
    """Raw hidden sums for a stack of uint8 images, processed in chunks."""
    if algorithm == 3 and w1 is None:
        w1 = materialize_w1(params)
    out = np.empty((len(images), params.P))
    for start in range(0, len(images), chunk):
        y = prepare_input(pattern, np.atleast_2d(images[start:start + chunk]))
        out[start:start + len(y)] = project(y, params, algorithm, w1)
    return out


@dataclass(frozen=True, eq=False)
class HiddenStats:
    sh_min: np.ndarray
    sh_max: np.ndarray
    usre: np.ndarray

    def __post_init__(self):
        if not (self.sh_min.shape == self.sh_max.shape == self.usre.shape):
            raise ParameterError("hidden stats arrays differ in length")

    @property
    def P(self):
        return len(self.sh_min)

    def __eq__(self, other):
        return (isinstance(other, HiddenStats)
                and np.array_equal(self.sh_min, other.sh_min)
                and np.array_equal(self.sh_max, other.sh_max)
                and np.array_equal(self.usre, other.usre))


def stats_from_raw(raw, degenerate="error"):
    """Fit min, max and centring offset from a (N, P) matrix of raw sums.

    usre is the mean of the range-normalized value minus 0.5, so the
    normalized training features have zero mean.

    A neuron whose raw sum never changes cannot be normalized.  By default
    that raises; with ``degenerate="zero"`` its range is set to 1 so the
    neuron feeds a constant 0 (used by r sweeps, where periodic windows of
    the map can zero whole W1 columns).
    """
    if degenerate not in ("error", "zero"):
        raise ParameterError("degenerate must be 'error' or 'zero'")
    raw = np.atleast_2d(np.asarray(raw, dtype=np.float64))
    sh_min = raw.min(axis=0)
    sh_max = raw.max(axis=0)
    flat = np.flatnonzero(sh_max - sh_min <= 0)
    if flat.size:
        if degenerate == "error":
            raise DegenerateNeuronError(flat + 1)
        sh_max[flat] = sh_min[flat] + 1.0
    usre = ((raw - sh_min) / (sh_max - sh_min) - 0.5).mean(axis=0)
    return HiddenStats(sh_min, sh_max, usre)


def fit_hidden_stats(inputs, projector):
    """Fit hidden stats from input vectors.

    ``inputs`` is a (N, 785) array or an iterable of such batches (single
    vectors are fine); ``projector`` maps a batch to its raw sums.
    """
    if isinstance(inputs, np.ndarray):
        inputs = [inputs]
    raws = [np.atleast_2d(projector(np.atleast_2d(batch))) for batch in inputs]
    if not raws:
        raise ParameterError("no training inputs")
    return stats_from_raw(np.concatenate(raws))


def normalize_hidden(raw, stats):
    """Hidden vector(s) with bias 1 in position 0; no clamping."""
    raw = np.asarray(raw, dtype=np.float64)
    single = raw.ndim == 1
    raw = np.atleast_2d(raw)
    if raw.shape[1] != stats.P:
        raise ParameterError("raw sums and stats differ in width")
    h = np.empty((raw.shape[0], stats.P + 1))
    h[:, 0] = 1.0
    h[:, 1:] = ((raw - stats.sh_min) / (stats.sh_max - stats.sh_min) - 0.5) - stats.usre
    return h[0] if single else h
