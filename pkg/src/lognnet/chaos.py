"""Logistic-map weight generation and chaos diagnostics.

Reservoir weights: column 1 of W1 is ``A * sin((i / 784) * pi / B)`` for
input index i = 0..784, and every further column applies one map step to
the previous one.  Three map forms are supported; only the shifted form
``x -> 1 - r x^2`` is the default.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ParameterError

N_IN = 785

FORMS = {"shifted": 0, "classic": 1, "quadratic": 2}

# parameter ranges that keep orbits from seeds in [-0.3, 0.3] bounded
_RANGES = {
    "shifted": (0.0, 2.0, False),     # 0 < r <= 2
    "classic": (0.0, 4.0, False),     # 0 < a <= 4
    "quadratic": (-2.0, 0.25, True),  # -2 <= c <= 1/4
}


@dataclass(frozen=True)
class ReservoirParams:
    """Map parameter r, seed amplitude A, seed period divisor B, width P.

    For the ``classic`` and ``quadratic`` forms, ``r`` carries their
    parameter (a or c).
    """

    r: float = 1.885
    A: float = 0.3
    B: float = 5.9
    P: int = 25
    form: str = "shifted"

    def __post_init__(self):
        if self.form not in FORMS:
            raise ParameterError(f"unknown map form {self.form!r}")
        check_map_parameter(self.r, self.form)
        if not math.isfinite(self.A):
            raise ParameterError("A must be finite")
        if self.B == 0 or not math.isfinite(self.B):
            raise ParameterError("B must be finite and non-zero")
        if int(self.P) != self.P or self.P < 1:
            raise ParameterError(f"P must be a positive integer, got {self.P}")

    @property
    def form_code(self):
        return FORMS[self.form]


def check_map_parameter(r, form="shifted"):
    lo, hi, closed_lo = _RANGES[form]
    ok = math.isfinite(r) and (lo <= r if closed_lo else lo < r) and r <= hi
    if not ok:
        bracket = "[" if closed_lo else "("
        raise ParameterError(
            f"map parameter {r} outside {bracket}{lo}, {hi}] for the {form} form")


def seed_row(i, A=0.3, B=5.9):
    if not 0 <= i < N_IN:
        raise ParameterError(f"input index {i} outside 0..784")
    return A * math.sin((i / 784.0) * math.pi / B)


def logistic_step(x, r, form="shifted"):
    return kernels._pycore._step(x, r, FORMS[form])


def weight_at(i, p, params):
    if p < 1:
        raise ParameterError("column index p starts at 1")
    if not 0 <= i < N_IN:
        raise ParameterError(f"input index {i} outside 0..784")
    return kernels.get().weight_at(i, p, params.r, params.A, params.B,
                                   params.form_code)


class W1Matrix:
    """Materialized reservoir weights.

    ``w`` is the (785, P) view indexed [i, p-1]; ``wt`` is the same data
    stored (P, 785) C-contiguous, the layout the projection kernel walks.
    """

    def __init__(self, params, wt):
        if wt.shape != (params.P, N_IN):
            raise ParameterError("W1 storage does not match params")
        wt.setflags(write=False)
        self.params = params
        self.wt = wt

    @property
    def w(self):
        return self.wt.T

    @property
    def shape(self):
        return (N_IN, self.params.P)

    def __getitem__(self, idx):
        return self.w[idx]


def materialize_w1(params):
    wt = kernels.get().materialize(params.r, params.A, params.B, params.P,
                                   params.form_code)
    return W1Matrix(params, np.asarray(wt))


def orbit(r, x0=0.1, transient=1000, samples=1000, form="shifted"):
    check_map_parameter(r, form)
    return np.asarray(kernels.get().orbit(r, float(x0), int(transient),
                                          int(samples), FORMS[form]))


def lyapunov(r, x0=0.1, transient=1000, samples=100_000, form="shifted"):
    """Time average of ln|f'(x_n)| along the orbit after a transient.

    Points where f' vanishes exactly are skipped; if every point does, the
    result is -inf.  At superstable r (r=1 for the shifted form) the orbit
    hits x=0 exactly, so only the nonzero-slope points of the cycle count
    and the result is positive rather than -inf.
    """
    check_map_parameter(r, form)
    if abs(x0) > 1:
        raise ParameterError("x0 must lie in [-1, 1]")
    if samples < 1:
        raise ParameterError("samples must be positive")
    return kernels.get().lyapunov(r, float(x0), int(transient), int(samples),
                                  FORMS[form])


def bifurcation(r_grid, transient=1000, samples=200, x0=0.1, form="shifted"):
    """Post-transient orbit points for each r, as a list of (r, x)."""
    points = []
    for r in r_grid:
        points += [(float(r), float(x)) for x in orbit(r, x0, transient, samples, form)]
    return points
