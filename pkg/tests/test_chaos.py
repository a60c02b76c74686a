import math

import mpmath
import numpy as np
import pytest

from lognnet.chaos import (ReservoirParams, bifurcation, logistic_step, lyapunov,
                           materialize_w1, orbit, seed_row, weight_at)
from lognnet.errors import ParameterError

DEFAULT = ReservoirParams(r=1.885, A=0.3, B=5.9, P=25)


def closed_form_seed(i, A, B):
    # independent high-precision evaluation
    with mpmath.workdps(40):
        return float(mpmath.mpf(A) * mpmath.sin(mpmath.mpf(i) / 784 * mpmath.pi / B))


@pytest.mark.parametrize("i", [0, 1, 392, 500, 784])
def test_seed_row_closed_form(i):
    assert seed_row(i, 0.3, 5.9) == pytest.approx(closed_form_seed(i, 0.3, 5.9), abs=1e-16)


def test_seed_row_named_values():
    assert seed_row(0) == 0.0
    assert seed_row(784, 0.3, 5.9) == pytest.approx(0.3 * math.sin(math.pi / 5.9), rel=1e-15)
    assert seed_row(392, 0.3, 5.9) == pytest.approx(0.3 * math.sin(math.pi / 11.8), rel=1e-15)


def test_logistic_step():
    assert logistic_step(0.0, 1.3) == 1.0
    assert logistic_step(0.5, 2.0) == 0.5
    assert logistic_step(1.0, 1.885) == pytest.approx(-0.885, abs=1e-15)


def test_map_variants():
    assert logistic_step(0.5, 4.0, "classic") == 1.0
    assert logistic_step(0.5, -1.0, "quadratic") == -0.75


def test_weight_at_small_columns():
    assert weight_at(7, 1, DEFAULT) == seed_row(7)
    assert weight_at(0, 2, ReservoirParams(r=0.37)) == 1.0


def test_weight_at_matches_materialized():
    w1 = materialize_w1(DEFAULT)
    assert weight_at(100, 6, DEFAULT) == w1[100, 5]


def test_materialize_single_column_is_seed():
    w1 = materialize_w1(ReservoirParams(P=1))
    assert w1.shape == (785, 1)
    assert list(w1.w[:, 0]) == [seed_row(i) for i in range(785)]


def test_row0_is_orbit_of_zero():
    r = 1.885
    w1 = materialize_w1(ReservoirParams(r=r, P=8))
    x, expected = 0.0, []
    for _ in range(8):
        expected.append(x)
        x = 1.0 - r * x * x
    assert list(w1.w[0]) == expected
    assert w1.w[0, 1] == 1.0 and w1.w[0, 2] == 1.0 - r


def test_materialize_columns_follow_recurrence():
    w1 = materialize_w1(DEFAULT).w
    assert np.array_equal(w1[:, 1:], 1.0 - DEFAULT.r * w1[:, :-1] * w1[:, :-1])


def test_weight_at_cross_check_random(rng):
    w1 = materialize_w1(DEFAULT)
    for i, p in zip(rng.integers(0, 785, 100), rng.integers(1, 26, 100)):
        assert weight_at(int(i), int(p), DEFAULT) == w1[i, p - 1]


@pytest.mark.parametrize("r", [0.3, 1.0, 1.5, 1.885, 2.0])
def test_weights_bounded(r):
    w = materialize_w1(ReservoirParams(r=r, P=60)).w
    assert np.isfinite(w).all()
    assert w.max() <= 1.0
    assert w.min() >= min(1.0 - r, -0.3)


@pytest.mark.parametrize("kwargs", [dict(r=0.0), dict(r=2.5), dict(r=-1.0), dict(B=0.0),
                                    dict(P=0), dict(form="cubic")])
def test_parameter_validation(kwargs):
    with pytest.raises(ParameterError):
        ReservoirParams(**kwargs)


def test_lyapunov_full_chaos_is_ln2():
    assert lyapunov(2.0, samples=1_000_000) == pytest.approx(math.log(2), abs=0.01)


def test_lyapunov_stable_fixed_point():
    # fixed point of 1 - r x^2 at r = 1/2 is sqrt(3) - 1; |f'| = 2 r x* < 1
    x_star = math.sqrt(3) - 1
    lam = lyapunov(0.5)
    assert lam < 0
    assert lam == pytest.approx(math.log(2 * 0.5 * x_star), abs=1e-9)


def test_lyapunov_positive_mostly_above_1_4():
    grid = np.round(np.arange(1.4, 2.0 + 1e-9, 0.01), 10)
    positive = sum(lyapunov(r, samples=20_000) > 0 for r in grid)
    assert positive > len(grid) / 2


def test_lyapunov_deterministic():
    assert lyapunov(1.77, 0.2, 500, 5000) == lyapunov(1.77, 0.2, 500, 5000)


def test_lyapunov_classic_form_full_chaos():
    assert lyapunov(4.0, 0.3, samples=500_000, form="classic") == pytest.approx(math.log(2), abs=0.01)


def test_bifurcation_period_one():
    xs = [x for _, x in bifurcation([0.5], samples=50)]
    assert np.ptp(xs) == 0 or np.ptp(xs) < 1e-12
    assert xs[0] == pytest.approx(math.sqrt(3) - 1, abs=1e-12)


def test_bifurcation_period_two():
    xs = np.array([x for _, x in bifurcation([1.0], samples=50)])
    # 2-cycle of 1 - x^2 is {0, 1}
    assert set(np.round(xs, 9)) == {0.0, 1.0}


def test_bifurcation_full_chaos_fills_interval():
    xs = np.array([x for _, x in bifurcation([2.0], samples=20_000)])
    assert xs.min() < -0.99 and xs.max() > 0.99


def test_orbit_matches_manual_iteration():
    x, expected = 0.1, []
    for _ in range(10):
        x = 1 - 1.7 * x * x
    for _ in range(5):
        expected.append(x)
        x = 1 - 1.7 * x * x
    assert list(orbit(1.7, 0.1, 10, 5)) == expected
