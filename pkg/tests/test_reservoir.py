import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lognnet.chaos import ReservoirParams, materialize_w1, seed_row, weight_at
from lognnet.errors import DegenerateNeuronError, ParameterError
from lognnet.reservoir import (HiddenStats, fit_hidden_stats, normalize_hidden, project,
                               project_alg1, project_alg2, project_alg3, stats_from_raw)
from lognnet.tpattern import builtin_pattern, prepare_input

PARAMS = ReservoirParams(r=1.885, P=25)


def bias_only():
    y = np.zeros(785)
    y[0] = 1.0
    return y


def test_bias_only_input_gives_row0():
    raw = project_alg1(bias_only(), PARAMS)
    assert list(raw) == [weight_at(0, j, PARAMS) for j in range(1, 26)]
    assert np.array_equal(project_alg2(bias_only(), PARAMS), raw)


def test_single_neuron_is_dot_with_seed(random_inputs):
    y = random_inputs(1)[0]
    params = ReservoirParams(P=1)
    acc = 0.0
    for i in range(785):
        acc = acc + y[i] * seed_row(i)
    assert project_alg1(y, params)[0] == acc


@pytest.mark.parametrize("P, r", [(1, 1.885), (25, 1.885), (40, 2.0), (25, 1.65), (10, 0.7)])
def test_three_algorithms_bit_identical(random_inputs, P, r):
    params = ReservoirParams(r=r, P=P)
    y = random_inputs(20)
    a1 = project_alg1(y, params)
    a2 = project_alg2(y, params)
    a3 = project_alg3(y, materialize_w1(params))
    assert np.array_equal(a1, a2) and np.array_equal(a2, a3)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), P=st.integers(1, 12),
       r=st.floats(0.05, 2.0), form=st.sampled_from(["shifted", "classic"]))
def test_algorithm_equivalence_property(seed, P, r, form):
    if form == "classic":
        r = 2 * r
    params = ReservoirParams(r=r, P=P, form=form)
    y = np.random.default_rng(seed).random((3, 785))
    a1 = project_alg1(y, params)
    assert np.array_equal(a1, project_alg2(y, params))
    assert np.array_equal(a1, project_alg3(y, materialize_w1(params)))


def test_alg2_scratch_ends_at_last_column(random_inputs):
    scratch = np.empty(785)
    project_alg2(random_inputs(2), PARAMS, scratch)
    assert np.array_equal(scratch, materialize_w1(PARAMS).w[:, -1])


def test_alg3_dimension_mismatch(random_inputs):
    with pytest.raises(ParameterError):
        project(random_inputs(1), PARAMS, 3, materialize_w1(ReservoirParams(P=3)))
    with pytest.raises(ParameterError):
        project_alg3(np.ones((1, 784)), materialize_w1(PARAMS))


def test_linearity(random_inputs):
    y = random_inputs(4)
    w1 = materialize_w1(PARAMS)
    assert np.array_equal(project_alg3(2 * y, w1), 2 * project_alg3(y, w1))


def test_golden_projection():
    # synthetic image so the check runs without the data files
    img = (np.arange(784) * 37 % 256).astype(np.uint8)
    y = prepare_input(builtin_pattern(3), img)
    raw = project_alg3(y, materialize_w1(PARAMS))
    assert raw[:3].tolist() == [GOLDEN[0], GOLDEN[1], GOLDEN[2]]
    assert raw[-1] == GOLDEN[3]


GOLDEN = (30.711465821202683, 385.38095454609993, -324.09003281782014, 67.54269591113128)


def test_fit_symmetric_pair():
    stats = stats_from_raw(np.array([[0.0], [1.0]]))
    assert stats.sh_min[0] == 0 and stats.sh_max[0] == 1 and stats.usre[0] == 0


def test_fit_degenerate():
    with pytest.raises(DegenerateNeuronError):
        stats_from_raw(np.array([[1.0, 2.0], [1.0, 3.0]]))
    y = np.tile(np.linspace(0, 1, 785), (3, 1))
    with pytest.raises(DegenerateNeuronError):
        fit_hidden_stats(y, lambda b: project_alg1(b, PARAMS))


def test_fit_from_stream_matches_whole(random_inputs):
    y = random_inputs(30)
    w1 = materialize_w1(PARAMS)
    whole = fit_hidden_stats(y, lambda b: project_alg3(b, w1))
    streamed = fit_hidden_stats(iter([y[:10], y[10:25], y[25:]]), lambda b: project_alg3(b, w1))
    assert np.array_equal(whole.sh_min, streamed.sh_min)
    assert np.array_equal(whole.sh_max, streamed.sh_max)
    np.testing.assert_allclose(whole.usre, streamed.usre, atol=1e-15)


def test_normalized_training_features(random_inputs):
    y = random_inputs(200)
    raw = project_alg3(y, materialize_w1(PARAMS))
    stats = stats_from_raw(raw)
    h = normalize_hidden(raw, stats)
    assert (h[:, 0] == 1).all()
    feats = h[:, 1:]
    assert np.abs(feats.mean(axis=0)).max() < 1e-9
    assert (feats.min(axis=0) >= -0.5 - stats.usre - 1e-12).all()
    assert (feats.max(axis=0) <= 0.5 - stats.usre + 1e-12).all()


def one(v):
    return np.array([v])


@pytest.mark.parametrize("raw, usre, expected", [
    (0.0, 0.0, -0.5), (4.0, 0.0, 0.5), (2.0, 0.1, -0.1)])
def test_normalize_examples(raw, usre, expected):
    stats = HiddenStats(one(0.0), one(4.0), one(usre))
    h = normalize_hidden(one(raw), stats)
    assert h[0] == 1.0
    assert h[1] == pytest.approx(expected, abs=1e-15)


def test_normalize_is_affine_and_unclamped():
    stats = HiddenStats(np.array([1.0, -2.0]), np.array([3.0, 6.0]), np.array([0.05, -0.1]))
    a, b = np.array([0.5, 10.0]), np.array([-4.0, 2.0])
    f = lambda x: normalize_hidden(x, stats)[1:]
    lin = lambda x: f(x) - f(np.zeros(2))
    np.testing.assert_allclose(lin(2 * a + 3 * b), 2 * lin(a) + 3 * lin(b), atol=1e-12)
    assert f(np.array([10.0, 50.0])).max() > 0.5  # outside training range, not clamped


def test_golden_projection_mnist(mnist):
    _, test = mnist
    assert test.labels[0] == 7
    y = prepare_input(builtin_pattern(3), test.images[0])
    raw = project_alg1(y, PARAMS)
    assert (raw[0], raw[5], raw[-1]) == (3.6394926278363147, 6.300864006888746, 22.21489942592768)
    assert np.array_equal(raw, project_alg3(y, materialize_w1(PARAMS)))


def test_degenerate_zero_policy_feeds_constant_zero(rng):
    raw = rng.random((50, 3))
    raw[:, 1] = 7.0
    stats = stats_from_raw(raw, degenerate="zero")
    h = normalize_hidden(raw, stats)
    assert np.all(h[:, 2] == 0.0)
    assert np.abs(h[:, 1:].mean(axis=0)).max() < 1e-12
    assert stats.sh_min[1] == 7.0 and stats.sh_max[1] == 8.0


def test_degenerate_policy_validated():
    with pytest.raises(ParameterError):
        stats_from_raw(np.arange(6.0).reshape(3, 2), degenerate="skip")


def test_periodic_r_zeroes_columns():
    # r=1 lands on the superstable 0 <-> 1 cycle, so W1 columns become exactly 0
    w = materialize_w1(ReservoirParams(r=1.0, P=25)).w
    zero = [j for j in range(25) if not w[:, j].any()]
    assert zero
