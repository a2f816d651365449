import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from coupon_discovery import (
    EstimateChannel,
    ObservationModel,
    ParameterDomainError,
    ValidationError,
    effective_pmf,
    explicit_channel,
    make_binomial_prior,
    make_explicit_prior,
    make_uniform_prior,
    map_induced_channel,
    symmetric_channel,
)

from oracles import push_forward


def test_symmetric_channel_entries():
    R = symmetric_channel(4, 0.1).matrix
    np.testing.assert_allclose(np.diag(R), 0.9)
    off = R[~np.eye(4, dtype=bool)]
    np.testing.assert_allclose(off, 0.1 / 3)
    np.testing.assert_allclose(R.sum(axis=1), 1.0, atol=1e-12)


def test_symmetric_channel_noiseless_and_flat():
    np.testing.assert_array_equal(symmetric_channel(4, 0).matrix, np.eye(4))
    np.testing.assert_array_equal(symmetric_channel(2, 0.5).matrix, np.full((2, 2), 0.5))


@pytest.mark.parametrize("M,r", [(4, -0.01), (4, 1.01), (1, 0.2)])
def test_symmetric_channel_domain(M, r):
    with pytest.raises(ParameterDomainError):
        symmetric_channel(M, r)


def test_symmetric_channel_single_element_noiseless():
    np.testing.assert_array_equal(symmetric_channel(1, 0).matrix, [[1.0]])


def test_explicit_channel_valid():
    assert explicit_channel(np.eye(3)).is_identity()
    R = explicit_channel([[0.9, 0.1], [0.4, 0.6]])
    np.testing.assert_array_equal(R.matrix, [[0.9, 0.1], [0.4, 0.6]])


def test_explicit_channel_bad_row_named():
    with pytest.raises(ValidationError, match="row 1 sums to 1.1"):
        explicit_channel([[0.9, 0.2], [0.5, 0.5]])


@pytest.mark.parametrize("m", [[[1.0, 0.0]], [[1.2, -0.2], [0, 1]], [[1, 0, 0], [0, 1, 0]]])
def test_explicit_channel_rejects(m):
    with pytest.raises(ValidationError):
        explicit_channel(m)


def test_map_identity_likelihood_gives_identity():
    prior = make_explicit_prior([0.6, 0.3, 0.1])
    R = map_induced_channel(prior, ObservationModel.from_matrix(np.eye(3)))
    np.testing.assert_array_equal(R.matrix, np.eye(3))
    assert effective_pmf(prior, R) == prior


def test_map_binary_symmetric_by_hand():
    # x=1: joint 0.4 vs 0.1 -> decide 1; x=2: joint 0.1 vs 0.4 -> decide 2
    R = map_induced_channel(make_uniform_prior(2), ObservationModel.from_matrix([[0.8, 0.2], [0.2, 0.8]]))
    np.testing.assert_allclose(R.matrix, [[0.8, 0.2], [0.2, 0.8]])


def test_map_ties_go_to_smallest_index():
    R = map_induced_channel(make_uniform_prior(2), ObservationModel.from_matrix([[0.5, 0.5], [0.5, 0.5]]))
    np.testing.assert_array_equal(R.matrix, [[1, 0], [1, 0]])


def test_map_zero_column_contributes_nothing():
    # third symbol never occurs under any element
    obs = ObservationModel.from_matrix([[0.7, 0.3, 0.0], [0.1, 0.9, 0.0]])
    R = map_induced_channel(make_uniform_prior(2), obs)
    np.testing.assert_allclose(R.matrix, [[0.7, 0.3], [0.1, 0.9]])


def test_map_strong_prior_overrides_observation():
    # prior 0.9/0.1 with a weak observation: element 1 wins everywhere
    R = map_induced_channel(make_explicit_prior([0.9, 0.1]),
                            ObservationModel.from_matrix([[0.6, 0.4], [0.4, 0.6]]))
    np.testing.assert_array_equal(R.matrix, [[1, 0], [1, 0]])


def test_map_dimension_mismatch():
    with pytest.raises(ValidationError):
        map_induced_channel(make_uniform_prior(3), ObservationModel.from_matrix(np.eye(2)))


def test_effective_pmf_example(binom4, sym4):
    pt = effective_pmf(binom4, sym4).weights
    np.testing.assert_allclose(pt, push_forward(binom4.weights.tolist(), sym4.matrix.tolist()), atol=1e-15)
    np.testing.assert_allclose(pt, [0.4770667, 0.3661333, 0.1165333, 0.0402667], atol=5e-8)


def test_effective_pmf_identity_and_uniform(binom4):
    assert effective_pmf(binom4, EstimateChannel.identity(4)) == binom4
    u = make_uniform_prior(5)
    np.testing.assert_allclose(effective_pmf(u, symmetric_channel(5, 0.37)).weights, 0.2, atol=1e-15)


def test_effective_pmf_dimension_mismatch(binom4):
    with pytest.raises(ValidationError):
        effective_pmf(binom4, symmetric_channel(3, 0.1))


def _random_pmf(draw, M):
    w = draw(arrays(np.float64, M, elements=st.floats(0.0, 1.0)))
    if w.sum() == 0:
        w[0] = 1.0
    return make_explicit_prior(w / w.sum())


@st.composite
def prior_and_channel(draw):
    M = draw(st.integers(1, 8))
    prior = _random_pmf(draw, M)
    rows = draw(arrays(np.float64, (M, M), elements=st.floats(0.0, 1.0)))
    rows[rows.sum(axis=1) == 0, 0] = 1.0
    return prior, explicit_channel(rows / rows.sum(axis=1, keepdims=True))


@given(prior_and_channel())
def test_effective_pmf_is_always_a_pmf(pc):
    pt = effective_pmf(*pc).weights
    assert pt.min() >= 0
    assert abs(pt.sum() - 1) <= 1e-12


@given(st.integers(2, 10).flatmap(lambda M: st.tuples(
    st.just(M), arrays(np.float64, M, elements=st.floats(0.01, 1.0)), st.floats(0, 1))))
def test_symmetric_push_forward_closed_form(args):
    M, w, r = args
    p = make_explicit_prior(w / w.sum())
    pt = effective_pmf(p, symmetric_channel(M, r)).weights
    expected = (1 - r) * p.weights + r / (M - 1) * (1 - p.weights)
    np.testing.assert_allclose(pt, expected, atol=1e-14)


def test_noise_moves_mass_toward_uniform(binom4):
    rs = np.linspace(0, 1, 21)
    pts = np.array([effective_pmf(binom4, symmetric_channel(4, r)).weights for r in rs])
    rare = binom4.weights < 0.25
    assert np.all(np.diff(pts[:, rare], axis=0) > 0)
    assert np.all(np.diff(pts[:, ~rare], axis=0) < 0)


@given(st.integers(2, 8), st.floats(0.0, 0.999), st.floats(0.001, 0.2), st.data())
def test_noise_benefit_monotone_in_r(M, r1, dr, data):
    w = data.draw(arrays(np.float64, M, elements=st.floats(0.01, 1.0)))
    p = make_explicit_prior(w / w.sum())
    r2 = min(1.0, r1 + dr)
    lo = effective_pmf(p, symmetric_channel(M, r1)).weights
    hi = effective_pmf(p, symmetric_channel(M, r2)).weights
    below = p.weights < 1 / M - 1e-9
    above = p.weights > 1 / M + 1e-9
    assert np.all(hi[below] > lo[below])
    assert np.all(hi[above] < lo[above])


def test_map_then_push_forward_on_identity_reproduces_prior(binom4):
    R = map_induced_channel(binom4, ObservationModel.from_matrix(np.eye(4)))
    assert effective_pmf(binom4, R) == binom4


def test_binomial_map_channel_push_forward():
    # noisy 3-symbol observation; pushed-forward pmf checked against loop oracle
    prior = make_binomial_prior(3, 0.4)
    lik = np.array([[0.7, 0.2, 0.1], [0.2, 0.6, 0.2], [0.1, 0.3, 0.6]])
    R = map_induced_channel(prior, ObservationModel.from_matrix(lik))
    np.testing.assert_allclose(effective_pmf(prior, R).weights,
                               push_forward(prior.weights.tolist(), R.matrix.tolist()), atol=1e-15)
    np.testing.assert_allclose(R.matrix.sum(axis=1), 1, atol=1e-12)
