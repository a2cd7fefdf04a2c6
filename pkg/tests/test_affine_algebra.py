import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from affine_algebroid import affine_algebra as aff

floats = st.floats(-2, 2, allow_nan=False, allow_infinity=False)


@st.composite
def affine_products(draw, min_dim=2, max_dim=6):
    n = draw(st.integers(min_dim, max_dim))
    M = draw(arrays(float, (n, n), elements=floats))
    B = M + M.T + draw(st.sampled_from([-1.0, 1.0])) * 3 * np.eye(n)
    assume(np.linalg.cond(B) < 1e4)
    z = draw(arrays(float, n, elements=floats))
    lam = draw(st.floats(0.1, 3)) * draw(st.sampled_from([-1.0, 1.0]))
    return aff.AffineInnerProduct(B, z, lam)


@settings(max_examples=60, deadline=None)
@given(affine_products())
def test_decompose_round_trip(P):
    Q = aff.decompose(P.as_sample())
    np.testing.assert_allclose(Q.B, P.B, atol=1e-9)
    np.testing.assert_allclose(Q.z, P.z, atol=1e-8)
    assert Q.lam == pytest.approx(P.lam, abs=1e-7)


@settings(max_examples=60, deadline=None)
@given(affine_products(), st.data())
def test_hat_compatibility(P, data):
    x = data.draw(arrays(float, P.dim, elements=floats))
    y = data.draw(arrays(float, P.dim, elements=floats))
    lhs = aff.hat_inner(P, aff.hat_embed(P, x), aff.hat_embed(P, y))
    assert lhs == pytest.approx(P(x, y), abs=1e-11)


@settings(max_examples=30, deadline=None)
@given(affine_products(), st.data())
def test_hat_embedding_is_affine(P, data):
    x = data.draw(arrays(float, P.dim, elements=floats))
    y = data.draw(arrays(float, P.dim, elements=floats))
    # x̂ - ŷ = bar(x - y): difference of embeddings is a pure bar vector
    d = aff.hat_embed(P, x).as_array() - aff.hat_embed(P, y).as_array()
    np.testing.assert_allclose(d, aff.bar_lift(x - y).as_array(), atol=1e-12)
    s = aff.hat_embed(P, x) + aff.bar_lift(y - x)
    np.testing.assert_allclose(s.as_array(), aff.hat_embed(P, y).as_array(), atol=1e-12)


def test_from_coefficients_known_case():
    P = aff.from_coefficients([[2, 0.5], [0.5, -1]], [1, 2], 3)
    np.testing.assert_allclose(P.z, [-8 / 9, 14 / 9])
    assert P.lam == pytest.approx(47 / 9)
    assert P([0, 0], [0, 0]) == pytest.approx(3)


def test_parts():
    P = aff.AffineInnerProduct(np.diag([1.0, -2.0]), np.array([1.0, 1.0]), 0.5)
    assert P.bilinear([1, 1], [1, 0]) == 1.0
    assert P.linear_affine([1, 0], [1, 1]) == 0.0
    assert P([1, 1], [1, 1]) == 0.5
    assert P.dim == 2


def test_degenerate_bilinear_part_rejected():
    with pytest.raises(aff.DegenerateFormError):
        aff.AffineInnerProduct(np.array([[1.0, 1.0], [1.0, 1.0]]), np.zeros(2), 1.0)
    S = aff.TwoAffineSample(lambda u, v: u[0] * v[0] + 1.0, 2)
    with pytest.raises(aff.DegenerateFormError):
        aff.decompose(S)


def test_hat_metric_requires_nonzero_lambda():
    P = aff.AffineInnerProduct(np.eye(2), np.zeros(2), 0.0)
    with pytest.raises(aff.DegenerateFormError):
        aff.hat_metric(P)
    G = aff.hat_metric(aff.AffineInnerProduct(np.eye(2), np.zeros(2), -2.0))
    np.testing.assert_array_equal(G, np.diag([1.0, 1.0, -2.0]))


def test_asymmetric_B_rejected():
    with pytest.raises(aff.ContractViolation):
        aff.AffineInnerProduct(np.array([[1.0, 0.2], [0.0, 1.0]]), np.zeros(2), 1.0)


def test_non_symmetric_form_rejected():
    S = aff.TwoAffineSample(lambda u, v: u @ v + u[0], 2)
    with pytest.raises(aff.ContractViolation):
        aff.decompose(S)


def test_non_affine_form_detected():
    S = aff.TwoAffineSample(lambda u, v: (u @ u) * (v @ v), 3)
    S.check_symmetric()
    with pytest.raises(aff.ContractViolation):
        S.check_two_affine()


def test_is_degenerate():
    assert aff.is_degenerate(np.zeros((3, 3)))
    assert aff.is_degenerate(np.diag([1.0, 1e-12]))
    assert not aff.is_degenerate(np.diag([1.0, -1.0]))


def test_dot_product_cases():
    S = aff.TwoAffineSample(lambda u, v: float(u @ v), 4)
    np.testing.assert_array_equal(aff.extract_bilinear_part(S), np.eye(4))
    P = aff.decompose(S)
    np.testing.assert_allclose(P.z, 0.0)
    assert P.lam == 0.0
    # the embedding is still defined at lambda = 0; only the hat metric is not
    assert aff.hat_embed(P, np.ones(4)).mu == 1.0
    with pytest.raises(aff.DegenerateFormError):
        aff.hat_metric(P)


def test_constant_form_is_degenerate():
    S = aff.TwoAffineSample(lambda u, v: 3.0, 3)
    B = aff.extract_bilinear_part(S)
    np.testing.assert_array_equal(B, np.zeros((3, 3)))
    assert aff.is_degenerate(B)


def test_pointwise_algebroid_form():
    # (X, Y) = 1 + <X - A, Y - A> at a point with Lorentzian <,>
    g = np.diag([-1.0, 1.0, 1.0, 1.0])
    A = np.array([0.3, -0.2, 0.5, 1.0])
    S = aff.TwoAffineSample(lambda u, v: 1.0 + (u - A) @ g @ (v - A), 4)
    P = aff.decompose(S)
    np.testing.assert_allclose(P.z, A, atol=1e-14)
    assert P.lam == pytest.approx(1.0)
    np.testing.assert_allclose(aff.hat_metric(P), np.diag([-1.0, 1, 1, 1, 1]), atol=1e-14)


def test_embedding_of_base_point():
    P = aff.AffineInnerProduct(np.diag([2.0, 3.0]), np.array([1.0, -1.0]), -0.4)
    e = aff.hat_embed(P, P.z)
    np.testing.assert_array_equal(e.bar, 0.0)
    assert e.mu == 1.0
    assert aff.hat_inner(P, e, e) == pytest.approx(-0.4)
    np.testing.assert_array_equal(aff.hat_metric(aff.AffineInnerProduct(np.eye(3), np.zeros(3), 1.0)),
                                  np.eye(4))


@settings(max_examples=20, deadline=None)
@given(affine_products(), st.data())
def test_bilinear_part_independent_of_base_point(P, data):
    b = data.draw(arrays(float, P.dim, elements=floats))
    # re-centre the probes at b: S_b(u, v) = S(u + b, v + b) has the same bilinear part
    S = aff.TwoAffineSample(lambda u, v: P(u + b, v + b), P.dim)
    np.testing.assert_allclose(aff.extract_bilinear_part(S), P.B, atol=1e-9)
