import numpy as np
import pytest

from affine_algebroid import em_extension as em
from affine_algebroid.families import (coulomb, coulomb_spherical, minkowski, plane_wave,
                                       random_polynomial_metric, random_polynomial_potential,
                                       reissner_nordstrom, uniform_field)
from affine_algebroid.geometry import orthonormal_frame

POINTS = [np.array([0.1, -0.3, 0.4, 0.2]), np.array([-0.5, 0.5, -0.2, 0.6])]


@pytest.fixture(scope="module")
def sym_pf(sympy_em):
    return em.PotentialField(sympy_em["A"])


@pytest.mark.parametrize("p", POINTS)
def test_faraday_matches_sympy(sympy_metric, sympy_em, sym_pf, p):
    F = em.faraday(sympy_metric["gf"], sym_pf, p)
    np.testing.assert_allclose(F.F02, sympy_em["F02"](p), atol=1e-11)
    np.testing.assert_allclose(F.F11, sympy_em["F11"](p), atol=1e-11)
    assert em.trace_FF(F) == pytest.approx(float(sympy_em["trFF"](p)), abs=1e-11)


@pytest.mark.parametrize("p", POINTS)
def test_div_F_matches_sympy(sympy_metric, sympy_em, sym_pf, p):
    d = em.div_F(sympy_metric["gf"], sym_pf, p)
    np.testing.assert_allclose(d, sympy_em["divF"](p), atol=1e-8)


def test_two_faraday_routes_agree():
    gf, pf = random_polynomial_metric(5), random_polynomial_potential(6)
    p = np.array([0.2, -0.1, 0.3, 0.0])
    a = em.faraday(gf, pf, p, route="exterior")
    b = em.faraday(gf, pf, p, route="covariant")
    np.testing.assert_allclose(a.F02, b.F02, atol=1e-10)
    with pytest.raises(ValueError):
        em.faraday(gf, pf, p, route="other")


def test_faraday_antisymmetric_and_operator_skew():
    gf, pf = random_polynomial_metric(1), random_polynomial_potential(2)
    F = em.faraday(gf, pf, np.array([0.1, 0.2, 0.3, 0.4]))
    np.testing.assert_allclose(F.F02, -F.F02.T, atol=1e-15)
    g = gf(np.array([0.1, 0.2, 0.3, 0.4]))
    # <F(X), Y> = -<X, F(Y)>
    np.testing.assert_allclose(F.F11.T @ g, -(g @ F.F11), atol=1e-14)


def test_uniform_field_values():
    F = em.faraday(minkowski(), uniform_field(2.0), np.array([0.3, 0.1, -0.2, 0.5]))
    expected = np.zeros((4, 4))
    expected[1, 2], expected[2, 1] = 1.0, -1.0
    np.testing.assert_allclose(F.F02, expected, atol=1e-12)
    assert em.trace_FF(F) == pytest.approx(-2.0, abs=1e-12)


@pytest.mark.parametrize("pf,p", [
    (coulomb(0.7), np.array([0.0, 1.0, 0.5, -0.3])),
    (plane_wave(0.2, 1.5), np.array([0.3, 0.1, 0.2, 0.4])),
])
def test_vacuum_maxwell_in_flat_space(pf, p):
    np.testing.assert_allclose(em.div_F(minkowski(), pf, p), 0.0, atol=1e-8)


def test_rn_coulomb_divergence_free_and_trace():
    gf, pf = reissner_nordstrom(1.0, 0.5), coulomb_spherical(0.5)
    p = np.array([0.0, 4.0, 1.2, 0.3])
    pack, e = em.local_second_order(gf, pf, p)
    np.testing.assert_allclose(e.divF, 0.0, atol=1e-10)
    assert e.trFF == pytest.approx(2 * 0.25 / 4 ** 4, rel=1e-9)


def test_div_F_frame_sum_matches_contraction():
    gf, pf = random_polynomial_metric(8), random_polynomial_potential(9)
    p = np.array([0.0, 0.1, -0.2, 0.3])
    np.testing.assert_allclose(em.div_F(gf, pf, p, frame=orthonormal_frame(gf, p)),
                               em.div_F(gf, pf, p), atol=1e-12)


def test_closedness():
    gf, pf = random_polynomial_metric(4), random_polynomial_potential(4)
    assert em.closedness_residual(gf, pf, np.array([0.1, 0.0, -0.1, 0.2])) < 1e-8


def test_stress_energy_matches_index_form():
    gf, pf = random_polynomial_metric(2), random_polynomial_potential(3)
    p = np.array([0.1, 0.2, 0.0, -0.1])
    g = gf(p)
    ginv = np.linalg.inv(g)
    F = em.faraday(gf, pf, p)
    Fl = F.F02
    Fu = ginv @ Fl @ ginv
    index = (np.einsum("im,jn,mn->ij", Fl, Fl, ginv) - 0.25 * g * np.sum(Fl * Fu)) / (4 * np.pi)
    T = em.stress_energy_em(g, F)
    np.testing.assert_allclose(T, index, atol=1e-14)
    np.testing.assert_allclose(T, T.T, atol=1e-15)
    assert np.trace(ginv @ T) == pytest.approx(0.0, abs=1e-14)


def test_lowered_and_contravariant_potentials_agree():
    gf = random_polynomial_metric(12)
    pf = random_polynomial_potential(13)
    low = em.PotentialField(lambda x: pf.covector(gf, x), lowered=True)
    p = np.array([0.1, -0.2, 0.2, 0.1])
    np.testing.assert_allclose(em.faraday(gf, low, p).F02, em.faraday(gf, pf, p).F02, atol=1e-14)
    np.testing.assert_allclose(low.vector(gf, p), pf.A(p), atol=1e-14)


def test_zero_potential_gives_zero_everything():
    from affine_algebroid.families import zero_potential
    gf = random_polynomial_metric(1)
    p = np.array([0.1, 0.0, 0.2, -0.1])
    F = em.faraday(gf, zero_potential(), p)
    assert not F.F02.any() and not F.F11.any()
    assert em.trace_FF(F) == 0.0
    np.testing.assert_array_equal(em.stress_energy_em(gf(p), F), 0.0)
    np.testing.assert_allclose(em.div_F(gf, zero_potential(), p), 0.0, atol=1e-12)


def test_uniform_field_stress_energy_two_forms():
    F = em.faraday(minkowski(), uniform_field(1.0), np.zeros(4))
    g = np.diag([-1.0, 1, 1, 1])
    Fl = F.F02
    Fmix = Fl @ g  # F_j^m = g^{mn} F_jn, with g = g^{-1} here
    index = (np.einsum("im,jm->ij", Fl, Fmix) - 0.25 * g * np.sum(Fl * (g @ Fl @ g))) / (4 * np.pi)
    np.testing.assert_allclose(em.stress_energy_em(g, F), index, atol=1e-15)
    # energy density of a magnetic field is positive
    assert em.stress_energy_em(g, F)[0, 0] > 0
