import dataclasses
from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings

from crsphere.integrate import integral
from crsphere.operators import (
    NotPluriharmonic,
    WeightedScalar,
    cov_deriv,
    delta_b,
    is_q_flat,
    nabla1,
    p_prime,
    paneitz,
    paneitz_p3,
    q_curvature,
    q_prime,
    raise_index,
    w1,
    yamabe_op,
)
from crsphere.scalars import Scalar
from crsphere.spherealg import SphereFraction, SpherePoly, random_sphere_points
from conftest import LOW, family, sphere_polys

P = SpherePoly.parse
FAMILIES = {
    "round": lambda: family("round"),
    "rossi": lambda: family("rossi", "symbolic"),
    "lens": lambda: family("lens", "1/3", 3, 1),
    "conformal": lambda: family("round", 0, 3, 1, "corrected", "1 + z2 zb2/4"),
}
small = sphere_polys(max_terms=2, exps=LOW)
small_real = sphere_polys(max_terms=2, exps=LOW, real=True)
KERNEL = ["1", "(z1 + zb1)/2", "(z1 - zb1)/(2*i)", "(z2 + zb2)/2", "(z2 - zb2)/(2*i)"]


def frac(text):
    return SphereFraction(P(text))


@pytest.mark.parametrize("name", FAMILIES)
def test_levi_factor_parallel(name):
    s = FAMILIES[name]()
    h = WeightedScalar(s.h, 1, 1)
    assert cov_deriv(h, 1, s).value.is_zero()
    assert cov_deriv(h, "1bar", s).value.is_zero()


def test_constant_derivatives():
    s = family("rossi", "symbolic")
    d = cov_deriv(frac("3"), 1, s)
    assert d.value.is_zero() and d.weight == (1, 0)
    assert raise_index(frac("3"), s).value.is_zero()
    hw = WeightedScalar(s.h, 1, 1) * WeightedScalar(s.h_inv, -1, -1)
    assert hw.value == frac("1") and hw.weight == (0, 0)


@pytest.mark.parametrize("name", FAMILIES)
@settings(max_examples=8)
@given(f=small, g=small)
def test_weighted_leibniz(name, f, g):
    s = FAMILIES[name]()
    F = WeightedScalar(SphereFraction(f), 1, 0)
    G = WeightedScalar(SphereFraction(g), 0, 2)
    for d in (1, "1bar"):
        lhs = cov_deriv(F * G, d, s)
        rhs = cov_deriv(F, d, s) * G + F * cov_deriv(G, d, s)
        assert (lhs - rhs).is_zero()


def _flow_matrix(v):
    """Real 4x4 generator of the linear field p -> v(p) on C^2 = R^4."""
    M = np.zeros((4, 4))
    for j in range(4):
        e = np.zeros(4)
        e[j] = 1
        z = np.array([e[0] + 1j * e[1], e[2] + 1j * e[3]])
        w = v(z)
        M[:, j] = [w[0].real, w[0].imag, w[1].real, w[1].imag]
    return M


def _second_flow_derivative(f, M, p, eps=1e-3):
    x = np.array([p[0].real, p[0].imag, p[1].real, p[1].imag])
    vals = []
    for s in (-eps, 0.0, eps):
        y = scipy.linalg.expm(s * M) @ x
        vals.append(f(np.array([[y[0] + 1j * y[1], y[2] + 1j * y[3]]]))[0])
    return (vals[0] - 2 * vals[1] + vals[2]) / eps ** 2


@pytest.mark.parametrize("u", ["z1", "z1 zb2 + z2^2", "(z1 + zb1)^2"])
def test_sublaplacian_finite_difference_oracle(u):
    # round sphere: Z Zbar + Zbar Z = (X^2 + Y^2)/2 for the real Killing fields X, Y
    s = family("round")
    poly = P(u)
    X = _flow_matrix(lambda z: np.array([np.conj(z[1]), -np.conj(z[0])]))
    Y = _flow_matrix(lambda z: 1j * np.array([np.conj(z[1]), -np.conj(z[0])]))
    pts = random_sphere_points(20, 5)
    exact = delta_b(SphereFraction(poly), s).value.evaluate(pts)
    f = poly.evaluate
    oracle = np.array([(_second_flow_derivative(f, X, p) + _second_flow_derivative(f, Y, p)) / 2 for p in pts])
    assert np.max(np.abs(exact - oracle)) < 1e-5


@pytest.mark.parametrize("name", FAMILIES)
@settings(max_examples=6)
@given(u=small_real)
def test_reality(name, u):
    s = FAMILIES[name]()
    assert delta_b(u, s).value.imag_part().is_zero()
    assert paneitz(u, s).value.imag_part().is_zero()


@pytest.mark.parametrize("name", FAMILIES)
def test_curvature_reality(name):
    s = FAMILIES[name]()
    assert s.R.imag_part().is_zero()
    assert q_prime(s).value.imag_part().is_zero()
    assert delta_b(frac("7"), s).value.is_zero()


def test_yamabe_on_constants():
    assert yamabe_op(frac("1"), family("round")).value == frac("1/2")
    L1 = yamabe_op(frac("1"), family("rossi", "symbolic")).value
    assert L1.to_scalar() == Scalar.parse("(1+t^2)/(2*(1-t^2))")


@settings(max_examples=5)
@given(u=small_real, v=small_real)
def test_self_adjoint_rossi_symbolic(u, v):
    s = family("rossi", "symbolic")
    for op in (yamabe_op, paneitz):
        assert integral(u * op(v, s).value, s) == integral(v * op(u, s).value, s)


def test_pluriharmonic_examples():
    s = family("round")
    assert paneitz_p3(frac("(z1 + zb1)/2"), s).is_zero()
    assert paneitz_p3(frac("1"), s).is_zero()
    assert not paneitz_p3(frac("z1 zb1"), s).is_zero()


@pytest.mark.parametrize("u", KERNEL)
def test_paneitz_kernel_round(u):
    assert paneitz(frac(u), family("round")).value.is_zero()


def test_paneitz_rossi_pluriharmonic():
    # Re(z1^2 + t zb2^2) is the real part of a CR function of Z + t Zbar
    s = family("rossi", "symbolic")
    u = frac("(z1^2 + t zb2^2 + zb1^2 + t z2^2)/2")
    assert paneitz_p3(u, s).is_zero() and paneitz(u, s).value.is_zero()


def test_w1_and_q():
    s = family("round")
    assert w1(s).value.is_zero() and q_curvature(s).value.is_zero()
    r = family("rossi", "symbolic")
    expected = raise_index(WeightedScalar(r.A11, 2, 0), r).value * frac("-i")
    assert w1(r).value == expected and is_q_flat(r)


def test_q_prime_values():
    assert q_prime(family("round")).value == frac("4")
    qp = q_prime(family("rossi", "symbolic")).value.to_scalar()
    assert qp == Scalar.parse("4*(1-14*t^2+t^4)/(1-t^2)^2")
    flat = dataclasses.replace(family("round"), R=frac("0"), A11=frac("0"), meta={})
    assert q_prime(flat).value.is_zero()


def test_p_prime_examples():
    s = family("round")
    assert p_prime(frac("1"), s).value.is_zero()
    # hand expansion: Delta_b z1 = -z1, so 4 Delta_b^2 u - 8 Re(nabla^1 nabla_1 u) = 4u + 4u
    u = frac("(z1 + zb1)/2")
    val = p_prime(u, s).value
    assert val == frac("4 z1 + 4 zb1")
    pts = random_sphere_points(20, 2)
    assert np.allclose(val.evaluate(pts), 8 * pts[:, 0].real)
    with pytest.raises(NotPluriharmonic):
        p_prime(frac("z1 zb1"), s)


def test_p_prime_self_adjoint_round():
    s = family("round")
    basis = [frac(u) for u in KERNEL]
    for i, u in enumerate(basis):
        for v in basis[i:]:
            assert integral(u * p_prime(v, s).value, s) == integral(v * p_prime(u, s).value, s)
