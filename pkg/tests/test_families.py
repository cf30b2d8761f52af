from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from crsphere.covariance import verify_yamabe_law
from crsphere.families import (
    FamilyError,
    FamilySpec,
    conformal_rescale,
    contact_residual,
    lens_frame,
    make_family,
    parse_t,
    rossi_even_check,
    verify_equivariance,
)
from crsphere.frames import ROUND_Z, THETA0
from crsphere.operators import q_prime
from crsphere.spherealg import SphereFraction, SpherePoly
from conftest import family


def frac(text):
    return SphereFraction(SpherePoly.parse(text))


def test_rossi_zero_is_round():
    s = family("rossi", Fraction(0))
    assert s.h == frac("1") and s.A11.is_zero() and s.R == frac("2")


def test_rossi_symbolic_levi():
    assert family("rossi", "symbolic").h == frac("1 - t^2")


def test_lens_undeformed_is_round():
    s = family("lens", Fraction(0), 3, 1)
    assert s.Z1 == -ROUND_Z and s.R == frac("2") and s.A11.is_zero()


def test_rossi_invariants_even():
    s = family("rossi", "symbolic")
    assert rossi_even_check(s.R.to_scalar())
    assert rossi_even_check(q_prime(s).value.to_scalar())


@pytest.mark.parametrize("pq", [(2, 1), (3, 1), (5, 2), (7, 3)])
def test_undeformed_equivariance_exact(pq):
    spec = FamilySpec("lens", Fraction(0), *pq)
    assert verify_equivariance(spec, mode="exact").passed


def test_corrected_equivariance():
    rep = verify_equivariance(FamilySpec("lens", Fraction(1, 2), 3, 1))
    assert rep.passed and rep.max_residual < 1e-10 and rep.contact_residual == 0
    assert verify_equivariance(FamilySpec("lens", "symbolic", 3, 1), mode="exact").passed


@settings(max_examples=15)
@given(p=st.integers(2, 9), data=st.data())
def test_corrected_equivariance_random(p, data):
    q = data.draw(st.integers(1, p - 1))
    t = data.draw(st.fractions(min_value=-Fraction(9, 10), max_value=Fraction(9, 10), max_denominator=10))
    assert verify_equivariance(FamilySpec("lens", t, p, q), samples=10, seed=p).max_residual < 1e-10


def test_literal_variant_is_measured_only():
    spec = FamilySpec("lens", Fraction(1, 2), 5, 2, variant="literal")
    rep = verify_equivariance(spec)
    assert rep.max_residual >= 0 and rep.contact_residual > 0
    assert not THETA0(lens_frame(5, 2, Fraction(1, 2), "literal")).is_zero()
    assert contact_residual(lens_frame(5, 2, Fraction(1, 2), "corrected")) == 0
    with pytest.raises(FamilyError):
        make_family(spec)


def test_bad_parameters():
    with pytest.raises(FamilyError):
        parse_t("0.5")
    with pytest.raises(FamilyError):
        make_family(FamilySpec("rossi", Fraction(1)))
    with pytest.raises(FamilyError):
        make_family(FamilySpec("lens", Fraction(1, 3), 2, 2))
    with pytest.raises(FamilyError):
        make_family(FamilySpec("custom"))


def test_custom_frame_matches_builtin():
    s = make_family(FamilySpec("custom", frame="zb2, -zb1, t z2, -t z1", t="symbolic"))
    assert s.R == family("rossi", "symbolic").R


def test_conformal_rescale():
    s = family("round")
    same = conformal_rescale(s, 1)
    assert same.h == s.h and same.R == s.R and same.A11 == s.A11
    assert conformal_rescale(s, 4).R == s.R / 4
    u = frac("1 + z2 zb2/4")
    c = conformal_rescale(s, u)
    assert c.h != s.h and c.R != s.R and not c.A11.is_zero()
    assert verify_yamabe_law(c, frac("1 + z1 zb1/4"), frac("(z2 + zb2)/2")).passed
    with pytest.raises(FamilyError):
        conformal_rescale(s, frac("z2 zb2 - 1/2"))
