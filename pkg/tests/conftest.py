from functools import lru_cache

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from crsphere.families import FamilySpec, make_family
from crsphere.spherealg import SpherePoly

settings.register_profile(
    "default", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


@lru_cache(maxsize=None)
def family(name="round", t=0, p=3, q=1, variant="corrected", factor=None):
    return make_family(FamilySpec(name=name, t=t, p=p, q=q, variant=variant, factor=factor))


@pytest.fixture(scope="session")
def round_s():
    return family("round")


@pytest.fixture(scope="session")
def rossi_sym():
    return family("rossi", "symbolic")


COEFFS = st.fractions(min_value=-3, max_value=3, max_denominator=4)
EXPONENTS = st.tuples(*[st.integers(0, 2)] * 4)


@st.composite
def sphere_polys(draw, max_terms=4, real=False, exps=EXPONENTS):
    """Small random polynomials in z1, z2, zb1, zb2 with rational coefficients."""
    n = draw(st.integers(1, max_terms))
    p = SpherePoly()
    for _ in range(n):
        a1, a2, b1, b2 = draw(exps)
        re, im = draw(COEFFS), (0 if real else draw(COEFFS))
        p = p + SpherePoly.monomial(a1, a2, b1, b2) * SpherePoly.parse(f"({re.numerator}/{re.denominator}) + ({im.numerator}/{im.denominator})*i")
    return p.real_part() if real else p


LOW = st.tuples(*[st.integers(0, 1)] * 4)
