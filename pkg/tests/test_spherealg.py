import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from crsphere.scalars import GaussRational, Scalar
from crsphere.spherealg import (
    SphereFraction,
    SpherePoly,
    exact_divide,
    random_sphere_points,
)
from conftest import sphere_polys

P = SpherePoly.parse


def test_single_rewrite():
    assert P("z1 zb1") == P("1 - z2 zb2")
    assert P("z1 zb1 + z2 zb2") == P("1")


def test_cubic_rewrite_matches_sampling():
    p = P("z1^2 zb1")
    assert p == P("z1 - z1 z2 zb2")
    pts = random_sphere_points(50, 3)
    raw = pts[:, 0] ** 2 * np.conj(pts[:, 0])
    assert np.max(np.abs(p.evaluate(pts) - raw)) < 1e-12


def test_wirtinger_examples():
    assert P("z1^2 z2").wirtinger("z1") == P("2 z1 z2")
    assert P("z1").wirtinger("zb1").is_zero()


def test_conjugation_examples():
    assert P("zb2").conj() == P("z2")
    assert P("i z1").conj() == P("-i zb1")
    # conjugate of the d/dz1 coefficient of Z + t Zbar is the d/dzb1 coefficient of its conjugate
    assert P("zb2").conj() == P("z2")


def test_evaluation_examples():
    pts = random_sphere_points(10, 1)
    assert np.allclose(P("z1 zb1 + z2 zb2").evaluate(pts), 1)
    assert P("z1").eval_exact((1, 0)) == GaussRational(1)
    with pytest.raises(ValueError):
        P("z1").eval_exact((1, 1))


# naive oracle: unreduced term maps, reduced by the rule in a random order

def _naive(p: SpherePoly) -> dict:
    return {e: complex(c) for e, c in p.terms.items() if not c.is_zero()} if not p.depends_on_t() else None


def _naive_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return out


def _naive_reduce(d: dict, rng: random.Random) -> dict:
    d = {e: c for e, c in d.items() if c != 0}
    while True:
        bad = [e for e in d if e[0] and e[2]]
        if not bad:
            return d
        e = rng.choice(bad)
        c = d.pop(e)
        a1, a2, b1, b2 = e
        for ne, nc in (((a1 - 1, a2, b1 - 1, b2), c), ((a1 - 1, a2 + 1, b1 - 1, b2 + 1), -c)):
            d[ne] = d.get(ne, 0) + nc
            if d[ne] == 0:
                del d[ne]


def _same(p: SpherePoly, d: dict) -> bool:
    q = _naive(p)
    keys = set(q) | set(d)
    return all(abs(q.get(k, 0) - d.get(k, 0)) < 1e-9 for k in keys)


@given(sphere_polys(), sphere_polys(), st.integers(0, 10 ** 6))
def test_product_equals_shuffled_naive_reduction(a, b, seed):
    d = _naive_reduce(_naive_mul(_naive(a), _naive(b)), random.Random(seed))
    assert _same(a * b, d)


@given(sphere_polys(), sphere_polys())
def test_normal_form_idempotent_and_homomorphic(a, b):
    ab = a * b
    assert SpherePoly.from_terms(dict(ab.terms)) == ab
    assert all(not (e[0] and e[2]) for e in ab.terms)
    assert (a + b) * (a - b) == a * a - b * b


@given(sphere_polys())
def test_conj_commutes_with_wirtinger(a):
    assert a.wirtinger("z1").conj() == a.conj().wirtinger("zb1")
    assert a.wirtinger("z2").conj() == a.conj().wirtinger("zb2")


@given(sphere_polys(), st.integers(0, 1000))
def test_normal_form_agrees_with_raw_sampling(a, seed):
    pts = random_sphere_points(100, seed)
    raw = np.zeros(len(pts), dtype=complex)
    for (a1, a2, b1, b2), c in a.terms.items():
        raw += complex(c) * pts[:, 0] ** a1 * pts[:, 1] ** a2 * np.conj(pts[:, 0]) ** b1 * np.conj(pts[:, 1]) ** b2
    sq = a * a
    raw_sq = raw * raw
    assert np.max(np.abs(sq.evaluate(pts) - raw_sq)) < 1e-12 * max(1, np.max(np.abs(raw_sq)))


@given(sphere_polys(max_terms=3), sphere_polys(max_terms=3))
def test_exact_divide_recovers_factor(a, b):
    if b.is_zero():
        return
    q = exact_divide(a * b, b)
    assert q is not None and q * b == a * b


def test_exact_divide_rejects():
    assert exact_divide(P("z1"), P("z2")) is None


@st.composite
def fractions_(draw):
    num = draw(sphere_polys(max_terms=3))
    den = P("1 + z2 zb2/2") ** draw(st.integers(0, 2))
    return SphereFraction(num) / SphereFraction(den)


@given(fractions_(), fractions_(), fractions_())
def test_fraction_equality_is_equivalence(a, b, c):
    k = SphereFraction(P("2 + z1 zb1"))
    a2 = (a * k) / k
    assert a == a and a2 == a and a == a2
    if a == b and b == c:
        assert a == c


@given(fractions_(), fractions_())
def test_fraction_arithmetic_samples(a, b):
    pts = random_sphere_points(20, 0)
    assert np.allclose((a * b + a).evaluate(pts), a.evaluate(pts) * b.evaluate(pts) + a.evaluate(pts))


def test_t_substitution():
    p = P("t z1 + t^2")
    assert p.subs_t(Fraction(1, 2)) == P("z1/2 + 1/4")
    assert p.depends_on_t() and not p.subs_t(0).depends_on_t()
    assert SphereFraction(P("1 - t^2")).to_scalar() == Scalar.parse("1 - t^2")
