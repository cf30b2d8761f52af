from fractions import Fraction
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crsphere.integrate import integral
from crsphere.operators import paneitz
from crsphere.scalars import PiSquaredValue, Scalar
from crsphere.spectral import (
    assemble,
    certify_negative,
    eigenvalues,
    min_rayleigh,
    rationalize,
    real_basis,
)
from crsphere.spherealg import SphereFraction
from conftest import family

HALF = Fraction(1, 2)


@lru_cache(maxsize=None)
def system(name, t, op, degree):
    return assemble(family(name, t), op, degree)


def test_basis_sizes():
    labels = [l for l, _ in real_basis(1)]
    assert len(labels) == 5 and labels[0] == "1"
    assert all(p.real_part() == p for _, p in real_basis(3))


def test_round_paneitz_degree1_vanishes():
    g = system("round", 0, "P", 1)
    assert all(x.is_zero() for row in g.opmat for x in row)
    assert min_rayleigh(g)[0] == pytest.approx(0, abs=1e-12)


def test_round_yamabe_degree0():
    g = system("round", 0, "L", 0)
    assert g.gram_entry(0, 0) == PiSquaredValue(4)
    assert g.op_entry(0, 0) == PiSquaredValue(2)
    assert min_rayleigh(g)[0] == pytest.approx(0.5)


@pytest.mark.parametrize("op", ["P", "L"])
def test_symbolic_symmetry(op):
    assert system("rossi", "symbolic", op, 2).is_symmetric()


@pytest.mark.parametrize("op", ["P", "L"])
def test_monotone_in_degree(op):
    lams = [min_rayleigh(system("rossi", HALF, op, d))[0] for d in range(1, 5)]
    assert all(b <= a + 1e-9 for a, b in zip(lams, lams[1:]))


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_gram_positive_definite(d):
    G, _ = system("rossi", HALF, "P", d).numeric()
    assert np.min(np.linalg.eigvalsh(G)) > 0


def test_certificate_zero_and_kernel():
    g = system("round", 0, "P", 2)
    assert certify_negative(g, [0] * len(g.basis)).is_zero()
    e = [Fraction(0)] * len(g.basis)
    e[1] = Fraction(1)
    assert certify_negative(g, e).is_zero()


@settings(max_examples=10)
@given(st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=5), min_size=14, max_size=14))
def test_certificate_is_quadratic_form(v):
    g = system("rossi", HALF, "P", 2)
    M = [[x.constant_value() for x in row] for row in g.opmat]
    quad = sum(Fraction(vi) * Fraction(vj) * Fraction(str(M[i][j].re)) for i, vi in enumerate(v)
               for j, vj in enumerate(v))
    assert certify_negative(g, v) == PiSquaredValue(quad)


def test_certificate_matches_reexpansion():
    s = family("rossi", HALF)
    g = system("rossi", HALF, "P", 2)
    lam, vec = min_rayleigh(g)
    v = rationalize(vec)
    u = SphereFraction.coerce(0)
    for c, b in zip(v, g.basis):
        u = u + b * SphereFraction.from_scalar(Scalar.const(c))
    assert integral(u * paneitz(u, s).value, s) == certify_negative(g, v)
    assert lam < 0 and certify_negative(g, v).coeff < Scalar.const(0)


def test_rossi_half_spectrum():
    vals = eigenvalues(system("rossi", HALF, "P", 2))
    assert vals[0] == pytest.approx(-16 / 3)
