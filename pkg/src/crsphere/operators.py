"""Weighted covariant calculus and the CR operator tower.

A ``WeightedScalar`` is one frame component of a tensor: ``k`` counts lower
unbarred indices and ``m`` lower barred ones (raised indices count
negatively).  Covariant derivatives along ``Z1``/``Z1bar`` use the
connection form ``omega`` of the structure; raising multiplies by ``1/h``.

All functions accept values that are either exact ``SphereFraction`` or
``SmoothExpr``; the arithmetic is shared and results stay exact whenever the
inputs are.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .pseudoherm import PHStructure
from .spherealg import SphereFraction, SpherePoly

_I = SphereFraction(SpherePoly.parse("i"))


class NotPluriharmonic(ValueError):
    """Raised by ``p_prime`` when the argument is not CR pluriharmonic."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True, eq=False)
class WeightedScalar:
    value: object
    k: int = 0
    m: int = 0

    @property
    def weight(self) -> tuple[int, int]:
        return (self.k, self.m)

    def __add__(self, other):
        other = _ws(other, self.weight)
        if other.weight != self.weight:
            raise ValueError(f"weight mismatch {self.weight} + {other.weight}")
        return WeightedScalar(self.value + other.value, self.k, self.m)

    __radd__ = __add__

    def __sub__(self, other):
        other = _ws(other, self.weight)
        if other.weight != self.weight:
            raise ValueError(f"weight mismatch {self.weight} - {other.weight}")
        return WeightedScalar(self.value - other.value, self.k, self.m)

    def __rsub__(self, other):
        return _ws(other, self.weight) - self

    def __neg__(self):
        return WeightedScalar(-self.value, self.k, self.m)

    def __mul__(self, other):
        if isinstance(other, WeightedScalar):
            return WeightedScalar(self.value * other.value, self.k + other.k, self.m + other.m)
        return WeightedScalar(self.value * other, self.k, self.m)

    __rmul__ = __mul__

    def conj(self) -> "WeightedScalar":
        return WeightedScalar(self.value.conj(), self.m, self.k)

    def real_part(self) -> "WeightedScalar":
        if self.k != self.m:
            raise ValueError("real part of a weighted scalar needs equal weights")
        return WeightedScalar(self.value.real_part(), self.k, self.m)

    def imag_part(self) -> "WeightedScalar":
        if self.k != self.m:
            raise ValueError("imaginary part of a weighted scalar needs equal weights")
        return WeightedScalar(self.value.imag_part(), self.k, self.m)

    def is_zero(self) -> bool:
        return self.value.is_zero()


def _ws(x, weight=(0, 0)) -> WeightedScalar:
    if isinstance(x, WeightedScalar):
        return x
    if isinstance(x, (int, Fraction)) and x == 0:
        return WeightedScalar(SphereFraction.coerce(0), *weight)
    if not hasattr(x, "wirtinger"):
        x = SphereFraction.coerce(x)
    elif isinstance(x, SpherePoly):
        x = SphereFraction(x)
    return WeightedScalar(x, 0, 0)


def scalar(u) -> WeightedScalar:
    """Wrap a function as a weight (0, 0) scalar."""
    return _ws(u)


def cov_deriv(f, direction, s: PHStructure) -> WeightedScalar:
    """``nabla_1 f`` (direction ``1``) or ``nabla_1bar f`` (direction ``"1bar"``)."""
    f = _ws(f)
    v = f.value
    if direction in (1, "1"):
        out = s.Z1(v)
        cb, cc = s.b, s.c.conj()
        nk, nm = f.k + 1, f.m
    elif direction in ("1bar", -1, "bar"):
        out = s.Z1bar(v)
        cb, cc = s.c, s.b.conj()
        nk, nm = f.k, f.m + 1
    else:
        raise ValueError(f"unknown direction {direction!r}")
    if f.k and not cb.is_zero():
        out = out - v * (cb * f.k)
    if f.m and not cc.is_zero():
        out = out - v * (cc * f.m)
    return WeightedScalar(out, nk, nm)


def raise_index(f, s: PHStructure) -> WeightedScalar:
    """``nabla^1 f = h^{-1} nabla_1bar f``."""
    d = cov_deriv(f, "1bar", s)
    return WeightedScalar(d.value * s.h_inv, d.k - 1, d.m - 1)


def raise_bar(f, s: PHStructure) -> WeightedScalar:
    """``nabla^1bar f = h^{-1} nabla_1 f``."""
    d = cov_deriv(f, 1, s)
    return WeightedScalar(d.value * s.h_inv, d.k - 1, d.m - 1)


def nabla1(f, s):
    return cov_deriv(f, 1, s)


def delta_b(u, s: PHStructure) -> WeightedScalar:
    """Sublaplacian ``nabla^1 nabla_1 u + nabla_1 nabla^1 u``."""
    u = _ws(u)
    return raise_index(nabla1(u, s), s) + nabla1(raise_index(u, s), s)


def yamabe_op(u, s: PHStructure) -> WeightedScalar:
    """Conformal sublaplacian ``-Delta_b u + (R/4) u``."""
    u = _ws(u)
    return -delta_b(u, s) + u * (s.R * Fraction(1, 4))


def paneitz_p3(u, s: PHStructure) -> WeightedScalar:
    """``(nabla_1 nabla_1 + i A11) nabla^1 u``; zero exactly on pluriharmonic ``u``."""
    up = raise_index(_ws(u), s)
    return nabla1(nabla1(up, s), s) + up * WeightedScalar(s.A11 * _I, 2, 0)


def paneitz(u, s: PHStructure) -> WeightedScalar:
    """CR Paneitz operator ``4 nabla^1 (nabla_1 nabla_1 + i A11) nabla^1 u``."""
    return raise_index(paneitz_p3(u, s), s) * 4


def _cached(s: PHStructure, key, fn):
    if key not in s.meta:
        s.meta[key] = fn()
    return s.meta[key]


def w1(s: PHStructure) -> WeightedScalar:
    """``W1 = nabla_1 R - i nabla^1 A11``."""
    def make():
        return nabla1(_ws(s.R), s) - raise_index(WeightedScalar(s.A11, 2, 0), s) * _I
    return _cached(s, "W1", make)


def q_curvature(s: PHStructure) -> WeightedScalar:
    """``Q = -(4/3) nabla^1 W1``, computed literally (no real part taken)."""
    return _cached(s, "Q", lambda: raise_index(w1(s), s) * Fraction(-4, 3))


def w1_and_q(s: PHStructure) -> tuple[WeightedScalar, WeightedScalar]:
    return w1(s), q_curvature(s)


def is_q_flat(s: PHStructure) -> bool:
    return q_curvature(s).is_zero()


def torsion_norm2(s: PHStructure) -> SphereFraction:
    """``|A11|^2 = h^{-2} A11 conj(A11)``."""
    return _cached(s, "|A|^2", lambda: s.A11 * s.A11.conj() * s.h_inv * s.h_inv)


def q_prime(s: PHStructure) -> WeightedScalar:
    """``Q' = -2 Delta_b R - 4 |A11|^2 + R^2``."""
    def make():
        return WeightedScalar(delta_b(s.R, s).value * -2 - torsion_norm2(s) * 4 + s.R * s.R)
    return _cached(s, "Q'", make)


def p_prime_raw(u, s: PHStructure) -> WeightedScalar:
    """The P' differential expression applied to any ``u`` (no domain check)."""
    u = _ws(u)
    lap = delta_b(u, s)
    term1 = delta_b(lap, s) * 4
    up = raise_index(u, s)
    term2 = raise_index(WeightedScalar(s.A11, 2, 0) * up, s).imag_part() * -8
    term3 = raise_index(nabla1(u, s) * s.R, s).real_part() * -4
    term4 = (w1(s) * up).real_part() * Fraction(8, 3)
    term5 = u * raise_index(w1(s), s) * Fraction(-4, 3)
    return term1 + term2 + term3 + term4 + term5


def p_prime(u, s: PHStructure) -> WeightedScalar:
    """The P'-operator on CR pluriharmonic functions.

    Raises ``NotPluriharmonic`` carrying the ``paneitz_p3`` residual otherwise.
    """
    res = paneitz_p3(u, s)
    if not res.is_zero():
        raise NotPluriharmonic("argument is not CR pluriharmonic", res)
    return p_prime_raw(u, s)
