"""Exact coefficient arithmetic.

``GaussRational`` is an element of Q(i); ``Scalar`` is a rational function
of the real deformation parameter ``t`` with Q(i) coefficients, kept in
canonical form (monic denominator, coprime numerator and denominator).
``PiSquaredValue`` is ``coeff * pi^2`` for exact integrals over the sphere.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq

from . import _parse

ZERO_Q = mpq(0)
ONE_Q = mpq(1)


def to_mpq(x) -> mpq:
    if isinstance(x, type(ZERO_Q)):
        return x
    if isinstance(x, (int, Fraction)) or isinstance(x, Rational):
        return mpq(x.numerator, x.denominator) if not isinstance(x, int) else mpq(x)
    if isinstance(x, str):
        return mpq(Fraction(x))
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class GaussRational:
    """Exact Gaussian rational ``re + im*i``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = to_mpq(re)
        self.im = to_mpq(im)

    @classmethod
    def coerce(cls, x) -> "GaussRational":
        if isinstance(x, GaussRational):
            return x
        if isinstance(x, Scalar):
            c = x.constant_value()
            if c is None:
                raise TypeError("Scalar depends on t")
            return c
        if isinstance(x, complex):
            raise TypeError("float complex values are not exact")
        return cls(x)

    @property
    def pair(self) -> tuple[mpq, mpq]:
        return (self.re, self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self):
        return not self.is_zero()

    def __add__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRational(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussRational.coerce(other) - self

    def __mul__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self) -> "GaussRational":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return GaussRational.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = GaussRational(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self) -> "GaussRational":
        return GaussRational(self.re, -self.im)

    def __eq__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(Fraction(int(self.re.numerator), int(self.re.denominator)))
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussRational({self})"

    def __str__(self):
        return format_gauss(self.re, self.im)


def _fmt_q(q: mpq) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_gauss(re: mpq, im: mpq) -> str:
    if im == 0:
        return _fmt_q(re)
    if im == 1:
        ims = "i"
    elif im == -1:
        ims = "-i"
    else:
        ims = f"{_fmt_q(im)}*i"
    if re == 0:
        return ims
    if ims.startswith("-"):
        return f"{_fmt_q(re)}{ims}"
    return f"{_fmt_q(re)}+{ims}"


# --- dense univariate polynomials over Q(i): lists of GaussRational, low degree first


def _trim(p: list) -> list:
    while p and p[-1].is_zero():
        p.pop()
    return p


def _padd(p, q):
    n = max(len(p), len(q))
    zero = GaussRational(0)
    return _trim([(p[i] if i < len(p) else zero) + (q[i] if i < len(q) else zero) for i in range(n)])


def _pneg(p):
    return [-c for c in p]


def _pmul(p, q):
    if not p or not q:
        return []
    out = [GaussRational(0) for _ in range(len(p) + len(q) - 1)]
    for i, a in enumerate(p):
        if a.is_zero():
            continue
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return _trim(out)


def _pscale(p, c):
    return _trim([a * c for a in p])


def _pdivmod(p, q):
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    dq = len(q) - 1
    inv = q[-1].inverse()
    quo = [GaussRational(0) for _ in range(max(len(r) - dq, 0))]
    while len(r) - 1 >= dq and r:
        c = r[-1] * inv
        shift = len(r) - 1 - dq
        quo[shift] = c
        for i, b in enumerate(q):
            r[shift + i] = r[shift + i] - c * b
        r.pop()
        _trim(r)
    return _trim(quo), r


def _pmonic(p):
    return _pscale(p, p[-1].inverse()) if p else p


def _pgcd(p, q):
    a, b = list(p), list(q)
    while b:
        _, r = _pdivmod(a, b)
        a, b = b, r
    return _pmonic(a)


def _peval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


class Scalar:
    """Rational function of ``t`` over Q(i) in canonical form.

    >>> t = Scalar.t()
    >>> str((1 + t**2) * (1 - t**2))
    '-t^4+1'
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=None, den=None, _canonical=False):
        num = [GaussRational.coerce(c) for c in (num or [])]
        den = [GaussRational.coerce(c) for c in (den if den is not None else [1])]
        _trim(num)
        _trim(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not _canonical:
            if not num:
                den = [GaussRational(1)]
            else:
                g = _pgcd(num, den)
                if len(g) > 1:
                    num, _ = _pdivmod(num, g)
                    den, _ = _pdivmod(den, g)
                lc = den[-1]
                if not (lc.re == 1 and lc.im == 0):
                    inv = lc.inverse()
                    num = _pscale(num, inv)
                    den = _pscale(den, inv)
        self.num = tuple(num)
        self.den = tuple(den)
        self._hash = None

    # construction helpers
    @classmethod
    def t(cls) -> "Scalar":
        return cls([0, 1])

    @classmethod
    def const(cls, c) -> "Scalar":
        return cls([GaussRational.coerce(c)])

    @classmethod
    def coerce(cls, x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        return cls.const(x)

    @classmethod
    def from_poly(cls, coeffs) -> "Scalar":
        return cls(list(coeffs))

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        return _parse.parse(text, {"t": cls.t(), "i": cls.const(GaussRational(0, 1))}, cls.const)

    I = None  # set below

    # predicates
    def is_zero(self) -> bool:
        return not self.num

    def is_polynomial(self) -> bool:
        return len(self.den) == 1

    def constant_value(self):
        if len(self.den) == 1 and len(self.num) <= 1:
            return self.num[0] if self.num else GaussRational(0)
        return None

    def is_real(self) -> bool:
        return all(c.im == 0 for c in self.num) and all(c.im == 0 for c in self.den)

    # arithmetic
    def __add__(self, other):
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == o.den:
            return Scalar(_padd(list(self.num), list(o.num)), list(self.den))
        return Scalar(_padd(_pmul(self.num, o.den), _pmul(o.num, self.den)), _pmul(self.den, o.den))

    __radd__ = __add__

    def __neg__(self):
        return Scalar(_pneg(self.num), list(self.den), _canonical=True)

    def __sub__(self, other):
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return Scalar.coerce(other) - self

    def __mul__(self, other):
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return Scalar(_pmul(self.num, o.num), _pmul(self.den, o.den))

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise ZeroDivisionError("division by zero Scalar")
        return Scalar(list(self.den), list(self.num))

    def __truediv__(self, other):
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = Scalar.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self) -> "Scalar":
        return Scalar([c.conj() for c in self.num], [c.conj() for c in self.den], _canonical=True)

    def real_part(self) -> "Scalar":
        return (self + self.conj()) * Fraction(1, 2)

    def imag_part(self) -> "Scalar":
        return (self - self.conj()) * GaussRational(0, Fraction(-1, 2))

    def __eq__(self, other):
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    # evaluation
    def eval(self, t0, precision: int | None = None):
        """Value at ``t = t0``.

        Exact (a ``GaussRational``) when ``t0`` is rational; complex float or
        mpmath value otherwise. A pole raises ``ZeroDivisionError``.
        """
        if isinstance(t0, (int, Fraction)) or isinstance(t0, type(ZERO_Q)):
            x = GaussRational(t0)
            d = _peval(self.den, x)
            if GaussRational.coerce(d).is_zero():
                raise ZeroDivisionError(f"pole at t = {t0}")
            return GaussRational.coerce(_peval(self.num, x)) / d
        if precision is not None:
            import mpmath

            with mpmath.workdps(precision):
                x = mpmath.mpf(t0)
                cv = lambda c: mpmath.mpc(mpmath.mpf(int(c.re.numerator)) / int(c.re.denominator),
                                          mpmath.mpf(int(c.im.numerator)) / int(c.im.denominator))
                d = sum((cv(c) * x ** i for i, c in enumerate(self.den)), mpmath.mpc(0))
                if abs(d) == 0:
                    raise ZeroDivisionError(f"pole at t = {t0}")
                n = sum((cv(c) * x ** i for i, c in enumerate(self.num)), mpmath.mpc(0))
                return +(n / d)
        x = float(t0)
        d = sum(complex(c) * x ** i for i, c in enumerate(self.den))
        if abs(d) < 1e-300:
            raise ZeroDivisionError(f"pole at t = {t0}")
        return sum(complex(c) * x ** i for i, c in enumerate(self.num)) / d

    def __complex__(self):
        c = self.constant_value()
        if c is None:
            raise TypeError("Scalar depends on t")
        return complex(c)

    def __float__(self):
        c = self.constant_value()
        if c is None or c.im != 0:
            raise TypeError("Scalar is not a real constant")
        return float(c.re)

    def as_fraction(self) -> Fraction:
        c = self.constant_value()
        if c is None or c.im != 0:
            raise TypeError("Scalar is not a real rational constant")
        return Fraction(int(c.re.numerator), int(c.re.denominator))

    def sign(self) -> int:
        """Sign of a real rational constant."""
        f = self.as_fraction()
        return (f > 0) - (f < 0)

    def __lt__(self, other):
        return (self - Scalar.coerce(other)).sign() < 0

    def __le__(self, other):
        return (self - Scalar.coerce(other)).sign() <= 0

    def __gt__(self, other):
        return (self - Scalar.coerce(other)).sign() > 0

    def __ge__(self, other):
        return (self - Scalar.coerce(other)).sign() >= 0

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        n = _format_poly(self.num)
        if len(self.den) == 1:
            return n
        d = _format_poly(self.den)
        if len(self.num) > 1 or _needs_parens(self.num):
            n = f"({n})"
        return f"{n}/({d})"


def _needs_parens(p) -> bool:
    return len(p) == 1 and p[0].re != 0 and p[0].im != 0


def _format_poly(p) -> str:
    if not p:
        return "0"
    parts = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if c.is_zero():
            continue
        mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
        cs = str(c)
        compound = c.re != 0 and c.im != 0
        if mono:
            if cs == "1":
                term = mono
            elif cs == "-1":
                term = "-" + mono
            elif compound:
                term = f"({cs})*{mono}"
            else:
                term = f"{cs}*{mono}"
        else:
            term = f"({cs})" if compound and len(p) > 1 else cs
        parts.append(term)
    out = parts[0]
    for term in parts[1:]:
        out += term if term.startswith("-") else "+" + term
    return out


Scalar.I = Scalar.const(GaussRational(0, 1))


class PiSquaredValue:
    """Exact quantity ``coeff * pi^2``."""

    __slots__ = ("coeff",)

    def __init__(self, coeff):
        self.coeff = Scalar.coerce(coeff)

    def __add__(self, other):
        if not isinstance(other, PiSquaredValue):
            return NotImplemented
        return PiSquaredValue(self.coeff + other.coeff)

    def __sub__(self, other):
        if not isinstance(other, PiSquaredValue):
            return NotImplemented
        return PiSquaredValue(self.coeff - other.coeff)

    def __neg__(self):
        return PiSquaredValue(-self.coeff)

    def __mul__(self, other):
        return PiSquaredValue(self.coeff * Scalar.coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, PiSquaredValue):
            return self.coeff / other.coeff
        return PiSquaredValue(self.coeff / Scalar.coerce(other))

    def __eq__(self, other):
        if isinstance(other, PiSquaredValue):
            return self.coeff == other.coeff
        if other == 0:
            return self.coeff.is_zero()
        return NotImplemented

    def __hash__(self):
        return hash(("pi2", self.coeff))

    def is_zero(self) -> bool:
        return self.coeff.is_zero()

    def __float__(self):
        return float(self.coeff) * math.pi ** 2

    def eval(self, t0):
        return self.coeff.eval(t0)

    def __repr__(self):
        return f"PiSquaredValue({self})"

    def __str__(self):
        c = str(self.coeff)
        if any(ch in c for ch in "+-/") and not _is_plain_number(c):
            c = f"({c})"
        return f"{c} * pi^2"

    @classmethod
    def parse(cls, text: str) -> "PiSquaredValue":
        text = text.strip()
        if not text.endswith("pi^2"):
            raise _parse.ParseError("expected '<coeff> * pi^2'")
        body = text[: -len("pi^2")].rstrip()
        if not body.endswith("*"):
            raise _parse.ParseError("expected '<coeff> * pi^2'")
        return cls(Scalar.parse(body[:-1]))


def _is_plain_number(s: str) -> bool:
    try:
        Fraction(s)
        return True
    except ValueError:
        return False


def as_scalar(x) -> Scalar:
    """Coerce ints, Fractions, strings or Gaussian rationals to a ``Scalar``."""
    if isinstance(x, str):
        return Scalar.parse(x)
    return Scalar.coerce(x)
