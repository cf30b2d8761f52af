"""Polynomials and rational functions on the unit sphere S^3 in C^2.

Polynomials live in Q(i)[t][z1, z2, zb1, zb2] modulo the sphere relation
``z1*zb1 + z2*zb2 = 1``.  Every ``SpherePoly`` is kept in normal form: no
monomial contains both ``z1`` and ``zb1`` (the pair is rewritten to
``1 - z2*zb2``).  Since the rewrite is a one-element Groebner basis of the
sphere ideal, normal forms are unique and zero testing is syntactic.

Exponent vectors ``(a1, a2, b1, b2, k)`` for ``z1, z2, zb1, zb2, t`` are packed
into one integer with 11-bit fields so monomial multiplication is integer
addition and integer comparison is a lexicographic monomial order.
Coefficients are ``(re, im)`` pairs of ``gmpy2.mpq``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable

import numpy as np
from gmpy2 import mpq

from . import _parse
from .scalars import GaussRational, Scalar, to_mpq

VARIABLES = ("z1", "z2", "zb1", "zb2", "t")
_SHIFTS = (0, 11, 22, 33, 44)
_SHIFT = dict(zip(VARIABLES, _SHIFTS))
_F = (1 << 10) - 1
_GUARD = sum(1 << (s + 10) for s in _SHIFTS)
_PAIR1 = 1 | (1 << 22)            # z1*zb1
_PAIR2 = (1 << 11) | (1 << 33)    # z2*zb2
_ZMASK = (1 << 44) - 1
_ZERO = mpq(0)
_ONE = mpq(1)
_CONJ_VAR = {"z1": "zb1", "zb1": "z1", "z2": "zb2", "zb2": "z2", "t": "t"}

OFF_SPHERE_TOL = 1e-15
POLE_TOL = 1e-10


def pack(a1=0, a2=0, b1=0, b2=0, k=0) -> int:
    for e in (a1, a2, b1, b2, k):
        if not 0 <= e <= _F:
            raise OverflowError("exponent out of range")
    return a1 | a2 << 11 | b1 << 22 | b2 << 33 | k << 44


def unpack(key: int) -> tuple[int, int, int, int, int]:
    return tuple((key >> s) & _F for s in _SHIFTS)


def _divides(small: int, big: int) -> bool:
    return ((big | _GUARD) - small) & _GUARD == _GUARD


def _conj_key(key: int) -> int:
    a1 = key & _F
    a2 = (key >> 11) & _F
    b1 = (key >> 22) & _F
    b2 = (key >> 33) & _F
    return b1 | b2 << 11 | a1 << 22 | a2 << 33 | (key & ~_ZMASK)


def _cq(x) -> tuple:
    """Coerce an exact scalar to an (re, im) pair."""
    if isinstance(x, tuple):
        return x
    if isinstance(x, GaussRational):
        return (x.re, x.im)
    if isinstance(x, Scalar):
        c = x.constant_value()
        if c is None:
            raise TypeError("t-dependent Scalar; use SpherePoly.from_scalar")
        return (c.re, c.im)
    return (to_mpq(x), _ZERO)


def _reduce(acc: dict) -> dict:
    """Apply z1*zb1 -> 1 - z2*zb2 to fixpoint and drop zero coefficients."""
    out: dict = {}
    get = out.get
    for key, (re, im) in acc.items():
        a1 = key & _F
        b1 = (key >> 22) & _F
        m = a1 if a1 < b1 else b1
        if m == 0:
            c = get(key)
            out[key] = (re, im) if c is None else (c[0] + re, c[1] + im)
            continue
        base = key - m * _PAIR1
        for j in range(m + 1):
            b = math.comb(m, j) * (-1 if j & 1 else 1)
            k = base + j * _PAIR2
            c = get(k)
            out[k] = (b * re, b * im) if c is None else (c[0] + b * re, c[1] + b * im)
    return {k: v for k, v in out.items() if v[0] != 0 or v[1] != 0}


def _mul_terms(p: dict, q: dict) -> dict:
    if len(p) > len(q):
        p, q = q, p
    acc: dict = {}
    get = acc.get
    qitems = list(q.items())
    for ka, (ar, ai) in p.items():
        if ai == 0:
            for kb, (br, bi) in qitems:
                k = ka + kb
                c = get(k)
                if c is None:
                    acc[k] = (ar * br, ar * bi)
                else:
                    acc[k] = (c[0] + ar * br, c[1] + ar * bi)
        elif ar == 0:
            for kb, (br, bi) in qitems:
                k = ka + kb
                c = get(k)
                if c is None:
                    acc[k] = (-ai * bi, ai * br)
                else:
                    acc[k] = (c[0] - ai * bi, c[1] + ai * br)
        else:
            for kb, (br, bi) in qitems:
                k = ka + kb
                c = get(k)
                if c is None:
                    acc[k] = (ar * br - ai * bi, ar * bi + ai * br)
                else:
                    acc[k] = (c[0] + ar * br - ai * bi, c[1] + ar * bi + ai * br)
    return _reduce(acc)


def _add_terms(p: dict, q: dict, sign: int = 1) -> dict:
    out = dict(p)
    get = out.get
    for k, (br, bi) in q.items():
        if sign < 0:
            br, bi = -br, -bi
        c = get(k)
        if c is None:
            out[k] = (br, bi)
        else:
            r, i = c[0] + br, c[1] + bi
            if r == 0 and i == 0:
                del out[k]
            else:
                out[k] = (r, i)
    return out


def _scale_terms(p: dict, c: tuple) -> dict:
    cr, ci = c
    if cr == 0 and ci == 0:
        return {}
    if ci == 0:
        return {k: (r * cr, i * cr) for k, (r, i) in p.items()}
    return {k: (r * cr - i * ci, r * ci + i * cr) for k, (r, i) in p.items()}


def _cinv(c: tuple) -> tuple:
    r, i = c
    n = r * r + i * i
    if n == 0:
        raise ZeroDivisionError("division by zero coefficient")
    return (r / n, -i / n)


def _cmul(a: tuple, b: tuple) -> tuple:
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


class SpherePoly:
    """Polynomial on S^3 in normal form.

    >>> z1, zb1 = SpherePoly.var("z1"), SpherePoly.var("zb1")
    >>> str(z1 * z1 * zb1)
    'z1 - z1 z2 zb2'
    """

    __slots__ = ("_terms", "_hash", "_dcache", "_np")

    def __init__(self, terms: dict | None = None, *, _normal: bool = False):
        terms = terms or {}
        self._terms = terms if _normal else _reduce(terms)
        self._hash = None
        self._dcache = None
        self._np = None

    # ----------------------------------------------------------- construction
    @classmethod
    def const(cls, c) -> "SpherePoly":
        if isinstance(c, Scalar) and c.constant_value() is None:
            return cls.from_scalar(c)
        c = _cq(c)
        return cls({0: c} if (c[0] != 0 or c[1] != 0) else {}, _normal=True)

    @classmethod
    def var(cls, name: str) -> "SpherePoly":
        return cls({1 << _SHIFT[name]: (_ONE, _ZERO)}, _normal=True)

    @classmethod
    def monomial(cls, a1=0, a2=0, b1=0, b2=0, k=0, coeff=1) -> "SpherePoly":
        return cls({pack(a1, a2, b1, b2, k): _cq(coeff)})

    @classmethod
    def from_terms(cls, terms: dict) -> "SpherePoly":
        """Build from ``{(a1, a2, b1, b2[, k]): coefficient}``; normalizes."""
        out: dict = {}
        for exps, c in terms.items():
            if isinstance(c, Scalar) and c.constant_value() is None:
                p = cls.from_scalar(c) * cls.monomial(*exps)
                out = _add_terms(out, p._terms)
                continue
            key = pack(*exps)
            cc = _cq(c)
            old = out.get(key)
            out[key] = cc if old is None else (old[0] + cc[0], old[1] + cc[1])
        return cls(out)

    @classmethod
    def from_scalar(cls, s: Scalar) -> "SpherePoly":
        if not s.is_polynomial():
            raise ValueError("only polynomial Scalars embed as SpherePoly")
        inv = _cinv(_cq(s.den[0]))
        terms = {}
        for k, c in enumerate(s.num):
            if not c.is_zero():
                terms[k << 44] = _cmul((c.re, c.im), inv)
        return cls(terms, _normal=True)

    @classmethod
    def parse(cls, text: str) -> "SpherePoly":
        symbols = {name: cls.var(name) for name in VARIABLES}
        symbols["i"] = cls.const(GaussRational(0, 1))
        return _parse.parse(text, symbols, cls.const)

    # ------------------------------------------------------------- predicates
    @property
    def raw_terms(self) -> dict:
        return self._terms

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and 0 in self._terms)

    def is_z_constant(self) -> bool:
        """True when the polynomial only involves ``t``."""
        return all(k & _ZMASK == 0 for k in self._terms)

    def depends_on_t(self) -> bool:
        return any(k >> 44 for k in self._terms)

    def constant_value(self) -> GaussRational | None:
        if not self._terms:
            return GaussRational(0)
        if len(self._terms) == 1 and 0 in self._terms:
            return GaussRational(*self._terms[0])
        return None

    def is_real(self) -> bool:
        return self == self.conj()

    def degree(self) -> int:
        """Total degree in the sphere variables."""
        return max((sum(unpack(k)[:4]) for k in self._terms), default=0)

    def var_degree(self, name: str) -> int:
        s = _SHIFT[name]
        return max(((k >> s) & _F for k in self._terms), default=0)

    @property
    def terms(self) -> dict:
        """``{(a1, a2, b1, b2): Scalar}`` view with t-polynomial coefficients."""
        grouped: dict = {}
        for key, (r, i) in self._terms.items():
            a1, a2, b1, b2, k = unpack(key)
            grouped.setdefault((a1, a2, b1, b2), {})[k] = GaussRational(r, i)
        out = {}
        for exps, coeffs in grouped.items():
            n = max(coeffs) + 1
            out[exps] = Scalar([coeffs.get(j, GaussRational(0)) for j in range(n)])
        return out

    # ------------------------------------------------------------- arithmetic
    @staticmethod
    def _coerce(x) -> "SpherePoly":
        if isinstance(x, SpherePoly):
            return x
        return SpherePoly.const(x)

    def __add__(self, other):
        if isinstance(other, SphereFraction):
            return NotImplemented
        try:
            o = SpherePoly._coerce(other)
        except TypeError:
            return NotImplemented
        return SpherePoly(_add_terms(self._terms, o._terms), _normal=True)

    __radd__ = __add__

    def __neg__(self):
        return SpherePoly({k: (-r, -i) for k, (r, i) in self._terms.items()}, _normal=True)

    def __sub__(self, other):
        if isinstance(other, SphereFraction):
            return NotImplemented
        try:
            o = SpherePoly._coerce(other)
        except TypeError:
            return NotImplemented
        return SpherePoly(_add_terms(self._terms, o._terms, -1), _normal=True)

    def __rsub__(self, other):
        return SpherePoly._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, SphereFraction):
            return NotImplemented
        if isinstance(other, SpherePoly):
            if not self._terms or not other._terms:
                return SpherePoly({}, _normal=True)
            return SpherePoly(_mul_terms(self._terms, other._terms), _normal=True)
        if isinstance(other, Scalar) and other.constant_value() is None:
            if other.is_polynomial():
                return self * SpherePoly.from_scalar(other)
            return NotImplemented
        try:
            c = _cq(other)
        except TypeError:
            return NotImplemented
        return SpherePoly(_scale_terms(self._terms, c), _normal=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (SpherePoly, SphereFraction)):
            c = other.constant_value() if isinstance(other, SpherePoly) else None
            if c is None:
                return SphereFraction(self) / other
            other = c
        if isinstance(other, Scalar) and other.constant_value() is None:
            return SphereFraction(self) / SphereFraction.from_scalar(other)
        return SpherePoly(_scale_terms(self._terms, _cinv(_cq(other))), _normal=True)

    def __rtruediv__(self, other):
        return SphereFraction(SpherePoly._coerce(other)) / self

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a SpherePoly; use SphereFraction")
        out = SpherePoly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, SphereFraction):
            return other == self
        try:
            o = SpherePoly._coerce(other)
        except TypeError:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def conj(self) -> "SpherePoly":
        return SpherePoly({_conj_key(k): (r, -i) for k, (r, i) in self._terms.items()}, _normal=True)

    def real_part(self) -> "SpherePoly":
        return (self + self.conj()) * Fraction(1, 2)

    def imag_part(self) -> "SpherePoly":
        return (self - self.conj()) * (_ZERO, mpq(-1, 2))

    def wirtinger(self, var: str) -> "SpherePoly":
        """Formal partial derivative treating z1, z2, zb1, zb2, t as independent."""
        if self._dcache is None:
            self._dcache = {}
        hit = self._dcache.get(var)
        if hit is not None:
            return hit
        s = _SHIFT[var]
        one = 1 << s
        out = {}
        for k, (r, i) in self._terms.items():
            e = (k >> s) & _F
            if e:
                out[k - one] = (r * e, i * e)
        res = SpherePoly(out, _normal=True)
        self._dcache[var] = res
        return res

    def subs_t(self, value) -> "SpherePoly":
        """Substitute a rational (or Gaussian rational) value for t."""
        v = _cq(value)
        out: dict = {}
        powers = {0: (_ONE, _ZERO)}
        for key, c in self._terms.items():
            k = key >> 44
            if k not in powers:
                p = (_ONE, _ZERO)
                for _ in range(k):
                    p = _cmul(p, v)
                powers[k] = p
            cc = _cmul(c, powers[k])
            kk = key & _ZMASK
            old = out.get(kk)
            out[kk] = cc if old is None else (old[0] + cc[0], old[1] + cc[1])
        return SpherePoly({k: c for k, c in out.items() if c[0] != 0 or c[1] != 0}, _normal=True)

    # ------------------------------------------------------------- evaluation
    def _arrays(self):
        if self._np is None:
            keys = list(self._terms)
            exps = np.array([unpack(k) for k in keys], dtype=np.int64).reshape(-1, 5)
            coefs = np.array([complex(float(r), float(i)) for r, i in self._terms.values()],
                             dtype=np.complex128)
            self._np = (exps, coefs)
        return self._np

    def evaluate(self, points, t=None, precision: int | None = None):
        """Evaluate at points ``(z1, z2)``; zb-variables are bound to conjugates.

        Double precision is vectorized with numpy and returns an array.  With
        ``precision`` (decimal digits) the points must be mpmath numbers and a
        list of ``mpc`` is returned.
        """
        if precision is not None:
            return _evaluate_mp(self, points, t, precision)
        pts = np.asarray(points, dtype=np.complex128).reshape(-1, 2)
        exps, coefs = self._arrays()
        if len(coefs) == 0:
            return np.zeros(len(pts), dtype=np.complex128)
        if t is None and exps[:, 4].any():
            raise ValueError("polynomial depends on t; pass a value")
        tv = 0.0 if t is None else float(t)
        cols = [pts[:, 0], pts[:, 1], np.conj(pts[:, 0]), np.conj(pts[:, 1]),
                np.full(len(pts), tv, dtype=np.complex128)]
        acc = np.ones((len(pts), len(coefs)), dtype=np.complex128)
        for j, col in enumerate(cols):
            e = exps[:, j]
            m = int(e.max())
            if m == 0:
                continue
            table = np.ones((len(pts), m + 1), dtype=np.complex128)
            for d in range(1, m + 1):
                table[:, d] = table[:, d - 1] * col
            acc *= table[:, e]
        return acc @ coefs

    def eval_exact(self, point, t=None) -> GaussRational:
        """Exact value at a Gaussian-rational point on the sphere."""
        z1, z2 = (GaussRational.coerce(z) for z in point)
        if (z1 * z1.conj() + z2 * z2.conj()) != 1:
            raise ValueError("point is not on the unit sphere")
        vals = (z1, z2, z1.conj(), z2.conj(), GaussRational(0 if t is None else t))
        if t is None and self.depends_on_t():
            raise ValueError("polynomial depends on t; pass a value")
        acc = GaussRational(0)
        for key, c in self._terms.items():
            term = GaussRational(*c)
            for v, e in zip(vals, unpack(key)):
                if e:
                    term = term * v ** e
            acc = acc + term
        return acc

    def __call__(self, z1, z2, t=None):
        return eval_on_sphere(self, (z1, z2), t=t)

    # ------------------------------------------------------------------ text
    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for exps in sorted(self.terms, key=lambda e: (sum(e), e)):
            c = self.terms[exps]
            mono = " ".join(
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(VARIABLES[:4], exps) if e
            )
            cs = str(c)
            if not mono:
                parts.append(cs if _simple(cs) else f"({cs})")
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"{cs} * {mono}" if _simple(cs) else f"({cs}) * {mono}")
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return f"SpherePoly({self})"


def _simple(cs: str) -> bool:
    body = cs[1:] if cs.startswith("-") else cs
    return not any(ch in body for ch in "+-*()") or body == "i"


def _mp_coef(c, mpmath):
    r, i = c
    return mpmath.mpc(mpmath.mpf(int(r.numerator)) / int(r.denominator),
                      mpmath.mpf(int(i.numerator)) / int(i.denominator))


def _evaluate_mp(p: SpherePoly, points, t, precision):
    import mpmath

    out = []
    with mpmath.workdps(precision):
        coefs = [(unpack(k), _mp_coef(c, mpmath)) for k, c in p._terms.items()]
        tv = mpmath.mpf(0) if t is None else _mp_scalar(t, mpmath)
        for z1, z2 in points:
            z1, z2 = mpmath.mpc(z1), mpmath.mpc(z2)
            vals = (z1, z2, mpmath.conj(z1), mpmath.conj(z2), tv)
            cache = {}
            acc = mpmath.mpc(0)
            for exps, c in coefs:
                term = c
                for j, e in enumerate(exps):
                    if e:
                        key = (j, e)
                        pw = cache.get(key)
                        if pw is None:
                            pw = vals[j] ** e
                            cache[key] = pw
                        term = term * pw
                acc += term
            out.append(acc)
    return out


def _mp_scalar(x, mpmath):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


# ---------------------------------------------------------------- exact division

def _mono_div_ok(d: int, lo: tuple, hi: tuple) -> bool:
    for j, s in enumerate(_SHIFTS):
        e = (d >> s) & _F
        if e < lo[j] or e > hi[j]:
            return False
    return True


def _field_bounds(terms: dict):
    lo = [_F] * 5
    hi = [0] * 5
    for k in terms:
        for j, s in enumerate(_SHIFTS):
            e = (k >> s) & _F
            if e < lo[j]:
                lo[j] = e
            if e > hi[j]:
                hi[j] = e
    return lo, hi


def _poly_exact_div(n: dict, f: dict) -> dict | None:
    """Exact quotient ``n / f`` in the plain polynomial ring, or ``None``."""
    if not f:
        raise ZeroDivisionError("division by zero polynomial")
    if not n:
        return {}
    ltf = max(f)
    mnf = min(f)
    ltn = max(n)
    if not _divides(ltf, ltn) or not _divides(mnf, min(n)):
        return None
    nlo, nhi = _field_bounds(n)
    flo, fhi = _field_bounds(f)
    lo = tuple(nlo[j] - flo[j] for j in range(5))
    hi = tuple(nhi[j] - fhi[j] for j in range(5))
    if any(h < 0 for h in hi):
        return None
    inv = _cinv(f[ltf])
    fitems = list(f.items())
    r = dict(n)
    q = {}
    import heapq

    heap = [-k for k in r]
    heapq.heapify(heap)
    while r:
        while True:
            k = -heapq.heappop(heap)
            if k in r:
                break
        if not _divides(ltf, k):
            return None
        d = k - ltf
        if not _mono_div_ok(d, lo, hi):
            return None
        c = _cmul(r[k], inv)
        q[d] = c
        cr, ci = c
        for kf, (fr, fi) in fitems:
            kk = kf + d
            pr, pi = cr * fr - ci * fi, cr * fi + ci * fr
            old = r.get(kk)
            if old is None:
                r[kk] = (-pr, -pi)
                heapq.heappush(heap, -kk)
            else:
                nr, ni = old[0] - pr, old[1] - pi
                if nr == 0 and ni == 0:
                    del r[kk]
                else:
                    r[kk] = (nr, ni)
    return q


_ONE_MINUS_S = {0: (_ONE, _ZERO), _PAIR2: (-_ONE, _ZERO)}   # 1 - z2*zb2


def _to_laurent(terms: dict) -> tuple[dict, int]:
    """Image under z1 -> (1 - z2 zb2)/zb1, shifted by zb1^K to be polynomial."""
    K = max((k & _F for k in terms), default=0)
    out: dict = {}
    pw = {0: {0: (_ONE, _ZERO)}}
    for key, c in terms.items():
        a = key & _F
        if a not in pw:
            pw[a] = {(_PAIR2 * j): (mpq(math.comb(a, j) * (-1) ** j), _ZERO) for j in range(a + 1)}
        base = key - a + ((K - a) << 22)
        cr, ci = c
        for kk, (m, _) in pw[a].items():
            k2 = base + kk
            old = out.get(k2)
            v = (cr * m, ci * m)
            out[k2] = v if old is None else (old[0] + v[0], old[1] + v[1])
    return {k: v for k, v in out.items() if v[0] != 0 or v[1] != 0}, K


def _zb1_content(terms: dict) -> int:
    return min(((k >> 22) & _F for k in terms), default=0)


def exact_divide(n: SpherePoly, f: SpherePoly) -> SpherePoly | None:
    """Return ``q`` with ``q * f == n`` on the sphere, or ``None`` if none exists.

    Uses the injective ring map into Laurent polynomials in ``zb1`` obtained
    by substituting ``z1 = (1 - z2*zb2)/zb1``, where exact division is plain
    multivariate division.
    """
    if f.is_zero():
        raise ZeroDivisionError("division by zero SpherePoly")
    if n.is_zero():
        return n
    c = f.constant_value()
    if c is not None:
        return n * c.inverse()
    nl, kn = _to_laurent(n._terms)
    fl, kf = _to_laurent(f._terms)
    mn, mf = _zb1_content(nl), _zb1_content(fl)
    if mn:
        nl = {k - (mn << 22): v for k, v in nl.items()}
    if mf:
        fl = {k - (mf << 22): v for k, v in fl.items()}
    q = _poly_exact_div(nl, fl)
    if q is None:
        return None
    shift = (kf - mf) - (kn - mn)
    groups: dict = {}
    for key, v in q.items():
        e = ((key >> 22) & _F) + shift
        groups.setdefault(e, {})[key & ~(_F << 22)] = v
    out: dict = {}
    for e, g in groups.items():
        if e >= 0:
            for k, v in g.items():
                out[k + (e << 22)] = v
            continue
        a = -e
        for _ in range(a):
            g = _poly_exact_div(g, _ONE_MINUS_S)
            if g is None:
                return None
        for k, v in g.items():
            out[k + a] = v
    return SpherePoly(out, _normal=True)


# ------------------------------------------------------------------ fractions

class Factor:
    """Interned, leading-coefficient-normalized denominator factor."""

    __slots__ = ("poly", "id", "_conj", "__weakref__")
    _registry: dict = {}
    _count = 0

    def __init__(self, poly: SpherePoly):
        self.poly = poly
        Factor._count += 1
        self.id = Factor._count
        self._conj = None

    @classmethod
    def of(cls, poly: SpherePoly) -> tuple[tuple, "Factor"]:
        """Split ``poly`` as ``scale * factor`` with a normalized factor."""
        lead = poly._terms[max(poly._terms)]
        inv = _cinv(lead)
        normed = SpherePoly(_scale_terms(poly._terms, inv), _normal=True)
        key = frozenset(normed._terms.items())
        fac = cls._registry.get(key)
        if fac is None:
            fac = Factor(normed)
            cls._registry[key] = fac
        return lead, fac

    def conj(self) -> tuple[tuple, "Factor"]:
        if self._conj is None:
            self._conj = Factor.of(self.poly.conj())
        return self._conj

    def __repr__(self):
        return f"Factor#{self.id}({self.poly})"


_HINTS: list = []


def register_factor(poly) -> None:
    """Make ``poly`` (or a fraction's numerator) available for trial division."""
    if isinstance(poly, SphereFraction):
        poly = poly.num
    if poly.is_constant():
        return
    _, fac = Factor.of(poly)
    if fac not in _HINTS:
        _HINTS.append(fac)


def _merge(d1: tuple, d2: tuple, op) -> tuple:
    m = dict(d1)
    for f, e in d2:
        m[f] = op(m.get(f, 0), e)
    return tuple(sorted(((f, e) for f, e in m.items() if e), key=lambda fe: fe[0].id))


_EXPAND_CACHE: dict = {}


def _expand(den: tuple) -> SpherePoly:
    if not den:
        return SpherePoly.const(1)
    key = tuple((f.id, e) for f, e in den)
    hit = _EXPAND_CACHE.get(key)
    if hit is None:
        hit = SpherePoly.const(1)
        for f, e in den:
            hit = hit * f.poly ** e
        if len(_EXPAND_CACHE) > 4096:
            _EXPAND_CACHE.clear()
        _EXPAND_CACHE[key] = hit
    return hit


def _quotient_den(big: tuple, small: tuple) -> tuple:
    return _merge(big, small, lambda a, b: a - b)


def _factorize(poly: SpherePoly, candidates) -> tuple[tuple, tuple, SpherePoly | None]:
    """Trial-divide ``poly`` by candidate factors.

    Returns ``(scale, ((factor, exp), ...), unit)``; the new denominator is
    the factor tuple and ``scale`` an exact constant.
    """
    found: dict = {}
    rest = poly
    seen = set()
    for fac in candidates:
        if fac.id in seen:
            continue
        seen.add(fac.id)
        if rest.is_constant():
            break
        while True:
            q = exact_divide(rest, fac.poly)
            if q is None:
                break
            found[fac] = found.get(fac, 0) + 1
            rest = q
            if rest.is_constant():
                break
    scale = (_ONE, _ZERO)
    if rest.is_constant():
        scale = rest._terms[0]
    else:
        scale, fac = Factor.of(rest)
        found[fac] = found.get(fac, 0) + 1
    den = tuple(sorted(found.items(), key=lambda fe: fe[0].id))
    return scale, den


class SphereFraction:
    """Formal quotient ``num / den`` of sphere polynomials.

    The denominator is a product of interned factors with positive
    multiplicities.  Equality is decided by cross multiplication in normal
    form; no gcd is taken.
    """

    __slots__ = ("num", "den", "_dcache", "_key")

    def __init__(self, num, den: tuple = ()):
        if not isinstance(num, SpherePoly):
            num = SpherePoly.const(num)
        self.num = num
        self.den = den if not num.is_zero() else ()
        self._dcache = None
        self._key = None

    @classmethod
    def coerce(cls, x) -> "SphereFraction":
        if isinstance(x, SphereFraction):
            return x
        if isinstance(x, SpherePoly):
            return cls(x)
        if isinstance(x, Scalar):
            return cls.from_scalar(x)
        return cls(SpherePoly.const(x))

    @classmethod
    def from_scalar(cls, s: Scalar) -> "SphereFraction":
        num = SpherePoly.from_scalar(Scalar(list(s.num)))
        if s.is_polynomial():
            return cls(num)
        return cls(num) / SpherePoly.from_scalar(Scalar(list(s.den)))

    # -------------------------------------------------------------- helpers
    def denominator(self) -> SpherePoly:
        return _expand(self.den)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return not self.den

    def constant_value(self):
        if self.den:
            return None
        return self.num.constant_value()

    def structural_key(self):
        if self._key is None:
            self._key = (frozenset(self.num._terms.items()), tuple((f.id, e) for f, e in self.den))
        return self._key

    def _cancel(self) -> "SphereFraction":
        if not self.den or self.num.is_zero():
            return self
        num = self.num
        den = dict(self.den)
        changed = False
        for f in list(den):
            while den[f] and len(num) >= 1:
                q = exact_divide(num, f.poly)
                if q is None:
                    break
                num = q
                den[f] -= 1
                changed = True
        if not changed:
            return self
        return SphereFraction(num, tuple(sorted(((f, e) for f, e in den.items() if e),
                                                key=lambda fe: fe[0].id)))

    def simplify(self) -> "SphereFraction":
        """Cancel denominator factors that divide the numerator."""
        return self._cancel()

    # ----------------------------------------------------------- arithmetic
    def __add__(self, other):
        try:
            o = SphereFraction.coerce(other)
        except TypeError:
            return NotImplemented
        if o.num.is_zero():
            return self
        if self.num.is_zero():
            return o
        if self.den == o.den:
            return SphereFraction(self.num + o.num, self.den)
        lcm = _merge(self.den, o.den, max)
        n = self.num * _expand(_quotient_den(lcm, self.den)) + o.num * _expand(_quotient_den(lcm, o.den))
        return SphereFraction(n, lcm)

    __radd__ = __add__

    def __neg__(self):
        return SphereFraction(-self.num, self.den)

    def __sub__(self, other):
        try:
            o = SphereFraction.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return SphereFraction.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (SphereFraction, SpherePoly)):
            o = SphereFraction.coerce(other)
            if self.num.is_zero() or o.num.is_zero():
                return SphereFraction(SpherePoly())
            res = SphereFraction(self.num * o.num, _merge(self.den, o.den, lambda a, b: a + b))
            if (self.den and not o.num.is_constant()) or (o.den and not self.num.is_constant()):
                res = res._cancel()
            return res
        if isinstance(other, Scalar) and other.constant_value() is None:
            return self * SphereFraction.from_scalar(other)
        try:
            c = _cq(other)
        except TypeError:
            return NotImplemented
        return SphereFraction(SpherePoly(_scale_terms(self.num._terms, c), _normal=True), self.den)

    __rmul__ = __mul__

    def inverse(self) -> "SphereFraction":
        return SphereFraction(SpherePoly.const(1)) / self

    def __truediv__(self, other):
        if not isinstance(other, (SphereFraction, SpherePoly, Scalar)):
            try:
                c = _cq(other)
            except TypeError:
                return NotImplemented
            return self * _cinv(c)
        o = SphereFraction.coerce(other)
        if o.num.is_zero():
            raise ZeroDivisionError("division by zero SphereFraction")
        c = o.num.constant_value()
        if c is not None:
            res = SphereFraction(self.num * _cinv((c.re, c.im)), self.den)
            return res * SphereFraction(_expand(o.den)) if o.den else res
        candidates = [f for f, _ in self.den] + [f for f, _ in o.den] + _HINTS
        scale, newden = _factorize(o.num, candidates)
        num = self.num * _expand(o.den)
        num = SpherePoly(_scale_terms(num._terms, _cinv(scale)), _normal=True)
        return SphereFraction(num, _merge(self.den, newden, lambda a, b: a + b))._cancel()

    def __rtruediv__(self, other):
        return SphereFraction.coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return SphereFraction(self.num ** n, tuple((f, e * n) for f, e in self.den))

    def __eq__(self, other):
        try:
            o = SphereFraction.coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == o.den:
            return self.num == o.num
        return (self - o).is_zero()

    __hash__ = None

    def conj(self) -> "SphereFraction":
        num = self.num.conj()
        den = []
        scale = (_ONE, _ZERO)
        for f, e in self.den:
            s, cf = f.conj()
            den.append((cf, e))
            for _ in range(e):
                scale = _cmul(scale, s)
        num = SpherePoly(_scale_terms(num._terms, _cinv(scale)), _normal=True)
        den = tuple(sorted(den, key=lambda fe: fe[0].id))
        return SphereFraction(num, den)

    def real_part(self) -> "SphereFraction":
        return (self + self.conj()) * Fraction(1, 2)

    def imag_part(self) -> "SphereFraction":
        return (self - self.conj()) * (_ZERO, mpq(-1, 2))

    def wirtinger(self, var: str) -> "SphereFraction":
        if self._dcache is None:
            self._dcache = {}
        hit = self._dcache.get(var)
        if hit is not None:
            return hit
        res = SphereFraction(self.num.wirtinger(var), self.den)
        for f, e in self.den:
            df = f.poly.wirtinger(var)
            if df.is_zero():
                continue
            extra = SphereFraction(self.num * df * (-e), _merge(self.den, ((f, 1),), lambda a, b: a + b))
            res = res + extra
        self._dcache[var] = res
        return res

    # ----------------------------------------------------------- evaluation
    def evaluate(self, points, t=None, precision: int | None = None):
        n = self.num.evaluate(points, t=t, precision=precision)
        if not self.den:
            return n
        if precision is None:
            d = np.ones_like(n)
            for f, e in self.den:
                d = d * f.poly.evaluate(points, t=t) ** e
            if np.any(np.abs(d) < POLE_TOL):
                raise ZeroDivisionError("denominator vanishes at a sample point")
            return n / d
        import mpmath

        out = []
        dens = [(f.poly.evaluate(points, t=t, precision=precision), e) for f, e in self.den]
        with mpmath.workdps(precision):
            for j, nv in enumerate(n):
                d = mpmath.mpc(1)
                for vals, e in dens:
                    d *= vals[j] ** e
                if abs(d) < POLE_TOL:
                    raise ZeroDivisionError("denominator vanishes at a sample point")
                out.append(nv / d)
        return out

    def to_scalar(self) -> Scalar | None:
        """The value as a ``Scalar`` if it is constant on the sphere, else ``None``."""
        if self.num.is_zero():
            return Scalar.const(0)
        d = self.denominator()
        num_groups = _t_groups(self.num)
        den_groups = _t_groups(d)
        if set(num_groups) != set(den_groups):
            return None
        zk = next(iter(den_groups))
        ratio = Scalar(num_groups[zk]) / Scalar(den_groups[zk])
        for z, coeffs in num_groups.items():
            if Scalar(coeffs) != ratio * Scalar(den_groups[z]):
                return None
        return ratio

    def __str__(self):
        if not self.den:
            return str(self.num)
        ds = " * ".join(f"({f.poly})" + (f"^{e}" if e > 1 else "") for f, e in self.den)
        return f"({self.num}) / ({ds})"

    def __repr__(self):
        return f"SphereFraction({self})"


def _t_groups(p: SpherePoly) -> dict:
    out: dict = {}
    for key, (r, i) in p._terms.items():
        out.setdefault(key & _ZMASK, {})[key >> 44] = GaussRational(r, i)
    return {z: [c.get(j, GaussRational(0)) for j in range(max(c) + 1)] for z, c in out.items()}


# ---------------------------------------------------------------- sphere points

def random_sphere_points(n: int, seed: int | None = None) -> np.ndarray:
    """``n`` uniform points on S^3 as an ``(n, 2)`` complex array."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, 4))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x[:, 0::2] + 1j * x[:, 1::2]


def mp_sphere_points(points, precision: int):
    """Lift float points to mpmath and renormalize onto the sphere."""
    import mpmath

    out = []
    with mpmath.workdps(precision):
        for z1, z2 in np.asarray(points).reshape(-1, 2):
            a = mpmath.mpc(mpmath.mpf(z1.real), mpmath.mpf(z1.imag))
            b = mpmath.mpc(mpmath.mpf(z2.real), mpmath.mpf(z2.imag))
            r = mpmath.sqrt(abs(a) ** 2 + abs(b) ** 2)
            out.append((a / r, b / r))
    return out


def eval_on_sphere(p, point, t=None, precision: int | None = None):
    """Evaluate a polynomial, fraction or smooth expression at one sphere point."""
    z1, z2 = point
    if all(isinstance(z, (GaussRational, int, Fraction)) for z in (z1, z2)) and \
            isinstance(p, SpherePoly) and precision is None and (t is None or isinstance(t, (int, Fraction))):
        return p.eval_exact((z1, z2), t)
    if precision is None:
        r = abs(complex(z1)) ** 2 + abs(complex(z2)) ** 2
        if abs(r - 1) > 1e-15 * 4:
            raise ValueError(f"point is off the sphere (|z|^2 = {r!r})")
        return complex(p.evaluate([(complex(z1), complex(z2))], t=t)[0])
    import mpmath

    with mpmath.workdps(precision):
        r = abs(mpmath.mpc(z1)) ** 2 + abs(mpmath.mpc(z2)) ** 2
        if abs(r - 1) > mpmath.mpf(10) ** (-precision + 5):
            raise ValueError("point is off the sphere")
    return p.evaluate([(z1, z2)], t=t, precision=precision)[0]


z1 = SpherePoly.var("z1")
z2 = SpherePoly.var("z2")
zb1 = SpherePoly.var("zb1")
zb2 = SpherePoly.var("zb2")
t = SpherePoly.var("t")
I = SpherePoly.const(GaussRational(0, 1))
