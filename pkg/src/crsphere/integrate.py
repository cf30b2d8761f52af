"""Integration over S^3 against theta ^ dtheta, total Q', Yamabe trials.

Exact integrals use the moment formula for the round measure (total mass
``2 pi^2``): in normal form only the monomials ``(z2 zb2)^k`` survive and
integrate to ``2 pi^2 / (k + 1)``.

When the denominator depends only on ``sigma = z2 zb2`` the angular average
leaves ``2 pi^2`` times a one-variable integral of ``A(sigma) / D(sigma)`` over
``[0, 1]``.  Horowitz-Ostrogradsky reduction splits it into a rational part
and a logarithmic part; the value is exact when the logarithmic part
vanishes, which is the case for every divergence.  Anything else raises
``NotExactlyIntegrable`` and can go through ``numeric_integral``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .frames import ROUND_T0, FrameForm, _det3, cartan_d, wedge
from .operators import is_q_flat, q_prime
from .pseudoherm import PHStructure
from .scalars import GaussRational, PiSquaredValue, Scalar
from .spherealg import SphereFraction, SpherePoly, unpack

_I = SphereFraction(SpherePoly.parse("i"))


class NotExactlyIntegrable(ValueError):
    """The integrand's denominator varies over the sphere."""


def sphere_integral(p) -> PiSquaredValue:
    """Exact integral of a polynomial (or z-constant-denominator fraction) over S^3.

    >>> str(sphere_integral(SpherePoly.const(1)))
    '2 * pi^2'
    """
    if isinstance(p, SphereFraction):
        den = p.denominator()
        if den.is_z_constant():
            return PiSquaredValue(sphere_integral(p.num).coeff / _z_constant_scalar(den))
        D = _radial(den)
        if D is None:
            raise NotExactlyIntegrable("denominator is not a function of z2 zb2")
        return PiSquaredValue(_integral_01(_radial(p.num, average=True), D) * 2)
    if not isinstance(p, SpherePoly):
        p = SpherePoly.const(p)
    coeffs: dict = {}
    for key, (r, i) in p.raw_terms.items():
        a1, a2, b1, b2, k = unpack(key)
        if a1 or b1 or a2 != b2:
            continue
        c = GaussRational(r, i) / (a2 + 1)
        coeffs[k] = coeffs.get(k, GaussRational(0)) + c * 2
    if not coeffs:
        return PiSquaredValue(0)
    n = max(coeffs) + 1
    return PiSquaredValue(Scalar([coeffs.get(j, GaussRational(0)) for j in range(n)]))


# ---------------------------------------------- univariate polynomials in sigma
# lists of Scalar, low degree first

_ZERO = Scalar.const(0)


def _radial(p: SpherePoly, average: bool = False) -> list | None:
    """Coefficients in ``sigma = z2 zb2``; ``average`` drops angle-dependent terms."""
    groups: dict = {}
    for key, (r, i) in p.raw_terms.items():
        a1, a2, b1, b2, k = unpack(key)
        if a1 or b1 or a2 != b2:
            if average:
                continue
            return None
        groups.setdefault(a2, {})[k] = GaussRational(r, i)
    if not groups:
        return []
    out = [_ZERO] * (max(groups) + 1)
    for j, c in groups.items():
        out[j] = Scalar([c.get(k, GaussRational(0)) for k in range(max(c) + 1)])
    return _utrim(out)


def _utrim(p):
    while p and p[-1].is_zero():
        p.pop()
    return p


def _uadd(p, q):
    n = max(len(p), len(q))
    return _utrim([(p[i] if i < len(p) else _ZERO) + (q[i] if i < len(q) else _ZERO) for i in range(n)])


def _umul(p, q):
    if not p or not q:
        return []
    out = [_ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if not a.is_zero():
            for j, b in enumerate(q):
                out[i + j] = out[i + j] + a * b
    return _utrim(out)


def _uderiv(p):
    return _utrim([c * j for j, c in enumerate(p)][1:])


def _udivmod(p, q):
    r = list(p)
    dq = len(q) - 1
    inv = q[-1].inverse()
    quo = [_ZERO] * max(len(r) - dq, 0)
    while r and len(r) - 1 >= dq:
        c = r[-1] * inv
        shift = len(r) - 1 - dq
        quo[shift] = c
        for i, b in enumerate(q):
            r[shift + i] = r[shift + i] - c * b
        r.pop()
        _utrim(r)
    return _utrim(quo), r


def _ugcd(p, q):
    a, b = list(p), list(q)
    while b:
        a, b = b, _udivmod(a, b)[1]
    inv = a[-1].inverse()
    return [c * inv for c in a]


def _ueval(p, x):
    acc = _ZERO
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _solve(M, rhs):
    """Gaussian elimination over ``Scalar``; ``M`` is square and invertible."""
    n = len(M)
    A = [list(row) + [b] for row, b in zip(M, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not A[r][col].is_zero()), None)
        if piv is None:
            raise ArithmeticError("singular reduction system")
        A[col], A[piv] = A[piv], A[col]
        inv = A[col][col].inverse()
        A[col] = [x * inv for x in A[col]]
        for r in range(n):
            if r != col and not A[r][col].is_zero():
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [A[r][n] for r in range(n)]


def _integral_01(A: list, D: list) -> Scalar:
    """Exact ``int_0^1 A / D``, or ``NotExactlyIntegrable`` if a logarithmic part remains."""
    quo, A = _udivmod(A, D)
    val = _ZERO
    for j, c in enumerate(quo):
        val = val + c / (j + 1)
    if not A:
        return val
    D1 = _ugcd(D, _uderiv(D))
    D2 = _udivmod(D, D1)[0]
    H = _udivmod(_umul(D2, _uderiv(D1)), D1)[0]
    m1, m2 = len(D1) - 1, len(D2) - 1
    n = m1 + m2
    cols = []
    for j in range(m1):
        b = [_ZERO] * j + [Scalar.const(1)]
        cols.append(_uadd(_umul(_uderiv(b), D2), [-c for c in _umul(b, H)]))
    for j in range(m2):
        cols.append(_umul([_ZERO] * j + [Scalar.const(1)], D1))
    M = [[col[i] if i < len(col) else _ZERO for col in cols] for i in range(n)]
    sol = _solve(M, [A[i] if i < len(A) else _ZERO for i in range(n)])
    B, C = _utrim(sol[:m1]), _utrim(sol[m1:])
    if C:
        raise NotExactlyIntegrable("the integral has a logarithmic part")
    one = Scalar.const(1)
    d0, d1 = _ueval(D1, _ZERO), _ueval(D1, one)
    if d0.is_zero() or d1.is_zero():
        raise NotExactlyIntegrable("denominator vanishes at an endpoint")
    return val + _ueval(B, one) / d1 - _ueval(B, _ZERO) / d0


def _z_constant_scalar(p: SpherePoly) -> Scalar:
    out: dict = {}
    for key, (r, i) in p.raw_terms.items():
        out[key >> 44] = GaussRational(r, i)
    if not out:
        raise ZeroDivisionError("zero denominator")
    return Scalar([out.get(j, GaussRational(0)) for j in range(max(out) + 1)])


def volume_ratio(s: PHStructure) -> SphereFraction:
    """``rho`` with ``theta ^ dtheta = rho * theta0 ^ dtheta0``.

    Both 3-forms are evaluated on the triple ``(Z1, Z1bar, T0)``.
    """
    if "rho" in s.meta:
        return s.meta["rho"]
    F = s.frame
    th = FrameForm.from_values(1, (0, 0, 1))
    vol = wedge(th, cartan_d(th, F))
    num = vol.on_fields(F, s.Z1, s.Z1bar, ROUND_T0)
    # theta0 ^ dtheta0 takes the value i on the round frame (Z, Zbar, T0)
    cols = [f.round_components() for f in (s.Z1, s.Z1bar, ROUND_T0)]
    ref = _det3([[cols[j][i] for j in range(3)] for i in range(3)]) * _I
    if ref.is_zero():
        raise ArithmeticError("reference volume vanishes on the frame")
    rho = num / ref
    s.meta["rho"] = rho
    return rho


def integral(f, s: PHStructure) -> PiSquaredValue:
    """Exact ``int f theta ^ dtheta`` (raises ``NotExactlyIntegrable`` if impossible)."""
    f = SphereFraction.coerce(f.value if hasattr(f, "weight") else f)
    return sphere_integral(f * volume_ratio(s)) * 2


def numeric_sphere_integral(f, t=None, n_s: int = 48, n_angle: int = 48) -> complex:
    """Quadrature of ``f`` over S^3 against the round measure.

    Uses ``s = |z1|^2`` (uniform, Gauss-Legendre) and the two phase angles
    (trapezoid, exact for trigonometric polynomials of low degree), with
    ``d sigma = (1/2) ds dxi1 dxi2``.
    """
    x, wts = np.polynomial.legendre.leggauss(n_s)
    sv = (x + 1) / 2
    ws = wts / 2
    ang = 2 * np.pi * np.arange(n_angle) / n_angle
    wa = 2 * np.pi / n_angle
    S, X1, X2 = np.meshgrid(sv, ang, ang, indexing="ij")
    W = np.broadcast_to(ws[:, None, None], S.shape) * wa * wa * 0.5
    pts = np.stack([np.sqrt(S) * np.exp(1j * X1), np.sqrt(1 - S) * np.exp(1j * X2)], axis=-1).reshape(-1, 2)
    vals = f.evaluate(pts, t=t)
    return complex(np.sum(vals * W.reshape(-1)))


def numeric_integral(f, s: PHStructure, t=None, n_s: int = 48, n_angle: int = 48) -> complex:
    """Quadrature value of ``int f theta ^ dtheta`` (a complex float)."""
    f = f.value if hasattr(f, "weight") else f
    g = f * volume_ratio(s)
    if not hasattr(g, "evaluate"):
        g = SphereFraction.coerce(g)
    return 2 * numeric_sphere_integral(g, t=t, n_s=n_s, n_angle=n_angle)


def volume(s: PHStructure) -> PiSquaredValue:
    return integral(SphereFraction.coerce(1), s)


# ------------------------------------------------------------------ totals

def cover_degree_bound(total: PiSquaredValue):
    """``floor(16 pi^2 / total)`` for a positive total, else ``"unbounded"``."""
    c = total.coeff.as_fraction()
    if c <= 0:
        return "unbounded"
    return math.floor(Fraction(16) / c)


def gap_flag(total: PiSquaredValue) -> bool:
    """True when the total exceeds ``8 pi^2``, forcing the bound to 1."""
    return total.coeff.as_fraction() > 8


@dataclass
class TotalInvariantReport:
    total_q_prime: PiSquaredValue
    is_q_flat: bool
    torsion_free: bool
    R_constant: bool
    cover_degree_bound: object
    yamabe_trial_upper: object
    label: str
    gap: bool | None = None

    def as_dict(self) -> dict:
        return {
            "total_q_prime": str(self.total_q_prime),
            "label": self.label,
            "is_q_flat": self.is_q_flat,
            "torsion_free": self.torsion_free,
            "R_constant": self.R_constant,
            "cover_degree_bound": self.cover_degree_bound,
            "gap_over_8pi2": self.gap,
            "yamabe_trial_upper": str(self.yamabe_trial_upper),
        }


def total_q_prime(s: PHStructure) -> TotalInvariantReport:
    """Integrate ``Q'`` exactly and attach the flags consumed by the cover bound."""
    total = integral(q_prime(s), s)
    flat = is_q_flat(s)
    label = "total Q'" if flat else "upper bound for total Q'"
    bound = None
    gap = None
    rational = total.coeff.constant_value() is not None and total.coeff.is_real()
    if flat and rational:
        bound = cover_degree_bound(total)
        gap = gap_flag(total)
    elif flat:
        bound = "symbolic"
    try:
        trial = yamabe_trial(s, SpherePoly.const(1))
    except (NotExactlyIntegrable, ValueError):
        trial = None
    return TotalInvariantReport(
        total_q_prime=total,
        is_q_flat=flat,
        torsion_free=s.A11.is_zero(),
        R_constant=s.R.to_scalar() is not None,
        cover_degree_bound=bound,
        yamabe_trial_upper=trial,
        label=label,
        gap=gap,
    )


@dataclass(frozen=True)
class PiMultiple:
    """``coeff * pi``; ``coeff`` is exact when the quotient admits it."""

    coeff: object
    exact: bool

    def __float__(self):
        return float(self.coeff) * math.pi

    def __str__(self):
        c = str(self.coeff)
        if self.exact and c == "1":
            return "pi"
        if self.exact and any(ch in c for ch in "+-/") and not c.lstrip("-").isdigit():
            c = f"({c})"
        return f"{c} * pi"


def _sqrt_fraction(f: Fraction) -> Fraction | None:
    if f < 0:
        return None
    n, d = math.isqrt(f.numerator), math.isqrt(f.denominator)
    if n * n == f.numerator and d * d == f.denominator:
        return Fraction(n, d)
    return None


def yamabe_trial(s: PHStructure, u) -> PiMultiple:
    """``int u L u / (int u^4)^(1/2)``, an upper bound for the CR Yamabe constant."""
    from .operators import yamabe_op

    u = SphereFraction.coerce(u)
    if u.is_zero():
        raise ValueError("trial function is identically zero")
    num = integral(u * yamabe_op(u, s).value, s)
    den = integral(u * u * u * u, s)
    # num = c1 pi^2, den = c2 pi^2, so the quotient is (c1 / sqrt(c2)) pi
    try:
        c2 = den.coeff.as_fraction()
    except TypeError:
        raise ValueError("Yamabe trial needs a t-independent normalization integral")
    root = _sqrt_fraction(c2)
    if root is not None:
        return PiMultiple(num.coeff / Scalar.const(root), True)
    return PiMultiple(float(num.coeff) / math.sqrt(float(c2)), False)
