"""Tangent fields on S^3, brackets, moving frames and frame-component forms.

Forms are stored by their values on a frame, never as ambient forms, and
the exterior derivative is computed from Cartan's formula using the frame's
structure functions.  Conventions: ``(a ^ b)(X, Y) = a(X) b(Y) - a(Y) b(X)``
and ``da(X, Y) = X a(Y) - Y a(X) - a([X, Y])``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from .spherealg import SphereFraction, SpherePoly, random_sphere_points, z1, z2, zb1, zb2, I

AMBIENT = ("z1", "z2", "zb1", "zb2")
_ZERO = SphereFraction(SpherePoly())
_ONE = SphereFraction(SpherePoly.const(1))


class FrameDegenerate(ArithmeticError):
    """A linear solve against a frame hit a vanishing determinant."""

    def __init__(self, message, determinant=None):
        super().__init__(message)
        self.determinant = determinant


def _frac(x) -> SphereFraction:
    return SphereFraction.coerce(x)


class TangentField:
    """Complex vector field ``c1 d/dz1 + c2 d/dz2 + cb1 d/dzb1 + cb2 d/dzb2``."""

    __slots__ = ("coeffs", "_round", "_conj")

    def __init__(self, c1=0, c2=0, cb1=0, cb2=0):
        self.coeffs = tuple(_frac(c) for c in (c1, c2, cb1, cb2))
        self._round = None
        self._conj = None

    @classmethod
    def parse(cls, text: str) -> "TangentField":
        """Read ``"c1, c2, cb1, cb2"`` (comma separated sphere polynomials)."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError("a tangent field needs four comma-separated coefficients")
        return cls(*(SpherePoly.parse(p) for p in parts))

    def __call__(self, f):
        """Apply the field to a polynomial, fraction or smooth expression."""
        acc = None
        for c, var in zip(self.coeffs, AMBIENT):
            if c.is_zero():
                continue
            d = f.wirtinger(var)
            if d.is_zero():
                continue
            term = d * c
            acc = term if acc is None else acc + term
        if acc is None:
            return f * 0 if not isinstance(f, SpherePoly) else _ZERO
        return acc

    def tangency_defect(self) -> SphereFraction:
        """The field applied to ``|z1|^2 + |z2|^2 - 1`` before normalization."""
        c1, c2, cb1, cb2 = self.coeffs
        return c1 * zb1 + c2 * zb2 + cb1 * z1 + cb2 * z2

    def is_tangent(self) -> bool:
        return self.tangency_defect().is_zero()

    def round_components(self) -> tuple:
        """Coefficients against the round frame ``(Z, Zbar, T0)``."""
        if self._round is None:
            c1, c2, cb1, cb2 = self.coeffs
            self._round = (c1 * z2 - c2 * z1, cb1 * zb2 - cb2 * zb1, (cb1 * z1 + cb2 * z2) * I)
        return self._round

    def conj(self) -> "TangentField":
        if self._conj is None:
            c1, c2, cb1, cb2 = self.coeffs
            self._conj = TangentField(cb1.conj(), cb2.conj(), c1.conj(), c2.conj())
            self._conj._conj = self
        return self._conj

    def __add__(self, other):
        return TangentField(*(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        return TangentField(*(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return TangentField(*(-a for a in self.coeffs))

    def scale(self, f) -> "TangentField":
        f = _frac(f)
        return TangentField(*(a * f for a in self.coeffs))

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, TangentField):
            return NotImplemented
        return all(a == b for a, b in zip(self.coeffs, other.coeffs))

    __hash__ = None

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def evaluate(self, points, t=None):
        return [c.evaluate(points, t=t) for c in self.coeffs]

    def __repr__(self):
        return "TangentField(" + ", ".join(str(c) for c in self.coeffs) + ")"


def bracket(X: TangentField, Y: TangentField) -> TangentField:
    """Lie bracket ``[X, Y]^k = X(Y^k) - Y(X^k)``."""
    return TangentField(*(X(b) - Y(a) for a, b in zip(X.coeffs, Y.coeffs)))


ROUND_Z = TangentField(zb2, -zb1, 0, 0)
ROUND_ZBAR = TangentField(0, 0, z2, -z1)
ROUND_T0 = TangentField(z1 * I, z2 * I, -zb1 * I, -zb2 * I)


def _det3(m) -> SphereFraction:
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


class Frame:
    """Ordered frame ``(Z1, Z1bar, T)`` with cached structure functions."""

    def __init__(self, Z1: TangentField, T: TangentField, Z1bar: TangentField | None = None):
        self.Z1 = Z1
        self.Z1bar = Z1.conj() if Z1bar is None else Z1bar
        self.T = T
        self.fields = (self.Z1, self.Z1bar, self.T)
        cols = [f.round_components() for f in self.fields]
        self._matrix = [[cols[j][i] for j in range(3)] for i in range(3)]
        self.det = _det3(self._matrix)
        if self.det.is_zero():
            raise FrameDegenerate("frame is degenerate", self.det)
        self._structure = {}

    def expand(self, X: TangentField) -> tuple:
        """Coefficients ``(alpha, beta, gamma)`` with ``X = alpha Z1 + beta Z1bar + gamma T``."""
        rhs = X.round_components()
        out = []
        for j in range(3):
            m = [[rhs[i] if k == j else self._matrix[i][k] for k in range(3)] for i in range(3)]
            out.append(_det3(m) / self.det)
        return tuple(out)

    def structure(self, i: int, j: int) -> tuple:
        """Frame components of ``[e_i, e_j]``."""
        if i == j:
            return (_ZERO, _ZERO, _ZERO)
        if i > j:
            return tuple(-c for c in self.structure(j, i))
        key = (i, j)
        if key not in self._structure:
            self._structure[key] = self.expand(bracket(self.fields[i], self.fields[j]))
        return self._structure[key]

    def check_independent(self, samples: int = 8, seed: int = 0, t=None) -> bool:
        pts = random_sphere_points(samples, seed)
        import numpy as np

        return bool(np.all(np.abs(self.det.evaluate(pts, t=t)) > 1e-10))


def expand_in_frame(X: TangentField, F: Frame) -> tuple:
    return F.expand(X)


def _sort_index(idx: tuple) -> tuple[int, tuple]:
    """Sign of the sorting permutation (0 if an index repeats) and the sorted tuple."""
    if len(set(idx)) < len(idx):
        return 0, idx
    sign = 1
    lst = list(idx)
    for a in range(len(lst)):
        for b in range(len(lst) - 1 - a):
            if lst[b] > lst[b + 1]:
                lst[b], lst[b + 1] = lst[b + 1], lst[b]
                sign = -sign
    return sign, tuple(lst)


_BASIS = {
    0: [()],
    1: [(0,), (1,), (2,)],
    2: [(0, 1), (0, 2), (1, 2)],
    3: [(0, 1, 2)],
}


@dataclass(frozen=True, eq=False)
class FrameForm:
    """A form of degree 0 to 3 stored by its values on frame index tuples."""

    degree: int
    components: dict

    def __getitem__(self, idx) -> SphereFraction:
        if isinstance(idx, int):
            idx = (idx,)
        sign, key = _sort_index(tuple(idx))
        if sign == 0:
            return _ZERO
        v = self.components.get(key, _ZERO)
        return v if sign > 0 else -v

    @classmethod
    def from_values(cls, degree: int, values) -> "FrameForm":
        return cls(degree, {k: _frac(v) for k, v in zip(_BASIS[degree], values)})

    @classmethod
    def function(cls, f) -> "FrameForm":
        return cls(0, {(): _frac(f)})

    def __add__(self, other):
        assert self.degree == other.degree
        return FrameForm(self.degree, {k: self[k] + other[k] for k in _BASIS[self.degree]})

    def __sub__(self, other):
        assert self.degree == other.degree
        return FrameForm(self.degree, {k: self[k] - other[k] for k in _BASIS[self.degree]})

    def __neg__(self):
        return FrameForm(self.degree, {k: -v for k, v in self.components.items()})

    def scale(self, f) -> "FrameForm":
        f = _frac(f)
        return FrameForm(self.degree, {k: v * f for k, v in self.components.items()})

    def is_zero(self) -> bool:
        return all(self[k].is_zero() for k in _BASIS[self.degree])

    def conj(self) -> "FrameForm":
        """Conjugate form, with ``Z1`` and ``Z1bar`` trading places."""
        swap = {0: 1, 1: 0, 2: 2}
        out = {}
        for k in _BASIS[self.degree]:
            src = tuple(swap[i] for i in k)
            out[k] = self[src].conj()
        return FrameForm(self.degree, out)

    def on_fields(self, F: Frame, *fields) -> SphereFraction:
        """Value on arbitrary tangent fields, via their frame expansions."""
        coeffs = [F.expand(X) for X in fields]
        acc = _ZERO
        for idx in permutations(range(3), self.degree) if self.degree else [()]:
            c = _ONE
            for X, i in zip(coeffs, idx):
                c = c * X[i]
                if c.is_zero():
                    break
            if not c.is_zero():
                acc = acc + c * self[idx]
        return acc


def cartan_d(alpha: FrameForm, F: Frame) -> FrameForm:
    """Exterior derivative through Cartan's formula on the frame ``F``."""
    e = F.fields
    if alpha.degree == 0:
        f = alpha.components[()]
        return FrameForm(1, {(i,): e[i](f) for i in range(3)})
    if alpha.degree == 1:
        out = {}
        for i, j in _BASIS[2]:
            c = F.structure(i, j)
            v = e[i](alpha[j]) - e[j](alpha[i])
            for k in range(3):
                if not c[k].is_zero():
                    v = v - c[k] * alpha[k]
            out[(i, j)] = v
        return FrameForm(2, out)
    if alpha.degree == 2:
        i, j, k = 0, 1, 2
        v = e[i](alpha[j, k]) - e[j](alpha[i, k]) + e[k](alpha[i, j])
        for (a, b, other, sign) in ((i, j, k, -1), (i, k, j, 1), (j, k, i, -1)):
            c = F.structure(a, b)
            for m in range(3):
                if not c[m].is_zero():
                    term = c[m] * alpha[m, other]
                    v = v + term if sign > 0 else v - term
        return FrameForm(3, {(0, 1, 2): v})
    raise ValueError("cartan_d needs degree at most 2")


def wedge(alpha: FrameForm, beta: FrameForm) -> FrameForm:
    p, q = alpha.degree, beta.degree
    if p == 0:
        return beta.scale(alpha.components[()])
    if q == 0:
        return alpha.scale(beta.components[()])
    if p + q > 3:
        raise ValueError("degree exceeds 3")
    if p == 1 and q == 1:
        return FrameForm(2, {(i, j): alpha[i] * beta[j] - alpha[j] * beta[i] for i, j in _BASIS[2]})
    if p == 1 and q == 2:
        v = alpha[0] * beta[1, 2] - alpha[1] * beta[0, 2] + alpha[2] * beta[0, 1]
        return FrameForm(3, {(0, 1, 2): v})
    v = alpha[0, 1] * beta[2] - alpha[0, 2] * beta[1] + alpha[1, 2] * beta[0]
    return FrameForm(3, {(0, 1, 2): v})


class RoundOneForm:
    """A one-form given by components ``(p, q, r)`` against ``(eta, etabar, theta0)``.

    ``eta(X) = z2 c1 - z1 c2``, ``etabar(X) = zb2 cb1 - zb1 cb2`` and
    ``theta0(X) = i (z1 cb1 + z2 cb2)``; on tangent fields these are dual to
    the round frame.
    """

    def __init__(self, p=0, q=0, r=0):
        self.p, self.q, self.r = (_frac(x) for x in (p, q, r))

    def __call__(self, X: TangentField) -> SphereFraction:
        a, b, c = X.round_components()
        acc = _ZERO
        for coef, comp in ((self.p, a), (self.q, b), (self.r, c)):
            if not coef.is_zero() and not comp.is_zero():
                acc = acc + coef * comp
        return acc

    def on_frame(self, F: Frame) -> FrameForm:
        return FrameForm(1, {(i,): self(f) for i, f in enumerate(F.fields)})

    def scale(self, u) -> "RoundOneForm":
        u = _frac(u)
        return RoundOneForm(self.p * u, self.q * u, self.r * u)

    def is_real(self) -> bool:
        return self.q == self.p.conj() and self.r == self.r.conj()


THETA0 = RoundOneForm(0, 0, 1)
