"""Transcendental expressions over sphere rational functions.

A ``SmoothExpr`` is a hash-consed DAG whose leaves are exact
``SphereFraction`` values (constants and coordinates included) and whose
interior nodes are sums, products, integer powers, ``exp`` and ``log``.
Any node whose children are all exact leaves is folded into a single exact
leaf, so derivatives of ``log w`` stay rational and only genuinely
transcendental pieces (a bare ``log w``, say) survive to numeric evaluation.
"""
from __future__ import annotations

import numpy as np

from .scalars import Scalar
from .spherealg import POLE_TOL, SphereFraction, SpherePoly


class DomainError(ValueError):
    """Raised for log of a nonpositive value and similar domain violations."""


_TABLE: dict = {}
LOG_IMAG_TOL = 1e-9


class SmoothExpr:
    __slots__ = ("op", "args", "rat", "_d", "_c", "__weakref__")

    def __init__(self, op, args=(), rat=None):
        self.op = op
        self.args = args
        self.rat = rat
        self._d = {}
        self._c = None

    # ----------------------------------------------------------- construction
    @staticmethod
    def _intern(op, args=(), rat=None) -> "SmoothExpr":
        if op == "rat":
            key = ("rat", rat.structural_key())
        else:
            key = (op, tuple(id(a) for a in args) if op != "pow" else (id(args[0]), args[1]))
        hit = _TABLE.get(key)
        if hit is None:
            hit = SmoothExpr(op, args, rat)
            _TABLE[key] = hit
        return hit

    @classmethod
    def lift(cls, x) -> "SmoothExpr":
        if isinstance(x, SmoothExpr):
            return x
        return cls._intern("rat", rat=SphereFraction.coerce(x))

    @classmethod
    def var(cls, name: str) -> "SmoothExpr":
        return cls.lift(SpherePoly.var(name))

    def is_exact(self) -> bool:
        return self.op == "rat"

    def is_zero(self) -> bool:
        return self.op == "rat" and self.rat.is_zero()

    def exact_value(self) -> SphereFraction | None:
        return self.rat if self.op == "rat" else None

    @classmethod
    def add(cls, *items) -> "SmoothExpr":
        rat = None
        rest = []
        stack = [cls.lift(x) for x in items]
        while stack:
            e = stack.pop()
            if e.op == "add":
                stack.extend(e.args)
            elif e.op == "rat":
                rat = e.rat if rat is None else rat + e.rat
            else:
                rest.append(e)
        if rat is not None and not rat.is_zero():
            rest.append(cls._intern("rat", rat=rat))
        if not rest:
            return cls.lift(0)
        if len(rest) == 1:
            return rest[0]
        rest.sort(key=id)
        return cls._intern("add", tuple(rest))

    @classmethod
    def mul(cls, *items) -> "SmoothExpr":
        rat = None
        rest = []
        stack = [cls.lift(x) for x in items]
        while stack:
            e = stack.pop()
            if e.op == "mul":
                stack.extend(e.args)
            elif e.op == "rat":
                rat = e.rat if rat is None else rat * e.rat
            else:
                rest.append(e)
        if rat is not None:
            if rat.is_zero():
                return cls.lift(0)
            if rat.constant_value() != 1 or not rest:
                rest.append(cls._intern("rat", rat=rat))
        if not rest:
            return cls.lift(1)
        if len(rest) == 1:
            return rest[0]
        rest.sort(key=id)
        return cls._intern("mul", tuple(rest))

    @classmethod
    def power(cls, base, n: int) -> "SmoothExpr":
        base = cls.lift(base)
        if n == 0:
            return cls.lift(1)
        if n == 1:
            return base
        if base.op == "rat":
            return cls._intern("rat", rat=base.rat ** n)
        if base.op == "pow":
            return cls.power(base.args[0], base.args[1] * n)
        return cls._intern("pow", (base, n))

    @classmethod
    def exp(cls, x) -> "SmoothExpr":
        x = cls.lift(x)
        if x.is_zero():
            return cls.lift(1)
        if x.op == "log":
            return x.args[0]
        return cls._intern("exp", (x,))

    @classmethod
    def log(cls, x) -> "SmoothExpr":
        x = cls.lift(x)
        if x.op == "rat" and x.rat.constant_value() == 1:
            return cls.lift(0)
        if x.op == "rat" and x.rat.is_zero():
            raise DomainError("log of zero")
        if x.op == "exp":
            return x.args[0]
        return cls._intern("log", (x,))

    # ------------------------------------------------------------- operators
    def __add__(self, other):
        return SmoothExpr.add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return SmoothExpr.mul(self, -1)

    def __sub__(self, other):
        return SmoothExpr.add(self, SmoothExpr.mul(other, -1))

    def __rsub__(self, other):
        return SmoothExpr.add(other, SmoothExpr.mul(self, -1))

    def __mul__(self, other):
        return SmoothExpr.mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = SmoothExpr.lift(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero SmoothExpr")
        return SmoothExpr.mul(self, SmoothExpr.power(other, -1))

    def __rtruediv__(self, other):
        return SmoothExpr.lift(other) / self

    def __pow__(self, n: int):
        return SmoothExpr.power(self, n)

    def __eq__(self, other):
        if not isinstance(other, SmoothExpr):
            try:
                other = SmoothExpr.lift(other)
            except TypeError:
                return NotImplemented
        if self is other:
            return True
        if self.op == "rat" and other.op == "rat":
            return self.rat == other.rat
        return False

    def __hash__(self):
        return id(self)

    # -------------------------------------------------------------- calculus
    def wirtinger(self, var: str) -> "SmoothExpr":
        hit = self._d.get(var)
        if hit is not None:
            return hit
        op = self.op
        if op == "rat":
            res = SmoothExpr.lift(self.rat.wirtinger(var))
        elif op == "add":
            res = SmoothExpr.add(*(a.wirtinger(var) for a in self.args))
        elif op == "mul":
            parts = []
            for j, a in enumerate(self.args):
                da = a.wirtinger(var)
                if da.is_zero():
                    continue
                parts.append(SmoothExpr.mul(da, *(b for k, b in enumerate(self.args) if k != j)))
            res = SmoothExpr.add(*parts)
        elif op == "pow":
            b, n = self.args
            res = SmoothExpr.mul(n, SmoothExpr.power(b, n - 1), b.wirtinger(var))
        elif op == "exp":
            res = SmoothExpr.mul(self, self.args[0].wirtinger(var))
        elif op == "log":
            x = self.args[0]
            res = SmoothExpr.mul(x.wirtinger(var), SmoothExpr.power(x, -1))
        else:  # pragma: no cover
            raise AssertionError(op)
        self._d[var] = res
        return res

    def conj(self) -> "SmoothExpr":
        """Complex conjugate; ``log`` arguments are assumed positive."""
        if self._c is not None:
            return self._c
        op = self.op
        if op == "rat":
            res = SmoothExpr.lift(self.rat.conj())
        elif op == "add":
            res = SmoothExpr.add(*(a.conj() for a in self.args))
        elif op == "mul":
            res = SmoothExpr.mul(*(a.conj() for a in self.args))
        elif op == "pow":
            res = SmoothExpr.power(self.args[0].conj(), self.args[1])
        elif op == "exp":
            res = SmoothExpr.exp(self.args[0].conj())
        else:
            res = SmoothExpr.log(self.args[0].conj())
        self._c = res
        return res

    def real_part(self):
        return (self + self.conj()) * _HALF

    def imag_part(self):
        return (self - self.conj()) * _MINUS_HALF_I

    # ------------------------------------------------------------ evaluation
    def evaluate(self, points, t=None, precision: int | None = None, _memo=None):
        """Values at the given sphere points (see ``SpherePoly.evaluate``)."""
        memo = {} if _memo is None else _memo
        return _eval(self, points, t, precision, memo)

    def node_count(self) -> int:
        seen = set()
        stack = [self]
        while stack:
            e = stack.pop()
            if id(e) in seen:
                continue
            seen.add(id(e))
            if e.op in ("add", "mul", "exp", "log"):
                stack.extend(e.args)
            elif e.op == "pow":
                stack.append(e.args[0])
        return len(seen)

    def __str__(self):
        op = self.op
        if op == "rat":
            return f"[{self.rat}]"
        if op == "add":
            return "(" + " + ".join(str(a) for a in self.args) + ")"
        if op == "mul":
            return "*".join(str(a) for a in self.args)
        if op == "pow":
            return f"{self.args[0]}^{self.args[1]}"
        return f"{op}({self.args[0]})"

    __repr__ = __str__


_HALF = SphereFraction(SpherePoly.parse("1/2"))
_MINUS_HALF_I = SphereFraction(SpherePoly.parse("-i/2"))


def _eval(e: SmoothExpr, points, t, precision, memo):
    hit = memo.get(id(e))
    if hit is not None:
        return hit
    op = e.op
    if op == "rat":
        val = e.rat.evaluate(points, t=t, precision=precision)
        if precision is not None:
            val = list(val)
    else:
        vals = [_eval(a, points, t, precision, memo) for a in e.args if isinstance(a, SmoothExpr)]
        if precision is None:
            val = _eval_np(op, e, vals)
        else:
            val = _eval_mp(op, e, vals, precision)
    memo[id(e)] = val
    return val


def _eval_np(op, e, vals):
    if op == "add":
        return np.sum(vals, axis=0)
    if op == "mul":
        out = vals[0]
        for v in vals[1:]:
            out = out * v
        return out
    if op == "pow":
        v = vals[0]
        n = e.args[1]
        if n < 0 and np.any(np.abs(v) < POLE_TOL):
            raise ZeroDivisionError("negative power of a vanishing value")
        return v ** n
    if op == "exp":
        return np.exp(vals[0])
    v = vals[0]
    if np.any(v.real <= 0) or np.any(np.abs(v.imag) > LOG_IMAG_TOL * np.abs(v)):
        raise DomainError("log of a value that is not positive real")
    return np.log(v.real).astype(np.complex128)


def _eval_mp(op, e, vals, precision):
    import mpmath

    with mpmath.workdps(precision):
        if op == "add":
            return [mpmath.fsum(col) for col in zip(*vals)]
        if op == "mul":
            out = list(vals[0])
            for v in vals[1:]:
                out = [a * b for a, b in zip(out, v)]
            return out
        if op == "pow":
            n = e.args[1]
            return [x ** n for x in vals[0]]
        if op == "exp":
            return [mpmath.exp(x) for x in vals[0]]
        out = []
        for x in vals[0]:
            if mpmath.re(x) <= 0 or abs(mpmath.im(x)) > LOG_IMAG_TOL * abs(x):
                raise DomainError("log of a value that is not positive real")
            out.append(mpmath.mpc(mpmath.log(mpmath.re(x))))
        return out


def lift(x) -> SmoothExpr:
    return SmoothExpr.lift(x)


def exp(x) -> SmoothExpr:
    return SmoothExpr.exp(x)


def log(x) -> SmoothExpr:
    return SmoothExpr.log(x)


def is_scalarlike(x) -> bool:
    return isinstance(x, (int, Scalar, SpherePoly, SphereFraction, SmoothExpr))
