"""Galerkin analysis of the Yamabe and Paneitz operators on polynomial spaces.

Matrices are assembled exactly (entries are multiples of ``pi^2``, stored by
their ``Scalar`` coefficients); eigenvalues come from a floating-point
generalized symmetric eigensolver, and any sign claim is re-certified by
evaluating the exact quadratic form on a rationalized eigenvector.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg

from .integrate import integral
from .operators import paneitz, yamabe_op
from .pseudoherm import PHStructure
from .scalars import PiSquaredValue, Scalar
from .spherealg import SphereFraction, SpherePoly

MAX_DEGREE = 6
OPERATORS = ("L", "P")


def real_basis(degree: int) -> list[tuple[str, SpherePoly]]:
    """Real and imaginary parts of normal-form monomials of total degree <= ``degree``.

    Monomials are ``z1^a1 z2^a2 zb1^b1 zb2^b2`` with ``a1 * b1 = 0``; a
    self-conjugate monomial contributes only its real part.
    """
    out = []
    seen = set()
    for total in range(degree + 1):
        for a1 in range(total + 1):
            for b1 in range(total + 1 - a1):
                if a1 and b1:
                    continue
                for a2 in range(total + 1 - a1 - b1):
                    b2 = total - a1 - b1 - a2
                    key = (a1, a2, b1, b2)
                    ckey = (b1, b2, a1, a2)
                    if ckey in seen:
                        continue
                    seen.add(key)
                    m = SpherePoly.monomial(a1, a2, b1, b2)
                    label = _label(key)
                    if ckey == key:
                        out.append((label, m))
                    else:
                        out.append((f"Re({label})", m.real_part()))
                        out.append((f"Im({label})", m.imag_part()))
    return out


def _label(exps) -> str:
    names = ("z1", "z2", "zb1", "zb2")
    parts = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, exps) if e]
    return " ".join(parts) or "1"


@dataclass
class GalerkinSystem:
    degree: int
    operator: str
    labels: list
    basis: list
    gram: list      # Scalar coefficients of pi^2
    opmat: list

    def gram_entry(self, i, j) -> PiSquaredValue:
        return PiSquaredValue(self.gram[i][j])

    def op_entry(self, i, j) -> PiSquaredValue:
        return PiSquaredValue(self.opmat[i][j])

    def is_symmetric(self) -> bool:
        n = len(self.basis)
        return all(self.opmat[i][j] == self.opmat[j][i] for i in range(n) for j in range(i))

    def numeric(self, t=None) -> tuple[np.ndarray, np.ndarray]:
        def conv(M):
            return np.array([[_real_value(x, t) for x in row] for row in M], dtype=float)
        return conv(self.gram), conv(self.opmat)

    def to_csv(self, which: str = "opmat", t=None) -> str:
        """CSV with exact entries (``coeff * pi^2`` strings) and float renderings."""
        M = self.opmat if which == "opmat" else self.gram
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["row", "col", "row_label", "col_label", "exact", "float"])
        for i, row in enumerate(M):
            for j, x in enumerate(row):
                fv = _real_value(x, t) * np.pi ** 2 if (t is not None or x.constant_value() is not None) else ""
                w.writerow([i, j, self.labels[i], self.labels[j], str(PiSquaredValue(x)), fv])
        return buf.getvalue()


def _real_value(x: Scalar, t=None) -> float:
    if x.constant_value() is not None:
        return complex(x).real
    if t is None:
        raise ValueError("matrix depends on t; pass a value")
    return complex(x.eval(Fraction(t))).real


def _apply(op: str, u, s):
    if op == "L":
        return yamabe_op(u, s).value
    if op == "P":
        return paneitz(u, s).value
    raise ValueError(f"unknown operator {op!r}")


def assemble(s: PHStructure, operator: str, degree: int) -> GalerkinSystem:
    """Exact Gram and operator matrices on ``real_basis(degree)``."""
    if degree > MAX_DEGREE:
        raise ValueError(f"degree capped at {MAX_DEGREE}")
    op = {"yamabe": "L", "paneitz": "P"}.get(operator, operator)
    items = real_basis(degree)
    labels = [l for l, _ in items]
    basis = [SphereFraction(p) for _, p in items]
    images = [_apply(op, b, s) for b in basis]
    n = len(basis)
    gram = [[None] * n for _ in range(n)]
    opm = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if j >= i:
                gram[i][j] = integral(basis[i] * basis[j], s).coeff
            else:
                gram[i][j] = gram[j][i]
            opm[i][j] = integral(basis[i] * images[j], s).coeff
    return GalerkinSystem(degree, op, labels, basis, gram, opm)


def min_rayleigh(g: GalerkinSystem, t=None) -> tuple[float, np.ndarray]:
    """Smallest generalized eigenvalue of ``(opmat, gram)`` and its eigenvector."""
    G, M = g.numeric(t)
    M = (M + M.T) / 2
    try:
        vals, vecs = scipy.linalg.eigh(M, G)
    except np.linalg.LinAlgError as exc:
        raise ValueError("Gram matrix is numerically singular") from exc
    return float(vals[0]), vecs[:, 0]


def eigenvalues(g: GalerkinSystem, t=None) -> np.ndarray:
    G, M = g.numeric(t)
    return scipy.linalg.eigh((M + M.T) / 2, G, eigvals_only=True)


def rationalize(vector, max_den: int = 10 ** 6) -> list[Fraction]:
    return [Fraction(float(x)).limit_denominator(max_den) for x in vector]


def certify_negative(g: GalerkinSystem, vector, t=None, max_den: int = 10 ** 6) -> PiSquaredValue:
    """Exact ``int u Op(u)`` for the rationalized coefficient vector ``u``."""
    v = [x if isinstance(x, Fraction) else None for x in vector]
    if any(x is None for x in v):
        v = rationalize(vector, max_den)
    acc = Scalar.const(0)
    for i, vi in enumerate(v):
        if vi == 0:
            continue
        for j, vj in enumerate(v):
            if vj == 0:
                continue
            acc = acc + g.opmat[i][j] * Scalar.const(vi * vj)
    if t is not None and acc.constant_value() is None:
        acc = Scalar.const(acc.eval(Fraction(t)))
    return PiSquaredValue(acc)
