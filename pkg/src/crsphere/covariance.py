"""Executable checks of the CR transformation laws.

Conformal factors are passed as a positive rational function ``w``; the new
contact form is ``w theta`` (or ``v^2 theta`` for the Yamabe law) and its
structure is re-solved from scratch.  The Yamabe and Paneitz laws are
checked exactly.  The Q, P' and Q' laws involve ``Upsilon = log w`` and are
sampled at random sphere points in double precision and then again at
extended precision; a genuine identity shrinks by many orders of magnitude,
a bug does not.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .families import conformal_rescale
from .operators import (
    NotPluriharmonic,
    WeightedScalar,
    paneitz,
    paneitz_p3,
    p_prime_raw,
    q_curvature,
    q_prime,
    raise_index,
    w1,
    yamabe_op,
)
from .pseudoherm import PHStructure
from .smooth import SmoothExpr, lift, log
from .spherealg import SphereFraction, mp_sphere_points, random_sphere_points

LAWS = ("yamabe", "paneitz", "q", "pprime", "qprime")
DEFAULT_TOL = {"q": 1e-8, "pprime": 1e-8, "qprime": 1e-6}
EXTENDED_DIGITS = 50
REDUCTION = 1e6


@dataclass
class LawReport:
    law: str
    mode: str
    max_residual: float
    samples: int
    seed: int
    passed: bool
    tol: float = 0.0
    max_residual_extended: float | None = None
    precision: int | None = None
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {
            "law": self.law,
            "mode": self.mode,
            "max_residual": self.max_residual,
            "samples": self.samples,
            "seed": self.seed,
            "passed": self.passed,
            "tol": self.tol,
        }
        if self.max_residual_extended is not None:
            out["max_residual_extended"] = self.max_residual_extended
            out["precision"] = self.precision
        out.update(self.extra)
        return out


def _numeric_t(s: PHStructure, t):
    if s.t_symbolic and t is None:
        raise ValueError("sampled laws need a numeric t for a symbolic structure")
    return t


def _check_positive(f, s: PHStructure, t=None):
    pts = random_sphere_points(64, 777)
    vals = SphereFraction.coerce(f).evaluate(pts, t=0 if (s.t_symbolic and t is None) else t)
    if np.any(vals.real <= 0) or np.any(np.abs(vals.imag) > 1e-12 * np.abs(vals)):
        raise ValueError("conformal factor must be positive on the sphere")


def _exact_report(law, residual: SphereFraction, s: PHStructure, seed: int, samples: int = 20,
                  t=None) -> LawReport:
    if residual.is_zero():
        return LawReport(law, "exact", 0.0, 0, seed, True)
    pts = random_sphere_points(samples, seed)
    tv = t if t is not None else (0.3 if s.t_symbolic else None)
    mx = float(np.max(np.abs(residual.evaluate(pts, t=tv))))
    return LawReport(law, "exact", mx, samples, seed, False, extra={"nonzero_normal_form": True})


def verify_yamabe_law(s: PHStructure, v, u, seed: int = 0) -> LawReport:
    """``v^3 L_{v^2 theta}(u) = L_theta(u v)``, exactly."""
    v = SphereFraction.coerce(v)
    u = SphereFraction.coerce(u)
    _check_positive(v, s)
    sh = conformal_rescale(s, v * v)
    res = yamabe_op(u, sh).value * v * v * v - yamabe_op(u * v, s).value
    return _exact_report("yamabe", res, s, seed)


def verify_paneitz_law(s: PHStructure, w, u, seed: int = 0) -> LawReport:
    """``w^2 P_{w theta}(u) = P_theta(u)``, exactly."""
    w = SphereFraction.coerce(w)
    u = SphereFraction.coerce(u)
    _check_positive(w, s)
    sh = conformal_rescale(s, w)
    res = paneitz(u, sh).value * w * w - paneitz(u, s).value
    return _exact_report("paneitz", res, s, seed)


def _sampled(law: str, residual, samples: int, tol: float, seed: int, t, precision: int | None,
             extra=None) -> LawReport:
    residual = lift(residual)
    pts = random_sphere_points(samples, seed)
    extra = dict(extra or {})
    extra["folded_exact"] = residual.is_exact()
    if residual.is_zero():
        return LawReport(law, "sampled", 0.0, samples, seed, True, tol,
                         0.0 if precision else None, precision, extra)
    vals = residual.evaluate(pts, t=t)
    mx = float(np.max(np.abs(vals)))
    passed = mx < tol
    mx_ext = None
    if precision:
        mpts = mp_sphere_points(pts, precision)
        tv = None if t is None else _mp_t(t, precision)
        ext = residual.evaluate(mpts, t=tv, precision=precision)
        mx_ext = float(max(abs(complex(x)) for x in ext))
        passed = passed and (mx_ext <= mx / REDUCTION or mx_ext == 0.0)
    return LawReport(law, "sampled", mx, samples, seed, passed, tol, mx_ext, precision, extra)


def _mp_t(t, precision):
    import mpmath
    from fractions import Fraction

    with mpmath.workdps(precision):
        f = Fraction(t)
        return mpmath.mpf(f.numerator) / f.denominator


def verify_q_law(s: PHStructure, w, samples: int = 20, tol: float = 1e-8, seed: int = 0, t=None,
                 precision: int | None = EXTENDED_DIGITS) -> LawReport:
    """``w^2 Q_{w theta} = Q_theta + P_theta(log w)`` at sample points."""
    t = _numeric_t(s, t)
    w = SphereFraction.coerce(w)
    _check_positive(w, s, t)
    sh = conformal_rescale(s, w)
    U = log(w)
    res = lift(q_curvature(sh).value * w * w) - q_curvature(s).value - paneitz(U, s).value
    return _sampled("q", res, samples, tol, seed, t, precision)


def verify_pprime_law(s: PHStructure, w, u, samples: int = 20, tol: float = 1e-8, seed: int = 0,
                      t=None, precision: int | None = EXTENDED_DIGITS) -> LawReport:
    """``w^2 P'_{w theta}(u) = P'_theta(u) + P_theta(u log w)`` for pluriharmonic ``u``."""
    t = _numeric_t(s, t)
    w = SphereFraction.coerce(w)
    u = SphereFraction.coerce(u)
    p3 = paneitz_p3(u, s)
    if not p3.is_zero():
        raise NotPluriharmonic("u is not CR pluriharmonic", p3)
    _check_positive(w, s, t)
    sh = conformal_rescale(s, w)
    U = log(w)
    res = lift(p_prime_raw(u, sh).value * w * w) - p_prime_raw(u, s).value - paneitz(U * u, s).value
    return _sampled("pprime", res, samples, tol, seed, t, precision)


def qprime_rhs(s: PHStructure, U: SmoothExpr) -> SmoothExpr:
    """Right side of the Q' transformation law, with ``P4`` read as the Paneitz operator."""
    W = w1(s).value
    Q = q_curvature(s).value
    up = raise_index(WeightedScalar(U), s)
    terms = [
        lift(q_prime(s).value),
        p_prime_raw(U, s).value,
        raise_index(WeightedScalar(U * W, 1, 0), s).real_part().value * (SphereFraction.coerce(16) / 3),
        U * Q * 3,
        paneitz(U * U, s).value * (SphereFraction.coerce(1) / 2),
        -(U * paneitz(U, s).value),
        -((up * paneitz_p3(U, s)).real_part().value * 16),
    ]
    return SmoothExpr.add(*terms)


def verify_qprime_law(s: PHStructure, w, samples: int = 20, tol: float = 1e-6, seed: int = 0, t=None,
                      precision: int | None = EXTENDED_DIGITS) -> LawReport:
    """The Q' transformation law at sample points (``P'`` applied literally to ``log w``)."""
    t = _numeric_t(s, t)
    w = SphereFraction.coerce(w)
    _check_positive(w, s, t)
    sh = conformal_rescale(s, w)
    U = log(w)
    res = lift(q_prime(sh).value * w * w) - qprime_rhs(s, U)
    pts = random_sphere_points(samples, seed)
    p3 = lift(paneitz_p3(U, s).value)
    p3_res = 0.0 if p3.is_zero() else float(np.max(np.abs(p3.evaluate(pts, t=t))))
    return _sampled("qprime", res, samples, tol, seed, t, precision,
                    extra={"upsilon_p3_residual": p3_res})


def verify_law(law: str, s: PHStructure, w, u=None, samples: int = 20, tol: float | None = None,
               seed: int = 0, t=None, precision: int | None = EXTENDED_DIGITS) -> LawReport:
    """Dispatch by law name; ``w`` doubles as ``v`` for the Yamabe law."""
    if law == "yamabe":
        return verify_yamabe_law(s, w, 1 if u is None else u, seed)
    if law == "paneitz":
        return verify_paneitz_law(s, w, 1 if u is None else u, seed)
    tol = DEFAULT_TOL[law] if tol is None else tol
    if law == "q":
        return verify_q_law(s, w, samples, tol, seed, t, precision)
    if law == "pprime":
        return verify_pprime_law(s, w, 1 if u is None else u, samples, tol, seed, t, precision)
    if law == "qprime":
        return verify_qprime_law(s, w, samples, tol, seed, t, precision)
    raise ValueError(f"unknown law {law!r}")
