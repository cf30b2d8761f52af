"""Built-in CR structures on S^3 and their symmetry checks.

* ``round``: the standard frame ``Z = zb2 d/dz1 - zb1 d/dz2`` with ``theta0``.
* ``rossi``: ``Z_t = Z + t Zbar`` with ``theta0``, ``|t| < 1``.
* ``lens``: deformations equivariant under ``(z1, z2) -> (w z1, w^q z2)`` with
  ``w = exp(2 pi i / p)``.  Two variants:

  - ``corrected`` (default): ``Z_t = (zb1 d/dz2 - zb2 d/dz1)
    + t zb1^(2q+2) (z1 d/dzb2 - z2 d/dzb1)``, which lies in ``ker theta0``;
  - ``literal``: the deformation term ``t zb1^(2q+2) (z1 - z2) d/dzb1``.
    It is not tangent to S^3 for ``t != 0``, so no structure is built from
    it; only its equivariance and contact residuals are measured.
* ``custom``: a user-supplied tangent field, optionally with ``u theta0``.
"""
from __future__ import annotations

import cmath
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .frames import ROUND_Z, ROUND_ZBAR, THETA0, TangentField
from .pseudoherm import ContactForm, PHStructure, StructureError, solve_structure
from .scalars import Scalar
from .spherealg import SphereFraction, SpherePoly, random_sphere_points, unpack, z1, z2, zb1

FAMILIES = ("round", "rossi", "lens", "custom")
VARIANTS = ("corrected", "literal")


class FamilyError(ValueError):
    pass


def parse_t(value) -> Fraction | str:
    """Rational ``t`` from a string like ``"1/3"``, or ``"symbolic"``."""
    if isinstance(value, str):
        v = value.strip()
        if v == "symbolic":
            return v
        if any(ch in v for ch in ".eE"):
            raise FamilyError("t must be an exact rational such as 1/3, not a float")
        return Fraction(v)
    if isinstance(value, float):
        raise FamilyError("t must be an exact rational, not a float")
    return Fraction(value)


@dataclass(frozen=True)
class FamilySpec:
    name: str = "round"
    t: object = 0
    p: int = 3
    q: int = 1
    variant: str = "corrected"
    frame: str | None = None
    factor: str | None = None

    @property
    def symbolic(self) -> bool:
        return self.t == "symbolic"

    def t_value(self):
        """The frame parameter as a ``SpherePoly`` (symbolic ``t`` or a rational)."""
        if self.symbolic:
            return SpherePoly.var("t")
        return SpherePoly.const(Fraction(self.t))

    def params(self) -> dict:
        out = {"t": str(self.t)}
        if self.name == "lens":
            out.update(p=self.p, q=self.q, variant=self.variant)
        if self.frame is not None:
            out["frame"] = self.frame
        if self.factor is not None:
            out["factor"] = self.factor
        return out


def _check_t(spec: FamilySpec):
    if spec.symbolic:
        return
    if not -1 < Fraction(spec.t) < 1:
        raise FamilyError("the family needs |t| < 1")


def lens_frame(p: int, q: int, t, variant: str = "corrected") -> TangentField:
    if not p > q > 0:
        raise FamilyError("lens parameters need integers p > q > 0")
    t = t if isinstance(t, SpherePoly) else SpherePoly.const(t)
    base = -ROUND_Z
    lift = zb1 ** (2 * q + 2) * t
    if variant == "corrected":
        return base - ROUND_ZBAR.scale(lift)
    if variant == "literal":
        return base + TangentField(0, 0, lift * (z1 - z2), 0)
    raise FamilyError(f"unknown lens variant {variant!r}")


def family_frame(spec: FamilySpec) -> TangentField:
    if spec.name == "round":
        return ROUND_Z
    if spec.name == "rossi":
        return ROUND_Z + ROUND_ZBAR.scale(spec.t_value())
    if spec.name == "lens":
        return lens_frame(spec.p, spec.q, spec.t_value(), spec.variant)
    if spec.name == "custom":
        if spec.frame is None:
            raise FamilyError("custom family needs a frame")
        return TangentField.parse(spec.frame)
    raise FamilyError(f"unknown family {spec.name!r}")


def make_family(spec: FamilySpec, check: bool = True) -> PHStructure:
    """Build and solve the structure described by ``spec``."""
    if spec.name not in FAMILIES:
        raise FamilyError(f"unknown family {spec.name!r}")
    if spec.name in ("rossi", "lens"):
        _check_t(spec)
    if spec.name == "lens" and spec.variant == "literal" and not (not spec.symbolic and spec.t == 0):
        raise FamilyError(
            "the literal lens frame is not tangent to S^3 for t != 0; "
            "use verify_equivariance/contact_residual to measure it")
    Z1 = family_frame(spec)
    if not Z1.is_tangent():
        raise FamilyError("frame is not tangent to S^3")
    if THETA0(Z1).is_zero():
        theta = ContactForm.round()
        if spec.factor is not None:
            theta = ContactForm.conformal(SpherePoly.parse(spec.factor))
    else:
        if spec.factor is not None:
            raise FamilyError("a conformal factor needs a frame inside ker theta0")
        theta = None
    try:
        s = solve_structure(Z1, theta, check=check, t_symbolic=spec.symbolic)
    except StructureError as exc:
        raise FamilyError(f"structure solve failed: {exc}") from exc
    if theta is not None and not s.check_positive(t=0 if spec.symbolic else None):
        # orientation: flip theta so the Levi form is positive
        s = solve_structure(Z1, ContactForm(theta.form.scale(-1), None), check=check,
                            t_symbolic=spec.symbolic)
    s.meta["spec"] = spec
    return s


def conformal_rescale(s: PHStructure, factor) -> PHStructure:
    """Re-solve with the contact form multiplied by a positive ``factor``."""
    f = SphereFraction.coerce(factor)
    pts = random_sphere_points(32, 12345)
    tv = 0 if s.t_symbolic else None
    vals = f.evaluate(pts, t=tv)
    if np.any(vals.real <= 0) or np.any(np.abs(vals.imag) > 1e-12 * np.abs(vals)):
        raise FamilyError("conformal factor must be positive on the sphere")
    theta = ContactForm(s.theta.form.scale(f), None if s.theta.scale is None else s.theta.scale * f)
    out = solve_structure(s.Z1, theta, check=False, t_symbolic=s.t_symbolic)
    out.meta["spec"] = s.meta.get("spec")
    return out


# ------------------------------------------------------------ equivariance

@dataclass
class EquivarianceReport:
    mode: str
    max_residual: float
    samples: int
    seed: int
    passed: bool | None
    contact_residual: float = 0.0
    bad_terms: tuple = ()


_LAMBDA = lambda q: (1, q, -1, -q)  # noqa: E731  phase of d/dz1, d/dz2, d/dzb1, d/dzb2


def contact_residual(Z1: TangentField, samples: int = 20, seed: int = 0, t=None) -> float:
    """Max of ``|theta0(Z1)|`` at sample points (zero for frames in ``ker theta0``)."""
    v = THETA0(Z1)
    if v.is_zero():
        return 0.0
    pts = random_sphere_points(samples, seed)
    return float(np.max(np.abs(v.evaluate(pts, t=t))))


def verify_equivariance(spec: FamilySpec, samples: int = 20, tol: float = 1e-10, seed: int = 0,
                        mode: str = "numeric") -> EquivarianceReport:
    """Check ``Gamma_* Z_t = w^(q+1) Z_t`` for ``Gamma(z1, z2) = (w z1, w^q z2)``."""
    if spec.name != "lens":
        raise FamilyError("equivariance is defined for the lens family")
    p, q = spec.p, spec.q
    if spec.symbolic and mode == "numeric":
        raise FamilyError("numeric equivariance needs a rational t")
    Z1 = lens_frame(p, q, spec.t_value(), spec.variant)
    lam = _LAMBDA(q)
    contact = contact_residual(Z1, samples, seed, t=None if not spec.symbolic else 0)
    if mode == "exact":
        bad = []
        for v, c in enumerate(Z1.coeffs):
            for f in (c.num,):
                for key in f.raw_terms:
                    a1, a2, b1, b2, _ = unpack(key)
                    e = -a1 - q * a2 + b1 + q * b2 + lam[v]
                    if (e - (q + 1)) % p:
                        bad.append((v, (a1, a2, b1, b2)))
            if c.den:
                raise FamilyError("exact mode needs polynomial coefficients")
        return EquivarianceReport("exact", 0.0 if not bad else float(len(bad)), 0, seed, not bad,
                                  contact, tuple(bad))
    w = cmath.exp(2j * cmath.pi / p)
    pts = random_sphere_points(samples, seed)
    moved = np.stack([w * pts[:, 0], w ** q * pts[:, 1]], axis=1)
    res = 0.0
    for v, c in enumerate(Z1.coeffs):
        push = (w ** lam[v]) * c.evaluate(pts)
        target = (w ** (q + 1)) * c.evaluate(moved)
        res = max(res, float(np.max(np.abs(push - target))))
    return EquivarianceReport("numeric", res, samples, seed, res < tol, contact)


def rossi_even_check(quantity) -> bool:
    """True when a ``Scalar`` in ``t`` is even."""
    s = Scalar.coerce(quantity)
    neg = Scalar([c * (-1) ** j for j, c in enumerate(s.num)], [c * (-1) ** j for j, c in enumerate(s.den)])
    return neg == s


def default_theta_note(spec: FamilySpec) -> str | None:
    if spec.name == "lens":
        return ("lens frame: the literal deformation term uses d/dzb1 twice and leaves ker theta0; "
                "the corrected term is z1 d/dzb2 - z2 d/dzb1; "
                f"using the {spec.variant} variant")
    return None


def warn_variant(spec: FamilySpec) -> None:
    note = default_theta_note(spec)
    if note:
        warnings.warn(note, stacklevel=2)
