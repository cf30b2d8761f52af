"""Pseudohermitian structure equations on S^3.

Given a CR frame generator ``Z1`` and a contact form ``theta`` annihilating
it, this module finds the Reeb field ``T`` and the data ``h``, ``omega``,
``A`` and ``R`` of the Tanaka-Webster connection, with the sign conventions

    dtheta   = i h theta^1 ^ theta^1bar
    dtheta^1 = theta^1 ^ omega + A theta ^ theta^1bar
    h (omega + omegabar) = dh
    d omega  = R h theta^1 ^ theta^1bar   (mod theta)

where ``theta^1`` is dual to ``Z1`` against ``(Z1, Z1bar, T)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .frames import (
    ROUND_T0,
    THETA0,
    Frame,
    FrameDegenerate,
    FrameForm,
    RoundOneForm,
    TangentField,
    bracket,
    cartan_d,
    wedge,
)
from .spherealg import SphereFraction, SpherePoly, random_sphere_points, register_factor

_I = SphereFraction(SpherePoly.parse("i"))


class StructureError(ArithmeticError):
    """The structure equations could not be solved or failed a residual check."""


@dataclass
class ContactForm:
    """Real contact form, kept as components against the round coframe."""

    form: RoundOneForm
    scale: SphereFraction | None = None

    @classmethod
    def round(cls) -> "ContactForm":
        return cls(THETA0, SphereFraction.coerce(1))

    @classmethod
    def conformal(cls, u) -> "ContactForm":
        """``u * theta0`` for a positive function ``u``."""
        u = SphereFraction.coerce(u)
        return cls(THETA0.scale(u), u)

    @classmethod
    def annihilating(cls, Z1: TangentField) -> "ContactForm":
        """Real form killing ``Z1`` and ``Z1bar``, scaled by ``theta(T0)`` when that is constant."""
        x, y, zc = Z1.round_components()
        n1 = y * zc.conj() - zc * x.conj()
        n3 = x * x.conj() - y * y.conj()
        form = RoundOneForm(n1, n1.conj(), n3)
        c = n3.to_scalar()
        if c is not None and not c.is_zero():
            form = form.scale(SphereFraction.from_scalar(c).inverse())
        return cls(form, None)

    def __call__(self, X: TangentField) -> SphereFraction:
        return self.form(X)


def _levi(Z1: TangentField, theta: ContactForm) -> SphereFraction:
    return theta(bracket(Z1, Z1.conj())) * _I


def reeb(Z1: TangentField, theta: ContactForm, E: TangentField = ROUND_T0) -> TangentField:
    """The field ``T`` with ``theta(T) = 1`` and ``dtheta(T, .) = 0``."""
    boot = Frame(Z1, E)
    th = theta.form.on_frame(boot)
    if not th[0].is_zero() or not th[1].is_zero():
        raise StructureError("theta does not annihilate Z1")
    dth = cartan_d(th, boot)
    ih = dth[0, 1]
    if ih.is_zero():
        raise StructureError("theta is not a contact form for this frame (dtheta(Z1, Z1bar) = 0)")
    if th[2].is_zero():
        raise FrameDegenerate("theta vanishes on the bootstrap field")
    gamma = th[2].inverse()
    beta = gamma * dth[2, 0] / ih
    alpha = -gamma * dth[2, 1] / ih
    return Z1.scale(alpha) + boot.Z1bar.scale(beta) + E.scale(gamma)


@dataclass(eq=False)
class PHStructure:
    """Solved pseudohermitian structure for a frame generator and contact form."""

    Z1: TangentField
    theta: ContactForm
    T: TangentField
    frame: Frame
    h: SphereFraction
    a: SphereFraction
    b: SphereFraction
    c: SphereFraction
    A: SphereFraction
    A11: SphereFraction
    R: SphereFraction
    t_symbolic: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def Z1bar(self) -> TangentField:
        return self.frame.Z1bar

    @property
    def h_inv(self) -> SphereFraction:
        if "h_inv" not in self.meta:
            self.meta["h_inv"] = self.h.inverse()
        return self.meta["h_inv"]

    # forms on the frame (Z1, Z1bar, T)
    def theta_form(self) -> FrameForm:
        return FrameForm.from_values(1, (0, 0, 1))

    def theta1(self) -> FrameForm:
        return FrameForm.from_values(1, (1, 0, 0))

    def theta1bar(self) -> FrameForm:
        return FrameForm.from_values(1, (0, 1, 0))

    def omega(self) -> FrameForm:
        return FrameForm.from_values(1, (self.b, self.c, self.a))

    def residuals(self) -> dict:
        """Frame-component residuals of every structure identity (zero when they hold)."""
        F = self.frame
        th, t1, t1b = self.theta_form(), self.theta1(), self.theta1bar()
        om = self.omega()
        out = {}
        out["theta(Z1)"] = self.theta(self.Z1)
        out["theta(T)-1"] = self.theta(self.T) - 1
        dth = cartan_d(th, F)
        out["iota_T dtheta"] = dth[2, 0] * dth[2, 0].conj() + dth[2, 1] * dth[2, 1].conj()
        out["dtheta"] = _norm2(dth - wedge(t1, t1b).scale(self.h * _I))
        rhs = wedge(t1, om) + wedge(th, t1b).scale(self.A)
        out["dtheta1"] = _norm2(cartan_d(t1, F) - rhs)
        dh = cartan_d(FrameForm.function(self.h), F)
        out["reality"] = _norm2((om + om.conj()).scale(self.h) - dh)
        out["R real"] = self.R - self.R.conj()
        out["h real"] = self.h - self.h.conj()
        return out

    def check(self) -> dict:
        """Map each identity to whether it holds exactly."""
        return {k: v.is_zero() for k, v in self.residuals().items()}

    def check_positive(self, samples: int = 16, seed: int = 0, t=None) -> bool:
        pts = random_sphere_points(samples, seed)
        vals = self.h.evaluate(pts, t=t)
        return bool(np.all(vals.real > 0) and np.all(np.abs(vals.imag) < 1e-9))


def _norm2(form: FrameForm) -> SphereFraction:
    """Sum of |component|^2, zero exactly when the form is zero."""
    acc = SphereFraction.coerce(0)
    for v in form.components.values():
        if not v.is_zero():
            acc = acc + v * v.conj()
    return acc


def solve_structure(Z1: TangentField, theta: ContactForm | None = None, *, check: bool = True,
                    t_symbolic: bool = False) -> PHStructure:
    """Solve the structure equations for ``(Z1, theta)``.

    ``theta`` defaults to the real annihilator of ``Z1``; if that comes out
    with negative Levi form the orientation is flipped.
    """
    if theta is None:
        theta = ContactForm.annihilating(Z1)
        h_test = _levi(Z1, theta)
        v = h_test.evaluate(random_sphere_points(1, 0), t=0.0 if t_symbolic else None)[0]
        if v.real < 0:
            theta = ContactForm(theta.form.scale(-1), None)
    T = reeb(Z1, theta)
    F = Frame(Z1, T)
    s01 = F.structure(0, 1)
    s02 = F.structure(0, 2)
    s12 = F.structure(1, 2)
    h = s01[2] * _I
    if h.is_zero():
        raise StructureError("Levi form vanishes")
    register_factor(h)
    a = -s02[0]
    c = -s01[0]
    A = s12[0]
    b = F.Z1(h) / h - c.conj()
    A11 = A.conj() * h
    om = FrameForm.from_values(1, (b, c, a))
    dom = cartan_d(om, F)
    R = dom[0, 1] / h
    s = PHStructure(Z1=Z1, theta=theta, T=T, frame=F, h=h, a=a, b=b, c=c, A=A, A11=A11, R=R,
                    t_symbolic=t_symbolic)
    if check:
        bad = [k for k, ok in s.check().items() if not ok]
        if bad:
            raise StructureError("structure identities fail: " + ", ".join(bad))
    return s


def webster_curvature(s: PHStructure) -> SphereFraction:
    return s.R
