"""Exact pseudohermitian invariants of CR structures on the three-sphere."""
from .families import FamilySpec, make_family
from .scalars import PiSquaredValue, Scalar
from .spherealg import SphereFraction, SpherePoly

__all__ = ["FamilySpec", "PiSquaredValue", "Scalar", "SphereFraction", "SpherePoly", "make_family"]
