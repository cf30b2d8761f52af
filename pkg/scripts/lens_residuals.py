#!/usr/bin/env python3
"""Equivariance and contact residuals of both lens frame variants.

The corrected variant should be equivariant and lie in ker theta0 for every
(p, q, t); the literal one is measured only.

Usage:
  python3 scripts/lens_residuals.py --max-p 7
"""
from __future__ import annotations

import argparse
import csv
import sys
from fractions import Fraction

from crsphere.families import FamilySpec, verify_equivariance

T_VALUES = (Fraction(1, 4), Fraction(1, 2), Fraction(-1, 3))


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-p", type=int, default=6)
    ap.add_argument("--samples", type=int, default=20)
    args = ap.parse_args()
    w = csv.writer(sys.stdout)
    w.writerow(["p", "q", "t", "variant", "equivariance_residual", "contact_residual"])
    for p in range(2, args.max_p + 1):
        for q in range(1, p):
            for t in T_VALUES:
                for variant in ("corrected", "literal"):
                    rep = verify_equivariance(FamilySpec("lens", t, p, q, variant), samples=args.samples)
                    w.writerow([p, q, t, variant, f"{rep.max_residual:.3e}", f"{rep.contact_residual:.3e}"])
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
