#!/usr/bin/env python3
"""Galerkin lambda_min of the Paneitz operator on Rossi spheres, by degree.

Negative values come with an exact certificate int u P u < 0.

Usage:
  python3 scripts/paneitz_spectrum.py --t 1/2 --max-degree 4
"""
from __future__ import annotations

import argparse
import json
from fractions import Fraction

from crsphere.families import FamilySpec, make_family
from crsphere.spectral import assemble, certify_negative, min_rayleigh


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--t", default="1/2")
    ap.add_argument("--max-degree", type=int, default=4)
    ap.add_argument("--operator", default="P", choices=("P", "L"))
    args = ap.parse_args()
    s = make_family(FamilySpec("rossi", Fraction(args.t)))
    for d in range(args.max_degree + 1):
        g = assemble(s, args.operator, d)
        lam, vec = min_rayleigh(g)
        cert = certify_negative(g, vec)
        print(json.dumps({"degree": d, "basis": len(g.basis), "lambda_min": lam,
                          "certificate": str(cert)}, sort_keys=True))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
