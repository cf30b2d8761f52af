#!/usr/bin/env python3
"""Rossi family over a rational t grid: R, Q', total Q' and the Paneitz lambda_min.

Usage:
  python3 scripts/rossi_sweep.py --steps 19 --degree 2 > rossi.csv
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from fractions import Fraction

from crsphere.families import FamilySpec, make_family
from crsphere.integrate import integral
from crsphere.operators import q_prime
from crsphere.spectral import assemble, min_rayleigh


@dataclass
class SweepConfig:
    t_max: Fraction = Fraction(9, 10)
    steps: int = 19
    degree: int = 2


def rows(cfg: SweepConfig):
    for k in range(cfg.steps):
        t = -cfg.t_max + 2 * cfg.t_max * k / (cfg.steps - 1)
        s = make_family(FamilySpec("rossi", t))
        total = integral(q_prime(s), s)
        lam = min_rayleigh(assemble(s, "P", cfg.degree))[0] if cfg.degree >= 0 else None
        yield {
            "t": str(t),
            "R": str(s.R.to_scalar()),
            "Q'": str(q_prime(s).value.to_scalar()),
            "total_Q'": str(total),
            "total_over_16pi2": float(total.coeff.as_fraction() / 16),
            "lambda_min_P": lam,
        }


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--t-max", default="9/10")
    ap.add_argument("--steps", type=int, default=19)
    ap.add_argument("--degree", type=int, default=2, help="Galerkin degree (-1 skips the spectrum)")
    args = ap.parse_args()
    cfg = SweepConfig(Fraction(args.t_max), args.steps, args.degree)
    out = list(rows(cfg))
    w = csv.DictWriter(sys.stdout, fieldnames=list(out[0]))
    w.writeheader()
    w.writerows(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
