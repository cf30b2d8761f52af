#!/usr/bin/env python3
"""All five transformation laws on a few structures, one JSON line per report.

Usage:
  python3 scripts/covariance_check.py --samples 20 --seed 0
"""
from __future__ import annotations

import argparse
import json
from dataclasses import dataclass, field
from fractions import Fraction

from crsphere.covariance import verify_law
from crsphere.families import FamilySpec, make_family
from crsphere.spherealg import SphereFraction, SpherePoly


def frac(text):
    return SphereFraction(SpherePoly.parse(text))


@dataclass
class LawCase:
    law: str
    w: str
    u: str | None = None


@dataclass
class CheckConfig:
    samples: int = 20
    seed: int = 0
    structures: list = field(default_factory=lambda: [
        ("round", FamilySpec("round"), "(z1 + zb1)/2"),
        ("rossi 1/4", FamilySpec("rossi", Fraction(1, 4)), "(z1^2 + zb2^2/4 + zb1^2 + z2^2/4)/2"),
        ("rossi 1/5", FamilySpec("rossi", Fraction(1, 5)), "(z1^2 + zb2^2/5 + zb1^2 + z2^2/5)/2"),
    ])


def cases(pluri: str) -> list[LawCase]:
    return [
        LawCase("yamabe", "1 + z1 zb1/4", "(z2 + zb2)/2"),
        LawCase("paneitz", "1 + z1 zb1/4", "z1 zb2 + z2^2"),
        LawCase("q", "1 + (z1 + zb1)^2/16"),
        LawCase("pprime", "1 + z2 zb2/4", pluri),
        LawCase("qprime", "1 + (z2 + zb2)^2/32"),
    ]


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    cfg = CheckConfig(args.samples, args.seed)
    ok = True
    for name, spec, pluri in cfg.structures:
        s = make_family(spec)
        for c in cases(pluri):
            rep = verify_law(c.law, s, frac(c.w), None if c.u is None else frac(c.u),
                             samples=cfg.samples, seed=cfg.seed)
            ok = ok and rep.passed
            print(json.dumps({"structure": name, **rep.as_dict()}, sort_keys=True))
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
