"""Command-line front end.

Usage examples:
  crsphere invariants --family rossi --t symbolic
  crsphere total --family round
  crsphere verify --law yamabe --family rossi --t symbolic
  crsphere verify --law all --family rossi --t 1/4
  crsphere sweep --family rossi --t-min -9/10 --t-max 9/10 --steps 19 --format csv
  crsphere spectrum --operator paneitz --family round --degree 1

Exit codes: 0 all checks passed, 1 a verified violation, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import covariance, families, integrate, operators, spectral
from .scalars import PiSquaredValue
from .spherealg import SphereFraction, SpherePoly

DEFAULT_FACTORS = {
    "yamabe": ("1 + z1 zb1/4", "(z2 + zb2)/2"),
    "paneitz": ("1 + z1 zb1/4", "(z1 + zb1)/2"),
    "q": ("1 + (z1 + zb1)^2/16", None),
    "pprime": ("1 + z2 zb2/4", "1"),
    "qprime": ("1 + (z2 + zb2)^2/32", None),
}


class UsageError(Exception):
    pass


def exact_str(f) -> str:
    """Canonical string: a ``Scalar`` when the value is constant on the sphere."""
    if isinstance(f, operators.WeightedScalar):
        f = f.value
    f = SphereFraction.coerce(f)
    s = f.to_scalar()
    return str(s) if s is not None else str(f)


def _add_family_args(p: argparse.ArgumentParser):
    p.add_argument("--family", default="round", choices=families.FAMILIES)
    p.add_argument("--t", default="0", help="rational such as 1/3, or 'symbolic'")
    p.add_argument("--p", type=int, default=3, help="lens order p")
    p.add_argument("--q", type=int, default=1, help="lens weight q (p > q > 0)")
    p.add_argument("--variant", default="corrected", choices=families.VARIANTS)
    p.add_argument("--frame", default=None, help="custom frame 'c1, c2, cb1, cb2' as sphere polynomials")
    p.add_argument("--factor", default=None, help="conformal factor u for the contact form u*theta0")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", default="json", choices=("json", "csv", "text"))


def _spec(args, t=None) -> families.FamilySpec:
    try:
        tv = families.parse_t(args.t if t is None else t)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc))
    return families.FamilySpec(name=args.family, t=tv, p=args.p, q=args.q, variant=args.variant,
                               frame=args.frame, factor=args.factor)


def _structure(spec):
    note = families.default_theta_note(spec)
    if note:
        print(f"note: {note}", file=sys.stderr)
    try:
        return families.make_family(spec)
    except families.FamilyError as exc:
        raise UsageError(str(exc))


def invariants_of(s) -> tuple[dict, dict]:
    W, Q = operators.w1_and_q(s)
    qv = Q.value
    inv = {
        "h": exact_str(s.h),
        "R": exact_str(s.R),
        "A11": exact_str(s.A11),
        "|A|^2": exact_str(operators.torsion_norm2(s)),
        "Q": exact_str(qv),
        "Im Q": exact_str(qv.imag_part()),
        "Q'": exact_str(operators.q_prime(s)),
    }
    flags = {
        "torsion_free": s.A11.is_zero(),
        "R_constant": s.R.to_scalar() is not None,
        "q_flat": qv.is_zero(),
    }
    return inv, flags


def _emit(payload: dict, fmt: str, rows: list | None = None, out=None):
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(payload, indent=2, default=str) + "\n")
    elif fmt == "csv":
        buf = io.StringIO()
        if rows is None:
            rows = [{"name": k, "value": v} for k, v in payload.get("invariants", {}).items()]
            rows += [{"name": k, "value": v} for k, v in payload.get("flags", {}).items()]
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
            w.writeheader()
            w.writerows(rows)
        out.write(buf.getvalue())
    else:
        for section in ("invariants", "flags"):
            for k, v in payload.get(section, {}).items():
                out.write(f"{k}: {v}\n")
        for r in payload.get("reports", []):
            out.write(" ".join(f"{k}={v}" for k, v in r.items()) + "\n")
        for r in rows or []:
            out.write(" ".join(f"{k}={v}" for k, v in r.items()) + "\n")


def _payload(spec, seed, **kw) -> dict:
    out = {"family": spec.name, "params": spec.params(), "invariants": {}, "flags": {}, "reports": [],
           "seed": seed}
    out.update(kw)
    return out


def cmd_invariants(args) -> int:
    spec = _spec(args)
    s = _structure(spec)
    inv, flags = invariants_of(s)
    _emit(_payload(spec, args.seed, invariants=inv, flags=flags), args.format)
    return 0


def total_report(s) -> dict:
    try:
        rep = integrate.total_q_prime(s)
        return rep.as_dict()
    except integrate.NotExactlyIntegrable:
        val = integrate.numeric_integral(operators.q_prime(s), s)
        flat = operators.is_q_flat(s)
        return {
            "total_q_prime": f"{val.real / (3.141592653589793 ** 2):.12g} * pi^2",
            "label": "numeric quadrature" + ("" if flat else " (upper bound for total Q')"),
            "is_q_flat": flat,
            "torsion_free": s.A11.is_zero(),
            "R_constant": s.R.to_scalar() is not None,
            "cover_degree_bound": None,
            "gap_over_8pi2": None,
            "yamabe_trial_upper": None,
        }


def cmd_total(args) -> int:
    spec = _spec(args)
    s = _structure(spec)
    rep = total_report(s)
    inv = {"total_q_prime": rep.pop("total_q_prime"), "label": rep.pop("label"),
           "yamabe_trial_upper": rep.pop("yamabe_trial_upper")}
    _emit(_payload(spec, args.seed, invariants=inv, flags=rep), args.format)
    return 0


def cmd_verify(args) -> int:
    spec = _spec(args)
    s = _structure(spec)
    laws = covariance.LAWS if "all" in args.law else args.law
    t_eval = None
    if spec.symbolic:
        t_eval = Fraction(args.t_eval) if args.t_eval is not None else None
    elif spec.t is not None:
        t_eval = None
    reports = []
    ok = True
    for law in laws:
        w_text, u_text = DEFAULT_FACTORS[law]
        w = SpherePoly.parse(args.w or w_text)
        u = None
        if law in ("yamabe", "paneitz", "pprime"):
            u = SpherePoly.parse(args.u or u_text)
        if spec.symbolic and law not in ("yamabe", "paneitz") and t_eval is None:
            raise UsageError(f"law {law!r} is sampled; pass --t-eval for a symbolic family")
        try:
            rep = covariance.verify_law(law, s, w, u, samples=args.samples, tol=args.tol, seed=args.seed,
                                        t=t_eval, precision=args.precision or None)
        except operators.NotPluriharmonic as exc:
            raise UsageError(f"{law}: {exc}")
        except ValueError as exc:
            raise UsageError(f"{law}: {exc}")
        reports.append(rep.as_dict())
        ok = ok and rep.passed
    _emit(_payload(spec, args.seed, reports=reports, flags={"all_passed": ok}), args.format, rows=None)
    return 0 if ok else 1


def _grid(tmin: Fraction, tmax: Fraction, steps: int) -> list[Fraction]:
    if steps < 1:
        raise UsageError("--steps must be positive")
    if steps == 1:
        return [tmin]
    return [tmin + (tmax - tmin) * k / (steps - 1) for k in range(steps)]


def cmd_sweep(args) -> int:
    try:
        tmin, tmax = families.parse_t(args.t_min), families.parse_t(args.t_max)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc))
    rows = []
    for tv in _grid(tmin, tmax, args.steps):
        spec = families.FamilySpec(name=args.family, t=tv, p=args.p, q=args.q, variant=args.variant,
                                   frame=args.frame, factor=args.factor)
        s = _structure(spec)
        rep = total_report(s)
        row = {
            "t": str(tv),
            "R": exact_str(s.R),
            "Q'": exact_str(operators.q_prime(s)),
            "total_Q'": rep["total_q_prime"],
            "q_flat": rep["is_q_flat"],
            "cover_degree_bound": rep["cover_degree_bound"],
        }
        if args.lambda_degree is not None:
            g = spectral.assemble(s, args.operator, args.lambda_degree)
            row["lambda_min"] = spectral.min_rayleigh(g)[0]
        rows.append(row)
    spec0 = families.FamilySpec(name=args.family, t=tmin, p=args.p, q=args.q, variant=args.variant)
    payload = _payload(spec0, args.seed, rows=rows)
    payload["params"] = {"t_min": str(tmin), "t_max": str(tmax), "steps": args.steps}
    _emit(payload, args.format, rows=rows)
    return 0


def cmd_spectrum(args) -> int:
    spec = _spec(args)
    s = _structure(spec)
    t_eval = Fraction(args.t_eval) if (spec.symbolic and args.t_eval is not None) else None
    if spec.symbolic and t_eval is None:
        raise UsageError("spectrum of a symbolic family needs --t-eval")
    try:
        g = spectral.assemble(s, args.operator, args.degree)
    except ValueError as exc:
        raise UsageError(str(exc))
    vals = spectral.eigenvalues(g, t_eval)
    lam, vec = spectral.min_rayleigh(g, t_eval)
    cert = spectral.certify_negative(g, vec, t_eval)
    neg = cert.coeff.constant_value() is not None and cert.coeff.is_real() and cert.coeff.as_fraction() < 0
    report = {
        "operator": g.operator,
        "degree": g.degree,
        "basis_size": len(g.basis),
        "symmetric": g.is_symmetric(),
        "eigenvalues": [float(x) for x in vals],
        "lambda_min": lam,
        "certificate": str(cert),
        "certified_negative": neg,
    }
    if args.csv_out:
        with open(args.csv_out, "w", encoding="utf-8") as fh:
            fh.write(g.to_csv("opmat", t_eval))
    payload = _payload(spec, args.seed, reports=[report])
    _emit(payload, args.format, rows=[{"eigenvalue": float(x)} for x in vals] if args.format == "csv" else None)
    if args.assert_nonnegative and neg:
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="crsphere", description="Exact CR invariants of structures on S^3.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", help="h, R, A11, |A|^2, Q, Im Q, Q' and flags")
    _add_family_args(p)
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("total", help="total Q', Q-flat flag and cover-degree bound")
    _add_family_args(p)
    p.set_defaults(func=cmd_total)

    p = sub.add_parser("verify", help="check transformation laws")
    _add_family_args(p)
    p.add_argument("--law", nargs="+", default=["all"], choices=list(covariance.LAWS) + ["all"])
    p.add_argument("--w", default=None, help="positive conformal factor (v for the Yamabe law)")
    p.add_argument("--u", default=None, help="test function")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--precision", type=int, default=covariance.EXTENDED_DIGITS,
                   help="digits for the extended-precision rerun (0 disables)")
    p.add_argument("--t-eval", default=None, help="numeric t for sampled laws on a symbolic family")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="R, Q' and total Q' over a rational t grid")
    _add_family_args(p)
    p.add_argument("--t-min", required=True)
    p.add_argument("--t-max", required=True)
    p.add_argument("--steps", type=int, default=11)
    p.add_argument("--lambda-degree", type=int, default=None, help="add lambda_min of a Galerkin system")
    p.add_argument("--operator", default="paneitz", choices=("paneitz", "yamabe"))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("spectrum", help="Galerkin eigenvalues and an exact certificate")
    _add_family_args(p)
    p.add_argument("--operator", default="paneitz", choices=("paneitz", "yamabe"))
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--t-eval", default=None)
    p.add_argument("--csv-out", default=None, help="write the exact operator matrix as CSV")
    p.add_argument("--assert-nonnegative", action="store_true",
                   help="exit 1 if a negative direction is certified")
    p.set_defaults(func=cmd_spectrum)
    return ap


_VALUE_FLAGS = ("--t", "--t-min", "--t-max", "--t-eval")


def _join_negative(argv: list[str]) -> list[str]:
    # argparse reads "-9/10" as an option; glue it to its flag
    out = []
    it = iter(argv)
    for a in it:
        if a in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(_join_negative(list(sys.argv[1:] if argv is None else argv)))
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
