"""Command-line interface.

Exit codes: 0 success, 2 argument or domain error, 3 verification failure.
Numeric options accept decimals or exact rationals such as ``-1/192``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from fractions import Fraction

import numpy as np

from . import cases, efcore, invariants, oracle, parametric, weierstrass
from .efcore import ClassTag, EfEquation
from .errors import DomainError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VERIFY = 3

SCHEMA_VERSION = 1
_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?(/[+-]?\d+(\.\d*)?([eE][+-]?\d+)?)?$")


class VerificationFailed(Exception):
    pass


def number(text: str) -> float:
    """Parse ``'0.25'``, ``'-1/192'`` or ``'1e-3'`` into a float."""
    text = text.strip()
    if not _NUMBER.match(text):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if "/" in text:
        num, den = text.split("/")
        frac = Fraction(num) / Fraction(den)
        return float(frac)
    return float(text)


def triple(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected chi0,z0,zp0")
    return tuple(number(p) for p in parts)


def _join_negative_values(argv):
    """Turn ``--opt -1/192`` into ``--opt=-1/192`` so argparse does not read a flag."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (
            tok.startswith("--")
            and "=" not in tok
            and i + 1 < len(argv)
            and argv[i + 1].startswith("-")
            and (_NUMBER.match(argv[i + 1]) or re.match(r"^-[\d.]", argv[i + 1]))
        ):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


class Output:
    """Collects a table plus metadata and writes it as CSV or JSON."""

    def __init__(self, columns, fmt="csv"):
        self.columns = list(columns)
        self.fmt = fmt
        self.meta = {}
        self.rows = []
        self.footer = {}

    def add(self, *row):
        self.rows.append(row)

    def render(self) -> str:
        if self.fmt == "json":
            body = {
                "schema_version": SCHEMA_VERSION,
                "meta": _jsonable(self.meta),
                "columns": self.columns,
                "rows": [dict(zip(self.columns, _jsonable(list(r)))) for r in self.rows],
            }
            if self.footer:
                body["summary"] = _jsonable(self.footer)
            return json.dumps(body, indent=2, allow_nan=True) + "\n"
        buf = io.StringIO()
        for k, v in self.meta.items():
            buf.write(f"# {k}={_fmt(v)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(x) for x in r])
        for k, v in self.footer.items():
            buf.write(f"# {k}={_fmt(v)}\n")
        return buf.getvalue()


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (list, tuple)):
        return ";".join(_fmt(v) for v in x)
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    return x


def _emit(out: Output, path=None):
    text = out.render()
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- commands --------------------------------------------------------------------

def cmd_classify(args):
    eq = EfEquation(args.n, args.lam, args.A)
    tags = efcore.classify(eq)
    out = Output(["tags", "nu_a", "nu_b"], args.format)
    a = b = float("nan")
    if ClassTag.ClassOne in tags or ClassTag.ClassTwo in tags:
        red = efcore.reduce_to_nu(eq)
        a, b = red.a, red.b
    out.meta.update({"n": args.n, "lambda": args.lam, "A": args.A,
                     "invariant_transform_power": efcore.invariant_transform_power(eq)})
    out.add([t.value for t in tags], a, b)
    _emit(out, args.out)


def cmd_solve(args):
    n, A, K = args.n, args.A, args.K
    cls = args.cls or (2 if args.form == "kink" else 1)
    if not 0 < args.chi_min < args.chi_max:
        raise DomainError("need 0 < chi-min < chi-max")
    if args.points < 2:
        raise DomainError("need at least 2 points")
    out = Output(["chi", "z", "residual"], args.format)
    if args.form == "fowler":
        eq = EfEquation.class_one(n, A)
        sol = efcore.fowler_solution(n, A, K)
    elif args.form == "kink":
        eq = EfEquation.class_two(n, A)
        sol = efcore.kink_solution(n, A, K)
        out.meta["beta"] = sol.params["beta"]
    else:
        if cls == 1:
            eq = EfEquation.class_one(n, A)
            coef, sol = efcore.particular_class1(eq)
            out.meta["alpha"] = coef
        else:
            eq = EfEquation.class_two(n, A)
            coef, sol = efcore.particular_class2(eq)
            out.meta["beta"] = coef
    out.meta.update({"form": args.form, "class": cls, "n": n, "lambda": eq.lam, "A": A, "K": K})
    chi = np.linspace(args.chi_min, args.chi_max, args.points)
    z = np.asarray(sol.z(chi), dtype=float)
    r = np.asarray(efcore.rhs(eq, chi, z), dtype=float)
    res = np.abs(np.asarray(sol.d2z(chi), dtype=float) - r) / np.maximum(1.0, np.abs(r))
    for row in zip(chi, z, res):
        out.add(*row)
    worst = float(np.max(res))
    out.footer["max_residual"] = worst
    _emit(out, args.out)
    if not worst <= 1e-8:
        raise VerificationFailed(f"max residual {worst:.3e} exceeds 1e-8")


def cmd_invariant(args):
    chi0, z0, zp0 = args.ic
    cls = args.cls
    eq = EfEquation.class_one(args.n, args.A) if cls == 1 else EfEquation.class_two(args.n, args.A)
    which = "C1" if cls == 1 else "C3"
    chi_max = args.chi_max if args.chi_max is not None else chi0
    traj = oracle.integrate_ivp(
        lambda x, z, zp: eq(x, z), chi0, z0, zp0, chi_max,
        reltol=args.reltol, abstol=args.reltol * 1e-2, samples=args.points,
    )
    values = invariants.invariant_values(traj, which, args.n, args.A)
    drift = invariants.invariant_drift(traj, which, args.n, args.A)
    out = Output(["chi", "z", "zprime", which], args.format)
    out.meta.update({"class": cls, "n": args.n, "A": args.A, "reltol": args.reltol})
    for row in zip(traj.chi, traj.z, traj.zprime, values):
        out.add(*row)
    out.footer.update({"invariant_initial": float(values[0]), "drift": drift})
    _emit(out, args.out)
    if not drift <= 1e-6:
        raise VerificationFailed(f"invariant drift {drift:.3e} exceeds 1e-6")


def cmd_wp(args):
    g = weierstrass.GermPair(args.g2, args.g3)
    out = Output(["t", "wp", "wp_prime", "ode_residual", "flag"], args.format)
    out.meta.update({
        "g2": g.g2, "g3": g.g3,
        "discriminant": weierstrass.discriminant(g),
        "classification": weierstrass.classify(g).value,
    })
    for t in np.linspace(args.t_min, args.t_max, args.points):
        try:
            p, dp = weierstrass.wp_pair(t, g)
        except DomainError:
            out.add(float(t), math.nan, math.nan, math.nan, "pole")
            continue
        res = abs(dp * dp - (4 * p ** 3 - g.g2 * p - g.g3)) / max(1.0, abs(p) ** 3)
        out.add(float(t), p, dp, res, "ok")
    _emit(out, args.out)


def cmd_case(args):
    grid = np.linspace(0.0, 8.0, args.points)
    rep = cases.run_case(args.id, args.const, grid)
    out = Output(["t_or_theta", "value", "branch_label"], args.format)
    summary = rep.summary()
    out.meta.update({
        "case_id": summary["case_id"], "status": summary["status"],
        "lattice": summary["lattice"], "g2": summary["g2"], "g3": summary["g3"],
        "discriminant": summary["discriminant"],
    })
    for k, v in summary["constants"].items():
        out.meta[k] = v
    for row in rep.figure_rows():
        out.add(*row)
    if args.format == "json":
        out.footer.update({"residuals": summary["residuals"], "drifts": summary["drifts"],
                           "notes": summary["notes"]})
    _emit(out, args.out)
    for name, c in list(rep.residuals.items()) + list(rep.drifts.items()):
        mark = "ok" if c.passed else "FAILED"
        print(f"{name}: {c.value:.3e} (threshold {c.threshold:.0e}) {mark}", file=sys.stderr)
    print(f"{rep.case_id.value}: {rep.status}", file=sys.stderr)
    if rep.failed:
        raise VerificationFailed(f"case {rep.case_id.value} FAILED")


def cmd_parametric(args):
    if not args.tau_max > args.tau_min:
        raise DomainError("tau range must have positive length")
    if args.points < 5:
        raise DomainError("need at least 5 points")
    tau = np.linspace(args.tau_min, args.tau_max, args.points)
    if args.cls == 1:
        curve = parametric.curve_class1(args.n, args.K3, args.a, args.b, args.B1, tau)
    elif args.n == -1:
        curve = parametric.curve_class2_nminus1(-args.sign, args.b, args.C1, args.C2, tau)
    else:
        curve = parametric.curve_class2(args.n, args.sign, args.a, args.b, args.C1, args.C2, tau)
    res = parametric.parametric_residual(curve)
    out = Output(["tau", "theta", "chi", "z"], args.format)
    out.meta.update({"class": args.cls, **curve.params})
    for row in zip(curve.tau, curve.theta, curve.chi, curve.z):
        out.add(*row)
    out.footer["residual"] = res
    _emit(out, args.out)
    if not res <= 1e-5:
        raise VerificationFailed(f"parametric residual {res:.3e} exceeds 1e-5")


# -- parser ----------------------------------------------------------------------

_PARAMETRIC_DEFAULTS = {
    1: dict(n=2.0, sign=1, K3=0.05, a=1.0, b=1.0, B1=1.0, C1=1.0, C2=1.0, tau_min=0.0, tau_max=1.0),
    2: dict(n=2.0, sign=-1, K3=0.0, a=1.0, b=1.5, C1=1.0, C2=1.0, tau_min=0.0, tau_max=0.9),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="emdenfowler", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=["csv", "json"], default="csv")
        sp.add_argument("--out", default=None, help="output path (default: stdout)")

    sp = sub.add_parser("classify", help="integrability tags and reduced nu-equation")
    sp.add_argument("--n", type=number, required=True)
    sp.add_argument("--lambda", dest="lam", type=number, required=True)
    sp.add_argument("--A", type=number, required=True)
    common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("solve", help="evaluate a closed-form solution with residuals")
    sp.add_argument("--form", choices=["fowler", "kink", "particular"], required=True)
    sp.add_argument("--class", dest="cls", type=int, choices=[1, 2], default=None,
                    help="class of the particular solution (default: 1; kink implies 2)")
    sp.add_argument("--n", type=number, required=True)
    sp.add_argument("--A", type=number, required=True)
    sp.add_argument("--K", type=number, default=0.0)
    sp.add_argument("--chi-min", type=number, default=0.5)
    sp.add_argument("--chi-max", type=number, default=5.0)
    sp.add_argument("--points", type=int, default=100)
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("invariant", help="first-integral drift along an oracle trajectory")
    sp.add_argument("--class", dest="cls", type=int, choices=[1, 2], required=True)
    sp.add_argument("--n", type=number, required=True)
    sp.add_argument("--A", type=number, required=True)
    sp.add_argument("--ic", type=triple, required=True, help="chi0,z0,zp0")
    sp.add_argument("--chi-max", type=number, default=None)
    sp.add_argument("--points", type=int, default=65)
    sp.add_argument("--reltol", type=number, default=1e-13)
    common(sp)
    sp.set_defaults(func=cmd_invariant)

    sp = sub.add_parser("wp", help="tabulate the Weierstrass function")
    sp.add_argument("--g2", type=number, required=True)
    sp.add_argument("--g3", type=number, required=True)
    sp.add_argument("--t-min", type=number, default=0.0)
    sp.add_argument("--t-max", type=number, default=4.0)
    sp.add_argument("--points", type=int, default=41)
    common(sp)
    sp.set_defaults(func=cmd_wp)

    sp = sub.add_parser("case", help="run a worked example and write its figure data")
    sp.add_argument("--id", choices=[c.value for c in cases.CaseId], required=True)
    sp.add_argument("--const", type=number, default=None,
                    help="K3 (n2c1), K4 (n5c1) or the sign (n2c2)")
    sp.add_argument("--points", type=int, default=400)
    common(sp)
    sp.set_defaults(func=cmd_case)

    sp = sub.add_parser("parametric", help="sample a parametric solution family")
    sp.add_argument("--class", dest="cls", type=int, choices=[1, 2], required=True)
    sp.add_argument("--n", type=number)
    sp.add_argument("--sign", type=int, choices=[1, -1],
                    help="upper (+1) or lower (-1) choice of the +- / -+ signs")
    for name in ("K3", "a", "b", "B1", "C1", "C2"):
        sp.add_argument(f"--{name}", type=number)
    sp.add_argument("--tau-min", type=number)
    sp.add_argument("--tau-max", type=number)
    sp.add_argument("--points", type=int, default=401)
    common(sp)
    sp.set_defaults(func=cmd_parametric)
    return p


def _fill_parametric_defaults(args):
    defaults = dict(_PARAMETRIC_DEFAULTS[args.cls])
    if args.cls == 2 and args.n == -1:
        defaults.update(sign=1, b=1.0, C2=2.0, tau_min=0.0, tau_max=1.0)
    for key, val in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, val)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(_join_negative_values(argv))
    if args.command == "parametric":
        _fill_parametric_defaults(args)
    try:
        args.func(args)
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (DomainError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
