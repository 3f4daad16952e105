"""``superclifford`` command: suites, integrals, Bochner-Martinelli and Cauchy-Pompeiu."""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from fractions import Fraction
from importlib import resources

import jsonschema

from ..algebra import Dims, SuperExpr
from ..integration import (
    PhaseFunction,
    QuadratureSpec,
    bm_evaluate,
    cp_check,
    domain_integral,
    evaluate_at,
    surface_integral,
)
from .parser import ParseError, parse
from .suites import SUITES, CaseResult, SuiteConfig, SuiteReport, run_suite

__all__ = ["main", "build_parser", "cmd_integrate", "cmd_bm", "cmd_cp", "load_schema", "write_json"]


def load_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("report.schema.json").read_text())


def write_json(report: SuiteReport, path: str):
    data = report.as_dict()
    jsonschema.validate(data, load_schema())
    text = json.dumps(data, indent=2, sort_keys=True)
    if path == "-":
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


# --------------------------------------------------------------- arguments
def _dims(text: str) -> tuple[int, int]:
    try:
        m, n = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("--dims takes m,n") from None
    if m < 1 or n < 0:
        raise argparse.ArgumentTypeError("--dims needs m >= 1 and n >= 0")
    return m, n


def _phase(text: str) -> tuple[str, Fraction]:
    kind, _, radius = text.partition(":")
    if kind not in ("supersphere", "bosonic") or not radius:
        raise argparse.ArgumentTypeError("--phase takes supersphere:R or bosonic:R")
    try:
        R = Fraction(radius)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad radius {radius!r}") from None
    if R <= 0:
        raise argparse.ArgumentTypeError("radius must be positive")
    return kind, R


def _point(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("--y takes comma separated numbers") from None


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("value must be positive")
    return v


def _common(p: argparse.ArgumentParser, dims_default=None):
    p.add_argument("--dims", type=_dims, default=dims_default, help="m,n (complex bosonic, fermionic pairs)")
    p.add_argument("--phase", type=_phase, default=("supersphere", Fraction(1)), help="supersphere:R or bosonic:R")
    p.add_argument("--R", type=Fraction, default=None, help="radius (overrides the one in --phase)")
    p.add_argument("--tol", type=_positive, default=None, help="pass tolerance")
    p.add_argument("--json", metavar="PATH", default=None, help="write the JSON report ('-' for stdout)")
    p.add_argument("--threads", type=int, default=1, help="quadrature workers (results do not depend on it)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="superclifford", description="Clifford analysis in superspace: checks and integrals.")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("suite", help="run a verification suite")
    s.add_argument("name", choices=list(SUITES) + ["all"])
    _common(s)

    i = sub.add_parser("integrate", help="domain or surface integral over a super ball/sphere")
    _common(i, (2, 1))
    i.add_argument("--mode", choices=("domain", "surface", "oriented"), default="domain")
    i.add_argument("--integrand", default="1", help="expression, e.g. 'x1^2*xg1*xg2'")
    i.add_argument("--expect", default=None, help="expected value as an expression")

    b = sub.add_parser("bm", help="Bochner-Martinelli formula at a point")
    _common(b, (2, 1))
    b.add_argument("--F", required=True, help="holomorphic expression in z, zg")
    b.add_argument("--y", type=_point, required=True, help="bosonic evaluation point")

    c = sub.add_parser("cp", help="Cauchy-Pompeiu formula at a point")
    _common(c, (2, 1))
    c.add_argument("--G", required=True, help="expression for the diagonal entry of the matrix function")
    c.add_argument("--y", type=_point, required=True, help="bosonic evaluation point")
    return ap


def _quad(args) -> QuadratureSpec:
    q = QuadratureSpec(error_estimate=False, threads=max(1, args.threads))
    if args.tol is not None:
        q = replace(q, tol=min(q.tol, args.tol))
    return q


def _phase_function(args) -> PhaseFunction:
    kind, R = args.phase
    if args.R is not None:
        R = args.R
    d = Dims.herm(*args.dims)
    return PhaseFunction.supersphere(d, R) if kind == "supersphere" else PhaseFunction.ball(d, R)


def _config(args, g: PhaseFunction) -> dict:
    return {"dims": list(args.dims), "phase": f"{g.family}:{g.R}", "quadrature": _quad(args).__dict__.copy()}


def _single(suite: str, args, g, name: str, fn) -> SuiteReport:
    # invalid inputs raise and end up as usage errors in main()
    t0 = time.perf_counter()
    ok, expected, actual, err = fn()
    status = "pass" if ok else "fail"
    case = CaseResult(name, status, expected, actual, err, (time.perf_counter() - t0) * 1e3)
    return SuiteReport(suite, _config(args, g), [case])


# ---------------------------------------------------------------- commands
def cmd_integrate(args) -> SuiteReport:
    g = _phase_function(args)
    d = g.dims
    F = parse(args.integrand, d)
    q = _quad(args)
    tol = args.tol if args.tol is not None else 1e-8

    def run():
        if args.mode == "domain":
            res = domain_integral(g, F, q)
        else:
            res = surface_integral(g, F, args.mode == "oriented", q)
        value = res.value
        if args.expect is None:
            return res.est_err <= tol, "(no expectation)", value.render(), res.est_err
        want = parse(args.expect, d).with_dims(value.dims)
        err = (value.to_float() - want.to_float()).max_abs()
        return err <= tol, want.to_float().render(), value.to_float().render(), err

    return _single("integrate", args, g, f"{args.mode} integral of {args.integrand}", run)


def cmd_bm(args) -> SuiteReport:
    g = _phase_function(args)
    F = parse(args.F, g.dims)
    tol = args.tol if args.tol is not None else 1e-6

    def run():
        value = bm_evaluate(g, F, args.y, _quad(args)).value
        interior = g.body_value(args.y) < 0
        want = evaluate_at(F, args.y) if interior else SuperExpr.zero(value.dims, False)
        err = (value - want.with_dims(value.dims)).max_abs()
        return err <= tol, want.render(), value.render(), err

    return _single("bm", args, g, f"Bochner-Martinelli F={args.F} y={','.join(map(str, args.y))}", run)


def cmd_cp(args) -> SuiteReport:
    g = _phase_function(args)
    G = parse(args.G, g.dims)
    tol = args.tol if args.tol is not None else 1e-4

    def run():
        r = cp_check(g, G, args.y, _quad(args), tol)
        v, e = r.values["value"], r.values["expected"]
        return r.passed, f"[{e.a.render()}, {e.b.render()}]", f"[{v.a.render()}, {v.b.render()}]", r.residual

    return _single("cp", args, g, f"Cauchy-Pompeiu G={args.G} y={','.join(map(str, args.y))}", run)


def cmd_suite(args) -> SuiteReport:
    R = args.R if args.R is not None else args.phase[1]
    quad = _quad(args)
    cfg = SuiteConfig(dims=args.dims, R=R, quad=quad)
    if args.tol is not None:
        cfg.tol = args.tol
    return run_suite(args.name, cfg)


_COMMANDS = {"suite": cmd_suite, "integrate": cmd_integrate, "bm": cmd_bm, "cp": cmd_cp}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        report = _COMMANDS[args.command](args)
    except (ParseError, ValueError, IndexError, ZeroDivisionError) as exc:
        ap.print_usage(sys.stderr)
        print(f"superclifford: error: {exc}", file=sys.stderr)
        return 2
    print(report.text())
    if args.json:
        write_json(report, args.json)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
