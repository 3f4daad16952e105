"""Named verification batteries run by ``superclifford suite``."""

from __future__ import annotations

import math
import random
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from ..algebra import Dims, GaussQ, SuperExpr
from ..distributions import (
    TestFunction,
    default_tests,
    fp_pair,
    fp_pair_limit,
    fp_pair_rp,
    half_line_delta,
    pair_origin_delta,
    verify_kernel_derivatives,
    verify_spherical_props,
)
from ..integration import (
    PhaseFunction,
    QuadratureSpec,
    bm_evaluate,
    classical_bm_check,
    cp_check,
    domain_integral,
    evaluate_at,
    koppelman_check,
    stokes_check,
    surface_integral,
)
from ..operators import (
    bivectors,
    dirac,
    gen,
    hermitian_dirac,
    hermitian_vars,
    is_monogenic,
    laplacian,
    nu1,
    sgen,
    supervector,
    twisted_dirac,
    witt,
)
from ..sampling import random_poly
from ..spinor import check_equivalence, independence_checks
from .parser import parse

__all__ = ["SuiteConfig", "CaseResult", "SuiteReport", "SUITES", "run_suite"]


@dataclass
class SuiteConfig:
    dims: tuple[int, int] | None = None
    R: Fraction = Fraction(1)
    quad: QuadratureSpec = field(default_factory=lambda: QuadratureSpec(error_estimate=False))
    tol: float = 1e-6
    seed: int = 20240

    def echo(self) -> dict:
        return {
            "dims": list(self.dims) if self.dims else None,
            "phase": f"supersphere:{self.R}",
            "quadrature": asdict(self.quad),
        }


@dataclass
class CaseResult:
    name: str
    status: str
    expected: str
    actual: str
    abs_err: float | None
    runtime_ms: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class SuiteReport:
    suite: str
    config: dict
    cases: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.status == "pass" for c in self.cases)

    def as_dict(self) -> dict:
        return {"suite": self.suite, "config": self.config, "cases": [c.as_dict() for c in self.cases]}

    def text(self) -> str:
        lines = [f"suite {self.suite}"]
        for c in self.cases:
            err = "" if c.abs_err is None else f"  err={c.abs_err:.3g}"
            lines.append(f"  {c.status.upper():4s} {c.name}{err}")
            if c.status != "pass":
                lines.append(f"       expected {c.expected}")
                lines.append(f"       actual   {c.actual}")
        n_ok = sum(c.status == "pass" for c in self.cases)
        lines.append(f"{n_ok}/{len(self.cases)} passed")
        return "\n".join(lines)


def _run(name: str, fn: Callable) -> CaseResult:
    t0 = time.perf_counter()
    try:
        ok, expected, actual, err = fn()
        status = "pass" if ok else "fail"
    except Exception as exc:  # a crashing case is a failing case
        status, expected, actual, err = "fail", "no error", f"{type(exc).__name__}: {exc}", None
    ms = (time.perf_counter() - t0) * 1e3
    return CaseResult(name, status, str(expected), str(actual), None if err is None else float(err), ms)


def _exact(lhs: SuperExpr, rhs: SuperExpr):
    ok = lhs == rhs
    return ok, rhs.render(), lhs.render(), 0.0 if ok else (lhs.to_float() - rhs.to_float()).max_abs()


def _all_zero(exprs, label="0"):
    bad = [e for e in exprs if not e.is_zero()]
    return not bad, label, "0" if not bad else bad[0].render(), 0.0 if not bad else bad[0].to_float().max_abs()


def _within(value: complex, expected: complex, tol: float):
    err = abs(value - expected)
    return err <= tol, f"{expected:.12g}", f"{value:.12g}", err


# ------------------------------------------------------------------ algebra
_ALGEBRA_DIMS = ((2, 1), (3, 1), (3, 2))


def _generator_table(d: Dims):
    out = []
    p, n2 = d.p, 2 * d.n
    for j in range(1, p + 1):
        for k in range(1, p + 1):
            want = SuperExpr.const(d, -2 if j == k else 0)
            out.append(gen(d, j) * gen(d, k) + gen(d, k) * gen(d, j) - want)
        for k in range(1, n2 + 1):
            out.append(gen(d, j) * sgen(d, k) + sgen(d, k) * gen(d, j))
    for j in range(1, n2 + 1):
        for k in range(1, n2 + 1):
            g = 0
            if j % 2 and k == j + 1:
                g = 1
            elif k % 2 and j == k + 1:
                g = -1
            out.append(sgen(d, j) * sgen(d, k) - sgen(d, k) * sgen(d, j) - SuperExpr.const(d, g))
    return out


def _witt_rules(d: Dims):
    m, n = d.m, d.n
    f = {k: [witt(d, k, j) for j in range(1, (m if k in ("f", "fd") else n) + 1)] for k in ("f", "fd", "fg", "fgd")}
    out = []

    def anti(a, b):
        return a * b + b * a

    def comm(a, b):
        return a * b - b * a

    for j in range(m):
        for k in range(m):
            out.append(anti(f["f"][j], f["f"][k]))
            out.append(anti(f["fd"][j], f["fd"][k]))
            out.append(anti(f["f"][j], f["fd"][k]) - SuperExpr.const(d, 1 if j == k else 0))
    for j in range(n):
        for k in range(n):
            out.append(comm(f["fg"][j], f["fg"][k]))
            out.append(comm(f["fgd"][j], f["fgd"][k]))
            out.append(comm(f["fg"][j], f["fgd"][k]) + SuperExpr.const(d, GaussQ(0, Fraction(1, 2)) if j == k else 0))
    for j in range(m):
        for k in range(n):
            for a in (f["f"][j], f["fd"][j]):
                for b in (f["fg"][k], f["fgd"][k]):
                    out.append(anti(a, b))
    return out


def _algebra_cases(d: Dims, cfg: SuiteConfig) -> list:
    tag = f"({d.m},{d.n})"
    rng = random.Random(cfg.seed)
    polys = [random_poly(d, rng, terms=4, degree=3, clifford=True) for _ in range(4)]
    x = supervector(d)
    Z, Zd = hermitian_vars(d)
    _bb, _bf, B = bivectors(d)

    def two_dirac():
        return _all_zero([dirac(dirac(F)) + laplacian(F) for F in polys])

    def anti_dirac():
        return _all_zero([dirac(twisted_dirac(F)) + twisted_dirac(dirac(F)) for F in polys])

    def dz_square():
        return _all_zero(
            [hermitian_dirac(hermitian_dirac(F, w), w) for F in polys for w in ("Z", "Zdag")]
        )

    def herm_laplace():
        return _all_zero(
            [
                (hermitian_dirac(hermitian_dirac(F, "Zdag"), "Z") + hermitian_dirac(hermitian_dirac(F, "Z"), "Zdag")).scale(4)
                - laplacian(F)
                for F in polys
            ]
        )

    return [
        (f"generator table {tag}", lambda: _all_zero(_generator_table(d))),
        (f"Witt rules {tag}", lambda: _all_zero(_witt_rules(d))),
        (f"dx[x] = M {tag}", lambda: _exact(dirac(x), SuperExpr.const(d, d.M))),
        (f"dx^2 = -laplacian {tag}", two_dirac),
        (f"{{dx, dJx}} = 0 {tag}", anti_dirac),
        (f"dx[J(x)] = 2B {tag}", lambda: _exact(dirac(x.apply_J()), B.scale(2))),
        (f"Z^2 = Zdag^2 = 0 {tag}", lambda: _all_zero([Z * Z, Zd * Zd])),
        (f"{{Z, Zdag}} = |x|^2 {tag}", lambda: _exact(Z * Zd + Zd * Z, -(x * x))),
        (f"dZ^2 = dZdag^2 = 0 {tag}", dz_square),
        (f"4{{dZ, dZdag}} = laplacian {tag}", herm_laplace),
    ]


def suite_algebra(cfg: SuiteConfig) -> list:
    dims = [cfg.dims] if cfg.dims else _ALGEBRA_DIMS
    cases = []
    for mn in dims:
        cases += _algebra_cases(Dims.herm(*mn), cfg)
    return cases


# ------------------------------------------------------------------ kernels
def suite_kernels(cfg: SuiteConfig) -> list:
    cases = []
    for p in range(2, 7):
        for n in range(0, 3):
            d = Dims(p, n)
            if d.M <= 0 and d.M % 2 == 0:
                continue
            cases.append((f"nu1 series = closed (p={p}, n={n})", lambda d=d: _exact(nu1(d, "series"), nu1(d, "closed"))))
            cases.append((f"dx nu1 = 0 (p={p}, n={n})", lambda d=d: (is_monogenic(nu1(d)), "0", "0" if is_monogenic(nu1(d)) else "nonzero", None)))
    herm = [cfg.dims] if cfg.dims else [(2, 1), (3, 1)]
    for mn in herm:
        d = Dims.herm(*mn)
        tag = f"({d.m},{d.n})"
        cache: dict = {}

        def report(d=d, cache=cache):
            if "r" not in cache:
                cache["r"] = verify_kernel_derivatives(d)
            return cache["r"]

        def smooth(report=report):
            bad = [k for k, v in report()["smooth"].items() if not v]
            return not bad, "all smooth residues 0", "ok" if not bad else ", ".join(bad), None

        def delta(report=report):
            bad = [k for k, v in report()["delta"].items() if not v.ok]
            return not bad, "delta coefficients recovered", "ok" if not bad else ", ".join(bad), None

        def matrix(report=report, d=d):
            m = report()["matrix"]
            ok = all(m.values()) and len(default_tests(d)) >= 5
            return ok, "D Psi-matrix = delta I2", str(m), None

        cases += [
            (f"kernel smooth parts {tag}", smooth),
            (f"kernel delta terms {tag}", delta),
            (f"matrix fundamental solution {tag}", matrix),
        ]
    return cases


# ------------------------------------------------------------ distributions
def suite_distributions(cfg: SuiteConfig) -> list:
    cases = []
    phi = TestFunction.exp_decay()
    cases.append(("Fp t^-1 against exp(-t)", lambda: _within(fp_pair(-1, phi), -np.euler_gamma, 1e-6)))
    cases.append(("Fp t^-1 limit route", lambda: _within(fp_pair_limit(-1, phi), -np.euler_gamma, 1e-6)))
    bump = TestFunction.bump("1+t+t**2")
    for mu in (Fraction(-1, 2), Fraction(-1), Fraction(-5, 2)):
        cases.append(
            (f"Fp shift t*Fp t^{mu} = Fp t^{mu + 1}", lambda mu=mu: _within(fp_pair(mu, bump.times_power(1)), fp_pair(mu + 1, bump), 1e-8))
        )
    poly = TestFunction.bump("1+2*t+t**3")
    for k in (0, 1):
        def deriv(k=k):
            lhs = -fp_pair(-k, poly.derivative())
            rhs = -k * fp_pair(-k - 1, poly) + (-1) ** k / math.factorial(k) * half_line_delta(k, poly.taylor(k + 1))
            return _within(lhs, rhs, 1e-8)

        cases.append((f"Fp derivative rule k={k}", deriv))
    rng = random.Random(cfg.seed)
    for p in (2, 3, 4):
        d = Dims(p, 0)
        phis = [random_poly(d, rng, terms=4, degree=6, clifford=True) for _ in range(5)]

        def props(phis=phis):
            rep = verify_spherical_props(phis)
            bad = [k for k, v in rep.items() if not v]
            return not bad, "i-vii hold", "ok" if not bad else ", ".join(bad), None

        cases.append((f"spherical mean properties p={p}", props))
    d = Dims.herm(2, 1)
    tests = [random_poly(d, rng, terms=5, degree=3, clifford=True) for _ in range(3)]
    cases.append(
        (
            "origin delta: substitution = Berezin route",
            lambda: _all_zero([pair_origin_delta(t, "substitute") - pair_origin_delta(t, "berezin") for t in tests]),
        )
    )
    cases.append(("origin delta normalization", lambda: _exact(pair_origin_delta(SuperExpr.one(d)), SuperExpr.one(d))))
    p0 = SuperExpr.var(Dims(3, 0), 1) ** 2 + SuperExpr.one(Dims(3, 0))
    for lam in (Fraction(-1, 2), Fraction(-7, 2)):
        cases.append(
            (f"Fp |x|^{lam} two routes", lambda lam=lam: _within(fp_pair_rp(lam, p0, method="split"), fp_pair_rp(lam, p0, method="limit"), 1e-6))
        )
    return cases


# -------------------------------------------------------------- integration
STOKES_BATTERY = (
    ("1", "1"),
    ("1", "x1"),
    ("x1", "x2"),
    ("z1", "zc1"),
    ("zg1", "zgc1"),
    ("x1*xg1", "x2"),
    ("x1^2", "xg1*xg2"),
    ("e1*x1", "x3"),
    ("zc1*zg1", "z2"),
    ("x4*eg1", "x1*x2 + xg2"),
)

BM_FUNCTIONS = ("1", "z1", "z2", "z1^2", "z1*z2", "z1*zg1", "z2^2*zg1")
BM_POINTS = ((0.2, 0.0, 0.1, 0.0), (0.0, 0.3, 0.0, -0.2))
EXTERIOR = (3.0, 0.0, 0.0, 0.0)


def _supersphere(cfg: SuiteConfig) -> PhaseFunction:
    return PhaseFunction.supersphere(Dims.herm(2, 1), cfg.R)


def _bm_case(g, F, y, q, tol, exterior=False):
    res = bm_evaluate(g, F, y, q).value
    want = SuperExpr.zero(res.dims, False) if exterior else evaluate_at(F, y)
    err = (res - want.with_dims(res.dims)).max_abs()
    return err <= tol, want.render(), res.render(), err


def suite_integration(cfg: SuiteConfig) -> list:
    g = _supersphere(cfg)
    d = g.dims
    q = cfg.quad
    R = float(cfg.R)
    cases = [
        ("superball volume = pi R^2", lambda: _rel(domain_integral(g, SuperExpr.one(d), q).value, math.pi * R**2)),
        ("supersphere area = 2 pi R", lambda: _rel(surface_integral(g, SuperExpr.one(d), False, q).value, 2 * math.pi * R)),
        ("oriented integral of 1 = 0", lambda: _abs(surface_integral(g, SuperExpr.one(d), True, q).value, cfg.tol)),
    ]
    for F, G in STOKES_BATTERY:
        for variant in ("plain", "twisted", "Z", "Zdag"):
            def stokes(F=F, G=G, variant=variant):
                r = stokes_check(g, parse(F, d), parse(G, d), variant, q, cfg.tol)
                return r.passed, "lhs = rhs", r.values["lhs"].render(), r.residual

            cases.append((f"Stokes {variant} F={F} G={G}", stokes))
    for F in BM_FUNCTIONS:
        for y in BM_POINTS:
            cases.append((f"BM F={F} y={y}", lambda F=F, y=y: _bm_case(g, parse(F, d), y, q, cfg.tol)))
    cases.append(("BM exterior F=z1", lambda: _bm_case(g, parse("z1", d), EXTERIOR, q, cfg.tol, True)))

    def classical(m, f, u, tol):
        def run():
            r = classical_bm_check(m, parse(f, Dims.herm(m, 0)), u, 1, q, tol)
            return r.passed, f"{r.values['expected']:.12g}", f"engine {r.values['engine']:.12g}, classical {r.values['classical']:.12g}", r.residual

        return run

    cases.append(("classical m=1 f=z1^2 u=0.3", classical(1, "z1^2", (0.3, 0.0), 1e-8)))
    cases.append(("classical m=2 f=z1*z2", classical(2, "z1*z2", (0.2, 0.1, -0.3, 0.25), 1e-6)))

    def cp(y, exterior=False):
        def run():
            r = cp_check(g, parse("zc1", d), y, q, 1e-4)
            return r.passed, "0" if exterior else r.values["expected"].a.render(), r.values["value"].a.render(), r.residual

        return run

    cases.append(("Cauchy-Pompeiu G=zc1 interior", cp(BM_POINTS[0])))
    cases.append(("Cauchy-Pompeiu G=zc1 exterior", cp(EXTERIOR, True)))

    def koppelman():
        r = koppelman_check(g, parse("zc1", d), BM_POINTS[0], q, 1e-3)
        return r.passed, r.values["expected"].a.render(), r.values["total"].a.render(), r.residual

    cases.append(("Koppelman G=zc1 interior", koppelman))
    cases += _reparam_cases(g, cfg)
    return cases


def _reparam_cases(g: PhaseFunction, cfg: SuiteConfig) -> list:
    d = g.dims
    q = cfg.quad
    h = SuperExpr.one(d) + (SuperExpr.fvar(d, 1) * SuperExpr.fvar(d, 2)).scale(Fraction(1, 2))
    hg = g.reparametrize(h)

    def same(fn):
        def run():
            a, b = fn(g), fn(hg)
            err = (a.to_float() - b.to_float()).max_abs()
            return err <= cfg.tol, a.render(), b.render(), err

        return run

    out = [
        ("reparametrized volume", same(lambda ph: domain_integral(ph, SuperExpr.one(d), q).value)),
        ("reparametrized area", same(lambda ph: surface_integral(ph, SuperExpr.one(d), False, q).value)),
    ]
    for F, G in STOKES_BATTERY[:4]:
        out.append(
            (f"reparametrized Stokes F={F} G={G}", same(lambda ph, F=F, G=G: stokes_check(ph, parse(F, d), parse(G, d), "plain", q).values["rhs"]))
        )
    for F in BM_FUNCTIONS[::3]:
        out.append((f"reparametrized BM F={F}", same(lambda ph, F=F: bm_evaluate(ph, parse(F, d), BM_POINTS[0], q).value)))
    return out


def _rel(value: SuperExpr, expected: float):
    v = complex(value.to_float().scalar_value())
    err = abs(v - expected) / abs(expected)
    return err <= 1e-8, f"{expected:.12g}", f"{v:.12g}", err


def _abs(value: SuperExpr, tol: float):
    err = value.to_float().max_abs()
    return err <= tol, "0", value.render(), err


# ------------------------------------------------------------------- spinor
def _random_holomorphic(d: Dims, rng: random.Random) -> SuperExpr:
    atoms = [f"z{j}" for j in range(1, d.m + 1)] + [f"zg{k}" for k in range(1, d.n + 1)]
    terms = []
    for _ in range(rng.randint(1, 4)):
        c = f"({rng.randint(-5, 5)}/{rng.randint(1, 4)}+{rng.randint(0, 3)}*i)"
        facs = [rng.choice(atoms) for _ in range(rng.randint(0, 3))]
        terms.append("*".join([c] + facs))
    return parse(" + ".join(terms), d)


def _inject(F: SuperExpr, d: Dims, rng: random.Random) -> SuperExpr:
    bad = rng.choice([f"zc{rng.randint(1, d.m)}"] + [f"zgc{rng.randint(1, d.n)}"] * (d.n > 0))
    base = F + SuperExpr.const(d, rng.randint(1, 3))
    if base.is_zero():
        base = SuperExpr.one(d)
    # (F + c) * conj: the conjugate factor survives because F + c has a nonzero body term
    return base * parse(bad, d)


def equivalence_battery(d: Dims, count: int, seed: int) -> list:
    """``count`` polynomials, even positions holomorphic, odd ones with an injected conjugate factor."""
    rng = random.Random(seed)
    out = []
    for k in range(count):
        F = _random_holomorphic(d, rng)
        out.append((F, True) if k % 2 == 0 else (_inject(F, d, rng), False))
    return out


def suite_spinor(cfg: SuiteConfig) -> list:
    dims = [cfg.dims] if cfg.dims else [(2, 1), (3, 2)]
    cases = []
    for mn in dims:
        d = Dims.herm(*mn)
        tag = f"({d.m},{d.n})"

        def equivalence(d=d):
            battery = equivalence_battery(d, 200, cfg.seed)
            bad = 0
            for F, hol in battery:
                r = check_equivalence(F)
                bad += not (r["agree"] and r["holomorphic"] == hol)
            return bad == 0, "200/200 agree", f"{200 - bad}/200 agree", float(bad)

        def independence(d=d):
            r = independence_checks(d)
            ok = all(rank == count for rank, count in r.values())
            return ok, "full rank", str(r), None

        cases += [(f"holomorphic <=> sh-monogenic {tag}", equivalence), (f"Witt family independence {tag}", independence)]
    return cases


SUITES = {
    "algebra": suite_algebra,
    "kernels": suite_kernels,
    "distributions": suite_distributions,
    "integration": suite_integration,
    "spinor": suite_spinor,
}


def run_suite(name: str, cfg: SuiteConfig | None = None) -> SuiteReport:
    cfg = cfg or SuiteConfig()
    if name == "all":
        report = SuiteReport("all", cfg.echo())
        for sub in SUITES:
            report.cases += [
                CaseResult(f"{sub}/{c.name}", c.status, c.expected, c.actual, c.abs_err, c.runtime_ms)
                for c in run_suite(sub, cfg).cases
            ]
        return report
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    report = SuiteReport(name, cfg.echo())
    report.cases = [_run(case_name, fn) for case_name, fn in SUITES[name](cfg)]
    return report
