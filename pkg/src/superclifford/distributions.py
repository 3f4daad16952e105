"""Distributional calculus on the half-line, in R^p and in superspace.

Half-line finite parts are evaluated numerically by Taylor subtraction.  The
superspace pairings used to identify delta terms are exact: test functions
are polynomial superfunctions times a radial cutoff chi(|x|) that equals 1
near the origin, and every radial integral is kept as an abstract symbol

    F(nu) = Fp int_0^oo r^nu chi(r) dr,

so a pairing is a finite combination of such symbols plus a constant.  The
symbols are linearly independent over the cutoff class; matching constant
parts recovers the coefficient of a delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np
import sympy as sp
from scipy import integrate

from .algebra import Dims, GaussQ, Scalar, SuperExpr, gamma_half
from .operators import (
    bivectors,
    bosonic_vector,
    dirac,
    dirac_terms,
    fermionic_vector,
    hermitian_dirac,
    hermitian_terms,
    hermitian_vars,
    psi_kernels,
    sphere_area,
    super_pow,
    supervector,
    twisted_dirac,
    twisted_terms,
)
from .quadrature import sphere_rule, unit_sphere_area

__all__ = [
    "FpExponent",
    "TestFunction",
    "SampledTestFunction",
    "fp_pair",
    "fp_pair_limit",
    "half_line_delta",
    "sphere_moment",
    "spherical_mean",
    "spherical_mean_numeric",
    "radial_derivative",
    "verify_spherical_props",
    "fp_pair_rp",
    "CutoffTest",
    "MomentValue",
    "pair_cutoff",
    "pair_derivative",
    "origin_value",
    "bosonic_origin_value",
    "pair_origin_delta",
    "pair_delta_derivative",
    "recover_delta",
    "verify_kernel_derivatives",
    "default_tests",
    "LevelSetDistribution",
    "delta_expand",
    "heaviside_expand",
    "RadialDistribution",
    "fp_super_expansion",
    "PointDelta",
    "KernelDistribution",
    "RestrictedKernel",
    "UnsupportedProduct",
    "restricted_product",
]

_I = GaussQ(0, 1)
_T = sp.Symbol("t", real=True)


# ===================================================================== half-line
@dataclass(frozen=True)
class FpExponent:
    """Exponent of Fp t^mu_+ with its case tag."""

    mu: Fraction

    def __post_init__(self):
        object.__setattr__(self, "mu", Fraction(self.mu))

    @property
    def case(self) -> str:
        if self.mu > -1:
            return "regular"
        return "negintegral" if self.mu.denominator == 1 else "noninteger"

    @property
    def k(self) -> int:
        """Number of Taylor terms that need regularizing."""
        return 0 if self.mu > -1 else math.floor(-self.mu)


def _series(expr, n: int) -> list[float]:
    if n <= 0:
        return []
    s = sp.series(expr, _T, 0, n).removeO()
    poly = sp.Poly(s, _T)
    out = [0.0] * n
    for (deg,), c in poly.terms():
        if deg < n:
            out[deg] = float(c)
    return out


class TestFunction:
    """phi(t) = R(t) exp(h(t)) on [0, support), with R and h analytic at 0.

    ``support=None`` means rapid decay on the whole half-line.
    """

    __test__ = False

    def __init__(self, prefactor=1, exponent=0, support: float | None = None, name: str = ""):
        self.R = sp.sympify(prefactor, locals={"t": _T})
        self.h = sp.sympify(exponent, locals={"t": _T})
        self.support = support
        self.name = name or str(self.R * sp.exp(self.h))
        self._fn = sp.lambdify(_T, self.R * sp.exp(self.h), "numpy")
        self._taylor: list[float] = []

    @classmethod
    def exp_decay(cls, poly=1) -> "TestFunction":
        return cls(poly, -_T, None, f"({poly})*exp(-t)")

    @classmethod
    def gaussian(cls, poly=1) -> "TestFunction":
        return cls(poly, -_T**2, None, f"({poly})*exp(-t^2)")

    @classmethod
    def bump(cls, poly=1) -> "TestFunction":
        """poly(t) exp(-1/(1-t^2)) on [0, 1)."""
        return cls(poly, -1 / (1 - _T**2), 1.0, f"({poly})*bump(t)")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.support is None:
            return np.broadcast_to(np.asarray(self._fn(t), dtype=float), t.shape).copy()
        out = np.zeros_like(t)
        inside = t < self.support
        if np.any(inside):
            out[inside] = np.broadcast_to(np.asarray(self._fn(t[inside]), dtype=float), t[inside].shape)
        return out

    def taylor(self, n: int) -> list[float]:
        """First n Taylor coefficients at 0."""
        if len(self._taylor) >= n:
            return self._taylor[:n]
        r = _series(self.R, n)
        hc = _series(self.h, n)
        # exp(h): e' = h' e, so k e_k = sum_{i>=1} i h_i e_{k-i}
        e = [math.exp(hc[0])] + [0.0] * (n - 1)
        for k in range(1, n):
            e[k] = sum(i * hc[i] * e[k - i] for i in range(1, k + 1)) / k
        self._taylor = [sum(r[i] * e[k - i] for i in range(k + 1)) for k in range(n)]
        return self._taylor[:n]

    def derivative(self) -> "TestFunction":
        R2 = sp.simplify(sp.diff(self.R, _T) + self.R * sp.diff(self.h, _T))
        return TestFunction(R2, self.h, self.support, f"d/dt[{self.name}]")

    def times_power(self, k: int = 1) -> "TestFunction":
        return TestFunction(self.R * _T**k, self.h, self.support, f"t^{k}*{self.name}")


class SampledTestFunction:
    """Test function given by a vectorized callable and known Taylor data."""

    def __init__(self, fn: Callable, taylor: list[float], support: float | None = None, name: str = ""):
        self._fn = fn
        self._coeffs = list(taylor)
        self.support = support
        self.name = name

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.asarray(self._fn(t), dtype=float)
        if self.support is not None:
            out = np.where(t < self.support, out, 0.0)
        return out

    def taylor(self, n: int) -> list[float]:
        if n > len(self._coeffs):
            raise ValueError(f"only {len(self._coeffs)} Taylor coefficients known")
        return self._coeffs[:n]


def _fp01(nu: Fraction) -> float:
    """Fp int_0^1 t^nu dt."""
    return 0.0 if nu == -1 else 1.0 / float(nu + 1)


def _quad(fn, a, b, tol):
    val, _err = integrate.quad(fn, a, b, epsabs=tol, epsrel=tol, limit=400)
    return val


def fp_pair(mu, phi, *, split: float = 0.125, extra_terms: int = 40, tol: float = 1e-13) -> float:
    """<Fp t^mu_+, phi> by subtracting the Taylor polynomial of phi at 0.

    [0, split] uses the Taylor series of the remainder term by term,
    [split, 1] integrates t^mu (phi - T_k) by quadrature, the subtracted
    monomials contribute their closed-form finite parts on [0, 1], and the
    tail [1, oo) is integrated directly.
    """
    e = mu if isinstance(mu, FpExponent) else FpExponent(mu)
    K = e.k
    m = float(e.mu)
    c = phi.taylor(K + extra_terms)
    near = sum(c[j] * split ** (m + j + 1) / (m + j + 1) for j in range(K, len(c)))
    low = c[:K]

    def remainder(t):
        poly = sum(cj * t**j for j, cj in enumerate(low))
        return t**m * (float(phi(np.array([t]))[0]) - poly)

    mid = _quad(remainder, split, 1.0, tol)
    poly_part = sum(low[j] * _fp01(e.mu + j) for j in range(K))
    tail = 0.0
    end = math.inf if phi.support is None else phi.support
    if end > 1.0:
        tail = _quad(lambda t: t**m * float(phi(np.array([t]))[0]), 1.0, end, tol)
    if not math.isfinite(tail):
        raise ValueError("non-convergent tail")
    return near + mid + poly_part + tail


def fp_pair_limit(mu, phi, *, eps0: float = 0.05, levels: int = 7, tol: float = 1e-13) -> float:
    """<Fp t^mu_+, phi> from the defining epsilon-limit, Richardson-extrapolated.

    This is the independent cross-check for :func:`fp_pair`.
    """
    e = mu if isinstance(mu, FpExponent) else FpExponent(mu)
    K = e.k
    m = float(e.mu)
    c = phi.taylor(max(K, 1))
    end = math.inf if phi.support is None else phi.support
    f = lambda t: t**m * float(phi(np.array([t]))[0])  # noqa: E731
    tail = _quad(f, 1.0, end, tol) if end > 1.0 else 0.0

    def E(eps):
        val = _quad(f, eps, min(1.0, end), tol) + tail
        for j in range(1, K + 1):
            if e.mu + j == 0:
                val += c[j - 1] * math.log(eps)
            else:
                val += c[j - 1] * eps ** (m + j) / (m + j)
        return val

    vals = [E(eps0 / 2**i) for i in range(levels)]
    for i in range(levels - 1):
        p = m + K + 1 + i
        f2 = 2.0**p
        vals = [(f2 * vals[j + 1] - vals[j]) / (f2 - 1) for j in range(len(vals) - 1)]
    return vals[0]


def half_line_delta(k: int, taylor: list) -> complex:
    """<delta^(k)(t), psi> = (-1)^k psi^(k)(0) from Taylor coefficients."""
    return (-1) ** k * math.factorial(k) * taylor[k]


# ============================================================= spherical means
@lru_cache(maxsize=None)
def sphere_moment(beta: tuple) -> Scalar:
    """int_{S^{p-1}} w^beta dS as an exact Scalar."""
    if any(b % 2 for b in beta):
        return Scalar()
    p = len(beta)
    num_q, num_k = Fraction(2), 0
    for b in beta:
        q, k = gamma_half(Fraction(b + 1, 2))
        num_q *= q
        num_k += k
    q, k = gamma_half(Fraction(sum(beta) + p, 2))
    return Scalar({num_k - k: GaussQ(num_q / q)})


def _check_p(d: Dims):
    if d.p < 2:
        raise ValueError("spherical means need p >= 2")


def _mean0(phi: SuperExpr) -> SuperExpr:
    d = phi.dims
    inv_area = sphere_area(d.p, 0).inverse()
    zero = (0,) * d.p
    out = SuperExpr.zero(d)
    for (g, o, s, a, l, pp), c in phi.terms.items():
        mom = sphere_moment(a)
        if not mom:
            continue
        term = SuperExpr(d, {(g, o, s, zero, l + sum(a), pp): c})
        out = out + term.scale(mom * inv_area)
    return out


def spherical_mean(phi: SuperExpr, order: int = 0) -> SuperExpr:
    """Exact generalized spherical mean of a radial-polynomial superfunction.

    The result is a SuperExpr whose bodies are pure |x|-powers, read as
    functions of r.
    """
    d = phi.dims
    _check_p(d)
    if not phi.exact:
        raise ValueError("exact spherical means need an exact expression")
    if order == 0:
        return _mean0(phi)
    if order != 1:
        raise ValueError("order must be 0 or 1")
    out = SuperExpr.zero(d)
    rinv = SuperExpr.radial(d, -1)
    for j in range(1, d.p + 1):
        out = out + SuperExpr.gen(d, j) * _mean0(SuperExpr.var(d, j) * phi) * rinv
    return out


def spherical_mean_numeric(fn: Callable, p: int, r, order: int = 0, degree: int = 24) -> np.ndarray:
    """Numeric spherical means of a vectorized scalar function ``fn(points)``.

    Order 0 returns an array over ``r``; order 1 returns shape (len(r), p),
    the coefficients of e_1..e_p.
    """
    if p < 2:
        raise ValueError("spherical means need p >= 2")
    W, w = sphere_rule(p, degree)
    area = w.sum()
    rs = np.atleast_1d(np.asarray(r, dtype=float))
    out = []
    for rv in rs:
        vals = np.asarray(fn(rv * W))
        if order == 0:
            out.append(np.dot(vals, w) / area)
        else:
            out.append((W * (vals * w)[:, None]).sum(axis=0) / area)
    return np.array(out)


def radial_derivative(psi: SuperExpr) -> SuperExpr:
    """d/dr of an expression in pure |x|-powers."""
    def rule(key, c):
        g, o, s, a, l, pp = key
        if any(a):
            raise ValueError("radial_derivative needs pure |x|-power bodies")
        if l:
            yield (g, o, s, a, l - 1, pp), c * GaussQ(l)

    return psi.map_terms(rule)


def _radial_taylor_pair(psi: SuperExpr, k: int) -> SuperExpr:
    """<delta^(k)(r), psi> for psi polynomial in r (exact)."""
    d = psi.dims
    out = SuperExpr.zero(d)
    zero = (0,) * d.p
    for (g, o, s, a, l, pp), c in psi.terms.items():
        if any(a) or l < 0 or l.denominator != 1:
            raise ValueError("delta pairing on the half-line needs a polynomial in r")
        if l == k:
            val = c * GaussQ((-1) ** k * math.factorial(k))
            out = out + SuperExpr(d, {(g, o, s, zero, Fraction(0), pp): val})
    return out


def bosonic_origin_value(phi: SuperExpr) -> SuperExpr:
    """phi(0, x`): bosonic evaluation at the origin (Grassmann part kept)."""
    d = phi.dims
    out = {}
    for (g, o, s, a, l, pp), c in phi.terms.items():
        if l < 0:
            raise ValueError("not evaluable at the origin")
        if any(a) or l > 0:
            continue
        out[(g, o, s, a, l, pp)] = c
    return SuperExpr(d, out, phi.exact)


def _bosonic_dirac(phi: SuperExpr) -> SuperExpr:
    out = SuperExpr.zero(phi.dims)
    for j in range(1, phi.dims.p + 1):
        out = out + SuperExpr.gen(phi.dims, j) * phi.derive_bosonic(j)
    return out


def verify_spherical_props(phis) -> dict:
    """Check the seven spherical-mean properties; returns ``{name: bool}``.

    i-iv are checked on every input; v-vii only on polynomial inputs.
    """
    res = {f"{k}": True for k in ("i", "ii", "iii", "iv", "v", "vi", "vii")}
    for phi in phis:
        d = phi.dims
        xb = bosonic_vector(d)
        r = SuperExpr.radial(d, 1)
        s0, s1 = spherical_mean(phi, 0), spherical_mean(phi, 1)
        dphi = _bosonic_dirac(phi)
        res["i"] &= spherical_mean(xb * phi, 0) == r * s1
        res["ii"] &= spherical_mean(xb * phi, 1) == -(r * s0)
        lhs3 = spherical_mean(dphi, 0)
        rhs3 = radial_derivative(s1) + SuperExpr.radial(d, -1).scale(d.p - 1) * s1
        res["iii"] &= lhs3 == rhs3
        res["iv"] &= spherical_mean(dphi, 1) == -radial_derivative(s0)
        polynomial = all(l == 0 for (_g, _o, _s, _a, l, _pp) in phi.terms)
        if polynomial:
            res["v"] &= _radial_taylor_pair(s0, 0) == bosonic_origin_value(phi)
            res["vi"] &= _radial_taylor_pair(s1, 0).is_zero()
            rhs7 = -bosonic_origin_value(dphi).scale(Fraction(1, d.p))
            res["vii"] &= _radial_taylor_pair(s1, 1) == rhs7
    return res


def fp_pair_rp(lam, phi: SuperExpr, p_decay: str = "gaussian", method: str = "split") -> complex:
    """<Fp |x|^lam, phi(x) exp(-|x|^2)> in R^p for a scalar polynomial phi.

    Reduced to the half-line through the exact spherical mean; ``method``
    selects Taylor splitting or the epsilon-limit oracle.
    """
    d = phi.dims
    if d.n or not phi.is_clifford_scalar():
        raise ValueError("fp_pair_rp takes a scalar bosonic polynomial")
    s0 = spherical_mean(phi, 0).to_float()
    poly = 0
    for (_g, _o, _s, _a, l, _pp), c in s0.terms.items():
        if l.denominator != 1 or l < 0:
            raise ValueError("need a polynomial spherical mean")
        poly += sp.nsimplify(complex(c).real) * _T ** int(l)
    tf = TestFunction(poly, -_T**2, None, "mean")
    mu = Fraction(lam) + d.p - 1
    area = unit_sphere_area(d.p)
    if method == "split":
        return area * fp_pair(mu, tf)
    if method == "limit":
        return area * fp_pair_limit(mu, tf)
    raise ValueError("method must be 'split' or 'limit'")


# ============================================================ cutoff moments
@lru_cache(maxsize=None)
def _radial_moment(nu: Fraction, j: int) -> tuple:
    """int r^nu chi^(j)(r) dr as ``((symbol, coeff), ...)``.

    Integration by parts with the Fp derivative rule; the only boundary term
    is int chi' = -chi(0) = -1.
    """
    if j == 0:
        return ((("F", nu), Fraction(1)),)
    out: dict = {}
    if nu != 0:
        for sym, q in _radial_moment(nu - 1, j - 1):
            out[sym] = out.get(sym, 0) - nu * q
    if nu == 0 and j == 1:
        out[("1",)] = out.get(("1",), 0) - 1
    return tuple((s, q) for s, q in out.items() if q)


class MomentValue:
    """Finite combination ``sum_sym coeff(sym) * sym`` with SuperExpr coefficients."""

    __slots__ = ("dims", "parts")

    def __init__(self, dims: Dims, parts: dict | None = None):
        self.dims = dims
        self.parts = {k: v for k, v in (parts or {}).items() if v}

    def add(self, sym, value: SuperExpr):
        prev = self.parts.get(sym)
        new = value if prev is None else prev + value
        if new:
            self.parts[sym] = new
        else:
            self.parts.pop(sym, None)

    def __add__(self, other: "MomentValue") -> "MomentValue":
        out = MomentValue(self.dims, dict(self.parts))
        for k, v in other.parts.items():
            out.add(k, v)
        return out

    def __neg__(self):
        return MomentValue(self.dims, {k: -v for k, v in self.parts.items()})

    def __sub__(self, other):
        return self + (-other)

    def left_mul(self, a: SuperExpr) -> "MomentValue":
        return MomentValue(self.dims, {k: a * v for k, v in self.parts.items()})

    def right_mul(self, a: SuperExpr) -> "MomentValue":
        return MomentValue(self.dims, {k: v * a for k, v in self.parts.items()})

    def constant(self) -> SuperExpr:
        return self.parts.get(("1",), SuperExpr.zero(self.dims))

    def symbolic_part(self) -> dict:
        return {k: v for k, v in self.parts.items() if k != ("1",)}

    def is_zero(self) -> bool:
        return not self.parts

    def __eq__(self, other):
        if not isinstance(other, MomentValue):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        items = ", ".join(f"{k}: {v.render()}" for k, v in sorted(self.parts.items(), key=str))
        return f"MomentValue({items})"


@dataclass(frozen=True)
class CutoffTest:
    """Test superfunction sum_j P_j(x) chi^(j)(|x|) with chi = 1 near 0."""

    parts: tuple  # ((j, SuperExpr), ...)
    name: str = ""

    @classmethod
    def of(cls, P: SuperExpr, name: str = "") -> "CutoffTest":
        return cls(((0, P),), name or P.render())

    @property
    def dims(self) -> Dims:
        return self.parts[0][1].dims

    def as_dict(self) -> dict:
        out: dict = {}
        for j, P in self.parts:
            out[j] = out[j] + P if j in out else P
        return out

    def derive(self, deriv, side: str = "left") -> "CutoffTest":
        kind, idx = deriv
        out: dict = {}

        def put(j, expr):
            if expr:
                out[j] = out[j] + expr if j in out else expr

        for j, P in self.parts:
            if kind == "x":
                put(j, P.derive_bosonic(idx))
                d = P.dims
                factor = SuperExpr.var(d, idx) * SuperExpr.radial(d, -1)
                put(j + 1, P * factor)
            else:
                put(j, P.derive_fermionic(idx, side))
        if not out:
            out = {0: SuperExpr.zero(self.dims)}
        return CutoffTest(tuple(sorted(out.items(), key=lambda kv: kv[0])), f"d{deriv}[{self.name}]")


def pair_cutoff(alpha: SuperExpr, test: CutoffTest, side: str = "left") -> MomentValue:
    """Fp-pairing int alpha * Phi (left) or int Phi * alpha (right), Berezin included."""
    d = alpha.dims
    p = d.p
    zero = (0,) * p
    out = MomentValue(d)
    for j, P in test.parts:
        prod = alpha * P if side == "left" else P * alpha
        B = prod.berezin()
        for (g, o, s, a, l, pp), c in B.terms.items():
            mom = sphere_moment(a)
            if not mom:
                continue
            nu = l + sum(a) + p - 1
            base = SuperExpr(d, {(g, o, s, zero, Fraction(0), pp): c}).scale(mom)
            for sym, q in _radial_moment(nu, j):
                out.add(sym, base.scale(q))
    return out


def pair_derivative(terms, alpha: SuperExpr, test: CutoffTest, side: str = "left") -> MomentValue:
    """Distributional pairing of (operator applied to alpha) by transposition.

    Left: <c g d alpha, Phi> = -c g <sigma(alpha), d Phi>; right mirrors it
    with the test function on the left.  ``sigma`` is the Grassmann parity
    automorphism, used for fermionic derivatives.
    """
    d = alpha.dims
    total = MomentValue(d)
    for t in terms:
        kind, _idx = t.deriv
        a2 = alpha if kind == "x" else alpha.grade_involution()
        val = pair_cutoff(a2, test.derive(t.deriv, side), side)
        gk, gj = t.gen
        g = (SuperExpr.gen(d, gj) if gk == "e" else SuperExpr.sgen(d, gj)).scale(-t.coeff)
        total = total + (val.left_mul(g) if side == "left" else val.right_mul(g))
    return total


def origin_value(test: CutoffTest) -> SuperExpr:
    """<delta(x), Phi> for the super delta: Grassmann-free value at the origin."""
    d = test.dims
    out = {}
    for j, P in test.parts:
        if j:
            continue
        for (g, o, s, a, l, pp), c in P.terms.items():
            if l < 0:
                raise ValueError("test function is singular at the origin")
            if g or any(a) or l:
                continue
            out[(g, o, s, a, l, pp)] = out.get((g, o, s, a, l, pp), GaussQ()) + c
    return SuperExpr(d, out)


def _fermionic_square(d: Dims) -> SuperExpr:
    xf = fermionic_vector(d)
    return xf * xf


def pair_origin_delta(phi: SuperExpr, route: str = "substitute") -> SuperExpr:
    """<delta(x - y), phi> with formal y; result lives in the parameter algebra.

    Bodies of the result are read as functions of y.  ``route`` is
    ``"substitute"`` (direct evaluation) or ``"berezin"`` (through the
    fermionic delta factor pi^n/n! (x` - y`)^{2n} and the Berezin integral).
    """
    d = phi.dims.with_params(True)
    if phi.dims.params:
        raise ValueError("phi must not carry parameters")
    phi = phi.with_dims(d)
    if route == "substitute":
        return phi.to_params()
    if route != "berezin":
        raise ValueError("route must be 'substitute' or 'berezin'")
    n = d.n
    sq = _fermionic_square(d).shift_fermions()
    factor = (sq ** n).scale(Scalar({2 * n: GaussQ(Fraction(1, math.factorial(n)))}))
    return (factor * phi).berezin()


def pair_delta_derivative(coeffs, P: SuperExpr, phi: SuperExpr) -> SuperExpr:
    """<(sum_j c_j d_j delta(x_)) P, phi> = -sum_j c_j d_j(P phi)(0), bosonic delta."""
    d = phi.dims
    out = SuperExpr.zero(d)
    prod = P * phi
    for c, j in coeffs:
        out = out - c * bosonic_origin_value(prod.derive_bosonic(j))
    return out


# ------------------------------------------------------------ kernel checks
def default_tests(d: Dims) -> list[CutoffTest]:
    """Battery of cutoff test superfunctions (at least five)."""
    one = SuperExpr.one(d)
    x1 = SuperExpr.var(d, 1)
    e1 = SuperExpr.gen(d, 1)
    tests = [
        CutoffTest.of(one, "chi"),
        CutoffTest.of(one + x1, "(1+x1)chi"),
        CutoffTest.of(e1 + SuperExpr.var(d, 2) * SuperExpr.gen(d, 2), "(e1+x2e2)chi"),
    ]
    if d.n:
        g12 = SuperExpr.fvar(d, 1) * SuperExpr.fvar(d, 2)
        tests.append(CutoffTest.of(one + g12 + g12 * x1 * SuperExpr.gen(d, 2), "(1+xg1xg2(1+x1e2))chi"))
        tests.append(CutoffTest.of(one.scale(_I) + SuperExpr.fvar(d, 1) * SuperExpr.sgen(d, 2), "(i+xg1eg2)chi"))
    else:
        tests.append(CutoffTest.of(one.scale(_I) + x1 * x1, "(i+x1^2)chi"))
    deriv_type = CutoffTest.of((x1 + 3) * x1).derive(("x", 1))
    tests.append(CutoffTest(deriv_type.parts, "d1[(x1+3)x1 chi]"))
    tests.append(CutoffTest.of(one + (x1 * x1 * SuperExpr.var(d, d.p)) * SuperExpr.gen(d, d.p), "(1+x1^2xp ep)chi"))
    return tests


@dataclass
class DeltaCheck:
    name: str
    expected: SuperExpr
    recovered: SuperExpr | None
    ok: bool


def recover_delta(terms, alpha: SuperExpr, smooth: SuperExpr, tests, side: str = "left"):
    """Recover c in (operator alpha) = smooth + c delta from cutoff pairings.

    Returns ``(c or None, ok)``; ``ok`` means every test leaves exactly
    c * Phi(0) (or Phi(0) * c on the right) and no Fp symbols.
    """
    c = None
    ok = True
    for t in tests:
        res = pair_derivative(terms, alpha, t, side) - pair_cutoff(smooth, t, side)
        if res.symbolic_part():
            return None, False
        val = res.constant()
        phi0 = origin_value(t)
        if c is None:
            if phi0 != SuperExpr.one(alpha.dims):
                raise ValueError("the first test function must satisfy Phi(0) = 1")
            c = val
        expect = c * phi0 if side == "left" else phi0 * c
        ok &= val == expect
    return c, ok


def _smooth_parts(d: Dims) -> dict:
    """Right-hand sides of the kernel-derivative identities, delta terms dropped."""
    area_inv = sphere_area(d.p, d.n).inverse()
    M = d.M
    x = supervector(d)
    jx = x.apply_J()
    _bb, _bf, B = bivectors(d)
    r2 = -(x * x)
    inv_M = super_pow(r2, Fraction(-M, 2))
    inv_M2 = super_pow(r2, Fraction(-M - 2, 2))
    Z, Zd = hermitian_vars(d)
    herm = (SuperExpr.const(d, Fraction(M, 2)) + B.scale(_I)) * inv_M - (Zd * Z * inv_M2).scale(M)
    return {
        "dx_Jnu": (B.scale(2) * inv_M + (x * jx * inv_M2).scale(M)).scale(area_inv),
        "dJ_nu": (B.scale(-2) * inv_M + (jx * x * inv_M2).scale(M)).scale(area_inv),
        "dZ_psi": herm.scale(area_inv),
        "dZdag_psidag": (-herm).scale(area_inv),
    }


def verify_kernel_derivatives(d: Dims, tests=None) -> dict:
    """Smooth-part residues and delta coefficients of the kernel derivatives.

    Returns a report ``{"smooth": {...: bool}, "delta": {...: DeltaCheck},
    "matrix": {...: bool}}``.
    """
    if not d.hermitian or d.m <= d.n:
        raise ValueError("kernel derivative checks need hermitian dims with m > n")
    tests = tests or default_tests(d)
    kp = psi_kernels(d)
    nu, jnu, psi, psid = kp.nu, kp.Jnu, kp.psi, kp.psi_dag
    sm = _smooth_parts(d)
    bb, _bf, _b = bivectors(d)
    m = d.m
    one = SuperExpr.one(d)
    zero = SuperExpr.zero(d)
    plus = (one.scale(m) + bb.scale(_I)).scale(Fraction(1, 2 * m))
    minus = (one.scale(m) - bb.scale(_I)).scale(Fraction(1, 2 * m))

    smooth = {
        "dx nu = 0": dirac(nu).is_zero(),
        "dx J(nu)": dirac(jnu) == sm["dx_Jnu"],
        "dJ nu": twisted_dirac(nu) == sm["dJ_nu"],
        "dZ psi": hermitian_dirac(psi, "Z") == sm["dZ_psi"],
        "psidag dZdag": hermitian_dirac(psid, "Zdag", "right") == sm["dZ_psi"],
        "dZdag psi = 0": hermitian_dirac(psi, "Zdag").is_zero(),
        "psidag dZ = 0": hermitian_dirac(psid, "Z", "right").is_zero(),
        "dZ psidag = 0": hermitian_dirac(psid, "Z").is_zero(),
        "psi dZdag = 0": hermitian_dirac(psi, "Zdag", "right").is_zero(),
        "dZdag psidag": hermitian_dirac(psid, "Zdag") == sm["dZdag_psidag"],
        "psi dZ": hermitian_dirac(psi, "Z", "right") == sm["dZdag_psidag"],
    }

    cases = [
        ("dx nu", dirac_terms(d, "left"), nu, zero, one, "left"),
        ("dx J(nu)", dirac_terms(d, "left"), jnu, sm["dx_Jnu"], bb.scale(Fraction(1, m)), "left"),
        ("dJ nu", twisted_terms(d, "left"), nu, sm["dJ_nu"], bb.scale(Fraction(-1, m)), "left"),
        ("dZ psi", hermitian_terms(d, "Z", "left"), psi, sm["dZ_psi"], plus, "left"),
        ("psidag dZdag", hermitian_terms(d, "Zdag", "right"), psid, sm["dZ_psi"], plus, "right"),
        ("dZdag psi", hermitian_terms(d, "Zdag", "left"), psi, zero, zero, "left"),
        ("psidag dZ", hermitian_terms(d, "Z", "right"), psid, zero, zero, "right"),
        ("dZ psidag", hermitian_terms(d, "Z", "left"), psid, zero, zero, "left"),
        ("psi dZdag", hermitian_terms(d, "Zdag", "right"), psi, zero, zero, "right"),
        ("dZdag psidag", hermitian_terms(d, "Zdag", "left"), psid, sm["dZdag_psidag"], minus, "left"),
        ("psi dZ", hermitian_terms(d, "Z", "right"), psi, sm["dZdag_psidag"], minus, "right"),
    ]
    delta = {}
    for name, terms, alpha, smooth_rhs, expected, side in cases:
        c, ok = recover_delta(terms, alpha, smooth_rhs, tests, side)
        delta[name] = DeltaCheck(name, expected, c, bool(ok and c is not None and c == expected))

    matrix = {}
    for side in ("left", "right"):
        ok = True
        for t in tests:
            a = (pair_derivative(hermitian_terms(d, "Z", side), psi, t, side)
                 + pair_derivative(hermitian_terms(d, "Zdag", side), psid, t, side))
            b = (pair_derivative(hermitian_terms(d, "Z", side), psid, t, side)
                 + pair_derivative(hermitian_terms(d, "Zdag", side), psi, t, side))
            phi0 = origin_value(t)
            ok &= (not a.symbolic_part()) and a.constant() == phi0 and b.is_zero()
        matrix[side] = bool(ok)
    return {"smooth": smooth, "delta": delta, "matrix": matrix, "tests": [t.name for t in tests]}


# ============================================================ level sets etc.
@dataclass(frozen=True)
class LevelSetDistribution:
    """sum coeff * delta^(level)(g0); level -1 stands for H(-g0).

    ``order`` is k >= 0 for delta^(k)(g) and -1 for H(-g).
    """

    phase: object
    order: int
    terms: tuple  # ((SuperExpr coeff, level), ...)

    @property
    def heaviside(self) -> bool:
        return self.order == -1

    def pair(self, F: SuperExpr, quad=None, y=None):
        """Integrate this distribution against F (Berezin included)."""
        from .integration import level_set_pairing

        return level_set_pairing(self, F, quad, y)


def _nilpotent_powers(N: SuperExpr):
    d = N.dims
    out = [SuperExpr.one(d)]
    while True:
        nxt = out[-1] * N
        if not nxt:
            return out
        out.append(nxt)


def delta_expand(phase, k: int = 0) -> LevelSetDistribution:
    """delta^(k)(g) = sum_j N^j/j! delta^(k+j)(g0) with g = g0 + N."""
    if k < 0:
        raise ValueError("delta order must be non-negative")
    _require_regular(phase)
    N = phase.nilpotent
    terms = []
    for j, Nj in enumerate(_nilpotent_powers(N)):
        terms.append((Nj.scale(Fraction(1, math.factorial(j))), k + j))
    return LevelSetDistribution(phase, k, tuple(terms))


def heaviside_expand(phase) -> LevelSetDistribution:
    """H(-g) = H(-g0) - sum_{j>=1} N^j/j! delta^(j-1)(g0)."""
    _require_regular(phase)
    N = phase.nilpotent
    terms = [(SuperExpr.one(phase.dims), -1)]
    for j, Nj in enumerate(_nilpotent_powers(N)):
        if j:
            terms.append((Nj.scale(Fraction(-1, math.factorial(j))), j - 1))
    return LevelSetDistribution(phase, -1, tuple(terms))


def _require_regular(phase):
    if not getattr(phase, "regular_gradient", True):
        raise ValueError("phase body gradient may vanish on its zero set")


# -------------------------------------------------------------- radial kinds
def fp_super_expansion(d: Dims, alpha: int = 0) -> SuperExpr:
    """Fp |x|^-(M+alpha) assembled from bosonic finite parts times x`^{2n-2k}."""
    if d.p % 2:
        raise ValueError("the superspace finite part expansion needs even p")
    m, n = d.p // 2, d.n
    a2 = Fraction(alpha, 2)
    q0, k0 = gamma_half(m - n + a2)
    xf = fermionic_vector(d)
    out = SuperExpr.zero(d)
    for k in range(n + 1):
        q, kk = gamma_half(m - k + a2)
        coef = Scalar({kk - k0: GaussQ(q / (q0 * math.factorial(n - k)))})
        out = out + (SuperExpr.radial(d, 2 * k - 2 * m - alpha) * xf ** (2 * n - 2 * k)).scale(coef)
    return out


@dataclass(frozen=True)
class RadialDistribution:
    """T_lam = Fp |x|^lam, U_lam = Fp x |x|^(lam-1), or the superspace Fp |x|^-(M+alpha)."""

    kind: str
    dims: Dims
    lam: Fraction = Fraction(0)
    alpha: int = 0

    def expr(self) -> SuperExpr:
        d = self.dims
        if self.kind == "T":
            return SuperExpr.radial(d, self.lam)
        if self.kind == "U":
            return bosonic_vector(d) * SuperExpr.radial(d, Fraction(self.lam) - 1)
        if self.kind == "FpSuper":
            return fp_super_expansion(d, self.alpha)
        raise ValueError(f"unknown radial distribution kind {self.kind!r}")

    def pair(self, test: CutoffTest, side: str = "left") -> MomentValue:
        return pair_cutoff(self.expr(), test, side)


# ---------------------------------------------------------- restricted products
class UnsupportedProduct(ValueError):
    pass


@dataclass(frozen=True)
class PointDelta:
    """coeff * delta(x - y) at a bosonic point y (fermionic part formal)."""

    y: tuple
    coeff: complex = 1.0


@dataclass(frozen=True)
class KernelDistribution:
    """A kernel smooth away from the point y."""

    expr: SuperExpr
    y: tuple


@dataclass(frozen=True)
class RestrictedKernel:
    """Kernel times H(-g): integration restricted to the domain of g."""

    kernel: KernelDistribution
    phase: object


def _phase_sign(phase, y) -> float:
    val = float(phase.body_value(np.asarray(y, dtype=float)))
    if val == 0.0:
        raise UnsupportedProduct("point lies on the level set g0 = 0")
    return val


def restricted_product(a, b):
    """Products of distributions with disjoint singular supports.

    Whitelist: point delta x level-set family, and H(-g) x kernel.
    """
    for first, second in ((a, b), (b, a)):
        if isinstance(first, PointDelta) and isinstance(second, LevelSetDistribution):
            val = _phase_sign(second.phase, first.y)
            if second.heaviside and val < 0:
                return first
            return PointDelta(first.y, 0.0)
        if isinstance(first, KernelDistribution) and isinstance(second, LevelSetDistribution):
            if not second.heaviside:
                break
            _phase_sign(second.phase, first.y)
            return RestrictedKernel(first, second.phase)
    raise UnsupportedProduct(f"product of {type(a).__name__} and {type(b).__name__} is not supported")
