"""Integration over super domains and super surfaces.

Every integral is reduced to pairings of the distributions delta^(k)(g0) and
H(-g0) with Berezin-integrated superfunctions, where g0 = c(|x|^2 - R^2) is
the body of the phase function.  Polynomial integrands are paired in closed
form; integrands involving a kernel centered at an evaluation point y are
paired by quadrature on spheres.

Derivatives along the level set never use finite differences: on the sphere
|x|^2 = s one has d/ds phi(sqrt(s) w) = (E phi)(x) / (2s) with the Euler
operator E = sum x_j d_j, so delta^(k) pairings become single sphere
quadratures of polynomials in E applied to the integrand.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import brentq

from .algebra import Dims, GaussQ, Scalar, SuperExpr, rational_root
from .distributions import delta_expand, heaviside_expand, sphere_moment
from .numeric import NumericField, values_to_expr
from .operators import (
    Circulant2,
    _gen_expr,
    apply_operator,
    d_zc,
    d_zgc,
    dirac,
    dirac_matrix_apply,
    dirac_terms,
    directional_dagger,
    hermitian_terms,
    psi_kernels,
    sphere_area,
    super_pow,
    supervector,
    twisted_terms,
    zgvar,
    zvar,
)
from .quadrature import gauss_legendre, sphere_rule

__all__ = [
    "PhaseFunction",
    "QuadratureSpec",
    "IntegralResult",
    "CheckReport",
    "level_set_pairing",
    "domain_integral",
    "surface_integral",
    "stokes_check",
    "cauchy_pompeiu",
    "cp_check",
    "bm_evaluate",
    "bm_expected",
    "bm_antisymmetry_check",
    "classical_bm_check",
    "teodorescu",
    "koppelman_check",
    "evaluate_at",
]

_I = GaussQ(0, 1)
_HALF = Fraction(1, 2)


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, str)):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(repr(v))
    raise TypeError(f"cannot read {v!r} as a rational number")


# ------------------------------------------------------------------- phases
@dataclass(frozen=True, eq=False)
class PhaseFunction:
    """Even real phase g = scale*(|x|^2 - R^2) + nilpotent.

    Built-in families are ``supersphere`` (g = -x^2 - R^2) and ``bosonic``
    (the classical ball, no nilpotent part).  ``custom`` phases carry a
    numeric body only and describe domains that are star-shaped about the
    origin; they support domain integrals alone.
    """

    dims: Dims
    family: str
    R: Fraction | None = None
    scale: Fraction = Fraction(1)
    nilpotent: SuperExpr | None = None
    body: Callable | None = None
    bound: float | None = None
    regular: bool = True
    label: str = ""

    @classmethod
    def supersphere(cls, d: Dims, R=1) -> "PhaseFunction":
        R = _as_fraction(R)
        if R <= 0:
            raise ValueError("radius must be positive")
        d = d.base()
        x = supervector(d)
        g = -(x * x) - SuperExpr.const(d, R * R)
        return cls(d, "supersphere", R, Fraction(1), g.nilpotent_part(), label=f"supersphere:{R}")

    @classmethod
    def ball(cls, d: Dims, R=1) -> "PhaseFunction":
        R = _as_fraction(R)
        if R <= 0:
            raise ValueError("radius must be positive")
        d = d.base()
        return cls(d, "bosonic", R, Fraction(1), SuperExpr.zero(d), label=f"bosonic:{R}")

    @classmethod
    def custom(cls, d: Dims, body: Callable, bound: float, regular: bool = True, label: str = "custom"):
        """Numeric body ``body(X) -> array`` negative inside; domain inside radius ``bound``."""
        d = d.base()
        return cls(d, "custom", None, Fraction(1), SuperExpr.zero(d), body, float(bound), regular, label)

    # ---------------------------------------------------------------- queries
    @property
    def exact(self) -> bool:
        return self.family != "custom"

    @property
    def regular_gradient(self) -> bool:
        if self.family == "custom":
            return self.regular
        return self.R > 0 and self.scale > 0

    def body_expr(self, dims: Dims | None = None) -> SuperExpr:
        self._need_builtin()
        d = dims or self.dims
        return (SuperExpr.radial(d, 2) - SuperExpr.const(d, self.R * self.R)).scale(self.scale)

    def expr(self, dims: Dims | None = None) -> SuperExpr:
        """g as a SuperExpr (optionally moved to dimensions with parameters)."""
        d = dims or self.dims
        return self.body_expr(d) + self.nilpotent.with_dims(d)

    def body_value(self, point) -> float:
        y = np.asarray(point, dtype=float)
        if self.family == "custom":
            return float(np.asarray(self.body(y[None, :]))[0])
        return float(self.scale) * (float(y @ y) - float(self.R) ** 2)

    def radial_extent(self, center: np.ndarray, W: np.ndarray) -> np.ndarray:
        """Distance from ``center`` to the boundary along each unit direction."""
        if self.family != "custom":
            R = float(self.R)
            b = W @ center
            disc = b * b - float(center @ center) + R * R
            if np.any(disc < 0):
                raise ValueError("center lies outside the domain")
            return -b + np.sqrt(disc)
        if self.body_value(center) >= 0:
            raise ValueError("custom domains are integrated from an interior center")
        out = np.empty(len(W))
        reach = 2.0 * self.bound + float(np.linalg.norm(center))
        for i, w in enumerate(W):
            f = lambda r, w=w: self.body_value(center + r * w)
            if f(reach) <= 0:
                raise ValueError("custom domain exceeds its declared bound")
            out[i] = brentq(f, 0.0, reach, xtol=1e-15, rtol=1e-15)
        return out

    def reparametrize(self, h: SuperExpr) -> "PhaseFunction":
        """The phase h*g for an even h with positive constant body."""
        self._need_builtin()
        if not (h.is_even() and h.is_clifford_scalar()):
            raise ValueError("reparametrization factor must be even and Clifford-scalar")
        h0 = h.body_part()
        if len(h0.terms) != 1:
            raise ValueError("reparametrization factor needs a constant positive body")
        (key, c), = h0.terms.items()
        if any(key[3]) or key[4] or key[5] or c.im or c.re <= 0:
            raise ValueError("reparametrization factor needs a constant positive body")
        h0 = Fraction(c.re)
        g = h * self.expr()
        scale = self.scale * h0
        nil = g - (SuperExpr.radial(self.dims, 2) - SuperExpr.const(self.dims, self.R * self.R)).scale(scale)
        if nil.body_part():
            raise ValueError("reparametrized phase left the radial family")
        return replace(self, scale=scale, nilpotent=nil, label=f"{self.label}*h")

    def _need_builtin(self):
        if self.family == "custom":
            raise ValueError("operation needs a built-in phase (supersphere or bosonic)")


# --------------------------------------------------------------- quadrature
@dataclass(frozen=True)
class QuadratureSpec:
    angular_degree: int = 24
    radial_nodes: int = 24
    volume_degree: int = 16
    tol: float = 1e-8
    threads: int = 1
    error_estimate: bool = True
    chunk: int = 4096

    def __post_init__(self):
        if min(self.angular_degree, self.volume_degree) < 2 or self.radial_nodes < 2:
            raise ValueError("quadrature degrees must be at least 2")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if self.threads < 1 or self.chunk < 1:
            raise ValueError("threads and chunk size must be positive")

    def coarser(self) -> "QuadratureSpec":
        return replace(
            self,
            angular_degree=max(2, self.angular_degree * 3 // 4),
            radial_nodes=max(2, self.radial_nodes * 3 // 4),
            volume_degree=max(2, self.volume_degree * 3 // 4),
            error_estimate=False,
        )


@dataclass(frozen=True)
class IntegralResult:
    value: SuperExpr
    est_err: float
    nodes: int

    def error_against(self, expected: SuperExpr) -> float:
        return (self.value.to_float() - expected.to_float()).max_abs()


@dataclass
class CheckReport:
    name: str
    residual: float
    tol: float
    values: dict = field(default_factory=dict)
    runtime_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol


# ------------------------------------------------------------ exact pairing
def _exact_pairing(phase: PhaseFunction, terms) -> SuperExpr | None:
    """Closed-form pairing of ``[(level, L)]``; None if a radius power is irrational."""
    d = terms[0][1].dims
    p = d.p
    R, c = phase.R, phase.scale
    acc: dict = {}
    for level, L in terms:
        for (g, o, s, a, l, pp), coef in L.berezin().terms.items():
            mom = sphere_moment(a)
            if not mom:
                continue
            base = Scalar({pp: coef}) * mom
            deg = sum(a) + l
            if level < 0:
                nu = deg + p - 1
                if nu <= -1:
                    raise ValueError("domain integral diverges at the origin")
                rp = rational_root(R, nu + 1)
                if rp is None:
                    return None
                val = base * (rp / (nu + 1))
            else:
                e = Fraction(deg + p - 2, 2)
                ff = Fraction(1)
                for i in range(level):
                    ff *= e - i
                if not ff:
                    continue
                rp = rational_root(R, 2 * (e - level))
                if rp is None:
                    return None
                val = base * (_HALF * ff * rp * (-1) ** level / c ** (level + 1))
            acc[(g, o, s)] = acc.get((g, o, s), Scalar()) + val
    zero_a = (0,) * p
    out: dict = {}
    for (g, o, s), val in acc.items():
        for k, q in val.terms.items():
            out[(g, o, s, zero_a, Fraction(0), k)] = q
    return SuperExpr(d, out)


# ---------------------------------------------------------- numeric pairing
def _euler(F: SuperExpr) -> SuperExpr:
    out = SuperExpr.zero(F.dims, F.exact)
    for j in range(1, F.dims.p + 1):
        dF = F.derive_bosonic(j)
        if dF:
            out = out + SuperExpr.var(F.dims, j) * dF
    return out


def _euler_shifted(K: SuperExpr, y) -> SuperExpr:
    """Euler operator of x -> K(x - y) written in the shifted variable."""
    out = _euler(K).to_float()
    for j, yj in enumerate(y, start=1):
        if yj:
            out = out + K.derive_bosonic(j).to_float().scale(float(yj))
    return out


def _level_polynomial(k: int, p: int, R2: float, c: float) -> np.ndarray:
    """Coefficients P_t with <delta^(k)(c(s - R^2)), f> = int_S sum P_t (E^t f)(R w) dS."""
    a = p / 2 - 1
    P = np.zeros(k + 1)
    for i in range(k + 1):
        j = k - i
        ff = 1.0
        for t in range(i):
            ff *= a - t
        coef = math.comb(k, i) * ff * R2 ** (a - i) * (2 * R2) ** (-j)
        q = np.array([1.0])
        for t in range(j):
            q = npoly.polymul(q, [-2.0 * t, 1.0])
        P[: len(q)] += coef * q
    return P * 0.5 * (-1) ** k / c ** (k + 1)


def _merge_pairs(pairs):
    """Group (K, L) pairs by kernel identity, summing the local factors."""
    groups: dict = {}
    for K, L in pairs:
        key = id(K) if K is not None else None
        if key in groups:
            groups[key] = (K, groups[key][1] + L)
        else:
            groups[key] = (K, L)
    return [v for v in groups.values() if v[1]]


def _sphere_pairs(phase, level_terms: dict, y):
    R2 = float(phase.R) ** 2
    c = float(phase.scale)
    p = phase.dims.p
    collected = []
    kernels: dict = {}
    for level, pairs in level_terms.items():
        if level < 0:
            continue
        P = _level_polynomial(level, p, R2, c)
        for K, L in _merge_pairs(pairs):
            Lpows = [L.to_float()]
            for _ in range(level):
                Lpows.append(_euler(Lpows[-1]))
            amax = 0 if K is None else level
            for a in range(amax + 1):
                acc = SuperExpr.zero(L.dims, False)
                for b in range(level - a + 1):
                    w = P[a + b] * math.comb(a + b, a)
                    if w:
                        acc = acc + Lpows[b].scale(w)
                if not acc:
                    continue
                if K is None:
                    collected.append((None, acc))
                    continue
                pows = kernels.setdefault(id(K), [K.to_float()])
                while len(pows) <= a:
                    pows.append(_euler_shifted(pows[-1], y))
                collected.append((pows[a], acc))
    return _merge_pairs(collected)


def _eval_chunk(pairs, X, weights, y, xmask):
    acc: dict = {}
    lcache: dict = {}
    for K, L in pairs:
        LF = lcache.get(id(L))
        if LF is None:
            LF = lcache[id(L)] = NumericField.from_expr(L, X)
        if K is None:
            F = LF
        else:
            F = NumericField.from_expr(K, X - y).mul(LF, keep_mask=xmask)
        for key, v in F.berezin().data.items():
            val = complex(np.dot(np.broadcast_to(v, weights.shape), weights))
            acc[key] = acc.get(key, 0j) + val
    return acc


def _quadrature_sum(pairs, X, weights, y, xmask, quad: QuadratureSpec) -> dict:
    starts = range(0, len(X), quad.chunk)

    def work(s):
        return _eval_chunk(pairs, X[s : s + quad.chunk], weights[s : s + quad.chunk], y, xmask)

    if quad.threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(quad.threads) as ex:
            parts = list(ex.map(work, starts))
    else:
        parts = [work(s) for s in starts]
    # fixed chunk order keeps the summation tree independent of the worker count
    total: dict = {}
    for part in parts:
        for k, v in part.items():
            total[k] = total.get(k, 0j) + v
    return total


def _volume_nodes(phase, center, quad):
    p = phase.dims.p
    W, wS = sphere_rule(p, quad.volume_degree)
    rmax = phase.radial_extent(center, W)
    t, wt = gauss_legendre(quad.radial_nodes)
    rho = rmax[:, None] * t[None, :]
    X = (center[None, None, :] + rho[:, :, None] * W[:, None, :]).reshape(-1, p)
    w = (wS[:, None] * wt[None, :] * rmax[:, None] ** p * t[None, :] ** (p - 1)).reshape(-1)
    return X, w


def _numeric_pairing(phase, level_terms: dict, y, quad: QuadratureSpec):
    p = phase.dims.p
    yv = np.zeros(p) if y is None else np.asarray(y, dtype=float)
    values: dict = {}
    nodes = 0
    dims = None
    for pairs in level_terms.values():
        for _K, L in pairs:
            dims = L.dims
    xmask = dims.xmask
    if any(lv >= 0 for lv in level_terms):
        if phase.family == "custom":
            raise ValueError("custom phases support domain integrals without delta terms only")
        pairs = _sphere_pairs(phase, level_terms, yv)
        if pairs:
            W, wS = sphere_rule(p, quad.angular_degree)
            X = float(phase.R) * W
            part = _quadrature_sum(pairs, X, wS, yv, xmask, quad)
            nodes += len(X)
            for k, v in part.items():
                values[k] = values.get(k, 0j) + v
    vol = _merge_pairs(level_terms.get(-1, []))
    if vol:
        singular = any(K is not None for K, _ in vol)
        center = yv if singular and phase.body_value(yv) < 0 else np.zeros(p)
        X, w = _volume_nodes(phase, center, quad)
        part = _quadrature_sum(vol, X, w, yv, xmask, quad)
        nodes += len(X)
        for k, v in part.items():
            values[k] = values.get(k, 0j) + v
    return values_to_expr(dims, values), nodes


def _pairs_of(F) -> list:
    if isinstance(F, SuperExpr):
        return [(None, F)]
    return list(F)


def level_set_pairing(dist, F, quad: QuadratureSpec | None = None, y=None) -> IntegralResult:
    """Integrate a level-set distribution against F.

    F is a SuperExpr or a list of pairs ``(K, L)`` standing for
    ``K(x - y) L(x)``, where K is a SuperExpr in the shifted variable (or
    None).  Berezin integration is applied before pairing.
    """
    quad = quad or QuadratureSpec()
    phase = dist.phase
    pairs = _pairs_of(F)
    level_terms: dict = {}
    flat = []
    for C, level in dist.terms:
        for K, L in pairs:
            CL = C.with_dims(L.dims) * L
            if CL:
                level_terms.setdefault(level, []).append((K, CL))
                flat.append((level, K, CL))
    if not flat:
        d = pairs[0][1].dims if pairs else phase.dims
        return IntegralResult(SuperExpr.zero(d), 0.0, 0)
    if phase.exact and all(K is None and L.exact for _lv, K, L in flat):
        val = _exact_pairing(phase, [(lv, L) for lv, _K, L in flat])
        if val is not None:
            return IntegralResult(val, 0.0, 0)
    value, nodes = _numeric_pairing(phase, level_terms, y, quad)
    err = 0.0
    if quad.error_estimate:
        coarse, _ = _numeric_pairing(phase, level_terms, y, quad.coarser())
        err = (value - coarse).max_abs()
    return IntegralResult(value, err, nodes)


# ---------------------------------------------------------- domain/surface
def domain_integral(g: PhaseFunction, F, q: QuadratureSpec | None = None, y=None) -> IntegralResult:
    """int H(-g) F over R^{p|2n}."""
    return level_set_pairing(heaviside_expand(g), F, q, y)


def surface_integral(g: PhaseFunction, F: SuperExpr, oriented: bool = False, q=None) -> IntegralResult:
    """int delta(g) |d_x[g]| F, or int delta(g) d_x[g] F when oriented."""
    g._need_builtin()
    F = F.with_dims(g.dims) if F.dims != g.dims else F
    dg = dirac(g.expr())
    factor = dg if oriented else super_pow(-(dg * dg), _HALF)
    return level_set_pairing(delta_expand(g, 0), factor * F, q)


_STOKES = {
    "plain": dirac_terms,
    "twisted": twisted_terms,
    "Z": lambda d, side: hermitian_terms(d, "Z", side),
    "Zdag": lambda d, side: hermitian_terms(d, "Zdag", side),
}


def stokes_check(g: PhaseFunction, F: SuperExpr, G: SuperExpr, variant: str = "plain", q=None, tol: float = 1e-6):
    """Both sides of int H(-g)[(F D)G + F(D G)] = int F delta(g) D[g] G."""
    if variant not in _STOKES:
        raise ValueError(f"unknown Stokes variant {variant!r}")
    g._need_builtin()
    t0 = time.perf_counter()
    d = g.dims
    left_ops = _STOKES[variant](d, "left")
    right_ops = _STOKES[variant](d, "right")
    lhs_integrand = apply_operator(right_ops, F, "right") * G + F * apply_operator(left_ops, G, "left")
    lhs = domain_integral(g, lhs_integrand, q)
    rhs = level_set_pairing(delta_expand(g, 0), F * apply_operator(left_ops, g.expr(), "left") * G, q)
    res = (lhs.value.to_float() - rhs.value.to_float()).max_abs()
    return CheckReport(
        f"stokes[{variant}]",
        res,
        tol,
        {"lhs": lhs.value, "rhs": rhs.value},
        (time.perf_counter() - t0) * 1e3,
    )


# ---------------------------------------------------------- point evaluations
def _param_dims(g: PhaseFunction) -> Dims:
    return g.dims.with_params()


def _check_point(g: PhaseFunction, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape != (g.dims.p,):
        raise ValueError(f"evaluation point needs {g.dims.p} coordinates")
    val = g.body_value(y)
    if abs(val) <= 1e-12 * max(1.0, float(g.scale) * float(g.R) ** 2):
        raise ValueError("evaluation point lies on the boundary")
    return y


def evaluate_at(F: SuperExpr, y) -> SuperExpr:
    """F(U): bodies at y and fermionic variables renamed to the parameters y`."""
    dp = F.dims.base().with_params()
    return F.with_dims(dp).to_params().eval_numeric(y)


@lru_cache(maxsize=None)
def _shifted_kernels(d: Dims):
    dp = d.with_params()
    kp = psi_kernels(d)
    return kp.psi.with_dims(dp).shift_fermions(), kp.psi_dag.with_dims(dp).shift_fermions()


@lru_cache(maxsize=None)
def _shifted_norm_power(d: Dims):
    dp = d.with_params()
    x = supervector(dp.base())
    return super_pow(-(x * x), Fraction(-d.M, 2)).with_dims(dp).shift_fermions()


def _as_circulant(G, dp: Dims) -> Circulant2:
    if isinstance(G, SuperExpr):
        G = Circulant2.diag(G)
    return Circulant2(G.a.with_dims(dp), G.b.with_dims(dp))


def _circulant_integral(dist, kernels, L: Circulant2, y, q) -> Circulant2:
    psi, psid = kernels
    ra = level_set_pairing(dist, [(psi, L.a), (psid, L.b)], q, y)
    rb = level_set_pairing(dist, [(psi, L.b), (psid, L.a)], q, y)
    return Circulant2(ra.value.to_float(), rb.value.to_float()), max(ra.est_err, rb.est_err)


def _cp_parts(g: PhaseFunction, G, y, q):
    if g.dims.m <= g.dims.n:
        raise ValueError("Cauchy-Pompeiu needs m > n")
    dp = _param_dims(g)
    Gm = _as_circulant(G, dp)
    kernels = _shifted_kernels(g.dims)
    gx = g.expr(dp)
    Dg = Circulant2(
        apply_operator(hermitian_terms(dp, "Z", "left"), gx),
        apply_operator(hermitian_terms(dp, "Zdag", "left"), gx),
    )
    boundary, e1 = _circulant_integral(delta_expand(g, 0), kernels, Dg * Gm, y, q)
    volume, e2 = _circulant_integral(heaviside_expand(g), kernels, dirac_matrix_apply(Gm), y, q)
    return Gm, boundary, volume, e1 + e2


def _expected_circulant(Gm: Circulant2, y, interior: bool) -> Circulant2:
    if not interior:
        z = SuperExpr.zero(Gm.a.dims, False)
        return Circulant2(z, z)
    return Circulant2(Gm.a.to_params().eval_numeric(y), Gm.b.to_params().eval_numeric(y))


def _circ_err(A: Circulant2, B: Circulant2) -> float:
    return max((A.a - B.a).max_abs(), (A.b - B.b).max_abs())


def cauchy_pompeiu(g: PhaseFunction, G, y, q: QuadratureSpec | None = None):
    """Boundary term minus volume term; returns (Circulant2 value, est_err)."""
    q = q or QuadratureSpec()
    y = _check_point(g, y)
    _Gm, boundary, volume, err = _cp_parts(g, G, y, q)
    return boundary - volume, err


def cp_check(g: PhaseFunction, G, y, q=None, tol: float = 1e-4) -> CheckReport:
    """Cauchy-Pompeiu value against G(U) (interior) or 0 (exterior)."""
    q = q or QuadratureSpec()
    t0 = time.perf_counter()
    y = _check_point(g, y)
    Gm, boundary, volume, err = _cp_parts(g, G, y, q)
    value = boundary - volume
    expected = _expected_circulant(Gm, y, g.body_value(y) < 0)
    return CheckReport(
        "cauchy_pompeiu",
        _circ_err(value, expected),
        tol,
        {"value": value, "expected": expected, "boundary": boundary, "volume": volume, "est_err": err},
        (time.perf_counter() - t0) * 1e3,
    )


def teodorescu(g: PhaseFunction, G, y, q: QuadratureSpec | None = None) -> Circulant2:
    """T_g G(y) = -int H(-g) Psi(Z - U) G."""
    q = q or QuadratureSpec()
    y = _check_point(g, y)
    dp = _param_dims(g)
    val, _ = _circulant_integral(heaviside_expand(g), _shifted_kernels(g.dims), _as_circulant(G, dp), y, q)
    return -val


def _outer_dirac(g: PhaseFunction, G, y, q) -> Circulant2:
    """D_(U,U^dag) applied to y -> T_g G(y); bosonic parts by 4th-order differences."""
    dp = _param_dims(g)
    h = q.tol ** 0.2
    inner = replace(q, error_estimate=False)
    T0 = teodorescu(g, G, y, inner)
    derivs: dict = {}

    def deriv(dv):
        if dv in derivs:
            return derivs[dv]
        kind, j = dv
        if kind == "x":
            e = np.zeros(len(y))
            e[j - 1] = h
            Tp2, Tp1, Tm1, Tm2 = (teodorescu(g, G, y + s * e, inner) for s in (2, 1, -1, -2))
            out = (Tp1 - Tm1).scale(8.0) - (Tp2 - Tm2)
            out = out.scale(1.0 / (12 * h))
        else:
            out = T0.map(lambda E: E.derive_param(j, "left"))
        derivs[dv] = out
        return out

    def apply(which, F_of):
        acc = SuperExpr.zero(dp, False)
        for t in hermitian_terms(dp, which, "left"):
            acc = acc + (_gen_expr(dp, t.gen) * F_of(deriv(t.deriv))).scale(t.coeff)
        return acc

    a = apply("Z", lambda C: C.a) + apply("Zdag", lambda C: C.b)
    b = apply("Z", lambda C: C.b) + apply("Zdag", lambda C: C.a)
    return Circulant2(a, b)


def koppelman_check(g: PhaseFunction, G, y, q: QuadratureSpec | None = None, tol: float = 1e-3) -> CheckReport:
    """boundary term + T_g(D G) + D_U T_g G against 2 G(y) (interior) or 0."""
    q = q or QuadratureSpec(error_estimate=False)
    t0 = time.perf_counter()
    y = _check_point(g, y)
    inner = replace(q, error_estimate=False)
    Gm, boundary, _volume, _ = _cp_parts(g, G, y, inner)
    t_dg = teodorescu(g, dirac_matrix_apply(Gm), y, inner)
    outer = _outer_dirac(g, Gm, y, inner)
    total = boundary + t_dg + outer
    expected = _expected_circulant(Gm, y, g.body_value(y) < 0).scale(2.0)
    return CheckReport(
        "koppelman",
        _circ_err(total, expected),
        tol,
        {"total": total, "expected": expected, "boundary": boundary, "t_dg": t_dg, "outer": outer},
        (time.perf_counter() - t0) * 1e3,
    )


# ------------------------------------------------------- Bochner-Martinelli
def _require_holomorphic(F: SuperExpr):
    from .spinor import is_holomorphic

    if not is_holomorphic(F):
        raise ValueError("F is not holomorphic")


def _conj_u(y, m: int, j: int) -> complex:
    return complex(y[j - 1], -y[m + j - 1])


def _bm_local(g: PhaseFunction, F: SuperExpr, y) -> SuperExpr:
    """D^dag_{Z-U,Z}[g] F with the bosonic direction centered at y."""
    dp = _param_dims(g)
    gx = g.expr(dp)
    Dg = directional_dagger(gx, U_shift=True).to_float()
    for j in range(1, g.dims.m + 1):
        Dg = Dg - d_zc(gx, j).to_float().scale(_conj_u(y, g.dims.m, j))
    return Dg * F.with_dims(dp)


def bm_expected(F: SuperExpr, y) -> SuperExpr:
    return evaluate_at(F, y)


def bm_evaluate(g: PhaseFunction, F: SuperExpr, y, q: QuadratureSpec | None = None, check: bool = True):
    """(2/|S^{2m-1|2n}|) int delta(g) |Z-U|^{-M} D^dag_{Z-U,Z}[g] F."""
    q = q or QuadratureSpec()
    d = g.dims
    if not d.hermitian:
        raise ValueError("Bochner-Martinelli needs hermitian dimensions")
    if d.m <= d.n:
        raise ValueError("Bochner-Martinelli needs m > n")
    F = F.with_dims(d) if F.dims != d else F
    if check:
        _require_holomorphic(F)
    y = _check_point(g, y)
    K = _shifted_norm_power(d)
    res = level_set_pairing(delta_expand(g, 0), [(K, _bm_local(g, F, y))], q, y)
    c = 2.0 / complex(sphere_area(d.p, d.n))
    return IntegralResult(res.value.scale(c), res.est_err * abs(c), res.nodes)


def bm_antisymmetry_check(g: PhaseFunction, F: SuperExpr, y, q=None, tol: float = 1e-6) -> CheckReport:
    """Residuals of the paired-integral relations implied by the vanishing second BM identity.

    With I(a, b) = int delta(g) (a - U_a)|Z-U|^{-M} d_{b^c}[g] F:
    I(z_j, z_k) = I(z_k, z_j); -2i I(z_j, z`_k) = I(z`_k, z_j); I(z`_j, z`_k) = -I(z`_k, z`_j).
    """
    q = q or QuadratureSpec()
    t0 = time.perf_counter()
    d = g.dims
    m, n = d.m, d.n
    F = F.with_dims(d) if F.dims != d else F
    _require_holomorphic(F)
    y = _check_point(g, y)
    dp = _param_dims(g)
    gx = g.expr(dp)
    Fp = F.with_dims(dp)
    K = _shifted_norm_power(d)
    dist = delta_expand(g, 0)
    cache: dict = {}

    def centered(kind, j):
        if kind == "z":
            return zvar(dp, j).to_float() - SuperExpr.const(dp, complex(y[j - 1], y[m + j - 1]))
        u = SuperExpr.param(dp, 2 * j - 1) + SuperExpr.param(dp, 2 * j).scale(_I)
        return (zgvar(dp, j) - u).to_float()

    def deriv(kind, k):
        return d_zc(gx, k) if kind == "z" else d_zgc(gx, k)

    def I(a, b):
        if (a, b) not in cache:
            L = centered(*a) * deriv(*b).to_float() * Fp
            cache[(a, b)] = level_set_pairing(dist, [(K, L)], q, y).value
        return cache[(a, b)]

    rows = []
    for j in range(1, m + 1):
        for k in range(j + 1, m + 1):
            rows.append(("z-z", j, k, I(("z", j), ("z", k)), I(("z", k), ("z", j))))
    for j in range(1, m + 1):
        for k in range(1, n + 1):
            rows.append(("z-zg", j, k, I(("z", j), ("zg", k)).scale(-2j), I(("zg", k), ("z", j))))
    for j in range(1, n + 1):
        for k in range(j, n + 1):
            rows.append(("zg-zg", j, k, I(("zg", j), ("zg", k)), -I(("zg", k), ("zg", j))))
    res = max([(lhs - rhs).max_abs() for *_r, lhs, rhs in rows], default=0.0)
    return CheckReport(
        "bm_antisymmetry",
        res,
        tol,
        {"rows": [(fam, j, k, lhs, rhs) for fam, j, k, lhs, rhs in rows]},
        (time.perf_counter() - t0) * 1e3,
    )


# ------------------------------------------------ classical Bochner-Martinelli
def _hyperspherical(P: int, angles: np.ndarray, R: float):
    """Points and tangent vectors of the map (a_1..a_{P-2}, phi) -> S^{P-1}(R)."""
    N = angles.shape[0]
    k = P - 1
    s, c = np.sin(angles), np.cos(angles)
    X = np.empty((N, P))
    prefix = np.ones(N)
    for i in range(k):
        X[:, i] = prefix * c[:, i]
        prefix = prefix * s[:, i]
    X[:, k] = prefix
    X *= R
    T = np.zeros((N, k, P))
    for l in range(k):
        for i in range(l, P):
            if i == l:
                T[:, l, i] = -R * np.prod(s[:, :l], axis=1) * s[:, l]
                continue
            others = [t for t in range(min(i, k)) if t != l]
            val = R * c[:, l] * (np.prod(s[:, others], axis=1) if others else 1.0)
            T[:, l, i] = val * c[:, i] if i < k else val
    return X, T


def _classical_bm(m: int, f_values: Callable, R: float, u: np.ndarray, nodes: int) -> complex:
    P = 2 * m
    uc = u[:m] + 1j * u[m:]
    if m == 1:
        th = 2 * math.pi * np.arange(4 * nodes) / (4 * nodes)
        z = R * np.exp(1j * th)
        X = np.stack([z.real, z.imag], axis=1)
        return complex(np.mean(f_values(X) * z / (z - uc[0])))
    tx, tw = gauss_legendre(nodes)
    a_nodes, a_w = math.pi * tx, math.pi * tw
    nphi = 2 * nodes
    phi = 2 * math.pi * np.arange(nphi) / nphi
    grids = np.meshgrid(*([a_nodes] * (P - 2) + [phi]), indexing="ij")
    wgrids = np.meshgrid(*([a_w] * (P - 2) + [np.full(nphi, 2 * math.pi / nphi)]), indexing="ij")
    angles = np.stack([gr.reshape(-1) for gr in grids], axis=1)
    W = np.prod(np.stack([gw.reshape(-1) for gw in wgrids], axis=1), axis=1)
    X, T = _hyperspherical(P, angles, R)
    # boundary orientation induced by dx_1 ^ ... ^ dx_2m with x_{m+j} = Im z_j
    probe = np.concatenate([X[:1] / R, T[0]], axis=0)
    sign = np.sign(np.linalg.det(probe))
    dz = T[:, :, :m] + 1j * T[:, :, m:]
    dzc = T[:, :, :m] - 1j * T[:, :, m:]
    z = X[:, :m] + 1j * X[:, m:]
    dist2 = np.sum(np.abs(z - uc) ** 2, axis=1)
    total = np.zeros(len(X), complex)
    for j in range(m):
        forms = [dzc[:, :, i] for i in range(m) if i != j] + [dz[:, :, i] for i in range(m)]
        Mform = np.stack(forms, axis=1)
        total += (-1) ** j * np.conj(z[:, j] - uc[j]) * np.linalg.det(Mform)
    kern = math.factorial(m - 1) / (2j * math.pi) ** m * total / dist2**m
    return complex(sign * np.sum(kern * f_values(X) * W))


def classical_bm_check(m: int, f: SuperExpr, u, R=1, q: QuadratureSpec | None = None, tol: float = 1e-6):
    """n = 0 reduction: engine path and classical kernel form against f(u)."""
    q = q or QuadratureSpec()
    t0 = time.perf_counter()
    d = Dims.herm(m, 0)
    f = f.with_dims(d) if f.dims != d else f
    u = np.asarray(u, dtype=float)
    g = PhaseFunction.ball(d, R)
    engine = complex(bm_evaluate(g, f, u, q).value.scalar_value())
    expected = complex(f.eval_numeric(u).scalar_value())
    ff = f.to_float()

    def fvals(X):
        return NumericField.from_expr(ff, X).data.get((0, 0, ()), np.zeros(len(X)))

    classical = _classical_bm(m, fvals, float(g.R), u, max(16, q.angular_degree + 8))
    res = max(abs(engine - expected), abs(classical - expected))
    return CheckReport(
        f"classical_bm[m={m}]",
        res,
        tol,
        {"engine": engine, "classical": classical, "expected": expected},
        (time.perf_counter() - t0) * 1e3,
    )
