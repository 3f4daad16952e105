"""Superspace operators, Hermitian variables and fundamental solutions.

Differential operators are stored as lists of :class:`OpTerm` ``(coeff, gen,
deriv)``.  The left action of a term on F is ``coeff * gen * D(F)``; the right
action is ``D_right(F) * gen * coeff``, with ``D_right`` the right derivative
for fermionic variables.  The same term lists drive the spinor module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .algebra import Dims, GaussQ, Scalar, SuperExpr, gamma_half, rational_root, rising

__all__ = [
    "Dimensions",
    "OpTerm",
    "supervector",
    "bosonic_vector",
    "fermionic_vector",
    "gen",
    "sgen",
    "dirac",
    "twisted_dirac",
    "hermitian_dirac",
    "laplacian",
    "apply_operator",
    "dirac_terms",
    "twisted_terms",
    "hermitian_terms",
    "bivectors",
    "witt",
    "zvar",
    "zcvar",
    "zgvar",
    "zgcvar",
    "d_z",
    "d_zc",
    "d_zg",
    "d_zgc",
    "hermitian_vars",
    "super_pow",
    "abs_x",
    "compose_analytic",
    "is_monogenic",
    "is_sh_monogenic",
    "sphere_area",
    "nu1",
    "KernelPair",
    "psi_kernels",
    "Circulant2",
    "circulant_mul",
    "dirac_matrix_apply",
    "directional_dagger",
]

Dimensions = Dims

_I = GaussQ(0, 1)
_HALF = Fraction(1, 2)


@dataclass(frozen=True)
class OpTerm:
    """One summand ``coeff * gen * d/d(var)`` of a first-order operator.

    ``gen`` is ``("e", j)`` or ``("eg", k)``; ``deriv`` is ``("x", j)`` or
    ``("xg", k)``.  Indices are 1-based.
    """

    coeff: GaussQ
    gen: tuple
    deriv: tuple


def gen(d: Dims, j: int) -> SuperExpr:
    return SuperExpr.gen(d, j)


def sgen(d: Dims, k: int) -> SuperExpr:
    return SuperExpr.sgen(d, k)


def bosonic_vector(d: Dims) -> SuperExpr:
    out = SuperExpr.zero(d)
    for j in range(1, d.p + 1):
        out = out + SuperExpr.var(d, j) * gen(d, j)
    return out


def fermionic_vector(d: Dims) -> SuperExpr:
    out = SuperExpr.zero(d)
    for k in range(1, 2 * d.n + 1):
        out = out + SuperExpr.fvar(d, k) * sgen(d, k)
    return out


def supervector(d: Dims) -> SuperExpr:
    """x = sum x_j e_j + sum x`_k e`_k."""
    return bosonic_vector(d) + fermionic_vector(d)


# ---------------------------------------------------------------- operators
def _merge(terms):
    acc: dict = {}
    for t in terms:
        acc[(t.gen, t.deriv)] = acc.get((t.gen, t.deriv), GaussQ()) + t.coeff
    return tuple(OpTerm(c, g, dv) for (g, dv), c in acc.items() if c)


def _scaled(terms, c):
    return [OpTerm(t.coeff * c, t.gen, t.deriv) for t in terms]


@lru_cache(maxsize=None)
def dirac_terms(d: Dims, side: str = "left") -> tuple:
    """Super Dirac operator d_x as a term list for the given side."""
    d = d.base()
    terms = [OpTerm(GaussQ(-1), ("e", j), ("x", j)) for j in range(1, d.p + 1)]
    fs = 1 if side == "left" else -1
    for j in range(1, d.n + 1):
        terms.append(OpTerm(GaussQ(2 * fs), ("eg", 2 * j), ("xg", 2 * j - 1)))
        terms.append(OpTerm(GaussQ(-2 * fs), ("eg", 2 * j - 1), ("xg", 2 * j)))
    return _merge(terms)


@lru_cache(maxsize=None)
def twisted_terms(d: Dims, side: str = "left") -> tuple:
    """Twisted Dirac operator d_{J(x)}."""
    if not d.hermitian:
        raise ValueError("twisted Dirac operator needs hermitian dimensions")
    d = d.base()
    m = d.m
    terms = []
    for j in range(1, m + 1):
        terms.append(OpTerm(GaussQ(-1), ("e", j), ("x", m + j)))
        terms.append(OpTerm(GaussQ(1), ("e", m + j), ("x", j)))
    fs = 1 if side == "left" else -1
    for k in range(1, 2 * d.n + 1):
        terms.append(OpTerm(GaussQ(2 * fs), ("eg", k), ("xg", k)))
    return _merge(terms)


@lru_cache(maxsize=None)
def hermitian_terms(d: Dims, which: str = "Z", side: str = "left") -> tuple:
    """d_Z = (d_x - i d_J)/4 and d_{Z^dag} = -(d_x + i d_J)/4."""
    plain = dirac_terms(d, side)
    tw = twisted_terms(d, side)
    q = GaussQ(Fraction(1, 4))
    if which == "Z":
        return _merge(_scaled(plain, q) + _scaled(tw, -q * _I))
    if which in ("Zdag", "Z†"):
        return _merge(_scaled(plain, -q) + _scaled(tw, -q * _I))
    raise ValueError("which must be 'Z' or 'Zdag'")


def _gen_expr(d: Dims, g):
    kind, j = g
    return gen(d, j) if kind == "e" else sgen(d, j)


def _derive(F: SuperExpr, deriv, side):
    kind, j = deriv
    if kind == "x":
        return F.derive_bosonic(j)
    return F.derive_fermionic(j, side)


def apply_operator(terms, F: SuperExpr, side: str = "left") -> SuperExpr:
    out = SuperExpr.zero(F.dims, F.exact)
    for t in terms:
        dF = _derive(F, t.deriv, side)
        if not dF:
            continue
        g = _gen_expr(F.dims, t.gen)
        piece = g * dF if side == "left" else dF * g
        out = out + piece.scale(t.coeff)
    return out


def dirac(F: SuperExpr, side: str = "left") -> SuperExpr:
    """Left d_x F or right F d_x."""
    return apply_operator(dirac_terms(F.dims, side), F, side)


def twisted_dirac(F: SuperExpr, side: str = "left") -> SuperExpr:
    return apply_operator(twisted_terms(F.dims, side), F, side)


def hermitian_dirac(F: SuperExpr, which: str = "Z", side: str = "left") -> SuperExpr:
    return apply_operator(hermitian_terms(F.dims, which, side), F, side)


def laplacian(F: SuperExpr) -> SuperExpr:
    """sum d^2/dx_j^2 - 4 sum d_{x`_{2j-1}} d_{x`_{2j}}."""
    out = SuperExpr.zero(F.dims, F.exact)
    for j in range(1, F.dims.p + 1):
        out = out + F.derive_bosonic(j).derive_bosonic(j)
    for j in range(1, F.dims.n + 1):
        out = out - F.derive_fermionic(2 * j).derive_fermionic(2 * j - 1).scale(4)
    return out


# ------------------------------------------------------- Hermitian structures
def bivectors(d: Dims) -> tuple[SuperExpr, SuperExpr, SuperExpr]:
    """(B_b, B_f, B) with B_b = sum e_j e_{m+j}, B_f = sum e`_k^2, B = B_b - B_f."""
    m = d.m
    bb = SuperExpr.zero(d)
    for j in range(1, m + 1):
        bb = bb + gen(d, j) * gen(d, m + j)
    bf = SuperExpr.zero(d)
    for k in range(1, 2 * d.n + 1):
        bf = bf + sgen(d, k) * sgen(d, k)
    return bb, bf, bb - bf


def witt(d: Dims, kind: str, j: int) -> SuperExpr:
    """Witt basis elements: kind in {'f', 'fd', 'fg', 'fgd'}."""
    m = d.m
    h = Fraction(1, 2)
    if kind == "f":
        return (gen(d, j) - gen(d, m + j).scale(_I)).scale(h)
    if kind == "fd":
        return (gen(d, j) + gen(d, m + j).scale(_I)).scale(-h)
    if kind == "fg":
        return (sgen(d, 2 * j - 1) - sgen(d, 2 * j).scale(_I)).scale(h)
    if kind == "fgd":
        return (sgen(d, 2 * j - 1) + sgen(d, 2 * j).scale(_I)).scale(-h)
    raise ValueError(f"unknown Witt element kind {kind!r}")


def zvar(d: Dims, j: int) -> SuperExpr:
    return SuperExpr.var(d, j) + SuperExpr.var(d, d.m + j).scale(_I)


def zcvar(d: Dims, j: int) -> SuperExpr:
    return SuperExpr.var(d, j) - SuperExpr.var(d, d.m + j).scale(_I)


def zgvar(d: Dims, j: int) -> SuperExpr:
    return SuperExpr.fvar(d, 2 * j - 1) + SuperExpr.fvar(d, 2 * j).scale(_I)


def zgcvar(d: Dims, j: int) -> SuperExpr:
    return SuperExpr.fvar(d, 2 * j - 1) - SuperExpr.fvar(d, 2 * j).scale(_I)


def d_z(F: SuperExpr, j: int) -> SuperExpr:
    m = F.dims.m
    return (F.derive_bosonic(j) - F.derive_bosonic(m + j).scale(_I)).scale(_HALF)


def d_zc(F: SuperExpr, j: int) -> SuperExpr:
    m = F.dims.m
    return (F.derive_bosonic(j) + F.derive_bosonic(m + j).scale(_I)).scale(_HALF)


def d_zg(F: SuperExpr, j: int) -> SuperExpr:
    return (F.derive_fermionic(2 * j - 1) - F.derive_fermionic(2 * j).scale(_I)).scale(_HALF)


def d_zgc(F: SuperExpr, j: int) -> SuperExpr:
    return (F.derive_fermionic(2 * j - 1) + F.derive_fermionic(2 * j).scale(_I)).scale(_HALF)


def hermitian_vars(d: Dims) -> tuple[SuperExpr, SuperExpr]:
    """Z = (x + iJ(x))/2 and Z^dag = -(x - iJ(x))/2."""
    if not d.hermitian:
        raise ValueError("Hermitian variables need hermitian dimensions")
    x = supervector(d)
    jx = x.apply_J()
    return (x + jx.scale(_I)).scale(_HALF), (x - jx.scale(_I)).scale(-_HALF)


def directional_dagger(F: SuperExpr, U_shift: bool = True) -> SuperExpr:
    """D^dag F = sum (z_j - u_j)^c d_{z_j^c} F + sum (z`_j - u`_j)^c d_{z`_j^c} F.

    The directions are centered at the origin (u = 0) unless the expression
    carries Grassmann parameters and ``U_shift`` asks for the fermionic shift
    by u`.  The bosonic shift is applied by the caller through translation.
    """
    d = F.dims
    out = SuperExpr.zero(d, F.exact)
    for j in range(1, d.m + 1):
        out = out + zcvar(d, j) * d_zc(F, j)
    for j in range(1, d.n + 1):
        direction = zgcvar(d, j)
        if U_shift and d.params:
            direction = direction - (SuperExpr.param(d, 2 * j - 1) - SuperExpr.param(d, 2 * j).scale(_I))
        out = out + direction * d_zgc(F, j)
    return out


# ------------------------------------------------------------ superfunctions
def _body_monomial(a0: SuperExpr):
    """Decompose a Grassmann-free, Clifford-scalar single radial term."""
    if len(a0.terms) != 1:
        raise ValueError("unsupported body shape: need a single |x|^lam term or a constant")
    (key, c), = a0.terms.items()
    g, o, s, alpha, lam, pp = key
    if g or o or any(s) or any(alpha):
        raise ValueError("unsupported body shape: need a single |x|^lam term or a constant")
    return c, lam, pp


def super_pow(a: SuperExpr, p) -> SuperExpr:
    """a^p = sum_j N^j/j! (-1)^j (-p)_j a0^(p-j) for even a = a0 + N."""
    if not a.is_even():
        raise ValueError("super_pow needs an even argument")
    p = Fraction(p)
    d = a.dims
    a0 = a.body_part()
    N = a.nilpotent_part()
    if not a0:
        raise ValueError("super_pow needs a nonzero body")
    if not a0.is_clifford_scalar():
        raise ValueError("super_pow needs a Clifford-scalar body")
    out = SuperExpr.zero(d, a.exact)
    Nj = SuperExpr.one(d) if a.exact else SuperExpr.one(d).to_float()
    j = 0
    while Nj:
        coef = Fraction((-1) ** j) * rising(-p, j) / factorial(j)
        if coef:
            out = out + Nj * _body_power(a0, p - j).scale(coef)
        j += 1
        Nj = Nj * N
    return out


def _body_power(a0: SuperExpr, e: Fraction) -> SuperExpr:
    d = a0.dims
    if not a0.exact:
        val = a0.scalar_value() if all(not any(k[3]) and not k[4] for k in a0.terms) else None
        if val is None:
            raise ValueError("float super_pow needs a constant body; evaluate first")
        if abs(val.imag) > 1e-14 * abs(val) or val.real <= 0:
            raise ValueError("body must be real and positive")
        return SuperExpr.const(d, complex(val.real ** float(e)))
    c, lam, pp = _body_monomial(a0)
    if c.im or c.re <= 0:
        raise ValueError("body must be real and positive")
    cq = Fraction(int(c.re.numerator), int(c.re.denominator))
    root = rational_root(cq, e)
    if root is None:
        raise ValueError(f"({cq})^({e}) is not rational; unsupported body shape")
    new_pp = Fraction(pp) * e
    if new_pp.denominator != 1:
        raise ValueError("pi power leaves the half-integer tower")
    key = SuperExpr._key(d, lam=lam * e, pp=int(new_pp))
    return SuperExpr(d, {key: GaussQ(root)})


def abs_x(d: Dims) -> SuperExpr:
    """Super norm |x| = (-x^2)^(1/2)."""
    x = supervector(d)
    return super_pow(-(x * x), _HALF)


def compose_analytic(coeffs, a: SuperExpr) -> SuperExpr:
    """sum_j N^j/j! F^(j)(a0) for even a = a0 + N and supplied Taylor data."""
    if not a.is_even():
        raise ValueError("compose_analytic needs an even argument")
    d = a.dims
    N = a.nilpotent_part()
    out = SuperExpr.zero(d, a.exact)
    Nj = SuperExpr.one(d)
    j = 0
    while Nj:
        if j >= len(coeffs):
            raise ValueError(f"need Taylor coefficients up to order {j}")
        cj = coeffs[j]
        cj = cj if isinstance(cj, SuperExpr) else SuperExpr.const(d, cj)
        out = out + (Nj * cj).scale(Fraction(1, factorial(j)))
        j += 1
        Nj = Nj * N
    return out


def is_monogenic(F: SuperExpr) -> bool:
    return dirac(F).is_zero()


def is_sh_monogenic(F: SuperExpr) -> bool:
    if not F.dims.hermitian:
        raise ValueError("sh-monogenicity needs hermitian dimensions")
    return hermitian_dirac(F, "Z").is_zero() and hermitian_dirac(F, "Zdag").is_zero()


# ------------------------------------------------------------------ kernels
def sphere_area(p: int, n: int) -> Scalar:
    """|S^{p-1|2n}| = 2 pi^(M/2) / Gamma(M/2) with M = p - 2n."""
    M = p - 2 * n
    if M <= 0 and M % 2 == 0:
        raise ValueError(f"superdimension M = {M} is excluded")
    q, k = gamma_half(Fraction(M, 2))
    return Scalar({M - k: GaussQ(2 / q)})


def _check_kernel_dims(d: Dims):
    if d.p < 2:
        raise ValueError("kernels are constructed for at least two bosonic variables")
    if d.M <= 0 and d.M % 2 == 0:
        raise ValueError(f"superdimension M = {d.M} is excluded")


def nu1(d: Dims, form: str = "closed") -> SuperExpr:
    """Fundamental solution of the super Dirac operator (series or closed form)."""
    _check_kernel_dims(d)
    if form == "closed":
        x = supervector(d)
        inv = super_pow(-(x * x), Fraction(-d.M, 2))
        return (x * inv).scale(sphere_area(d.p, d.n).inverse())
    if form != "series":
        raise ValueError("form must be 'series' or 'closed'")
    p, n = d.p, d.n
    xf = fermionic_vector(d)
    xb = bosonic_vector(d)
    pi_n = Scalar({2 * n: GaussQ(1)})
    pi_p2 = Scalar({-p: GaussQ(1)})
    out = SuperExpr.zero(d)
    for k in range(n):
        gq, gk = gamma_half(Fraction(p, 2) - k - 1)
        phi = SuperExpr.radial(d, 2 * k + 2 - p).scale(
            Scalar({gk: GaussQ(gq / (2 ** (2 * k + 2) * factorial(k)))}) * pi_p2
        )
        c = Fraction(2 ** (2 * k + 1) * factorial(k), factorial(n - k - 1))
        out = out + (phi * xf ** (2 * n - 2 * k - 1)).scale(pi_n * c)
    for k in range(n + 1):
        gq, gk = gamma_half(Fraction(p, 2) - k)
        phi = (xb * SuperExpr.radial(d, 2 * k - p)).scale(
            Scalar({gk: GaussQ(-gq / (2 ** (2 * k + 1) * factorial(k)))}) * pi_p2
        )
        c = Fraction(2 ** (2 * k) * factorial(k), factorial(n - k))
        out = out - (phi * xf ** (2 * n - 2 * k)).scale(pi_n * c)
    return out


@dataclass(frozen=True)
class KernelPair:
    nu: SuperExpr
    Jnu: SuperExpr
    psi: SuperExpr
    psi_dag: SuperExpr


def psi_kernels(d: Dims) -> KernelPair:
    """Hermitian kernels Psi = nu + iJ(nu) and Psi^dag = -(nu - iJ(nu))."""
    if not d.hermitian:
        raise ValueError("Hermitian kernels need hermitian dimensions")
    if d.m <= d.n:
        raise ValueError("Hermitian kernels need m > n")
    nu = nu1(d, "closed")
    jnu = nu.apply_J()
    return KernelPair(nu, jnu, nu + jnu.scale(_I), -(nu - jnu.scale(_I)))


# ---------------------------------------------------------------- circulants
@dataclass(frozen=True)
class Circulant2:
    """The 2x2 circulant matrix [[a, b], [b, a]]."""

    a: SuperExpr
    b: SuperExpr

    @classmethod
    def identity(cls, d: Dims) -> "Circulant2":
        return cls(SuperExpr.one(d), SuperExpr.zero(d))

    @classmethod
    def diag(cls, G: SuperExpr) -> "Circulant2":
        return cls(G, SuperExpr.zero(G.dims, G.exact))

    def __add__(self, other):
        return Circulant2(self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        return Circulant2(self.a - other.a, self.b - other.b)

    def __neg__(self):
        return Circulant2(-self.a, -self.b)

    def __mul__(self, other):
        if isinstance(other, Circulant2):
            return circulant_mul(self, other)
        return Circulant2(self.a * other, self.b * other)

    def scale(self, c):
        return Circulant2(self.a.scale(c), self.b.scale(c))

    def map(self, fn) -> "Circulant2":
        return Circulant2(fn(self.a), fn(self.b))

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.a.is_zero(tol) and self.b.is_zero(tol)

    def __eq__(self, other):
        return isinstance(other, Circulant2) and self.a == other.a and self.b == other.b

    __hash__ = None


def circulant_mul(A: Circulant2, B: Circulant2) -> Circulant2:
    return Circulant2(A.a * B.a + A.b * B.b, A.a * B.b + A.b * B.a)


def dirac_matrix_apply(G: Circulant2, side: str = "left") -> Circulant2:
    """Apply the circulant Dirac matrix [[d_Z, d_Zdag], [d_Zdag, d_Z]]."""
    def dz(F):
        return hermitian_dirac(F, "Z", side)

    def dzd(F):
        return hermitian_dirac(F, "Zdag", side)

    return Circulant2(dz(G.a) + dzd(G.b), dz(G.b) + dzd(G.a))
