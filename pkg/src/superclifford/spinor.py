"""Spinor representation built on the idempotents I_b and I_f.

A spinor is stored as a table ``(S, eps, beta) -> coefficient`` standing for

    coefficient * f_S * e_{2m+1}^eps * a^beta * I_b * I_f,

where f_S is the ascending product of the Witt elements f_j, j in S, and the
a_j are the auxiliary commuting variables carrying the symplectic generators.
I_b = f_1^dag f_1 ... f_m^dag f_m and I_f = exp(i/2 sum a_j^2) are never
materialized: f_j^dag annihilates I_b and the a-derivative picks up the
Gaussian, d_{a_j}(p I_f) = (d_{a_j} p + i a_j p) I_f.  Coefficients are
Clifford-scalar SuperExprs (bodies and Grassmann variables), which commute
with every generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import sympy as sp

from .algebra import Dims, GaussQ, SuperExpr
from .algebra.monomials import popcount
from .operators import d_zc, d_zgc, hermitian_terms

__all__ = [
    "SpinorElem",
    "act_generator",
    "apply_hermitian",
    "project",
    "is_holomorphic",
    "is_sh_monogenic_spinor",
    "check_equivalence",
    "coefficient_rank",
    "independence_checks",
]

_I = GaussQ(0, 1)
_HALF = Fraction(1, 2)


@dataclass(frozen=True, eq=False)
class SpinorElem:
    dims: Dims
    table: dict  # (S bitmask, eps, beta) -> SuperExpr

    @classmethod
    def zero(cls, d: Dims) -> "SpinorElem":
        return cls(d, {})

    @classmethod
    def ground(cls, d: Dims, coeff: SuperExpr | None = None) -> "SpinorElem":
        c = coeff if coeff is not None else SuperExpr.one(d)
        return cls(d, {(0, 0, (0,) * d.n): c} if c else {})

    def __add__(self, other: "SpinorElem") -> "SpinorElem":
        out = dict(self.table)
        for k, c in other.table.items():
            out[k] = out[k] + c if k in out else c
        return SpinorElem(self.dims, {k: c for k, c in out.items() if c})

    def __neg__(self):
        return SpinorElem(self.dims, {k: -c for k, c in self.table.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "SpinorElem":
        out = {}
        for k, v in self.table.items():
            w = v.scale(c)
            if w:
                out[k] = w
        return SpinorElem(self.dims, out)

    def map_coeffs(self, fn) -> "SpinorElem":
        out = {}
        for k, c in self.table.items():
            v = fn(c)
            if v:
                out[k] = v
        return SpinorElem(self.dims, out)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.table.values())

    def __eq__(self, other):
        return isinstance(other, SpinorElem) and (self - other).is_zero()

    __hash__ = None


def _add(out: dict, key, c: SuperExpr):
    if not c:
        return
    out[key] = out[key] + c if key in out else c


def _witt_insert(s: SpinorElem, j: int) -> SpinorElem:
    out: dict = {}
    bit = 1 << (j - 1)
    for (S, eps, beta), c in s.table.items():
        if S & bit:
            continue
        sign = -1 if popcount(S & (bit - 1)) & 1 else 1
        _add(out, (S | bit, eps, beta), c.scale(sign))
    return SpinorElem(s.dims, out)


def _witt_remove(s: SpinorElem, j: int) -> SpinorElem:
    out: dict = {}
    bit = 1 << (j - 1)
    for (S, eps, beta), c in s.table.items():
        if not S & bit:
            continue
        sign = -1 if popcount(S & (bit - 1)) & 1 else 1
        _add(out, (S ^ bit, eps, beta), c.scale(sign))
    return SpinorElem(s.dims, out)


def _extra_gen(S: int, eps: int):
    """e_{2m+1} moved past f_S and multiplied into e_{2m+1}^eps."""
    sign = -1 if popcount(S) & 1 else 1
    if eps:
        return -sign, 0
    return sign, 1


def _symp_odd(s: SpinorElem, j: int) -> SpinorElem:
    """e`_{2j-1} -> e_{2m+1} d_{a_j} acting on p * I_f."""
    out: dict = {}
    for (S, eps, beta), c in s.table.items():
        sign, eps2 = _extra_gen(S, eps)
        b = beta[j - 1]
        if b:
            lower = beta[: j - 1] + (b - 1,) + beta[j:]
            _add(out, (S, eps2, lower), c.scale(sign * b))
        higher = beta[: j - 1] + (b + 1,) + beta[j:]
        _add(out, (S, eps2, higher), c.scale(_I * sign))
    return SpinorElem(s.dims, out)


def _symp_even(s: SpinorElem, j: int) -> SpinorElem:
    """e`_{2j} -> -e_{2m+1} a_j."""
    out: dict = {}
    for (S, eps, beta), c in s.table.items():
        sign, eps2 = _extra_gen(S, eps)
        higher = beta[: j - 1] + (beta[j - 1] + 1,) + beta[j:]
        _add(out, (S, eps2, higher), c.scale(-sign))
    return SpinorElem(s.dims, out)


def act_generator(gen: tuple, s: SpinorElem) -> SpinorElem:
    """Left action of ``("e", j)``, ``("eg", k)``, ``("f", j)``, ``("fd", j)``, ``("fg", j)`` or ``("fgd", j)``."""
    kind, j = gen
    d = s.dims
    m, n = d.m, d.n
    if kind == "f":
        _check(1 <= j <= m, gen)
        return _witt_insert(s, j)
    if kind == "fd":
        _check(1 <= j <= m, gen)
        return _witt_remove(s, j)
    if kind == "e":
        _check(1 <= j <= 2 * m, gen)
        if j <= m:
            return _witt_insert(s, j) - _witt_remove(s, j)
        return (_witt_insert(s, j - m) + _witt_remove(s, j - m)).scale(_I)
    if kind == "eg":
        _check(1 <= j <= 2 * n, gen)
        return _symp_odd(s, (j + 1) // 2) if j % 2 else _symp_even(s, j // 2)
    if kind == "fg":
        _check(1 <= j <= n, gen)
        return (_symp_odd(s, j) - _symp_even(s, j).scale(_I)).scale(_HALF)
    if kind == "fgd":
        _check(1 <= j <= n, gen)
        return (_symp_odd(s, j) + _symp_even(s, j).scale(_I)).scale(-_HALF)
    raise ValueError(f"unknown generator {gen!r}")


def _check(ok: bool, gen):
    if not ok:
        raise IndexError(f"generator {gen!r} out of range")


def project(F: SuperExpr) -> SpinorElem:
    """F * I_b * I_f for a Clifford-scalar F."""
    if not F.dims.hermitian:
        raise ValueError("spinor representation needs hermitian dimensions")
    if not F.is_clifford_scalar():
        raise ValueError("F carries Clifford generators")
    return SpinorElem.ground(F.dims, F)


def apply_hermitian(which: str, s: SpinorElem) -> SpinorElem:
    """d_Z or d_{Z^dag} applied from the left (derivatives hit the coefficients)."""
    out = SpinorElem.zero(s.dims)
    for t in hermitian_terms(s.dims, which, "left"):
        kind, j = t.deriv
        if kind == "x":
            ds = s.map_coeffs(lambda c: c.derive_bosonic(j))
        else:
            ds = s.map_coeffs(lambda c: c.derive_fermionic(j, "left"))
        if not ds.table:
            continue
        out = out + act_generator(t.gen, ds).scale(t.coeff)
    return out


def is_holomorphic(F: SuperExpr) -> bool:
    """d_{z_j^c} F = 0 and d_{z`_k^c} F = 0 for all j, k."""
    if not F.dims.hermitian:
        raise ValueError("holomorphicity needs hermitian dimensions")
    if not F.is_clifford_scalar():
        raise ValueError("holomorphicity is tested on Clifford-scalar functions")
    d = F.dims
    return all(d_zc(F, j).is_zero() for j in range(1, d.m + 1)) and all(
        d_zgc(F, k).is_zero() for k in range(1, d.n + 1)
    )


def is_sh_monogenic_spinor(s: SpinorElem) -> bool:
    return apply_hermitian("Z", s).is_zero() and apply_hermitian("Zdag", s).is_zero()


def check_equivalence(F: SuperExpr) -> dict:
    hol = is_holomorphic(F)
    s = project(F)
    dz = apply_hermitian("Z", s)
    dzd = apply_hermitian("Zdag", s)
    sh = dz.is_zero() and dzd.is_zero()
    return {"holomorphic": hol, "sh_monogenic": sh, "dZ_zero": dz.is_zero(), "agree": hol == sh}


# ---------------------------------------------------------------- independence
def _coeff_vector(s: SpinorElem, basis: list) -> list:
    """Coefficients of s over ``basis`` keys; every table entry must be a constant."""
    row = []
    for key in basis:
        c = s.table.get(key)
        if c is None or not c:
            row.append(sp.Integer(0))
            continue
        if len(c.terms) != 1:
            raise ValueError("rank check needs constant coefficients")
        (k, q), = c.terms.items()
        if k[0] or k[1] or any(k[2]) or any(k[3]) or k[4] or k[5]:
            raise ValueError("rank check needs constant coefficients")
        row.append(sp.Rational(q.re.numerator, q.re.denominator) + sp.I * sp.Rational(q.im.numerator, q.im.denominator))
    return row


def coefficient_rank(elems: list) -> int:
    """Rank of the coefficient matrix of spinors over their joint basis."""
    basis = sorted({k for s in elems for k in s.table})
    if not basis:
        return 0
    return sp.Matrix([_coeff_vector(s, basis) for s in elems]).rank()


def independence_checks(d: Dims) -> dict:
    """Ranks of the linear and quadratic Witt families applied to I_b I_f."""
    m, n = d.m, d.n
    g = SpinorElem.ground(d)
    linear = [act_generator(("f", j), g) for j in range(1, m + 1)]
    linear += [act_generator(("fg", k), g) for k in range(1, n + 1)]
    quad = []
    for j in range(1, m + 1):
        for k in range(j + 1, m + 1):
            quad.append(act_generator(("f", j), act_generator(("f", k), g)))
    for j in range(1, m + 1):
        for k in range(1, n + 1):
            quad.append(act_generator(("f", j), act_generator(("fg", k), g)))
    for j in range(1, n + 1):
        for k in range(j, n + 1):
            quad.append(act_generator(("fg", j), act_generator(("fg", k), g)))
    return {
        "linear": (coefficient_rank(linear), len(linear)),
        "quadratic": (coefficient_rank(quad), len(quad)),
    }
