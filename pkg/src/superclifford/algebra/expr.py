"""The universal value type: exact or floating superfunctions.

A :class:`SuperExpr` is a finite sum of terms

    c * pi^(pp/2) * x^alpha |x|^lam * x`_G * e_O * e`^s

stored flat as ``{(G, O, s, alpha, lam, pp): c}``.  In exact mode ``c`` is a
:class:`GaussQ`; in float mode it is a Python complex and ``pp`` is always 0.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable

from .bodies import body_derivative, body_mul, reduce_body
from .dims import Dims
from .monomials import cliff_mul, cliff_reverse, grass_sign, popcount
from .scalar import GaussQ, Scalar, as_gauss

__all__ = ["SuperExpr", "DimensionMismatch"]

_ONE = GaussQ(1)
_ZERO_F = Fraction(0)


class DimensionMismatch(ValueError):
    pass


def _is_exact_number(value) -> bool:
    return isinstance(value, (int, Fraction, GaussQ)) or type(value).__name__ == "mpq"


def _scale(c, q):
    """Multiply a coefficient by a rational or integer."""
    if isinstance(c, GaussQ):
        if isinstance(q, int):
            return c * q
        return c * GaussQ(q)
    return c * float(q)


class SuperExpr:
    """Element of (radial bodies) x Grassmann x complex Clifford-Weyl algebra."""

    __slots__ = ("dims", "terms", "exact")

    def __init__(self, dims: Dims, terms: dict | None = None, exact: bool = True):
        self.dims = dims
        self.exact = exact
        self.terms = {k: c for k, c in (terms or {}).items() if c}

    # ------------------------------------------------------------------ builders
    @classmethod
    def _raw(cls, dims, terms, exact):
        obj = object.__new__(cls)
        obj.dims = dims
        obj.exact = exact
        obj.terms = terms
        return obj

    @classmethod
    def zero(cls, dims: Dims, exact: bool = True) -> "SuperExpr":
        return cls._raw(dims, {}, exact)

    @classmethod
    def _key(cls, dims, g=0, o=0, s=None, alpha=None, lam=_ZERO_F, pp=0):
        s = tuple(s) if s is not None else (0,) * (2 * dims.n)
        alpha = tuple(alpha) if alpha is not None else (0,) * dims.p
        return (g, o, s, alpha, Fraction(lam), pp)

    @classmethod
    def const(cls, dims: Dims, value=1, pipow: int = 0) -> "SuperExpr":
        """Constant ``value * pi^(pipow/2)``; float values give a float expression."""
        if isinstance(value, Scalar):
            return cls(dims, {cls._key(dims, pp=k): c for k, c in value.terms.items()})
        if _is_exact_number(value):
            return cls(dims, {cls._key(dims, pp=pipow): as_gauss(value)})
        value = complex(value) * math.pi ** (pipow / 2)
        return cls(dims, {cls._key(dims): value}, exact=False)

    @classmethod
    def one(cls, dims: Dims) -> "SuperExpr":
        return cls.const(dims, 1)

    @classmethod
    def var(cls, dims: Dims, j: int) -> "SuperExpr":
        """Bosonic variable x_j (1-based)."""
        if not 1 <= j <= dims.p:
            raise IndexError(f"bosonic index {j} out of range 1..{dims.p}")
        alpha = [0] * dims.p
        alpha[j - 1] = 1
        return cls.body(dims, alpha, 0)

    @classmethod
    def body(cls, dims: Dims, alpha, lam=0, coeff=1) -> "SuperExpr":
        """Body monomial ``coeff * x^alpha |x|^lam`` in canonical form."""
        out = {}
        c0 = as_gauss(coeff)
        for a, l, c in reduce_body(tuple(alpha), Fraction(lam)):
            key = cls._key(dims, alpha=a, lam=l)
            out[key] = out.get(key, GaussQ()) + c0 * c
        return cls(dims, out)

    @classmethod
    def radial(cls, dims: Dims, lam) -> "SuperExpr":
        """|x|^lam for the bosonic Euclidean norm."""
        return cls.body(dims, (0,) * dims.p, lam)

    @classmethod
    def fvar(cls, dims: Dims, k: int) -> "SuperExpr":
        """Fermionic variable x`_k (1-based)."""
        if not 1 <= k <= 2 * dims.n:
            raise IndexError(f"fermionic index {k} out of range 1..{2 * dims.n}")
        return cls(dims, {cls._key(dims, g=1 << (k - 1)): _ONE})

    @classmethod
    def param(cls, dims: Dims, k: int) -> "SuperExpr":
        """Grassmann parameter y`_k (1-based); requires ``dims.params``."""
        if not dims.params:
            raise ValueError("dimensions carry no Grassmann parameters")
        if not 1 <= k <= 2 * dims.n:
            raise IndexError(f"parameter index {k} out of range 1..{2 * dims.n}")
        return cls(dims, {cls._key(dims, g=1 << (2 * dims.n + k - 1)): _ONE})

    @classmethod
    def gen(cls, dims: Dims, j: int) -> "SuperExpr":
        """Orthogonal generator e_j (1-based)."""
        if not 1 <= j <= dims.p:
            raise IndexError(f"orthogonal generator index {j} out of range 1..{dims.p}")
        return cls(dims, {cls._key(dims, o=1 << (j - 1)): _ONE})

    @classmethod
    def sgen(cls, dims: Dims, k: int) -> "SuperExpr":
        """Symplectic generator e`_k (1-based)."""
        if not 1 <= k <= 2 * dims.n:
            raise IndexError(f"symplectic generator index {k} out of range 1..{2 * dims.n}")
        s = [0] * (2 * dims.n)
        s[k - 1] = 1
        return cls(dims, {cls._key(dims, s=s): _ONE})

    # --------------------------------------------------------------- arithmetic
    def _check(self, other: "SuperExpr"):
        if not self.dims.compatible(other.dims):
            raise DimensionMismatch(f"dimension mismatch: {self.dims} vs {other.dims}")

    def _coerce(self, other):
        if isinstance(other, SuperExpr):
            self._check(other)
            return other
        return SuperExpr.const(self.dims, other)

    def _join_dims(self, other):
        if self.dims == other.dims:
            return self.dims
        return self.dims if self.dims.params else other.dims

    def _align(self, other):
        """Bring both operands to a common scalar mode."""
        a, b = self, other
        if a.exact and not b.exact:
            a = a.to_float()
        elif b.exact and not a.exact:
            b = b.to_float()
        return a, b

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self._align(other)
        out = dict(a.terms)
        for k, c in b.terms.items():
            v = out.get(k)
            out[k] = c if v is None else v + c
        return SuperExpr(self._join_dims(other), out, a.exact)

    __radd__ = __add__

    def __neg__(self):
        return SuperExpr._raw(self.dims, {k: -c for k, c in self.terms.items()}, self.exact)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, SuperExpr):
            return self.scale(other)
        self._check(other)
        a, b = self._align(other)
        exact = a.exact
        out: dict = {}
        get = out.get
        for (g1, o1, s1, a1, l1, p1), c1 in a.terms.items():
            for (g2, o2, s2, a2, l2, p2), c2 in b.terms.items():
                if g1 & g2:
                    continue
                c = c1 * c2
                if grass_sign(g1, g2) < 0:
                    c = -c
                g = g1 | g2
                pp = p1 + p2
                bodies = body_mul(a1, l1, a2, l2)
                for o, s, cc in cliff_mul(o1, s1, o2, s2):
                    ccc = c * cc if cc != 1 else c
                    for al, lam, bc in bodies:
                        key = (g, o, s, al, lam, pp)
                        val = ccc * bc if bc != 1 else ccc
                        prev = get(key)
                        out[key] = val if prev is None else prev + val
        return SuperExpr(self._join_dims(other), out, exact)

    def __rmul__(self, other):
        if isinstance(other, SuperExpr):
            return other.__mul__(self)
        return self.scale(other)

    def scale(self, value) -> "SuperExpr":
        """Multiply by a number or a :class:`Scalar` (central elements)."""
        if isinstance(value, Scalar):
            return SuperExpr.const(self.dims, value) * self
        if _is_exact_number(value) and self.exact:
            g = as_gauss(value)
            return SuperExpr(self.dims, {k: c * g for k, c in self.terms.items()}, True)
        if _is_exact_number(value):
            value = complex(as_gauss(value))
        base = self.to_float() if self.exact else self
        return SuperExpr(self.dims, {k: c * complex(value) for k, c in base.terms.items()}, False)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers; use super_pow for others")
        out = SuperExpr.one(self.dims) if self.exact else SuperExpr.one(self.dims).to_float()
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def commutator(self, other, anti: bool = False) -> "SuperExpr":
        return self * other + other * self if anti else self * other - other * self

    # -------------------------------------------------------------- comparisons
    def __eq__(self, other):
        if not isinstance(other, SuperExpr):
            try:
                other = SuperExpr.const(self.dims, other)
            except TypeError:
                return NotImplemented
        if self.exact != other.exact:
            return (self - other).is_zero()
        return self.dims.compatible(other.dims) and self.terms == other.terms

    __hash__ = None

    def is_zero(self, tol: float = 0.0) -> bool:
        if self.exact or tol == 0.0:
            return not self.terms
        return self.max_abs() <= tol

    def max_abs(self) -> float:
        """Largest coefficient modulus (pi powers folded in)."""
        f = self.to_float()
        return max((abs(c) for c in f.terms.values()), default=0.0)

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    # ------------------------------------------------------------ conversions
    def to_float(self) -> "SuperExpr":
        if not self.exact:
            return self
        out: dict = {}
        for (g, o, s, a, l, pp), c in self.terms.items():
            key = (g, o, s, a, l, 0)
            val = complex(c) * (math.pi ** (pp / 2) if pp else 1.0)
            out[key] = out.get(key, 0j) + val
        return SuperExpr(self.dims, out, False)

    def with_dims(self, dims: Dims) -> "SuperExpr":
        """Reinterpret under compatible dimensions (e.g. adding the parameter block)."""
        if not self.dims.compatible(dims):
            raise DimensionMismatch(f"cannot move {self.dims} to {dims}")
        if not dims.params:
            pmask = ((1 << (2 * self.dims.n)) - 1) << (2 * self.dims.n)
            if any(k[0] & pmask for k in self.terms):
                raise DimensionMismatch("expression uses Grassmann parameters")
        return SuperExpr._raw(dims, dict(self.terms), self.exact)

    def map_terms(self, fn) -> "SuperExpr":
        """Build a new expression from ``fn(key, coeff) -> iterable of (key, coeff)``."""
        out: dict = {}
        for key, c in self.terms.items():
            for k2, c2 in fn(key, c):
                prev = out.get(k2)
                out[k2] = c2 if prev is None else prev + c2
        return SuperExpr(self.dims, out, self.exact)

    # -------------------------------------------------------------- structure
    def scalar_value(self):
        """Value of a constant expression (Scalar in exact mode, complex in float)."""
        for (g, o, s, a, l, pp) in self.terms:
            if g or o or any(s) or any(a) or l:
                raise ValueError("expression is not a constant")
        if self.exact:
            return Scalar({k[5]: c for k, c in self.terms.items()})
        return sum(self.terms.values(), 0j)

    def grassmann_part(self, mask: int) -> "SuperExpr":
        """Terms whose Grassmann monomial is exactly ``mask``."""
        return SuperExpr._raw(self.dims, {k: c for k, c in self.terms.items() if k[0] == mask}, self.exact)

    def body_part(self) -> "SuperExpr":
        """Terms with empty Grassmann monomial."""
        return self.grassmann_part(0)

    def nilpotent_part(self) -> "SuperExpr":
        return SuperExpr._raw(self.dims, {k: c for k, c in self.terms.items() if k[0]}, self.exact)

    def is_even(self) -> bool:
        return all(popcount(k[0]) % 2 == 0 for k in self.terms)

    def is_clifford_scalar(self) -> bool:
        return all(k[1] == 0 and not any(k[2]) for k in self.terms)

    def grade_involution(self) -> "SuperExpr":
        """Grassmann parity automorphism x`_k -> -x`_k (parameters included)."""
        return SuperExpr._raw(
            self.dims,
            {k: (-c if popcount(k[0]) & 1 else c) for k, c in self.terms.items()},
            self.exact,
        )

    @property
    def table(self) -> dict:
        """Grouped view ``{(grassmann, (ortho, symp)): {(alpha, lam): Scalar}}``."""
        out: dict = {}
        for (g, o, s, a, l, pp), c in self.terms.items():
            body = out.setdefault((g, (o, s)), {})
            if self.exact:
                sc = body.get((a, l), Scalar())
                body[(a, l)] = sc + Scalar({pp: c})
            else:
                body[(a, l)] = body.get((a, l), 0j) + c
        return out

    # ------------------------------------------------------------ derivatives
    def derive_bosonic(self, j: int) -> "SuperExpr":
        """Partial derivative in x_j (1-based)."""
        if not 1 <= j <= self.dims.p:
            raise IndexError(f"bosonic index {j} out of range 1..{self.dims.p}")
        idx = j - 1

        def rule(key, c):
            g, o, s, a, l, pp = key
            for a2, l2, q in body_derivative(a, l, idx):
                yield (g, o, s, a2, l2, pp), _scale(c, q)

        return self.map_terms(rule)

    def derive_fermionic(self, k: int, side: str = "left") -> "SuperExpr":
        """Left (default) or right derivative in x`_k (1-based)."""
        if not 1 <= k <= 2 * self.dims.n:
            raise IndexError(f"fermionic index {k} out of range 1..{2 * self.dims.n}")
        bit = 1 << (k - 1)
        out = {}
        for (g, o, s, a, l, pp), c in self.terms.items():
            if not g & bit:
                continue
            if side == "left":
                flips = popcount(g & (bit - 1))
            elif side == "right":
                flips = popcount(g >> k)
            else:
                raise ValueError("side must be 'left' or 'right'")
            out[(g ^ bit, o, s, a, l, pp)] = -c if flips & 1 else c
        return SuperExpr._raw(self.dims, out, self.exact)

    def derive_param(self, k: int, side: str = "left") -> "SuperExpr":
        """Left or right derivative in the Grassmann parameter y`_k (1-based)."""
        if not self.dims.params:
            raise ValueError("dimensions carry no Grassmann parameters")
        if not 1 <= k <= 2 * self.dims.n:
            raise IndexError(f"parameter index {k} out of range 1..{2 * self.dims.n}")
        pos = 2 * self.dims.n + k
        bit = 1 << (pos - 1)
        out = {}
        for (g, o, s, a, l, pp), c in self.terms.items():
            if not g & bit:
                continue
            if side == "left":
                flips = popcount(g & (bit - 1))
            elif side == "right":
                flips = popcount(g >> pos)
            else:
                raise ValueError("side must be 'left' or 'right'")
            out[(g ^ bit, o, s, a, l, pp)] = -c if flips & 1 else c
        return SuperExpr._raw(self.dims, out, self.exact)

    def to_params(self) -> "SuperExpr":
        """Rename x`_k -> y`_k (needs the parameter block; order is preserved)."""
        if not self.dims.params:
            raise ValueError("to_params needs dimensions with parameters")
        nf = 2 * self.dims.n
        out = {}
        for (g, o, s, a, l, pp), c in self.terms.items():
            if g >> nf:
                raise ValueError("expression already depends on parameters")
            out[(g << nf, o, s, a, l, pp)] = c
        return SuperExpr._raw(self.dims, out, self.exact)

    def berezin(self) -> "SuperExpr":
        """pi^(-n) d_{x`_2n} ... d_{x`_1}: top fermionic coefficient."""
        n = self.dims.n
        full = self.dims.xmask
        out: dict = {}
        for (g, o, s, a, l, pp), c in self.terms.items():
            if g & full != full:
                continue
            if self.exact:
                key = (g ^ full, o, s, a, l, pp - 2 * n)
            else:
                key = (g ^ full, o, s, a, l, 0)
                c = c * math.pi ** (-n)
            prev = out.get(key)
            out[key] = c if prev is None else prev + c
        return SuperExpr(self.dims, out, self.exact)

    # ------------------------------------------------------ automorphisms etc.
    def complex_conjugate(self) -> "SuperExpr":
        return SuperExpr._raw(self.dims, {k: c.conjugate() for k, c in self.terms.items()}, self.exact)

    def clifford_conjugate(self) -> "SuperExpr":
        def rule(key, c):
            g, o, s, a, l, pp = key
            for o2, s2, q in cliff_reverse(o, s):
                yield (g, o2, s2, a, l, pp), _scale(c, q)

        return self.map_terms(rule)

    def hermitian_conjugate(self) -> "SuperExpr":
        return self.clifford_conjugate().complex_conjugate()

    def apply_J(self) -> "SuperExpr":
        """Complex structure: e_j -> -e_{m+j}, e_{m+j} -> e_j, e`_{2j-1} -> -e`_{2j}, e`_{2j} -> e`_{2j-1}."""
        if not self.dims.hermitian:
            raise ValueError("J needs hermitian dimensions (even bosonic dimension)")
        m = self.dims.m
        n = self.dims.n

        def rule(key, c):
            g, o, s, a, l, pp = key
            for o2, s2, q in _j_image(m, n, o, s):
                yield (g, o2, s2, a, l, pp), _scale(c, q)

        return self.map_terms(rule)

    def shift_fermions(self) -> "SuperExpr":
        """Substitute x`_k -> x`_k - y`_k (needs the parameter block)."""
        if not self.dims.params:
            raise ValueError("shift_fermions needs dimensions with parameters")
        nf = 2 * self.dims.n

        def rule(key, c):
            g, o, s, a, l, pp = key
            pmask = g >> nf
            if pmask:
                raise ValueError("expression already depends on parameters")
            for sign, g2 in _shift_expansion(g, nf):
                yield (g2, o, s, a, l, pp), (c if sign > 0 else -c)

        return self.map_terms(rule)

    def eval_numeric(self, point: Iterable[float]) -> "SuperExpr":
        """Evaluate bodies at a bosonic point; Grassmann/Clifford parts are kept."""
        x = [float(t) for t in point]
        if len(x) != self.dims.p:
            raise ValueError(f"point has {len(x)} coordinates, expected {self.dims.p}")
        r2 = sum(t * t for t in x)
        out: dict = {}
        for (g, o, s, a, l, pp), c in self.terms.items():
            if l and r2 == 0.0:
                if l < 0:
                    raise ZeroDivisionError("singular evaluation: negative radial power at the origin")
                rv = 0.0
            else:
                rv = r2 ** (float(l) / 2) if l else 1.0
            val = rv
            for xi, ai in zip(x, a):
                if ai:
                    val *= xi ** ai
            val = complex(c) * val * (math.pi ** (pp / 2) if pp else 1.0)
            key = (g, o, s, (0,) * len(a), _ZERO_F, 0)
            out[key] = out.get(key, 0j) + val
        return SuperExpr(self.dims, out, False)

    # ---------------------------------------------------------------- output
    def render(self) -> str:
        from .render import render

        return render(self)

    def __repr__(self):
        return f"SuperExpr[{self.dims}]({self.render()})"

    __str__ = render


def _shift_expansion(g: int, nf: int):
    """Expand prod_{k in g ascending} (x`_k - y`_k) into canonical monomials."""
    terms = [(1, 0)]
    rest = g
    while rest:
        low = rest & -rest
        rest ^= low
        y = low << nf
        new = []
        for sign, mono in terms:
            new.append((sign * grass_sign(mono, low), mono | low))
            new.append((-sign * grass_sign(mono, y), mono | y))
        terms = new
    return terms


_J_CACHE: dict = {}


def _j_image(m: int, n: int, o: int, s: tuple):
    key = (m, n, o, s)
    hit = _J_CACHE.get(key)
    if hit is not None:
        return hit
    # orthogonal part: images are single generators up to sign
    words = [(0, (0,) * (2 * n), 1)]

    def times(words, o2, s2, c2):
        out: dict = {}
        for (wo, ws, wc) in words:
            for ro, rs, rc in cliff_mul(wo, ws, o2, s2):
                out[(ro, rs)] = out.get((ro, rs), 0) + wc * rc * c2
        return [(ko, ks, kc) for (ko, ks), kc in out.items() if kc]

    zero_s = (0,) * (2 * n)
    for j in range(2 * m):
        if o >> j & 1:
            if j < m:
                words = times(words, 1 << (j + m), zero_s, -1)
            else:
                words = times(words, 1 << (j - m), zero_s, 1)
    for k in range(2 * n):
        for _ in range(s[k]):
            img = [0] * (2 * n)
            if k % 2 == 0:
                img[k + 1] = 1
                words = times(words, 0, tuple(img), -1)
            else:
                img[k - 1] = 1
                words = times(words, 0, tuple(img), 1)
    result = tuple(words)
    _J_CACHE[key] = result
    return result
