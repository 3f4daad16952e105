"""Exact scalars: Gaussian rationals and the half-integer pi tower.

Coefficients of exact expressions are :class:`GaussQ` numbers (``a + b i``
with rational ``a, b`` backed by ``gmpy2.mpq``).  Powers of ``sqrt(pi)`` are
tracked separately as an integer exponent so that constants such as sphere
areas and Gamma values at half-integers stay exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpq

__all__ = [
    "GaussQ",
    "Scalar",
    "as_gauss",
    "to_fraction",
    "gamma_half",
    "rising",
    "rational_root",
]


def to_fraction(value) -> Fraction:
    """Convert an int, str, Fraction or mpq to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, type(mpq(0))):
        return Fraction(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot convert {value!r} to an exact rational")


def _q(value):
    if isinstance(value, type(mpq(0))):
        return value
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, str):
        return mpq(Fraction(value).numerator, Fraction(value).denominator)
    raise TypeError(f"not an exact rational: {value!r}")


class GaussQ:
    """Exact complex rational ``re + im*i``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _q(re)
        self.im = _q(im)

    @classmethod
    def _raw(cls, re, im):
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    def __add__(self, other):
        if isinstance(other, GaussQ):
            return GaussQ._raw(self.re + other.re, self.im + other.im)
        if isinstance(other, int):
            return GaussQ._raw(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GaussQ):
            return GaussQ._raw(self.re - other.re, self.im - other.im)
        if isinstance(other, int):
            return GaussQ._raw(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return GaussQ._raw(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, GaussQ):
            a, b, c, d = self.re, self.im, other.re, other.im
            if not b and not d:
                return GaussQ._raw(a * c, b)
            return GaussQ._raw(a * c - b * d, a * d + b * c)
        if isinstance(other, int):
            return GaussQ._raw(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self) -> "GaussQ":
        den = self.re * self.re + self.im * self.im
        if not den:
            raise ZeroDivisionError("inverse of zero")
        return GaussQ._raw(self.re / den, -self.im / den)

    def __truediv__(self, other):
        if isinstance(other, int):
            other = GaussQ(other)
        if not isinstance(other, GaussQ):
            return NotImplemented
        return self * other.inverse()

    def conjugate(self) -> "GaussQ":
        return GaussQ._raw(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussQ):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return not self.im

    def __repr__(self):
        return f"GaussQ({self.re}, {self.im})"


def as_gauss(value) -> GaussQ:
    """Coerce ints, Fractions, Python complex with integer parts, or GaussQ."""
    if isinstance(value, GaussQ):
        return value
    if isinstance(value, (int, Fraction, str)) or isinstance(value, type(mpq(0))):
        return GaussQ(value)
    if isinstance(value, complex):
        re, im = Fraction(value.real), Fraction(value.imag)
        return GaussQ(re, im)
    raise TypeError(f"cannot make an exact scalar from {value!r}")


def rising(q: Fraction, j: int) -> Fraction:
    """Rising factorial ``(q)_j = q (q+1) ... (q+j-1)``."""
    out = Fraction(1)
    for k in range(j):
        out *= q + k
    return out


@lru_cache(maxsize=None)
def gamma_half(x: Fraction) -> tuple[Fraction, int]:
    """Gamma at an integer or half-integer ``x`` as ``(rational, k)``.

    The value is ``rational * pi^(k/2)`` with ``k`` equal to 0 or 1.
    Raises ``ValueError`` at the poles (non-positive integers).
    """
    x = Fraction(x)
    if x.denominator == 1:
        k = x.numerator
        if k <= 0:
            raise ValueError(f"Gamma has a pole at {k}")
        return Fraction(math.factorial(k - 1)), 0
    if x.denominator != 2:
        raise ValueError(f"Gamma({x}) is outside the half-integer tower")
    # Gamma(1/2) = sqrt(pi); shift with Gamma(x+1) = x Gamma(x)
    val = Fraction(1)
    y = Fraction(1, 2)
    while y < x:
        val *= y
        y += 1
    while y > x:
        y -= 1
        val /= y
    return val, 1


def rational_root(q: Fraction, e: Fraction) -> Fraction | None:
    """Exact ``q**e`` for positive rational ``q`` if it is rational, else None."""
    q = Fraction(q)
    e = Fraction(e)
    if q <= 0:
        raise ValueError("rational_root needs a positive base")
    if e.denominator == 1:
        return q ** e.numerator
    d = e.denominator
    num, ok1 = gmpy2.iroot(gmpy2.mpz(q.numerator), d)
    den, ok2 = gmpy2.iroot(gmpy2.mpz(q.denominator), d)
    if not (ok1 and ok2):
        return None
    return Fraction(int(num), int(den)) ** e.numerator


class Scalar:
    """Finite sum ``sum_k c_k pi^(k/2)`` with Gaussian rational ``c_k``."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for k, c in (terms or {}).items():
            c = as_gauss(c)
            if c:
                clean[int(k)] = c
        self.terms = clean

    @classmethod
    def of(cls, value, pipow: int = 0) -> "Scalar":
        return cls({pipow: as_gauss(value)})

    @classmethod
    def pi(cls, half_power: int = 2) -> "Scalar":
        return cls({half_power: GaussQ(1)})

    def __add__(self, other):
        other = _as_scalar(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, GaussQ()) + c
        return Scalar(out)

    __radd__ = __add__

    def __neg__(self):
        return Scalar({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_scalar(other))

    def __rsub__(self, other):
        return _as_scalar(other) - self

    def __mul__(self, other):
        other = _as_scalar(other)
        out: dict[int, GaussQ] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                out[k1 + k2] = out.get(k1 + k2, GaussQ()) + c1 * c2
        return Scalar(out)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if len(self.terms) != 1:
            raise ZeroDivisionError("only single pi-power scalars are invertible")
        (k, c), = self.terms.items()
        return Scalar({-k: c.inverse()})

    def __truediv__(self, other):
        return self * _as_scalar(other).inverse()

    def conjugate(self) -> "Scalar":
        return Scalar({k: c.conjugate() for k, c in self.terms.items()})

    def __eq__(self, other):
        try:
            other = _as_scalar(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __complex__(self):
        return sum((complex(c) * math.pi ** (k / 2) for k, c in self.terms.items()), 0j)

    def __repr__(self):
        parts = [f"({c.re}+{c.im}i)pi^({k}/2)" for k, c in sorted(self.terms.items())]
        return "Scalar(" + " + ".join(parts or ["0"]) + ")"


def _as_scalar(value) -> Scalar:
    if isinstance(value, Scalar):
        return value
    return Scalar.of(value)
