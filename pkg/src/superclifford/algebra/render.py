"""Canonical text rendering (deterministic term order, parser-compatible)."""

from __future__ import annotations

from fractions import Fraction

from .scalar import GaussQ

__all__ = ["render", "format_rational"]


def format_rational(q) -> str:
    q = Fraction(int(q.numerator), int(q.denominator))
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _exp(e: Fraction) -> str:
    if e.denominator == 1:
        return str(e.numerator)
    return f"({e.numerator}/{e.denominator})"


def _monomial_factors(key, dims) -> list[str]:
    g, o, s, a, l, pp = key
    out = []
    if pp:
        e = Fraction(pp, 2)
        out.append("pi" if e == 1 else f"pi^{_exp(e)}")
    for j, aj in enumerate(a, start=1):
        if aj:
            out.append(f"x{j}" if aj == 1 else f"x{j}^{aj}")
    if l:
        out.append("abs(x)" if l == 1 else f"abs(x)^{_exp(Fraction(l))}")
    nf = 2 * dims.n
    for k in range(dims.ngrass):
        if g >> k & 1:
            out.append(f"xg{k + 1}" if k < nf else f"yg{k - nf + 1}")
    for j in range(dims.p):
        if o >> j & 1:
            out.append(f"e{j + 1}")
    for k, sk in enumerate(s, start=1):
        if sk:
            out.append(f"eg{k}" if sk == 1 else f"eg{k}^{sk}")
    return out


def _split_coeff(c) -> tuple[int, str]:
    """Return (sign, magnitude text) where text is '' for a unit coefficient."""
    if isinstance(c, GaussQ):
        re, im = c.re, c.im
        if not im:
            sign = -1 if re < 0 else 1
            mag = abs(re)
            return sign, "" if mag == 1 else format_rational(mag)
        if not re:
            sign = -1 if im < 0 else 1
            mag = abs(im)
            return sign, "i" if mag == 1 else f"{format_rational(mag)}*i"
        imtxt = format_rational(abs(im))
        op = "-" if im < 0 else "+"
        return 1, f"({format_rational(re)}{op}{imtxt}*i)"
    c = complex(c)
    if c.imag == 0:
        return (-1 if c.real < 0 else 1), repr(abs(c.real))
    op = "-" if c.imag < 0 else "+"
    return 1, f"({c.real!r}{op}{abs(c.imag)!r}*i)"


def render(expr) -> str:
    if not expr.terms:
        return "0"
    pieces = []
    for idx, key in enumerate(sorted(expr.terms)):
        sign, mag = _split_coeff(expr.terms[key])
        factors = _monomial_factors(key, expr.dims)
        if mag:
            factors.insert(0, mag)
        body = "*".join(factors) if factors else "1"
        if idx == 0:
            pieces.append(("-" if sign < 0 else "") + body)
        else:
            pieces.append((" - " if sign < 0 else " + ") + body)
    return "".join(pieces)
