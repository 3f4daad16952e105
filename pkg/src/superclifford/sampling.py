"""Seeded random SuperExprs for property checks and verification suites."""

from __future__ import annotations

import random
from fractions import Fraction

from .algebra import Dims, GaussQ, SuperExpr

__all__ = ["random_coeff", "random_poly", "random_even", "random_clifford_poly"]


def random_coeff(rng: random.Random, complex_: bool = True) -> GaussQ:
    re = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    im = Fraction(rng.randint(-4, 4), rng.randint(1, 3)) if complex_ else 0
    return GaussQ(re, im)


def _grass_mask(d: Dims, rng: random.Random) -> int:
    g = 0
    for k in range(2 * d.n):
        if rng.random() < 0.4:
            g |= 1 << k
    return g


def random_poly(d: Dims, rng: random.Random, terms: int = 4, degree: int = 2,
                clifford: bool = False, even: bool = False) -> SuperExpr:
    """Random polynomial-bodied SuperExpr; optionally with Clifford generators."""
    out = SuperExpr.zero(d)
    for _ in range(terms):
        alpha = [0] * d.p
        for _ in range(rng.randint(0, degree)):
            alpha[rng.randrange(d.p)] += 1
        g = _grass_mask(d, rng)
        if even and bin(g).count("1") % 2:
            g &= g - 1
        o = 0
        s = [0] * (2 * d.n)
        if clifford:
            for j in range(d.p):
                if rng.random() < 0.3:
                    o |= 1 << j
            for k in range(2 * d.n):
                if rng.random() < 0.3:
                    s[k] = rng.randint(1, 2)
        mono = SuperExpr.body(d, alpha, 0, random_coeff(rng))
        mono = mono * SuperExpr(d, {SuperExpr._key(d, g=g, o=o, s=s): GaussQ(1)})
        out = out + mono
    return out


def random_clifford_poly(d: Dims, rng: random.Random, terms: int = 4, degree: int = 2) -> SuperExpr:
    return random_poly(d, rng, terms, degree, clifford=True)


def random_even(d: Dims, rng: random.Random, body: Fraction | int | None = None, terms: int = 3) -> SuperExpr:
    """Even Clifford-scalar element with positive constant body (no bosonic dependence)."""
    b = Fraction(body) if body is not None else Fraction(rng.randint(1, 9), rng.randint(1, 4))
    out = SuperExpr.const(d, b)
    for _ in range(terms):
        g = _grass_mask(d, rng)
        if bin(g).count("1") % 2:
            g &= g - 1
        if g:
            out = out + SuperExpr(d, {SuperExpr._key(d, g=g): random_coeff(rng, complex_=False)})
    return out
