"""Radial-polynomial bodies x^alpha |x|^lam in canonical form.

The relation |x|^2 = x_1^2 + ... + x_p^2 makes the naive monomial basis
redundant.  Canonical form eliminates x_p^2: every stored monomial has
alpha_p in {0, 1}.  Monomials x^alpha |x|^lam with alpha_p <= 1 are linearly
independent as functions on R^p minus the origin, so equality of canonical
forms is equality of functions.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

__all__ = ["reduce_body", "body_mul", "body_derivative"]

Body = tuple  # (alpha, lam)


@lru_cache(maxsize=1 << 17)
def reduce_body(alpha: tuple, lam: Fraction) -> tuple[tuple[tuple, Fraction, int], ...]:
    """Canonical expansion of x^alpha |x|^lam as ``(alpha', lam', int coeff)``."""
    p = len(alpha)
    if p == 0 or alpha[-1] < 2:
        return ((alpha, lam, 1),)
    # x_p^2 = r^2 - sum_{j<p} x_j^2
    lowered = alpha[:-1] + (alpha[-1] - 2,)
    out: dict = {}
    for a, l, c in reduce_body(lowered, lam + 2):
        out[(a, l)] = out.get((a, l), 0) + c
    for j in range(p - 1):
        bumped = list(lowered)
        bumped[j] += 2
        for a, l, c in reduce_body(tuple(bumped), lam):
            out[(a, l)] = out.get((a, l), 0) - c
    return tuple((a, l, c) for (a, l), c in out.items() if c)


@lru_cache(maxsize=1 << 17)
def body_mul(a1: tuple, l1: Fraction, a2: tuple, l2: Fraction):
    alpha = tuple(x + y for x, y in zip(a1, a2))
    return reduce_body(alpha, l1 + l2)


@lru_cache(maxsize=1 << 17)
def body_derivative(alpha: tuple, lam: Fraction, j: int):
    """d/dx_j of x^alpha |x|^lam as canonical ``(alpha', lam', coeff)`` terms.

    Coefficients are Fractions because lam may be rational.
    """
    out: dict = {}
    if alpha[j]:
        lowered = list(alpha)
        lowered[j] -= 1
        for a, l, c in reduce_body(tuple(lowered), lam):
            out[(a, l)] = out.get((a, l), 0) + alpha[j] * c
    if lam:
        raised = list(alpha)
        raised[j] += 1
        for a, l, c in reduce_body(tuple(raised), lam - 2):
            out[(a, l)] = out.get((a, l), 0) + lam * c
    return tuple((a, l, Fraction(c)) for (a, l), c in out.items() if c)
