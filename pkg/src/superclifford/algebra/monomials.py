"""Grassmann and Clifford-Weyl monomial arithmetic.

Grassmann monomials are bitsets; bit ``k`` stands for the (k+1)-th fermionic
generator and the canonical order is ascending.  A Clifford-Weyl monomial is
a pair ``(ortho, symp)``: a bitset of orthogonal generators e_j (ascending
product) followed by the normal-ordered word of symplectic generators with
exponent tuple ``symp``.

Orthogonal generators square to -1 and anticommute.  Orthogonal and
symplectic generators anticommute.  Symplectic generators come in pairs
(A, B) = (e`_{2j-1}, e`_{2j}) with AB - BA = 1; different pairs commute.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb, factorial

__all__ = [
    "popcount",
    "grass_sign",
    "grass_mul",
    "cliff_mul",
    "weyl_pair_mul",
    "cliff_reverse",
    "MonoDict",
]

MonoDict = dict  # (ortho, symp) -> int


def popcount(x: int) -> int:
    return bin(x).count("1")


@lru_cache(maxsize=1 << 16)
def grass_sign(g1: int, g2: int) -> int:
    """Sign of reordering g1 * g2 (disjoint) into ascending order."""
    swaps = 0
    rest = g2
    while rest:
        low = rest & -rest
        swaps += popcount(g1 & ~((low << 1) - 1))
        rest ^= low
    return -1 if swaps & 1 else 1


def grass_mul(g1: int, g2: int) -> tuple[int, int]:
    """Product of two Grassmann monomials as ``(sign, mask)``; sign 0 if zero."""
    if g1 & g2:
        return 0, 0
    return grass_sign(g1, g2), g1 | g2


@lru_cache(maxsize=1 << 16)
def _ortho_mul(o1: int, o2: int) -> int:
    # reorder sign as for anticommuting generators, then e_j^2 = -1
    swaps = 0
    rest = o2
    while rest:
        low = rest & -rest
        swaps += popcount(o1 & ~((low << 1) - 1))
        rest ^= low
    swaps += popcount(o1 & o2)
    return -1 if swaps & 1 else 1


@lru_cache(maxsize=1 << 14)
def weyl_pair_mul(a: int, b: int, c: int, d: int) -> tuple[tuple[int, int, int], ...]:
    """(A^a B^b)(A^c B^d) in normal order for AB - BA = 1.

    Returns tuples ``(coeff, exponent of A, exponent of B)`` using
    B^b A^c = sum_k k! C(b,k) C(c,k) (-1)^k A^(c-k) B^(b-k).
    """
    out = []
    for k in range(min(b, c) + 1):
        coeff = factorial(k) * comb(b, k) * comb(c, k)
        if k & 1:
            coeff = -coeff
        out.append((coeff, a + c - k, b + d - k))
    return tuple(out)


@lru_cache(maxsize=1 << 16)
def cliff_mul(o1: int, s1: tuple, o2: int, s2: tuple) -> tuple[tuple[int, tuple, int], ...]:
    """Product of Clifford-Weyl monomials as tuples ``(ortho, symp, coeff)``."""
    sign = _ortho_mul(o1, o2)
    if (sum(s1) & 1) and (popcount(o2) & 1):
        sign = -sign
    o = o1 ^ o2
    if not s1 or not any(s1):
        return ((o, s2, sign),)
    if not any(s2):
        return ((o, s1, sign),)
    words = [((), sign)]
    for j in range(0, len(s1), 2):
        expansions = weyl_pair_mul(s1[j], s1[j + 1], s2[j], s2[j + 1])
        words = [(w + (ea, eb), c * ce) for (w, c) in words for (ce, ea, eb) in expansions]
    return tuple((o, w, c) for (w, c) in words)


@lru_cache(maxsize=1 << 14)
def cliff_reverse(o: int, s: tuple) -> tuple[tuple[int, tuple, int], ...]:
    """Clifford conjugate of a normal-ordered monomial.

    bar(e_{j1}..e_{jk} e`_{l1}..e`_{ls}) = (-1)^(k + s(s+1)/2) e`_{ls}..e`_{l1} e_{jk}..e_{j1},
    followed by normal ordering of the reversed word.
    """
    k = popcount(o)
    sdeg = sum(s)
    sign = (-1) ** (k + sdeg * (sdeg + 1) // 2 + k * (k - 1) // 2 + sdeg * k)
    # reversed symplectic word: per pair B^b A^a, pairs commute
    words = [((), sign)]
    for j in range(0, len(s), 2):
        a, b = s[j], s[j + 1]
        expansions = weyl_pair_mul(0, b, a, 0)
        words = [(w + (ea, eb), c * ce) for (w, c) in words for (ce, ea, eb) in expansions]
    return tuple((o, w, c) for (w, c) in words)
