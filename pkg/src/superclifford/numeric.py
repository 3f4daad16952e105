"""Vectorized evaluation of superfunctions on point clouds.

A :class:`NumericField` maps an algebra key ``(grassmann, ortho, symp)`` to an
array of complex samples, one per point.  Products follow the same Grassmann
and Clifford-Weyl rules as :class:`SuperExpr`.
"""

from __future__ import annotations

import math

import numpy as np

from .algebra import SuperExpr
from .algebra.dims import Dims
from .algebra.monomials import cliff_mul, grass_sign

__all__ = ["NumericField", "evaluate_bodies", "values_to_expr"]


def evaluate_bodies(expr: SuperExpr, X: np.ndarray) -> dict:
    """Samples of every distinct body ``x^alpha |x|^lam`` of ``expr`` at rows of X."""
    r2 = np.einsum("ij,ij->i", X, X)
    cache: dict = {}
    for (_g, _o, _s, a, l, _pp) in expr.terms:
        if (a, l) in cache:
            continue
        if l:
            if l < 0 and np.any(r2 == 0.0):
                raise ZeroDivisionError("singular evaluation: negative radial power at the origin")
            val = r2 ** (float(l) / 2)
        else:
            val = np.ones(X.shape[0])
        for j, aj in enumerate(a):
            if aj:
                val = val * X[:, j] ** aj
        cache[(a, l)] = val
    return cache


class NumericField:
    __slots__ = ("dims", "data", "size")

    def __init__(self, dims: Dims, data: dict, size: int):
        self.dims = dims
        self.data = data
        self.size = size

    @classmethod
    def from_expr(cls, expr: SuperExpr, X: np.ndarray) -> "NumericField":
        X = np.atleast_2d(np.asarray(X, dtype=float))
        bodies = evaluate_bodies(expr, X)
        data: dict = {}
        for (g, o, s, a, l, pp), c in expr.terms.items():
            coeff = complex(c) * (math.pi ** (pp / 2) if pp else 1.0)
            key = (g, o, s)
            val = coeff * bodies[(a, l)]
            prev = data.get(key)
            data[key] = val if prev is None else prev + val
        return cls(expr.dims, data, X.shape[0])

    def __add__(self, other: "NumericField") -> "NumericField":
        data = dict(self.data)
        for k, v in other.data.items():
            prev = data.get(k)
            data[k] = v if prev is None else prev + v
        return NumericField(self.dims, data, self.size)

    def __neg__(self):
        return NumericField(self.dims, {k: -v for k, v in self.data.items()}, self.size)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "NumericField":
        if isinstance(c, np.ndarray):
            return NumericField(self.dims, {k: v * c for k, v in self.data.items()}, self.size)
        c = complex(c)
        return NumericField(self.dims, {k: v * c for k, v in self.data.items()}, self.size)

    def mul(self, other: "NumericField", keep_mask: int | None = None) -> "NumericField":
        """Product; with ``keep_mask`` only Grassmann results containing it are kept."""
        out: dict = {}
        for (g1, o1, s1), v1 in self.data.items():
            for (g2, o2, s2), v2 in other.data.items():
                if g1 & g2:
                    continue
                g = g1 | g2
                if keep_mask is not None and g & keep_mask != keep_mask:
                    continue
                prod = v1 * v2
                if grass_sign(g1, g2) < 0:
                    prod = -prod
                for o, s, cc in cliff_mul(o1, s1, o2, s2):
                    key = (g, o, s)
                    val = prod if cc == 1 else prod * cc
                    prev = out.get(key)
                    out[key] = val if prev is None else prev + val
        return NumericField(self.dims, out, self.size)

    __mul__ = mul

    def berezin(self) -> "NumericField":
        """Top x` coefficient times pi^(-n); parameter bits are retained."""
        full = self.dims.xmask
        scale = math.pi ** (-self.dims.n)
        out: dict = {}
        for (g, o, s), v in self.data.items():
            if g & full != full:
                continue
            key = (g ^ full, o, s)
            prev = out.get(key)
            out[key] = v * scale if prev is None else prev + v * scale
        return NumericField(self.dims, out, self.size)

    def weighted_sum(self, weights: np.ndarray) -> dict:
        return {k: complex(np.dot(v, weights)) for k, v in self.data.items()}

    def stacked(self, keys: list) -> np.ndarray:
        """Samples as an array (size, len(keys))."""
        cols = [self.data.get(k, np.zeros(self.size, complex)) for k in keys]
        if not cols:
            return np.zeros((self.size, 0), complex)
        return np.stack([np.broadcast_to(c, (self.size,)) for c in cols], axis=1)


def values_to_expr(dims: Dims, values: dict, drop: float = 0.0) -> SuperExpr:
    """Float SuperExpr from ``{(g, o, s): complex}``."""
    zero_a = (0,) * dims.p
    out = {}
    for (g, o, s), v in values.items():
        if abs(v) > drop:
            out[(g, o, s, zero_a, SuperExpr._key(dims)[4], 0)] = complex(v)
    return SuperExpr(dims, out, exact=False)
