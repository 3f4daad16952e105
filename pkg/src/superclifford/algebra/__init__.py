"""Exact arithmetic core: scalars, bodies, Grassmann and Clifford-Weyl monomials."""

from .dims import Dims
from .expr import DimensionMismatch, SuperExpr
from .scalar import GaussQ, Scalar, gamma_half, rational_root, rising

__all__ = [
    "Dims",
    "SuperExpr",
    "DimensionMismatch",
    "GaussQ",
    "Scalar",
    "gamma_half",
    "rising",
    "rational_root",
    "mul",
    "derive_bosonic",
    "derive_fermionic",
    "berezin",
    "clifford_conjugate",
    "hermitian_conjugate",
    "complex_conjugate",
    "apply_J",
    "eval_numeric",
]


def mul(a: SuperExpr, b: SuperExpr) -> SuperExpr:
    return a * b


def derive_bosonic(a: SuperExpr, j: int) -> SuperExpr:
    return a.derive_bosonic(j)


def derive_fermionic(a: SuperExpr, j: int, side: str = "left") -> SuperExpr:
    return a.derive_fermionic(j, side)


def berezin(a: SuperExpr) -> SuperExpr:
    return a.berezin()


def clifford_conjugate(a: SuperExpr) -> SuperExpr:
    return a.clifford_conjugate()


def hermitian_conjugate(a: SuperExpr) -> SuperExpr:
    return a.hermitian_conjugate()


def complex_conjugate(a: SuperExpr) -> SuperExpr:
    return a.complex_conjugate()


def apply_J(a: SuperExpr) -> SuperExpr:
    return a.apply_J()


def eval_numeric(a: SuperExpr, point) -> SuperExpr:
    return a.eval_numeric(point)
