"""Quadrature rules on spheres and radial segments."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre
from scipy.special import roots_gegenbauer

__all__ = [
    "sphere_rule",
    "gauss_legendre",
    "unit_sphere_area",
    "pairwise_sum",
]


def unit_sphere_area(p: int) -> float:
    return 2 * math.pi ** (p / 2) / math.gamma(p / 2)


@lru_cache(maxsize=64)
def _sphere_rule(p: int, degree: int):
    if p == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    nphi = 2 * degree
    phi = 2 * math.pi * np.arange(nphi) / nphi
    pts = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    wts = np.full(nphi, 2 * math.pi / nphi)
    # build S^{k} from S^{k-1}: w = (u, sqrt(1-u^2) v) with weight (1-u^2)^{(k-2)/2}
    for k in range(2, p):
        alpha = (k - 1) / 2
        u, wu = roots_gegenbauer(degree, alpha)
        s = np.sqrt(1 - u * u)
        new_pts = np.concatenate(
            [u[:, None, None].repeat(len(pts), 1), (s[:, None, None] * pts[None, :, :])], axis=2
        ).reshape(-1, k + 1)
        new_wts = (wu[:, None] * wts[None, :]).reshape(-1)
        pts, wts = new_pts, new_wts
    pts.setflags(write=False)
    wts.setflags(write=False)
    return pts, wts


def sphere_rule(p: int, degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Product rule on S^{p-1}: Gauss-Gegenbauer in polar angles, trapezoid in azimuth.

    Exact for polynomials of degree < min(2*degree, 2*degree - 1) in each factor.
    Returns ``(points (N, p), weights (N,))``.
    """
    if p < 1:
        raise ValueError("sphere rule needs p >= 1")
    if degree < 2:
        raise ValueError("angular degree must be at least 2")
    if p > 8:
        raise ValueError(f"no product sphere grid for p = {p} (limit 8)")
    return _sphere_rule(p, degree)


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = legendre.leggauss(n)
    return (x + 1) / 2, w / 2


def pairwise_sum(values: np.ndarray) -> complex:
    """Fixed-shape pairwise reduction (independent of scheduling)."""
    v = np.asarray(values)
    while v.shape[0] > 1:
        if v.shape[0] % 2:
            v = np.concatenate([v, np.zeros((1,) + v.shape[1:], v.dtype)])
        v = v[0::2] + v[1::2]
    return v[0] if v.shape[0] else 0.0
