import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import gamma

from oracles import MatrixRep
from superclifford.algebra import (
    DimensionMismatch,
    Dims,
    GaussQ,
    Scalar,
    SuperExpr,
    gamma_half,
    rational_root,
    rising,
)
from superclifford.operators import supervector, witt
from superclifford.sampling import random_even, random_poly

I = GaussQ(0, 1)
D21 = Dims.herm(2, 1)
D31 = Dims(3, 1)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
REPS = {D21: MatrixRep(4, 1), D31: MatrixRep(3, 1)}
POINTS = {D21: np.array([0.3, -0.7, 0.45, 1.1]), D31: np.array([0.8, 0.25, -0.6])}


def xg(d, k):
    return SuperExpr.fvar(d, k)


def e(d, j):
    return SuperExpr.gen(d, j)


def eg(d, k):
    return SuperExpr.sgen(d, k)


def poly(d, seed, **kw):
    kw.setdefault("terms", 3)
    kw.setdefault("degree", 2)
    kw.setdefault("clifford", True)
    return random_poly(d, random.Random(seed), **kw)


# -------------------------------------------------------------- examples
def test_fermionic_variables_anticommute():
    assert xg(D21, 2) * xg(D21, 1) == -(xg(D21, 1) * xg(D21, 2))
    assert (xg(D21, 1) * xg(D21, 1)).is_zero()


def test_symplectic_swap_inserts_form():
    assert eg(D21, 2) * eg(D21, 1) == eg(D21, 1) * eg(D21, 2) - SuperExpr.one(D21)


def test_orthogonal_generator_squares_to_minus_one():
    assert e(D21, 1) * e(D21, 1) == SuperExpr.const(D21, -1)


def test_witt_anticommutator_expanded():
    f, fd = witt(D21, "f", 1), witt(D21, "fd", 1)
    assert f * fd + fd * f == SuperExpr.one(D21)


def test_mul_rejects_mismatched_dims():
    with pytest.raises(DimensionMismatch):
        _ = SuperExpr.var(D21, 1) * SuperExpr.var(Dims(2, 1), 1)


def test_derive_bosonic_examples():
    d = Dims(4, 1)
    x1 = SuperExpr.var(d, 1)
    assert (x1 * x1).derive_bosonic(1) == x1.scale(2)
    lam = Fraction(-3, 2)
    assert SuperExpr.radial(d, lam).derive_bosonic(1) == (x1 * SuperExpr.radial(d, lam - 2)).scale(lam)
    assert (x1 * xg(d, 1)).derive_bosonic(1) == xg(d, 1)
    with pytest.raises(IndexError):
        x1.derive_bosonic(5)


def test_derive_fermionic_examples():
    d = Dims(4, 1)
    pair = xg(d, 1) * xg(d, 2)
    assert pair.derive_fermionic(1) == xg(d, 2)
    assert pair.derive_fermionic(2) == -xg(d, 1)
    assert SuperExpr.var(d, 1).derive_fermionic(1).is_zero()
    with pytest.raises(IndexError):
        pair.derive_fermionic(3)


def test_berezin_examples():
    d = Dims(4, 1)
    inv_pi = SuperExpr.const(d, 1, pipow=-2)
    assert (xg(d, 1) * xg(d, 2)).berezin() == inv_pi
    assert SuperExpr.one(d).berezin().is_zero()
    assert (SuperExpr.var(d, 1) * xg(d, 1) * xg(d, 2)).berezin() == SuperExpr.var(d, 1) * inv_pi


def test_berezin_two_pairs_sign():
    # pi^-2 d4 d3 d2 d1 [x`1 x`2 x`3 x`4] = pi^-2
    d = Dims(2, 2)
    top = xg(d, 1) * xg(d, 2) * xg(d, 3) * xg(d, 4)
    assert top.berezin() == SuperExpr.const(d, 1, pipow=-4)
    assert (xg(d, 2) * xg(d, 1) * xg(d, 3) * xg(d, 4)).berezin() == SuperExpr.const(d, -1, pipow=-4)


def test_conjugation_examples():
    # sign (-1)^{k + s(s+1)/2} with k=2, s=0 on the reversed word e2 e1
    assert (e(D21, 1) * e(D21, 2)).clifford_conjugate() == e(D21, 2) * e(D21, 1)
    assert SuperExpr.const(D21, I).hermitian_conjugate() == SuperExpr.const(D21, -I)
    assert witt(D21, "f", 1).hermitian_conjugate() == witt(D21, "fd", 1)
    # s = 1: bar(e`1) = -e`1; s = 2: bar(e`1 e`2) = -e`2 e`1
    assert eg(D21, 1).clifford_conjugate() == -eg(D21, 1)
    assert (eg(D21, 1) * eg(D21, 2)).clifford_conjugate() == -(eg(D21, 2) * eg(D21, 1))


def test_complex_structure_examples():
    d = D21
    assert e(d, 1).apply_J() == -e(d, 3)
    assert e(d, 3).apply_J() == e(d, 1)
    assert eg(d, 1).apply_J() == -eg(d, 2)
    assert eg(d, 2).apply_J() == eg(d, 1)
    x = supervector(d)
    assert x.apply_J().apply_J() == -x
    assert SuperExpr.var(d, 1).apply_J() == SuperExpr.var(d, 1)
    with pytest.raises(ValueError):
        SuperExpr.gen(Dims(3, 1), 1).apply_J()


def test_eval_numeric_examples():
    d = D21
    x1 = SuperExpr.var(d, 1)
    assert complex((x1 * x1).eval_numeric([2, 0, 0, 0]).scalar_value()) == 4
    v = (x1 * SuperExpr.radial(d, -2)).eval_numeric([1, 1, 0, 0])
    assert abs(complex(v.scalar_value()) - 0.5) < 1e-15
    with pytest.raises(ZeroDivisionError):
        SuperExpr.radial(d, -2).eval_numeric([0, 0, 0, 0])


def test_eval_keeps_grassmann_structure():
    d = D21
    F = SuperExpr.var(d, 2) * xg(d, 1) * e(d, 3)
    v = F.eval_numeric([0, 5, 0, 0])
    assert (v - (xg(d, 1) * e(d, 3)).to_float().scale(5)).max_abs() < 1e-15


# ---------------------------------------------------------------- scalars
def test_gamma_half_against_scipy():
    for x in [Fraction(k, 2) for k in range(-7, 14) if k % 2 or k > 0]:
        q, k = gamma_half(x)
        assert abs(float(q) * math.pi ** (k / 2) - gamma(float(x))) < 1e-12 * max(1, abs(gamma(float(x))))
    with pytest.raises(ValueError):
        gamma_half(Fraction(-2))


def test_rising_factorial():
    assert rising(Fraction(1, 2), 3) == Fraction(1, 2) * Fraction(3, 2) * Fraction(5, 2)
    assert rising(Fraction(5), 0) == 1


def test_rational_root():
    assert rational_root(Fraction(9, 4), Fraction(1, 2)) == Fraction(3, 2)
    assert rational_root(Fraction(2), Fraction(1, 2)) is None
    assert rational_root(Fraction(8), Fraction(-2, 3)) == Fraction(1, 4)


def test_pi_tower_merges_powers():
    half = Scalar.pi(1)
    assert half * half == Scalar.pi(2)
    assert abs(complex(Scalar.pi(3)) - math.pi**1.5) < 1e-12
    assert Scalar.pi(2) * Scalar.pi(2).inverse() == Scalar.of(1)


@given(st.fractions(max_denominator=50), st.fractions(max_denominator=50), st.fractions(max_denominator=50), st.fractions(max_denominator=50))
def test_gaussq_matches_complex_arithmetic(a, b, c, d):
    z, w = GaussQ(a, b), GaussQ(c, d)
    zc, wc = complex(float(a), float(b)), complex(float(c), float(d))
    assert abs(complex(z * w) - zc * wc) < 1e-9 * (1 + abs(zc * wc))
    assert abs(complex(z + w) - (zc + wc)) < 1e-12 * (1 + abs(zc + wc))
    if w:
        assert (z / w) * w == z


# --------------------------------------------------- matrix representation
@pytest.mark.parametrize("d", [D21, D31], ids=["herm21", "p3n1"])
def test_representation_satisfies_generator_relations(d):
    rep, x = REPS[d], POINTS[d]
    cols = rep.low_columns()
    for j in range(1, d.p + 1):
        for k in range(1, d.p + 1):
            ej, ek = rep.matrix(e(d, j), x), rep.matrix(e(d, k), x)
            want = -2 * (j == k) * np.eye(rep.dim)
            assert np.allclose((ej @ ek + ek @ ej)[:, cols], want[:, cols])
    a, b = rep.matrix(eg(d, 1), x), rep.matrix(eg(d, 2), x)
    assert np.allclose((a @ b - b @ a)[:, cols], np.eye(rep.dim)[:, cols])


@pytest.mark.parametrize("d", [D21, D31], ids=["herm21", "p3n1"])
@given(seed=seeds)
def test_product_matches_matrix_representation(d, seed):
    rep, x = REPS[d], POINTS[d]
    a, b = poly(d, seed), poly(d, seed + 1)
    cols = rep.low_columns()
    lhs = rep.matrix(a * b, x)[:, cols]
    rhs = (rep.matrix(a, x) @ rep.matrix(b, x))[:, cols]
    assert np.allclose(lhs, rhs, atol=1e-9)


@pytest.mark.parametrize("d", [D21, D31], ids=["herm21", "p3n1"])
@given(seed=seeds, k=st.integers(1, 2))
def test_left_fermionic_derivative_is_annihilation(d, seed, k):
    rep, x = REPS[d], POINTS[d]
    F = poly(d, seed, terms=4)
    cols = rep.vacuum_columns()
    lhs = rep.matrix(F.derive_fermionic(k), x)[:, cols]
    rhs = (rep.annihilator(k) @ rep.matrix(F, x))[:, cols]
    assert np.allclose(lhs, rhs, atol=1e-9)


@pytest.mark.parametrize("d", [D21, D31], ids=["herm21", "p3n1"])
@given(seed=seeds, j=st.integers(1, 3))
def test_bosonic_derivative_matches_central_difference(d, seed, j):
    rep, x = REPS[d], POINTS[d]
    rng = random.Random(seed)
    F = poly(d, seed) * SuperExpr.radial(d, Fraction(rng.randint(-6, 6), rng.choice([1, 2, 3])))
    h = 1e-4
    step = np.zeros(d.p)
    step[j - 1] = h
    cols = rep.low_columns(1)
    fd = (rep.matrix(F, x + step) - rep.matrix(F, x - step))[:, cols] / (2 * h)
    exact = rep.matrix(F.derive_bosonic(j), x)[:, cols]
    assert np.allclose(fd, exact, atol=1e-5 * (1 + np.abs(exact).max()))


# ------------------------------------------------------------- ring laws
@given(seed=seeds)
def test_associativity(seed):
    a, b, c = poly(D21, seed), poly(D21, seed + 1), poly(D21, seed + 2)
    assert (a * b) * c == a * (b * c)


@given(seed=seeds)
def test_distributivity(seed):
    a, b, c = poly(D21, seed), poly(D21, seed + 1), poly(D21, seed + 2)
    assert a * (b + c) == a * b + a * c
    assert (a + b) * c == a * c + b * c


@given(seed=seeds)
def test_additive_group(seed):
    a, b = poly(D21, seed), poly(D21, seed + 1)
    assert a + b == b + a
    assert (a - a).is_zero()
    assert a + SuperExpr.zero(D21) == a
    assert a * SuperExpr.one(D21) == a == SuperExpr.one(D21) * a


# ------------------------------------------------------- derivative laws
@given(seed=seeds, j=st.integers(1, 4), k=st.integers(1, 4))
def test_bosonic_derivatives_commute(seed, j, k):
    F = poly(D21, seed, degree=4) * SuperExpr.radial(D21, Fraction(-1, 2))
    assert F.derive_bosonic(j).derive_bosonic(k) == F.derive_bosonic(k).derive_bosonic(j)


@given(seed=seeds, j=st.integers(1, 4), k=st.integers(1, 4))
def test_fermionic_derivatives_anticommute(seed, j, k):
    d = Dims(2, 2)
    F = poly(d, seed, terms=5)
    assert (F.derive_fermionic(j).derive_fermionic(k) + F.derive_fermionic(k).derive_fermionic(j)).is_zero()


@given(seed=seeds, j=st.integers(1, 4), k=st.integers(1, 2))
def test_mixed_derivatives_commute(seed, j, k):
    F = poly(D21, seed, degree=3)
    assert F.derive_bosonic(j).derive_fermionic(k) == F.derive_fermionic(k).derive_bosonic(j)


@given(seed=seeds, j=st.integers(1, 4))
def test_bosonic_leibniz_rule(seed, j):
    a, b = poly(D21, seed), poly(D21, seed + 1)
    assert (a * b).derive_bosonic(j) == a.derive_bosonic(j) * b + a * b.derive_bosonic(j)


@given(seed=seeds, k=st.integers(1, 2))
def test_fermionic_graded_leibniz_rule(seed, k):
    a = poly(D21, seed, clifford=False, even=True)
    b = poly(D21, seed + 1)
    assert (a * b).derive_fermionic(k) == a.derive_fermionic(k) * b + a * b.derive_fermionic(k)
    odd = xg(D21, 1) * SuperExpr.var(D21, 2)
    assert (odd * b).derive_fermionic(k) == odd.derive_fermionic(k) * b - odd * b.derive_fermionic(k)


@given(seed=seeds)
def test_berezin_reads_top_fock_component(seed):
    # pi^-n times the <x`1..x`2n| component of F applied to the Grassmann vacuum
    d = Dims(2, 2)
    rep, x = MatrixRep(2, 2, cap=0), np.array([0.4, -1.3])
    F = poly(d, seed, terms=6, clifford=False)
    block = rep.dim_c * rep.dim_w
    top = rep.matrix(F, x)[15 * block : 16 * block, :block]
    got = rep.matrix(F.berezin(), x)[:block, :block]
    assert np.allclose(got, top / math.pi**2, atol=1e-12)


# ------------------------------------------------------------ conjugations
@given(seed=seeds)
def test_conjugations_are_involutions(seed):
    a = poly(D21, seed)
    assert a.clifford_conjugate().clifford_conjugate() == a
    assert a.hermitian_conjugate().hermitian_conjugate() == a
    assert a.complex_conjugate().complex_conjugate() == a


@given(seed=seeds)
def test_dagger_is_bar_after_complex_conjugation(seed):
    a = poly(D21, seed)
    assert a.hermitian_conjugate() == a.complex_conjugate().clifford_conjugate()


@given(seed=seeds)
def test_bar_reverses_orthogonal_products(seed):
    d = Dims(4, 0)
    a, b = poly(d, seed), poly(d, seed + 1)
    assert (a * b).clifford_conjugate() == b.clifford_conjugate() * a.clifford_conjugate()


@given(seed=seeds)
def test_complex_structure_is_multiplicative(seed):
    a, b = poly(D21, seed), poly(D21, seed + 1)
    assert (a * b).apply_J() == a.apply_J() * b.apply_J()


@given(seed=seeds)
def test_complex_structure_squared_on_vectors(seed):
    rng = random.Random(seed)
    v = SuperExpr.zero(D21)
    for j in range(1, 5):
        v = v + SuperExpr.var(D21, rng.randint(1, 4)) * e(D21, j)
    for k in range(1, 3):
        v = v + xg(D21, rng.randint(1, 2)) * eg(D21, k).scale(rng.randint(-3, 3))
    assert v.apply_J().apply_J() == -v


@given(seed=seeds)
def test_nilpotent_part_power_vanishes(seed):
    d = Dims(2, 2)
    N = random_even(d, random.Random(seed)).nilpotent_part() + xg(d, 1) * SuperExpr.var(d, 2)
    power = SuperExpr.one(d)
    for _ in range(2 * d.n + 1):
        power = power * N
    assert power.is_zero()


def test_render_is_deterministic():
    a = poly(D21, 11)
    b = SuperExpr.zero(D21)
    for key in reversed(list(a.terms)):
        b = b + SuperExpr(D21, {key: a.terms[key]})
    assert a.render() == b.render()
