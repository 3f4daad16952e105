import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from superclifford.algebra import Dims, GaussQ, SuperExpr
from superclifford.operators import hermitian_dirac, witt, zcvar, zgvar, zvar
from superclifford.sampling import random_poly
from superclifford.spinor import (
    SpinorElem,
    act_generator,
    apply_hermitian,
    check_equivalence,
    coefficient_rank,
    independence_checks,
    is_holomorphic,
    is_sh_monogenic_spinor,
    project,
)

I = GaussQ(0, 1)
D21 = Dims.herm(2, 1)
D22 = Dims.herm(2, 2)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def ground(d):
    return SpinorElem.ground(d)


def random_spinor(d, rng, size=4, poly=False):
    table = {}
    for _ in range(size):
        key = (rng.randrange(2**d.m), rng.randrange(2), tuple(rng.randrange(3) for _ in range(d.n)))
        if poly:
            c = random_poly(d, rng, terms=2, degree=2, clifford=False)
        else:
            c = SuperExpr.const(d, GaussQ(Fraction(rng.randint(-4, 4)), Fraction(rng.randint(-4, 4))))
        if c:
            table[key] = c
    return SpinorElem(d, table)


def apply_expr(E: SuperExpr, s: SpinorElem) -> SpinorElem:
    """Act with an algebra element term by term, generator by generator.

    A normal-ordered word e_{o} eg_1^{s_1} eg_2^{s_2} ... acts right to left;
    the scalar part of each term multiplies the spinor coefficients.
    """
    d = s.dims
    out = SpinorElem.zero(d)
    for (g, o, sym, a, lam, pp), c in E.terms.items():
        word = [("e", j + 1) for j in range(d.p) if o >> j & 1]
        for k, power in enumerate(sym):
            word += [("eg", k + 1)] * power
        t = s
        for gen in reversed(word):
            t = act_generator(gen, t)
        coeff = SuperExpr(d, {(g, 0, (0,) * (2 * d.n), a, lam, pp): c})
        out = out + t.map_coeffs(lambda v: coeff * v)
    return out


def generators(d):
    gens = [("e", j) for j in range(1, 2 * d.m + 1)] + [("eg", k) for k in range(1, 2 * d.n + 1)]
    gens += [(kind, j) for kind in ("f", "fd") for j in range(1, d.m + 1)]
    gens += [(kind, j) for kind in ("fg", "fgd") for j in range(1, d.n + 1)]
    return gens


def as_expr(d, gen):
    kind, j = gen
    if kind == "e":
        return SuperExpr.gen(d, j)
    if kind == "eg":
        return SuperExpr.sgen(d, j)
    return witt(d, kind, j)


# ----------------------------------------------------------------- examples
def test_annihilators_kill_the_ground_state():
    for d in (D21, D22):
        for j in range(1, d.m + 1):
            assert act_generator(("fd", j), ground(d)).is_zero()
        for j in range(1, d.n + 1):
            assert act_generator(("fgd", j), ground(d)).is_zero()


@pytest.mark.parametrize("j,k", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_witt_pairing_on_ground(j, k):
    s = act_generator(("fd", k), act_generator(("f", j), ground(D21)))
    assert s == (ground(D21) if j == k else SpinorElem.zero(D21))


def test_generator_range_checks():
    with pytest.raises(IndexError):
        act_generator(("f", 3), ground(D21))
    with pytest.raises(IndexError):
        act_generator(("eg", 3), ground(D21))
    with pytest.raises(ValueError):
        act_generator(("h", 1), ground(D21))


def test_project_examples():
    d = D21
    assert project(SuperExpr.one(d)) == ground(d)
    assert project(zvar(d, 1)) == SpinorElem.ground(d, zvar(d, 1))
    s = project(zgvar(d, 1))
    assert list(s.table) == [(0, 0, (0,))]
    assert s.table[(0, 0, (0,))] == SuperExpr.fvar(d, 1) + SuperExpr.fvar(d, 2).scale(I)
    with pytest.raises(ValueError):
        project(SuperExpr.gen(d, 1))
    with pytest.raises(ValueError):
        project(SuperExpr.one(Dims(3, 1)))


def test_holomorphic_examples():
    d = D21
    assert is_holomorphic(zvar(d, 1) ** 2 * zgvar(d, 1))
    assert not is_holomorphic(zcvar(d, 1))
    assert not is_holomorphic(SuperExpr.var(d, 1))
    assert is_holomorphic(SuperExpr.zero(d))
    with pytest.raises(ValueError):
        is_holomorphic(SuperExpr.gen(d, 1))


def test_equivalence_examples():
    d = D21
    assert check_equivalence(SuperExpr.zero(d))["agree"]
    rep = check_equivalence(zvar(d, 2) * zgvar(d, 1))
    assert rep["holomorphic"] and rep["sh_monogenic"]
    rep = check_equivalence(zvar(d, 1) * zcvar(d, 2))
    assert not rep["holomorphic"] and not rep["sh_monogenic"] and rep["agree"]
    # d_Z annihilates every projection, holomorphic or not
    assert rep["dZ_zero"]


# ------------------------------------------------------ representation laws
@given(seed=seeds, dims=st.sampled_from([D21, D22, Dims.herm(3, 1)]))
def test_actions_respect_algebra_products(seed, dims):
    rng = random.Random(seed)
    s = random_spinor(dims, rng)
    gens = generators(dims)
    a, b = rng.choice(gens), rng.choice(gens)
    product = as_expr(dims, a) * as_expr(dims, b)
    assert apply_expr(product, s) == act_generator(a, act_generator(b, s))


@given(seed=seeds)
def test_single_generators_match_their_expressions(seed):
    rng = random.Random(seed)
    s = random_spinor(D22, rng, poly=True)
    for gen in generators(D22):
        assert apply_expr(as_expr(D22, gen), s) == act_generator(gen, s)


@given(seed=seeds)
def test_witt_anticommutators_as_operators(seed):
    d = Dims.herm(3, 1)
    s = random_spinor(d, random.Random(seed))
    for j in range(1, 4):
        for k in range(1, 4):
            anti = act_generator(("f", j), act_generator(("fd", k), s)) + act_generator(("fd", k), act_generator(("f", j), s))
            assert anti == (s if j == k else SpinorElem.zero(d))
            ff = act_generator(("f", j), act_generator(("f", k), s)) + act_generator(("f", k), act_generator(("f", j), s))
            assert ff.is_zero()


@given(seed=seeds)
def test_symplectic_relation_as_operators(seed):
    s = random_spinor(D22, random.Random(seed))
    for j in (1, 2):
        a, b = ("eg", 2 * j - 1), ("eg", 2 * j)
        comm = act_generator(a, act_generator(b, s)) - act_generator(b, act_generator(a, s))
        assert comm == s


# ---------------------------------------------------- hermitian operators
@given(seed=seeds)
def test_apply_hermitian_matches_algebra(seed):
    rng = random.Random(seed)
    F = random_poly(D21, rng, terms=4, degree=3, clifford=False)
    for which in ("Z", "Zdag"):
        assert apply_hermitian(which, project(F)) == apply_expr(hermitian_dirac(F, which), ground(D21))


@given(seed=seeds)
def test_dZ_kills_projections(seed):
    F = random_poly(D22, random.Random(seed), terms=4, degree=3, clifford=False)
    assert apply_hermitian("Z", project(F)).is_zero()


@given(seed=seeds)
def test_equivalence_on_random_polynomials(seed):
    rng = random.Random(seed)
    d = D21
    F = random_poly(d, rng, terms=4, degree=3, clifford=False)
    rep = check_equivalence(F)
    assert rep["agree"]
    assert is_sh_monogenic_spinor(project(F)) == is_holomorphic(F)


# ------------------------------------------------------------ independence
@pytest.mark.parametrize("mn", [(2, 1), (3, 1), (2, 2), (3, 2)])
def test_witt_families_are_independent(mn):
    res = independence_checks(Dims.herm(*mn))
    for rank, size in res.values():
        assert rank == size


def test_coefficient_rank_detects_dependence():
    g = ground(D21)
    f1 = act_generator(("f", 1), g)
    assert coefficient_rank([f1, f1.scale(3)]) == 1
    assert coefficient_rank([f1, act_generator(("fg", 1), g)]) == 2
    assert coefficient_rank([]) == 0
    with pytest.raises(ValueError):
        coefficient_rank([SpinorElem.ground(D21, zvar(D21, 1))])
