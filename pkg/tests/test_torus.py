import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from oracles import off_hyperplanes, rand_rational_point, rand_steppoly
from stepcalc.dsl import compile_source
from stepcalc.geometry import HalfSpace, Polytope
from stepcalc.poly import AffineMap
from stepcalc.steppoly import StepPoly, ae_equal, ae_equal_mod1, ae_zero
from stepcalc.torus import (
    AffineTorusMap,
    NotSurjective,
    StepAffineMap,
    SubgroupSpec,
    TorusPoint,
    cross_section,
    difference_op,
    frac,
    frac_of_affine,
    is_invariant,
    precompose,
    symbolic_difference,
    translate,
)

X = StepPoly.coordinate(1, 0)


def test_identity_map_has_one_cell():
    xi = frac_of_affine(AffineTorusMap(((1,),)))
    assert len(xi.cells) == 1
    assert xi.cells[0][1] == AffineMap.identity(1)


def test_doubling_has_two_cells():
    xi = frac_of_affine(AffineTorusMap(((2,),)))
    assert len(xi.cells) == 2
    assert xi((F(1, 4),)) == (F(1, 2),)
    assert xi((F(3, 4),)) == (F(1, 2),)
    assert xi((F(1, 2),)) == (0,)


def test_sum_map_has_two_cells():
    xi = frac_of_affine(AffineTorusMap(((1, 1),)))
    assert len(xi.cells) == 2
    assert xi((F(3, 4), F(1, 2))) == (F(1, 4),)


@pytest.mark.parametrize("seed", range(5))
def test_frac_of_affine_commutes_with_fractional_part(seed):
    rng = random.Random(seed)
    D, r = rng.randint(1, 3), rng.randint(1, 2)
    M = tuple(tuple(rng.randint(-3, 3) for _ in range(D)) for _ in range(r))
    th = tuple(F(rng.randint(0, 11), 12) for _ in range(r))
    alpha = AffineTorusMap(M, th)
    xi = frac_of_affine(alpha)
    for _ in range(200):
        t = rand_rational_point(rng, D, 60)  # lands on cell boundaries often
        assert xi(t) == alpha(t)


def test_precompose_with_identity():
    f = compile_source("frac(x)*frac(y) - floor(frac(x) + frac(y))", ["x", "y"])
    assert ae_equal(precompose(f, StepAffineMap.identity(2)), f)


def test_precompose_square_with_doubling():
    sq = X * X
    g = precompose(sq, frac_of_affine(AffineTorusMap(((2,),))))
    assert g((F(3, 4),)) == F(1, 4)


def test_sigma_term_spot_value():
    sigma = compile_source(
        "frac(s1)*frac(x2) - floor(frac(x2) + frac(s2))*frac(x1 + s1)", ["s1", "s2", "x1", "x2"]
    )
    # (s1, s2, t1, t2, x1, x2) -> (s, x + t)
    rows = ((1, 0, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0), (0, 0, 1, 0, 1, 0), (0, 0, 0, 1, 0, 1))
    g = precompose(sigma, frac_of_affine(AffineTorusMap(rows)))
    pt = (F(1, 3), 0, F(1, 4), 0, F(1, 5), 0)
    assert g(pt) == sigma((F(1, 3), 0, F(1, 4) + F(1, 5), 0))


@pytest.mark.parametrize("seed", range(4))
def test_precompose_respects_composition(seed):
    rng = random.Random(seed)
    f = rand_steppoly(rng, 2)
    xi = frac_of_affine(AffineTorusMap(((1, 1), (0, 2)), (F(1, 3), 0)))
    eta = frac_of_affine(AffineTorusMap(((2, -1), (1, 0)), (0, F(1, 2))))
    lhs = precompose(precompose(f, xi), eta)
    rhs = precompose(f, xi.compose(eta))
    assert ae_equal(lhs, rhs)
    for _ in range(100):
        p = rand_rational_point(rng, 2)
        assert lhs(p) == rhs(p) == f(xi(eta(p)))


def test_translate_examples():
    f = compile_source("frac(x)*frac(y)", ["x", "y"])
    assert ae_equal(translate(f, (0, 0)), f)
    left = StepPoly.indicator(Polytope(1, (HalfSpace((1,), F(1, 2), True),)))
    right = StepPoly.indicator(Polytope(1, (HalfSpace((-1,), F(-1, 2)),)))
    assert ae_equal(translate(left, (F(1, 2),)), right)
    assert translate(X, (F(1, 3),))((F(1, 6),)) == F(5, 6)


def test_difference_examples():
    assert ae_zero(difference_op(StepPoly.constant(2, 7), (F(1, 3), F(1, 5))))
    g = difference_op(X, (F(1, 2),))
    assert g((F(1, 4),)) == F(1, 2) and g((F(3, 4),)) == F(-1, 2)
    chi = compile_source("frac(2*x - y + 1/3)", ["x", "y"])
    h = difference_op(chi, (F(1, 5), F(2, 7)))
    const = h(rand_rational_point(random.Random(0), 2))
    assert ae_equal_mod1(h, StepPoly.constant(2, const))


def test_symbolic_difference_examples():
    assert ae_zero(symbolic_difference(StepPoly.constant(2, 3), SubgroupSpec.full(2)))
    x1 = StepPoly.coordinate(2, 0)
    assert ae_zero(symbolic_difference(x1, SubgroupSpec.coordinates(2, [1])))
    h = symbolic_difference(X, SubgroupSpec.full(1))
    assert h((F(1, 2), F(1, 4))) == F(3, 4) - F(1, 4)
    assert not ae_zero(h, mod1=True)


def test_invariance():
    x1 = StepPoly.coordinate(2, 0)
    assert is_invariant(x1, SubgroupSpec.coordinates(2, [1]))
    assert not is_invariant(x1, SubgroupSpec.coordinates(2, [0]))
    f = compile_source("frac(3*x)", ["x"])
    assert is_invariant(f, SubgroupSpec.cyclic(1, [1], 3))
    assert not is_invariant(f, SubgroupSpec.cyclic(1, [1], 2))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_translations_compose(seed):
    rng = random.Random(seed)
    f = rand_steppoly(rng, 2)
    z, w = TorusPoint(rand_rational_point(rng, 2, 24)), TorusPoint(rand_rational_point(rng, 2, 24))
    assert ae_equal(translate(translate(f, z), w), translate(f, z + w))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_difference_operators_commute(seed):
    rng = random.Random(seed)
    f = rand_steppoly(rng, 2)
    v, w = rand_rational_point(rng, 2, 24), rand_rational_point(rng, 2, 24)
    assert ae_equal(difference_op(difference_op(f, v), w), difference_op(difference_op(f, w), v))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_translate_piece_bound(seed):
    rng = random.Random(seed)
    d = rng.randint(1, 3)
    f = rand_steppoly(rng, d)
    z = rand_rational_point(rng, d, 24)
    assert len(translate(f, z).pieces) <= 2**d * len(f.pieces)


def test_finite_elements():
    U = SubgroupSpec(2, (), (((1, 0), 3), ((1, 1), 2)))
    els = U.finite_elements()
    assert len(els) == 6 and els[0] == TorusPoint.zero(2)


def _check_section(Q, rng, n=1000):
    sigma = cross_section(Q)
    for _ in range(n):
        t = rand_rational_point(rng, len(Q), 1009)
        x = sigma(t)
        assert all(0 <= c < 1 for c in x)
        for row, ti in zip(Q, t):
            assert frac(sum(q * c for q, c in zip(row, x))) == ti
    return sigma


def test_identity_section():
    sigma = _check_section([[1, 0], [0, 1]], random.Random(0), 100)
    assert sigma((F(1, 3), F(2, 5))) == (F(1, 3), F(2, 5))


def test_doubling_section():
    sigma = _check_section([[2]], random.Random(0))
    assert sigma((F(3, 5),)) == (F(3, 10),)


def test_sum_section():
    sigma = _check_section([[1, 1]], random.Random(0))
    assert sigma((F(2, 7),)) == (F(2, 7), 0)


def test_section_needs_surjection():
    with pytest.raises(NotSurjective):
        cross_section([[1, 2], [2, 4]])
