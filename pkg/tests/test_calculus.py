import random
from fractions import Fraction as F

import numpy as np
import pytest

from oracles import (
    box_polytope,
    box_slice_measure,
    monte_carlo_slice,
    rand_box,
    rand_rational_point,
    rand_steppoly,
)
from stepcalc.calculus import (
    average_over_subgroup,
    integrate_out,
    permute_coords,
    substitute_coord,
    total_integral,
)
from stepcalc.dsl import compile_source
from stepcalc.geometry import DimensionError, HalfSpace, Polytope
from stepcalc.poly import Polynomial
from stepcalc.steppoly import StepPoly, ae_equal, canonicalize
from stepcalc.torus import SubgroupSpec

U, V = Polynomial.variable(2, 0), Polynomial.variable(2, 1)


def test_triangle_slice_area():
    tri = StepPoly.indicator(Polytope(2, (HalfSpace((-1, 1), 0),)))  # v <= u
    assert ae_equal(integrate_out(tri), StepPoly.coordinate(1, 0))


def test_mean_of_last_coordinate():
    assert ae_equal(integrate_out(StepPoly.from_poly(V)), StepPoly.constant(1, F(1, 2)))


def test_product_under_antidiagonal():
    f = StepPoly.from_poly(U * V, Polytope(2, (HalfSpace((1, 1), 1),)))
    q = integrate_out(f)
    u = Polynomial.variable(1, 0)
    one = Polynomial.constant(1, 1)
    want = StepPoly.from_poly((u * (one - u) * (one - u)).scale(F(1, 2)))
    assert ae_equal(q, want)
    assert q((F(1, 3),)) == F(2, 27)
    assert total_integral(f) == F(1, 24)


def test_zero_and_argument_checks():
    assert integrate_out(StepPoly.zero(3), 2).pieces == ()
    with pytest.raises(ValueError):
        integrate_out(StepPoly.zero(2), 0)
    with pytest.raises(DimensionError):
        integrate_out(StepPoly.zero(2), 3)


def _box_function(rng, d, k):
    boxes = []
    pieces = []
    for _ in range(k):
        lo, hi = rand_box(rng, d)
        c = F(rng.randint(-5, 5), rng.randint(1, 3))
        boxes.append((c, lo, hi))
        pieces.append((Polynomial.constant(d, c), box_polytope(lo, hi)))
    return boxes, StepPoly(d, pieces)


@pytest.mark.parametrize("seed", range(8))
def test_box_measures_exact(seed):
    rng = random.Random(seed)
    d = rng.randint(2, 3)
    m = rng.randint(1, d - 1)
    boxes, f = _box_function(rng, d, rng.randint(1, 3))
    g = integrate_out(f, m)
    for _ in range(50):
        u = rand_rational_point(rng, d - m, 1009)
        assert g(u) == box_slice_measure(boxes, u, m)


@pytest.mark.parametrize("seed", range(4))
def test_monte_carlo_agreement(seed):
    rng = random.Random(seed)
    nrng = np.random.default_rng(seed)
    d = rng.randint(2, 3)
    f = rand_steppoly(rng, d, deg=3)
    g = integrate_out(f, 1)
    for _ in range(3):
        u = rand_rational_point(rng, d - 1, 1009)
        mean, se = monte_carlo_slice(f, u, 1, 200_000, nrng)
        assert abs(float(g(u)) - mean) <= 5 * se + 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_fubini(seed):
    rng = random.Random(seed)
    f = rand_steppoly(rng, 3, deg=2)
    a = integrate_out(f, 2)
    b = integrate_out(integrate_out(f, 1), 1)
    c = integrate_out(integrate_out(permute_coords(f, [0, 2, 1]), 1), 1)
    assert ae_equal(a, b) and ae_equal(a, c)
    assert total_integral(f) == total_integral(permute_coords(f, [2, 0, 1]))


@pytest.mark.parametrize("seed", range(4))
def test_linearity(seed):
    rng = random.Random(seed)
    f, g = rand_steppoly(rng, 2), rand_steppoly(rng, 2)
    assert ae_equal(integrate_out(f + g), integrate_out(f) + integrate_out(g))
    assert ae_equal(integrate_out(f.scale(3)), integrate_out(f).scale(3))


def test_average_examples():
    c = StepPoly.constant(2, F(5, 7))
    for W in (SubgroupSpec.full(2), SubgroupSpec.cyclic(2, [1, 2], 3), SubgroupSpec.trivial(2)):
        assert ae_equal(average_over_subgroup(c, W), c)
    x = StepPoly.coordinate(1, 0)
    assert ae_equal(average_over_subgroup(x, SubgroupSpec.full(1)), StepPoly.constant(1, F(1, 2)))
    xy = compile_source("frac(x1)*frac(x2)", ["x1", "x2"])
    avg = average_over_subgroup(xy, SubgroupSpec.coordinates(2, [1]))
    assert ae_equal(avg, StepPoly.coordinate(2, 0).scale(F(1, 2)))
    assert avg((F(1, 3), F(1, 5))) == F(1, 6)


def test_average_over_finite_group():
    x = StepPoly.coordinate(1, 0)
    avg = average_over_subgroup(x, SubgroupSpec.cyclic(1, [1], 2))
    # ({x} + {x + 1/2}) / 2
    assert avg((F(1, 8),)) == (F(1, 8) + F(5, 8)) / 2
    assert avg((F(5, 8),)) == (F(5, 8) + F(1, 8)) / 2


@pytest.mark.parametrize("seed", range(3))
def test_full_average_is_total_integral(seed):
    f = rand_steppoly(random.Random(seed), 2)
    avg = average_over_subgroup(f, SubgroupSpec.full(2))
    assert ae_equal(canonicalize(avg), StepPoly.constant(2, total_integral(f)))


def test_average_dimension_check():
    with pytest.raises(DimensionError):
        average_over_subgroup(StepPoly.zero(2), SubgroupSpec.full(3))


def test_slice_examples():
    f = StepPoly.coordinate(2, 0)
    assert ae_equal(substitute_coord(f, 1, F(2, 3)), StepPoly.coordinate(1, 0))
    fl = compile_source("floor(frac(s) + frac(t))", ["s", "t"])
    sl = substitute_coord(fl, 1, F(3, 4))
    want = StepPoly.indicator(Polytope(1, (HalfSpace((-1,), F(-1, 4)),)))
    assert ae_equal(sl, want)
    assert sl((F(1, 4),)) == 1 and sl((F(1, 5),)) == 0
    assert not ae_equal(substitute_coord(fl, 1, F(1, 4)), substitute_coord(fl, 1, F(1, 2)))
    with pytest.raises(IndexError):
        substitute_coord(fl, 2, 0)


@pytest.mark.parametrize("seed", range(3))
def test_slice_is_exact_pointwise(seed):
    rng = random.Random(seed)
    f = rand_steppoly(rng, 3)
    for _ in range(5):
        c = F(rng.randrange(6), 6)  # hits cell boundaries on purpose
        g = substitute_coord(f, 1, c)
        for _ in range(40):
            a, b = rand_rational_point(rng, 2, 12)
            assert g((a, b)) == f((a, c, b))
