import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from oracles import rand_poly, rand_rational_point
from stepcalc.geometry import DimensionError
from stepcalc.poly import AffineMap, Polynomial

x = Polynomial.variable(1, 0)
one = Polynomial.constant(1, 1)
X, Y = Polynomial.variable(2, 0), Polynomial.variable(2, 1)


def test_add_square_and_line():
    assert x * x + (x.scale(2) + one) == x**2 + x.scale(2) + one


def test_difference_of_squares():
    assert (X + Y) * (X - Y) == X**2 - Y**2


def test_scale_by_zero_is_zero():
    assert (x * x).scale(0).is_zero()


def test_evaluation():
    assert (x * x + one)((F(1, 2),)) == F(5, 4)
    assert Polynomial.zero(3)((F(1, 7), 0, 1)) == 0
    assert (X * Y)((F(2, 3), F(3, 4))) == F(1, 2)


def test_compose_with_shift():
    A = AffineMap([[1]], [1])
    assert (x * x).compose_affine(A) == x * x + x.scale(2) + one


def test_compose_with_identity():
    p = X * X * Y - Y.scale(F(1, 3))
    assert p.compose_affine(AffineMap.identity(2)) == p


def test_compose_with_rotation():
    A = AffineMap([[1, 1], [1, -1]])
    assert (X * Y).compose_affine(A) == X**2 - Y**2


def test_antiderivatives():
    assert (x * x).antiderivative(0) == (x**3).scale(F(1, 3))
    U, V = X, Y
    assert Polynomial.constant(2, 1).antiderivative(1) == V
    assert (U * V).antiderivative(1) == (U * V * V).scale(F(1, 2))


def test_dimension_checks():
    with pytest.raises(DimensionError):
        X + x
    with pytest.raises(DimensionError):
        x((F(1, 2), 0))


def test_json_round_trip():
    p = X * X * Y.scale(F(-3, 7)) + Polynomial.constant(2, 5)
    assert Polynomial.from_json(p.to_json()) == p


@pytest.mark.parametrize("seed", range(5))
def test_composition_agrees_with_pointwise(seed):
    rng = random.Random(seed)
    d, r = rng.randint(1, 3), rng.randint(1, 3)
    p = rand_poly(rng, r, 3)
    M = [[F(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(d)] for _ in range(r)]
    b = [F(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(r)]
    A = AffineMap(M, b)
    q = p.compose_affine(A)
    for _ in range(1000 // 5):
        t = rand_rational_point(rng, d, 97)
        assert q(t) == p(A(t))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_derivative_undoes_antiderivative(seed):
    rng = random.Random(seed)
    d = rng.randint(1, 3)
    p = rand_poly(rng, d, 3)
    i = rng.randrange(d)
    assert p.antiderivative(i).derivative(i) == p


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_ring_axioms(seed):
    rng = random.Random(seed)
    d = rng.randint(1, 3)
    p, q, r = (rand_poly(rng, d, 2) for _ in range(3))
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p + q == q + p and p * q == q * p
    assert p - p == Polynomial.zero(d)
