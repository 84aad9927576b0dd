"""Parametric integration, subgroup averaging and slicing of step polynomials."""
from __future__ import annotations

from fractions import Fraction

from .geometry import (
    DimensionError,
    Polytope,
    as_rational,
    feasible_interior,
    prune_redundant,
)
from .poly import AffineMap, Polynomial
from .steppoly import StepPoly
from .torus import (
    AffineTorusMap,
    StepAffineMap,
    SubgroupSpec,
    frac_of_affine,
    precompose,
)


def _integrate_piece(p: Polynomial, C: Polytope) -> list:
    """Pieces of ``u -> int p(u, v) 1_C(u, v) dv`` over the last coordinate."""
    dim = p.dim
    n = dim - 1
    v = n
    if C.halfspaces:
        if not feasible_interior(C):
            return []
        C = prune_redundant(C)

    # the box bounds 0 <= v <= 1 are always present as explicit bounds
    lowers = [((Fraction(0),) * n, Fraction(0))]
    uppers = [((Fraction(0),) * n, Fraction(1))]
    free = []
    for h in C.halfspaces:
        a = h.normal[v]
        rest = h.normal[:v]
        if a == 0:
            free.append((rest, h.bound, h.strict))
        elif a > 0:
            # v <= (bound - rest.u) / a
            uppers.append((tuple(Fraction(-c, a) for c in rest), Fraction(h.bound) / a))
        else:
            # v >= (bound - rest.u) / a
            lowers.append((tuple(Fraction(-c, a) for c in rest), Fraction(h.bound) / a))

    P_anti = p.antiderivative(v)
    out = []
    for i1, (l1, c1) in enumerate(lowers):
        for i2, (u2, d2) in enumerate(uppers):
            region = list(free)
            # psi_{i1} is the largest lower bound, first index on ties
            for j, (lj, cj) in enumerate(lowers):
                if j != i1:
                    # psi_j - psi_i1 (<|<=) 0
                    region.append((_diff(lj, l1), c1 - cj, j < i1))
            for j, (uj, dj) in enumerate(uppers):
                if j != i2:
                    # psi_i2 - psi_j (<|<=) 0
                    region.append((_diff(u2, uj), dj - d2, j < i2))
            # psi_i1 < psi_i2
            region.append((_diff(l1, u2), d2 - c1, True))
            if n == 0:
                ok = all(_holds_const(r) for r in region)
                if ok:
                    val = P_anti.evaluate((d2,)) - P_anti.evaluate((c1,))
                    out.append(val)
                continue
            R = Polytope.build(n, region)
            if R is None or not feasible_interior(R):
                continue
            top = _section_map(u2, d2)
            bot = _section_map(l1, c1)
            q = P_anti.compose_affine(top) - P_anti.compose_affine(bot)
            if not q.is_zero():
                out.append((q, R))
    return out


def _diff(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _holds_const(r):
    _, bound, strict = r
    return 0 < bound if strict else 0 <= bound


def _section_map(coeffs, const) -> AffineMap:
    """``u -> (u, coeffs.u + const)``."""
    n = len(coeffs)
    rows = [[int(i == j) for j in range(n)] for i in range(n)]
    rows.append(list(coeffs))
    return AffineMap(rows, [0] * n + [const])


def _integrate_last(f: StepPoly):
    if f.dim == 1:
        total = Fraction(0)
        for p, C in f.merged().pieces:
            total += sum(_integrate_piece(p, C), Fraction(0))
        return total
    out = []
    for p, C in f.merged().pieces:
        out.extend(_integrate_piece(p, C))
    return StepPoly(f.dim - 1, out)


def integrate_out(f: StepPoly, last_coords: int = 1):
    """``u -> integral of f(u, v) over v in [0,1)^m`` with ``v`` the last
    ``m`` coordinates.

    Integrates one coordinate at a time, innermost (last) first.  When
    every coordinate is integrated out the result is an exact
    ``Fraction``.
    """
    if last_coords < 1:
        raise ValueError("must integrate out at least one coordinate")
    if last_coords > f.dim:
        raise DimensionError(f"cannot integrate {last_coords} coordinates of a {f.dim}-dim function")
    g = f
    for _ in range(last_coords):
        g = _integrate_last(g)
    return g


def total_integral(f: StepPoly) -> Fraction:
    return integrate_out(f, f.dim)


def permute_coords(f: StepPoly, perm) -> StepPoly:
    """``x -> f(x[perm[0]], ..., x[perm[d-1]])``."""
    d = f.dim
    if sorted(perm) != list(range(d)):
        raise ValueError("not a permutation")
    A = AffineMap([[int(j == perm[i]) for j in range(d)] for i in range(d)])
    return precompose(f, StepAffineMap.from_affine(A))


def average_over_subgroup(f: StepPoly, W: SubgroupSpec) -> StepPoly:
    """``z -> integral over W of f(z + w) dm_W(w)``."""
    d = f.dim
    if W.ambient_dim != d:
        raise DimensionError("subgroup and function dimensions differ")
    r = W.torus_rank
    elems = W.finite_elements()
    acc = StepPoly.zero(d)
    for phi in elems:
        if r:
            rows = tuple(
                tuple(int(j == i) for j in range(d)) + tuple(W.torus_gens[i]) for i in range(d)
            )
            g = precompose(f, frac_of_affine(AffineTorusMap(rows, tuple(phi))))
            acc = acc + integrate_out(g, r)
        else:
            eye = tuple(tuple(int(j == i) for j in range(d)) for i in range(d))
            acc = acc + precompose(f, frac_of_affine(AffineTorusMap(eye, tuple(phi))))
    return acc.scale(Fraction(1, len(elems)))


def substitute_coord(f: StepPoly, coord: int, value) -> StepPoly:
    """The slice ``f(..., x_coord = value, ...)`` in one fewer variable.

    Exact pointwise: constraints that no longer involve any variable are
    decided at ``value`` with their strictness.
    """
    d = f.dim
    if not 0 <= coord < d:
        raise IndexError(f"coordinate {coord} out of range for dim {d}")
    if d == 1:
        raise DimensionError("cannot slice a one-dimensional function")
    value = as_rational(value)
    if not 0 <= value < 1:
        raise ValueError("slice value must lie in [0,1)")
    rows = []
    for i in range(d):
        if i == coord:
            rows.append([0] * (d - 1))
        else:
            k = i if i < coord else i - 1
            rows.append([int(j == k) for j in range(d - 1)])
    A = AffineMap(rows, [value if i == coord else 0 for i in range(d)])
    out = []
    for p, C in f.pieces:
        cons = []
        for h in C.halfspaces:
            rest = h.normal[:coord] + h.normal[coord + 1:]
            cons.append((rest, h.bound - h.normal[coord] * value, h.strict))
        R = Polytope.build(d - 1, cons)
        if R is None:
            continue
        out.append((p.compose_affine(A), R))
    return StepPoly(d - 1, out)
