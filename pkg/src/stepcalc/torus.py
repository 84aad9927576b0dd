"""Affine maps of tori, their fractional-part reductions, and subgroups.

An affine torus map ``alpha(t) = M t + theta mod 1`` becomes, after taking
fractional parts, a step-affine map of the unit cube: on each cell
``{m <= theta + n.x < m + 1}`` the coordinate is ``theta + n.x - m``.
Pulling step polynomials back along such maps gives translations,
difference operators and the argument rearrangements used by coboundaries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .geometry import (
    DimensionError,
    HalfSpace,
    Polytope,
    as_point,
    as_rational,
    dot,
    feasible_interior,
    is_empty,
)
from .poly import AffineMap
from .serialize import rat_str
from .steppoly import StepPoly


class NotSurjective(ValueError):
    """The integer matrix has no rational right inverse."""


def frac(x: Fraction) -> Fraction:
    return x - math.floor(x)


@dataclass(frozen=True, order=True)
class TorusPoint:
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(frac(c) for c in as_point(self.coords)))

    @classmethod
    def zero(cls, dim: int) -> "TorusPoint":
        return cls((0,) * dim)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __add__(self, other: "TorusPoint") -> "TorusPoint":
        return TorusPoint(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "TorusPoint":
        return TorusPoint(tuple(-a for a in self.coords))

    def __sub__(self, other: "TorusPoint") -> "TorusPoint":
        return self + (-other)

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)


def _as_torus_point(z) -> TorusPoint:
    return z if isinstance(z, TorusPoint) else TorusPoint(z)


@dataclass(frozen=True)
class AffineTorusMap:
    """``t -> matrix @ t + offset mod 1`` from ``T^D`` to ``T^r``."""

    matrix: tuple
    offset: tuple = None

    def __post_init__(self):
        M = tuple(tuple(int(c) for c in row) for row in self.matrix)
        if not M or len({len(r) for r in M}) != 1:
            raise ValueError("torus map matrix must be a nonempty rectangle")
        for row, raw in zip(M, self.matrix):
            if any(Fraction(c) != k for c, k in zip(raw, row)):
                raise ValueError("torus map matrix must be integral")
        off = self.offset if self.offset is not None else (0,) * len(M)
        off = tuple(frac(c) for c in as_point(off))
        if len(off) != len(M):
            raise DimensionError("offset length does not match matrix rows")
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "offset", off)

    @property
    def source_dim(self) -> int:
        return len(self.matrix[0])

    @property
    def target_dim(self) -> int:
        return len(self.matrix)

    def __call__(self, t) -> tuple:
        t = as_point(t)
        return tuple(frac(b + dot(row, t)) for row, b in zip(self.matrix, self.offset))


class StepAffineMap:
    """Cells of ``[0,1)^source_dim``, each with a rational affine map into
    ``[0,1)^target_dim``.

    Cells partition the cube pointwise; cells of measure zero may appear
    when they are needed for pointwise exactness.
    """

    __slots__ = ("source_dim", "target_dim", "cells")

    def __init__(self, source_dim: int, target_dim: int, cells: Iterable):
        self.source_dim = source_dim
        self.target_dim = target_dim
        cs = tuple(cells)
        for P, A in cs:
            if P.dim != source_dim or A.source_dim != source_dim or A.target_dim != target_dim:
                raise DimensionError("cell does not match step-affine map shape")
        self.cells = cs

    @classmethod
    def from_affine(cls, A: AffineMap) -> "StepAffineMap":
        """A single-cell map; the caller guarantees the image lies in the cube."""
        return cls(A.source_dim, A.target_dim, [(Polytope.cube(A.source_dim), A)])

    @classmethod
    def identity(cls, dim: int) -> "StepAffineMap":
        return cls.from_affine(AffineMap.identity(dim))

    def __call__(self, x) -> tuple:
        x = as_point(x)
        for P, A in self.cells:
            if P.contains(x):
                return A(x)
        raise ValueError(f"{x} lies in no cell")

    def compose(self, inner: "StepAffineMap") -> "StepAffineMap":
        """``self o inner``."""
        if inner.target_dim != self.source_dim:
            raise DimensionError("cannot compose step-affine maps of mismatched shape")
        cells = []
        for E, A in inner.cells:
            for F, B in self.cells:
                Q = Polytope.build(inner.source_dim, list(E.halfspaces) + pullback(F, A))
                if Q is None or is_empty(Q):
                    continue
                cells.append((Q, B.compose(A)))
        return StepAffineMap(inner.source_dim, self.target_dim, cells)

    def __repr__(self):
        return f"StepAffineMap({self.source_dim}->{self.target_dim}, cells={len(self.cells)})"

    def to_json(self) -> dict:
        return {
            "sourceDim": self.source_dim,
            "targetDim": self.target_dim,
            "cells": [{"polytope": P.to_json(), "map": A.to_json()} for P, A in self.cells],
        }


def pullback(C: Polytope, A: AffineMap) -> list:
    """Constraints of ``A^{-1}(C)`` as raw ``(normal, bound, strict)``
    triples (constant ones are resolved by ``Polytope.build``)."""
    out = []
    cols = list(zip(*A.matrix))
    for h in C.halfspaces:
        normal = tuple(dot(h.normal, col) for col in cols)
        out.append((normal, h.bound - dot(h.normal, A.offset), h.strict))
    return out


def _frac_cells(rows: Sequence[Sequence], offsets: Sequence, dim: int, m_range=None) -> list:
    """Cells and affine maps realising ``x -> {rows @ x + offsets}``.

    ``m_range(row, offset)`` gives the candidate integer parts; by default
    the exact range over the cube.  Only nonempty cells are kept.
    """
    per_coord = []
    for row, b in zip(rows, offsets):
        row = as_point(row)
        b = as_rational(b)
        lo = b + sum(c for c in row if c < 0)
        hi = b + sum(c for c in row if c > 0)
        ms = m_range(row, b) if m_range else range(math.floor(lo), math.floor(hi) + 1)
        opts = []
        for m in ms:
            # [m, m+1) must meet the attainable values of the coordinate
            if m + 1 <= lo or m > hi:
                continue
            if not any(row):
                if math.floor(b) != m:
                    continue
                cons = []
            else:
                cons = [(tuple(-c for c in row), b - m, False), (row, m + 1 - b, True)]
                P = Polytope.build(dim, cons)
                if P is None or is_empty(P):
                    continue
                cons = list(P.halfspaces)
            opts.append((cons, row, b - m))
        per_coord.append(opts)

    partial = [([], [], [])]
    for opts in per_coord:
        nxt = []
        for cons, lin, off in partial:
            for c2, row, b in opts:
                if cons and c2:
                    P = Polytope.build(dim, cons + c2)
                    if P is None or is_empty(P):
                        continue
                    merged = list(P.halfspaces)
                else:
                    merged = cons + c2
                nxt.append((merged, lin + [row], off + [b]))
        partial = nxt
    return [(Polytope(dim, tuple(cons)), AffineMap(lin, off)) for cons, lin, off in partial]


def _proof_m_range(row, b):
    s = sum(abs(c) for c in row)
    return range(-int(s) - 1, int(s) + 2)


@lru_cache(maxsize=4096)
def frac_of_affine(alpha: AffineTorusMap) -> StepAffineMap:
    """The step-affine map ``x -> {alpha(x)}`` on ``[0,1)^D``.

    Agrees with ``alpha`` followed by fractional parts at every point of
    the cube.
    """
    cells = _frac_cells(alpha.matrix, alpha.offset, alpha.source_dim, _proof_m_range)
    return StepAffineMap(alpha.source_dim, alpha.target_dim, cells)


def precompose(f: StepPoly, xi: StepAffineMap) -> StepPoly:
    """``f o xi``; pieces whose cell has empty interior are dropped."""
    if xi.target_dim != f.dim:
        raise DimensionError(f"map lands in dim {xi.target_dim}, function has dim {f.dim}")
    D = xi.source_dim
    pieces = f.merged().pieces
    out = []
    for E, A in xi.cells:
        if not E.halfspaces or feasible_interior(E):
            for p, C in pieces:
                Q = Polytope.build(D, list(E.halfspaces) + pullback(C, A))
                if Q is None:
                    continue
                if len(Q.halfspaces) > len(E.halfspaces) and not feasible_interior(Q):
                    continue
                out.append((p.compose_affine(A), Q))
    return StepPoly(D, out)


def translate(f: StepPoly, z) -> StepPoly:
    """``w -> f(w - z)``."""
    z = _as_torus_point(z)
    if z.dim != f.dim:
        raise DimensionError("translation vector has wrong dimension")
    eye = tuple(tuple(int(i == j) for j in range(f.dim)) for i in range(f.dim))
    return precompose(f, frac_of_affine(AffineTorusMap(eye, tuple(-c for c in z))))


def difference_op(f: StepPoly, w) -> StepPoly:
    """``d_w f(z) = f(z - w) - f(z)``."""
    return translate(f, w) - f


# --------------------------------------------------------------------------
# subgroups


@dataclass(frozen=True)
class SubgroupSpec:
    """A closed subgroup ``M T^r + F`` of ``T^d``.

    ``torus_gens`` is a ``d x r`` integer matrix given by rows; its columns
    generate the subtorus.  ``finite_gens`` holds ``(g, n)`` pairs, each
    contributing ``{k g / n mod 1}``.
    """

    ambient_dim: int
    torus_gens: tuple = ()
    finite_gens: tuple = ()

    def __post_init__(self):
        d = self.ambient_dim
        rows = tuple(tuple(int(c) for c in row) for row in self.torus_gens)
        if rows:
            if len(rows) != d or len({len(r) for r in rows}) != 1:
                raise DimensionError("torus generator matrix must have ambient_dim rows")
            if not rows[0]:
                rows = ()
        fin = []
        for g, n in self.finite_gens:
            g = tuple(int(c) for c in g)
            if len(g) != d:
                raise DimensionError("finite generator has wrong length")
            if int(n) < 1:
                raise ValueError("finite generator order must be positive")
            fin.append((g, int(n)))
        object.__setattr__(self, "torus_gens", rows)
        object.__setattr__(self, "finite_gens", tuple(fin))

    @classmethod
    def trivial(cls, d: int) -> "SubgroupSpec":
        return cls(d)

    @classmethod
    def full(cls, d: int) -> "SubgroupSpec":
        return cls.coordinates(d, range(d))

    @classmethod
    def coordinates(cls, d: int, idx: Iterable[int]) -> "SubgroupSpec":
        """The coordinate subtorus spanned by the listed axes."""
        idx = list(idx)
        if not idx:
            return cls(d)
        return cls(d, tuple(tuple(int(i == j) for j in idx) for i in range(d)))

    @classmethod
    def cyclic(cls, d: int, g: Sequence[int], n: int) -> "SubgroupSpec":
        return cls(d, (), ((tuple(g), n),))

    @property
    def torus_rank(self) -> int:
        return len(self.torus_gens[0]) if self.torus_gens else 0

    def generator_elements(self) -> list:
        return [TorusPoint(tuple(Fraction(c, n) for c in g)) for g, n in self.finite_gens]

    def finite_elements(self) -> list:
        """Distinct elements of the finite part, zero first, then sorted."""
        elems = {TorusPoint.zero(self.ambient_dim)}
        for g, n in self.finite_gens:
            elems = {
                e + TorusPoint(tuple(Fraction(c * k, n) for c in g)) for e in elems for k in range(n)
            }
        zero = TorusPoint.zero(self.ambient_dim)
        return [zero] + sorted(e for e in elems if e != zero)

    def to_json(self) -> dict:
        return {
            "ambientDim": self.ambient_dim,
            "torusGens": [list(r) for r in self.torus_gens] or [[] for _ in range(self.ambient_dim)],
            "finiteGens": [{"g": list(g), "n": n} for g, n in self.finite_gens],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SubgroupSpec":
        d = int(data["ambientDim"])
        rows = data.get("torusGens") or ()
        if rows and not any(len(r) for r in rows):
            rows = ()
        fin = tuple((tuple(x["g"]), x["n"]) for x in data.get("finiteGens", ()))
        return cls(d, tuple(tuple(r) for r in rows), fin)


def shift_family(f: StepPoly, U: SubgroupSpec, head: int = 0, elements=None) -> dict:
    """Symbolic differences of ``f`` along ``U`` acting on the last
    ``U.ambient_dim`` coordinates.

    ``f`` lives on ``(head, z)``; for each finite element ``phi`` (index
    into ``elements``, default every element of ``U``'s finite part) the
    result is ``(t, head, z) -> f(head, z - M t - phi) - f(head, z)`` on
    ``[0,1)^(r + head + d)``.
    """
    d = U.ambient_dim
    if f.dim != head + d:
        raise DimensionError(f"function of dim {f.dim} cannot be differenced along a subgroup of T^{d} with {head} leading coordinates")
    r = U.torus_rank
    n = r + head + d
    if elements is None:
        elements = U.finite_elements()
    rows = []
    for i in range(head):
        rows.append(tuple(int(j == r + i) for j in range(n)))
    for i in range(d):
        rows.append(
            tuple(-U.torus_gens[i][j] for j in range(r))
            + (0,) * head
            + tuple(int(j == i) for j in range(d))
        )
    keep = AffineMap([[int(j == r + i) for j in range(n)] for i in range(head + d)])
    base = precompose(f, StepAffineMap.from_affine(keep))
    out = {}
    for k, phi in enumerate(elements):
        alpha = AffineTorusMap(tuple(rows), (0,) * head + tuple(-c for c in phi))
        out[k] = precompose(f, frac_of_affine(alpha)) - base
    return out


def symbolic_difference(f: StepPoly, U: SubgroupSpec) -> StepPoly:
    """``(t, z) -> f(z - M t) - f(z)`` on ``[0,1)^(r + d)`` (torus part of
    ``U`` only; finite elements are handled by enumeration)."""
    if U.ambient_dim != f.dim:
        raise DimensionError("subgroup and function dimensions differ")
    return shift_family(f, U, 0, [TorusPoint.zero(f.dim)])[0]


def is_invariant(f: StepPoly, U: SubgroupSpec, mod1: bool = True) -> bool:
    from .steppoly import ae_zero

    if U.torus_rank and not ae_zero(symbolic_difference(f, U), mod1):
        return False
    return all(ae_zero(difference_op(f, u), mod1) for u in U.generator_elements())


# --------------------------------------------------------------------------
# cross-sections


def rational_right_inverse(Q: Sequence[Sequence[int]]) -> list:
    """A ``d x r`` rational ``A`` with ``Q A = I`` supported on the first
    maximal set of independent columns of ``Q``."""
    Q = [as_point(row) for row in Q]
    r = len(Q)
    d = len(Q[0]) if r else 0
    chosen = []
    basis = []  # reduced rows of chosen columns, for the independence test
    for j in range(d):
        v = [Q[i][j] for i in range(r)]
        w = list(v)
        for piv, b in basis:
            if w[piv]:
                f = w[piv] / b[piv]
                w = [x - f * y for x, y in zip(w, b)]
        nz = next((i for i, x in enumerate(w) if x), None)
        if nz is not None:
            basis.append((nz, w))
            chosen.append(j)
        if len(chosen) == r:
            break
    if len(chosen) < r:
        raise NotSurjective(f"matrix of rank {len(chosen)} < {r} does not define a surjection")
    # invert the square submatrix by Gauss-Jordan
    S = [[Q[i][j] for j in chosen] + [Fraction(int(i == k)) for k in range(r)] for i in range(r)]
    for c in range(r):
        p = next(i for i in range(c, r) if S[i][c])
        S[c], S[p] = S[p], S[c]
        inv = 1 / S[c][c]
        S[c] = [x * inv for x in S[c]]
        for i in range(r):
            if i != c and S[i][c]:
                f = S[i][c]
                S[i] = [x - f * y for x, y in zip(S[i], S[c])]
    Sinv = [row[r:] for row in S]
    A = [[Fraction(0)] * r for _ in range(d)]
    for k, j in enumerate(chosen):
        A[j] = list(Sinv[k])
    return A


def cross_section(Q: Sequence[Sequence[int]]) -> StepAffineMap:
    """A step-affine section ``t -> {A {t}}`` of ``q: T^d -> T^r`` given by
    the integer matrix ``Q``; ``Q sigma(t) = t mod 1`` everywhere."""
    Q = [tuple(int(c) for c in row) for row in Q]
    if not Q or not Q[0]:
        raise NotSurjective("empty matrix")
    r, d = len(Q), len(Q[0])
    A = rational_right_inverse(Q)
    cells = _frac_cells(A, [0] * d, r)
    return StepAffineMap(r, d, cells)
