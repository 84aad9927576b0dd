"""Real-valued step polynomials on ``[0,1)^d``.

A :class:`StepPoly` is a formal sum of basic pieces ``p * 1_C``: a
polynomial ``p`` times the indicator of a polytope ``C``.  Pieces may
overlap; nothing is refined until an equality test or a floor needs a
partition.  Functions into the circle are handled as real lifts and
compared with :func:`ae_equal_mod1`.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .geometry import (
    DimensionError,
    HalfSpace,
    Polytope,
    as_point,
    as_rational,
    dot,
    feasible_interior,
    interior_point,
    refine,
    split_cell,
)
from .poly import Polynomial


class NotPiecewiseAffine(ValueError):
    """A floor was requested of something with a cell of degree >= 2."""


class OutsideCubeError(ValueError):
    """Evaluation point not in ``[0,1)^d``."""


class StepPoly:
    __slots__ = ("dim", "pieces")

    def __init__(self, dim: int, pieces: Iterable = ()):
        self.dim = dim
        ps = []
        for p, C in pieces:
            if p.dim != dim or C.dim != dim:
                raise DimensionError(f"piece of dim ({p.dim}, {C.dim}) in StepPoly of dim {dim}")
            if not p.is_zero():
                ps.append((p, C))
        self.pieces = tuple(ps)

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "StepPoly":
        return cls(dim)

    @classmethod
    def constant(cls, dim: int, c) -> "StepPoly":
        return cls(dim, [(Polynomial.constant(dim, c), Polytope.cube(dim))])

    @classmethod
    def from_poly(cls, p: Polynomial, C: Polytope | None = None) -> "StepPoly":
        return cls(p.dim, [(p, C or Polytope.cube(p.dim))])

    @classmethod
    def indicator(cls, C: Polytope) -> "StepPoly":
        return cls(C.dim, [(Polynomial.constant(C.dim, 1), C)])

    @classmethod
    def coordinate(cls, dim: int, i: int) -> "StepPoly":
        """The lift ``x -> {x_i}``."""
        return cls.from_poly(Polynomial.variable(dim, i))

    # -- algebra ------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, StepPoly):
            raise TypeError("expected a StepPoly")
        if other.dim != self.dim:
            raise DimensionError(f"StepPoly dims {self.dim} and {other.dim} differ")

    def __add__(self, other: "StepPoly") -> "StepPoly":
        self._check(other)
        return StepPoly(self.dim, self.pieces + other.pieces)

    def __neg__(self) -> "StepPoly":
        return StepPoly(self.dim, [(-p, C) for p, C in self.pieces])

    def __sub__(self, other: "StepPoly") -> "StepPoly":
        self._check(other)
        return self + (-other)

    def scale(self, c) -> "StepPoly":
        c = as_rational(c)
        if not c:
            return StepPoly(self.dim)
        return StepPoly(self.dim, [(p.scale(c), C) for p, C in self.pieces])

    def __mul__(self, other):
        if not isinstance(other, StepPoly):
            return self.scale(other)
        self._check(other)
        out = []
        for p, C in self.pieces:
            for q, D in other.pieces:
                E = C.intersect(D)
                if C != D and C.halfspaces and D.halfspaces and not feasible_interior(E):
                    continue
                out.append((p * q, E))
        return StepPoly(self.dim, out)

    def __rmul__(self, c):
        return self.scale(c)

    # -- evaluation ---------------------------------------------------

    def __call__(self, point) -> Fraction:
        return self.evaluate(point)

    def evaluate(self, point) -> Fraction:
        point = as_point(point)
        if len(point) != self.dim:
            raise DimensionError(f"point of length {len(point)} for dim {self.dim}")
        if any(x < 0 or x >= 1 for x in point):
            raise OutsideCubeError(f"{point} is not in [0,1)^{self.dim}")
        total = Fraction(0)
        for p, C in self.pieces:
            if all(h.contains(point) for h in C.halfspaces):
                total += p.evaluate(point)
        return total

    def hyperplanes(self) -> list:
        seen = {}
        for _, C in self.pieces:
            for hp in C.hyperplanes():
                seen.setdefault(hp, None)
        return list(seen)

    def merged(self) -> "StepPoly":
        """Pieces over identical polytopes summed; order of first occurrence."""
        acc: dict = {}
        for p, C in self.pieces:
            acc[C] = acc[C] + p if C in acc else p
        return StepPoly(self.dim, [(p, C) for C, p in acc.items()])

    def __repr__(self):
        return f"StepPoly(dim={self.dim}, pieces={len(self.pieces)})"

    def describe(self, names: Sequence[str] | None = None) -> str:
        lines = []
        for p, C in self.pieces:
            cons = " and ".join(_halfspace_str(h, names) for h in C.halfspaces) or "cube"
            lines.append(f"  [{cons}]: {p.to_string(names)}")
        return "\n".join(lines) if lines else "  0"

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "pieces": [{"poly": p.to_json(), "polytope": C.to_json()} for p, C in self.pieces],
        }

    @classmethod
    def from_json(cls, data: dict) -> "StepPoly":
        return cls(
            int(data["dim"]),
            [(Polynomial.from_json(x["poly"]), Polytope.from_json(x["polytope"])) for x in data["pieces"]],
        )


def _halfspace_str(h: HalfSpace, names=None) -> str:
    names = names or [f"x{i + 1}" for i in range(h.dim)]
    lhs = Polynomial.linear(h.normal).to_string(names)
    return f"{lhs} {'<' if h.strict else '<='} {h.bound}"


# --------------------------------------------------------------------------
# refinement


def _compact(f: StepPoly) -> list:
    """Pieces over the same half-spaces summed (strictness ignored) and
    zero sums dropped.  Only the a.e. class of ``f`` is preserved."""
    acc: dict = {}
    for p, C in f.pieces:
        if p.is_zero():
            continue
        key = tuple(sorted((h.normal, h.bound) for h in C.halfspaces))
        if key in acc:
            acc[key] = (acc[key][0] + p, acc[key][1])
        else:
            acc[key] = (p, C)
    return [(p, C) for p, C in acc.values() if not p.is_zero()]


def reduce_cells(f: StepPoly, within: Polytope | None = None) -> list:
    """Partition ``within`` (default the cube) into cells on which ``f`` is
    a single polynomial.

    Returns ``(polytope, witness, polynomial)`` triples where ``witness``
    is a rational point strictly inside the cell.  Each piece of ``f``
    only cuts the cells where it may still be active, so this is much
    coarser than the full hyperplane arrangement.  Cells partition
    ``within`` pointwise; polynomials are exact off cell boundaries.
    """
    within = within or Polytope.cube(f.dim)
    w0 = interior_point(within)
    if w0 is None:
        return []
    cells = [(within, w0, Polynomial.zero(f.dim))]
    for p, C in _compact(f):
        nxt = []
        for P, w, acc in cells:
            inside = [(P, w)]
            for h in C.halfspaces:
                hp = h.hyperplane()
                keep = []
                for Q, wq in inside:
                    for R, wr, _ in split_cell(Q, wq, hp):
                        if h.contains(wr):
                            keep.append((R, wr))
                        else:
                            nxt.append((R, wr, acc))
                inside = keep
                if not inside:
                    break
            for Q, wq in inside:
                nxt.append((Q, wq, acc + p))
        cells = nxt
    return cells


def _is_integer_constant(p: Polynomial) -> bool:
    return p.is_constant() and p.constant_term().denominator == 1


def partition_cells(f: StepPoly, within: Polytope | None = None) -> list:
    """Like :func:`reduce_cells`, but by binary space partition.

    Each region keeps the pieces that cut it; pieces covering it are added
    to its polynomial and pieces missing it are dropped.  Regions are split
    by the hyperplane shared by most cutting pieces, which keeps the
    partition far coarser than piece-by-piece refinement when many pieces
    share boundaries.  Only the a.e. class of ``f`` is represented.
    """
    within = within or Polytope.cube(f.dim)
    w0 = interior_point(within)
    if w0 is None:
        return []
    out = []
    stack = [(within, w0, Polynomial.zero(f.dim), [(p, C.halfspaces) for p, C in _compact(f)])]
    while stack:
        R, w, acc, live = stack.pop()
        cuts: dict = {}
        partial = []
        for p, hs in live:
            rest = []
            for h in hs:
                hp = h.hyperplane()
                if hp not in cuts:
                    cuts[hp] = _cuts(R, w, hp)
                if cuts[hp]:
                    rest.append(h)
                elif not h.contains(w):
                    break  # misses R
            else:
                if rest:
                    partial.append((p, rest))
                else:
                    acc = acc + p
        if not partial:
            out.append((R, w, acc))
            continue
        count = Counter(h.hyperplane() for _, hs in partial for h in hs)
        hp = max(count, key=lambda k: (count[k], k))
        for Q, wq, _ in split_cell(R, w, hp):
            stack.append((Q, wq, acc, partial))
    return out


def _cuts(R: Polytope, w: tuple, hp: tuple) -> bool:
    """Does the hyperplane meet the interior of ``R`` (``w`` interior)?"""
    a, b = hp
    v = dot(a, w) - b
    if v == 0:
        return True
    if b <= sum(c for c in a if c < 0) or b >= sum(c for c in a if c > 0):
        return False
    # same half-spaces as split_cell builds, so its LP is a cache hit
    other = HalfSpace._from_key(hp, False, flip=True) if v < 0 else HalfSpace._from_key(hp, True)
    return interior_point(R.with_halfspaces(other)) is not None


def residual_cells(f: StepPoly, mod1: bool = False) -> list:
    """Cells of :func:`partition_cells` carrying a nonzero (non-integer
    when ``mod1``) polynomial."""
    bad = []
    for P, w, p in partition_cells(f):
        if p.is_zero() or (mod1 and _is_integer_constant(p)):
            continue
        bad.append((P, w, p))
    return bad


def canonicalize(f: StepPoly) -> StepPoly:
    """Disjoint-cell form over the arrangement of every hyperplane in ``f``.

    Each full-dimensional cell carries the exact sum of the polynomials
    of the pieces covering it; zero cells are dropped and cells are
    ordered by sign vector.
    """
    hps = f.hyperplanes()
    cube = Polytope.cube(f.dim)
    cells = refine([(cube, interior_point(cube))], hps)

    def signs(w):
        return tuple(-1 if dot(a, w) < b else 1 for a, b in hps)

    cells.sort(key=lambda c: signs(c[1]))
    out = []
    for P, w in cells:
        acc = Polynomial.zero(f.dim)
        for p, C in f.pieces:
            if all(h.contains(w) for h in C.halfspaces):
                acc = acc + p
        if not acc.is_zero():
            out.append((acc, P))
    return StepPoly(f.dim, out)


def ae_equal(f: StepPoly, g: StepPoly) -> bool:
    f._check(g)
    return not residual_cells(f - g)


def ae_equal_mod1(f: StepPoly, g: StepPoly) -> bool:
    f._check(g)
    return not residual_cells(f - g, mod1=True)


def ae_zero(f: StepPoly, mod1: bool = False) -> bool:
    return not residual_cells(f, mod1=mod1)


def floor_piecewise_affine(f: StepPoly) -> StepPoly:
    """The integer-valued step function ``x -> floor(f(x))``.

    Raises :class:`NotPiecewiseAffine` if some cell of ``f`` carries a
    polynomial of degree two or more.
    """
    out = []
    d = f.dim
    for P, w, p in reduce_cells(f):
        if p.degree > 1:
            raise NotPiecewiseAffine(f"cell polynomial {p.to_string()} has degree {p.degree}")
        coeffs, c0 = p.linear_part()
        if not any(coeffs):
            m = math.floor(c0)
            if m:
                out.append((Polynomial.constant(d, m), P))
            continue
        lo = c0 + sum(c for c in coeffs if c < 0)
        hi = c0 + sum(c for c in coeffs if c > 0)
        for m in range(math.floor(lo), math.floor(hi) + 1):
            if not m:
                continue
            Q = Polytope.build(
                d,
                list(P.halfspaces)
                + [(tuple(-c for c in coeffs), c0 - m, False), (coeffs, m + 1 - c0, True)],
            )
            if Q is not None and feasible_interior(Q):
                out.append((Polynomial.constant(d, m), Q))
    return StepPoly(d, out)


@dataclass(frozen=True)
class ComplexityReport:
    pieces: int
    dim: int
    max_degree: int
    max_abs_coeff: Fraction
    max_halfspaces_per_piece: int
    representation_complexity: int

    def to_json(self) -> dict:
        from .serialize import rat_str

        return {
            "pieces": self.pieces,
            "dim": self.dim,
            "maxDegree": self.max_degree,
            "maxAbsCoeff": rat_str(self.max_abs_coeff),
            "maxHalfspacesPerPiece": self.max_halfspaces_per_piece,
            "representationComplexity": self.representation_complexity,
        }


def complexity_report(f: StepPoly) -> ComplexityReport:
    """Statistics of the given representation (no minimisation)."""
    n = len(f.pieces)
    deg = max((p.degree for p, _ in f.pieces), default=0)
    coeff = max((p.max_abs_coeff() for p, _ in f.pieces), default=Fraction(0))
    hs = max((len(C.halfspaces) for _, C in f.pieces), default=0)
    if n == 0:
        rc = 0  # the empty sum has no basic piece to constrain
    else:
        rc = max(n, f.dim, deg, math.ceil(coeff), hs)
    return ComplexityReport(n, f.dim, deg, coeff, hs, rc)


def step_algebra(f: StepPoly, g: StepPoly | None, op: str, c=None) -> StepPoly:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "scale":
        return f.scale(c)
    raise ValueError(f"unknown op {op!r}")


def step_mul(f: StepPoly, g: StepPoly) -> StepPoly:
    return f * g


def eval_step(f: StepPoly, point) -> Fraction:
    return f.evaluate(point)
