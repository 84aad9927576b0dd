"""Exact rational half-space geometry inside the half-open unit cube.

Every polytope lives in ``[0,1)^d``; the box constraints ``0 <= x_i < 1``
are implicit and never stored.  Half-spaces are normalised on construction
to a primitive integer normal, so equal half-spaces compare equal and
hyperplanes can be deduplicated by key.

Feasibility questions are answered by an exact simplex over ``Fraction``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Iterable, Sequence

try:  # exact rationals in C; the simplex is the hot loop
    from gmpy2 import mpq as _q
except ImportError:  # pragma: no cover
    _q = Fraction

Rational = Fraction
Point = tuple  # tuple of Fraction


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to ``Fraction``.

    Floats are rejected: nothing in the core is allowed to be inexact.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


def as_point(xs: Iterable) -> tuple:
    return tuple(as_rational(x) for x in xs)


def dot(a: Sequence, x: Sequence) -> Fraction:
    # accumulate over a common denominator; one gcd at the end
    n, d = 0, 1
    for ai, xi in zip(a, x):
        if ai:
            p = ai.numerator * xi.numerator
            q = ai.denominator * xi.denominator
            if q == d:
                n += p
            elif q == 1:
                n += p * d
            else:
                n = n * q + p * d
                d *= q
    return Fraction(n, d)


def _primitive(normal: Sequence[Fraction], bound: Fraction):
    """Scale ``(normal, bound)`` by a positive factor so the normal is a
    primitive integer vector."""
    den = 1
    for c in normal:
        den = lcm(den, c.denominator)
    ints = [int(c * den) for c in normal]
    g = 0
    for c in ints:
        g = gcd(g, c)
    ints = tuple(c // g for c in ints)
    return ints, bound * den / g


class DimensionError(ValueError):
    """Operands live in cubes of different dimension."""


@dataclass(frozen=True)
class HalfSpace:
    """``a.x < alpha`` when ``strict`` else ``a.x <= alpha``."""

    normal: tuple
    bound: Fraction
    strict: bool = False

    def __post_init__(self):
        normal = as_point(self.normal)
        if not any(normal):
            raise ValueError("half-space normal must be nonzero")
        ints, bound = _primitive(normal, as_rational(self.bound))
        object.__setattr__(self, "normal", ints)
        object.__setattr__(self, "bound", bound)
        object.__setattr__(self, "strict", bool(self.strict))
        first = next(c for c in ints if c)
        key = (ints, bound) if first > 0 else (tuple(-v for v in ints), -bound)
        object.__setattr__(self, "_key", key)

    @classmethod
    def _from_key(cls, key: tuple, strict: bool, flip: bool = False) -> "HalfSpace":
        """``a.x < b`` (or its complement when ``flip``) for an already
        normalised hyperplane key ``(a, b)``; skips renormalisation."""
        a, b = key
        h = object.__new__(cls)
        if flip:
            object.__setattr__(h, "normal", tuple(-c for c in a))
            object.__setattr__(h, "bound", -b)
        else:
            object.__setattr__(h, "normal", a)
            object.__setattr__(h, "bound", b)
        object.__setattr__(h, "strict", strict)
        object.__setattr__(h, "_key", key)
        return h

    @property
    def dim(self) -> int:
        return len(self.normal)

    def contains(self, point) -> bool:
        v = dot(self.normal, point)
        return v < self.bound if self.strict else v <= self.bound

    def slack(self, point) -> Fraction:
        return self.bound - dot(self.normal, point)

    def complement(self) -> "HalfSpace":
        return HalfSpace(tuple(-c for c in self.normal), -self.bound, not self.strict)

    def hyperplane(self) -> tuple:
        """Orientation-free key of the bounding hyperplane."""
        return self._key

    def to_json(self) -> dict:
        from .serialize import rat_str

        return {
            "a": [rat_str(c) for c in self.normal],
            "alpha": rat_str(self.bound),
            "strict": self.strict,
        }

    @classmethod
    def from_json(cls, data: dict) -> "HalfSpace":
        return cls(tuple(as_rational(c) for c in data["a"]), as_rational(data["alpha"]), bool(data["strict"]))


def constraint(normal, bound, strict=False):
    """Build a half-space, resolving constant constraints.

    Returns ``True`` (always satisfied), ``False`` (never satisfied) or a
    :class:`HalfSpace`.
    """
    normal = as_point(normal)
    bound = as_rational(bound)
    if not any(normal):
        return 0 < bound if strict else 0 <= bound
    return HalfSpace(normal, bound, strict)


def _box_implied(h: HalfSpace) -> bool:
    """True when ``h`` holds at every point of ``[0,1)^d``."""
    sup = sum(c for c in h.normal if c > 0)
    if sup < h.bound:
        return True
    if sup == h.bound:
        # a strict bound equal to the sup holds iff the sup is not attained
        return not h.strict or any(c > 0 for c in h.normal)
    return False


@dataclass(frozen=True)
class Polytope:
    """Intersection of half-spaces with ``[0,1)^dim``."""

    dim: int
    halfspaces: tuple = ()

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("polytope dimension must be positive")
        hs = tuple(self.halfspaces)
        for h in hs:
            if h.dim != self.dim:
                raise DimensionError(f"half-space of dim {h.dim} in polytope of dim {self.dim}")
        object.__setattr__(self, "halfspaces", hs)

    @classmethod
    def cube(cls, dim: int) -> "Polytope":
        return cls(dim, ())

    @classmethod
    def build(cls, dim: int, constraints: Iterable):
        """Polytope from raw constraints, or ``None`` if one of them is
        identically false.

        ``constraints`` may contain half-spaces, booleans or
        ``(normal, bound, strict)`` triples.  Box-implied and duplicate
        half-spaces are dropped.
        """
        kept = []
        seen = set()
        for c in constraints:
            if isinstance(c, tuple):
                c = constraint(*c)
            if c is True:
                continue
            if c is False:
                return None
            if _box_implied(c) or c in seen:
                continue
            seen.add(c)
            kept.append(c)
        return cls(dim, tuple(kept))

    def contains(self, point) -> bool:
        if len(point) != self.dim:
            raise DimensionError("point has wrong dimension")
        for x in point:
            if x < 0 or x >= 1:
                return False
        return all(h.contains(point) for h in self.halfspaces)

    def intersect(self, other: "Polytope") -> "Polytope":
        if self.dim != other.dim:
            raise DimensionError(f"cannot intersect dims {self.dim} and {other.dim}")
        if not other.halfspaces:
            return self
        if not self.halfspaces:
            return other
        seen = set(self.halfspaces)
        extra = tuple(h for h in other.halfspaces if h not in seen)
        return Polytope(self.dim, self.halfspaces + extra)

    def with_halfspaces(self, *hs: HalfSpace) -> "Polytope":
        seen = set(self.halfspaces)
        extra = tuple(h for h in hs if h not in seen and not _box_implied(h))
        return Polytope(self.dim, self.halfspaces + extra) if extra else self

    def hyperplanes(self) -> list:
        return [h.hyperplane() for h in self.halfspaces]

    def to_json(self) -> dict:
        return {"dim": self.dim, "halfspaces": [h.to_json() for h in self.halfspaces]}

    @classmethod
    def from_json(cls, data: dict) -> "Polytope":
        return cls(int(data["dim"]), tuple(HalfSpace.from_json(h) for h in data["halfspaces"]))


# --------------------------------------------------------------------------
# exact simplex


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(int(x.numerator), int(x.denominator))


class _Dictionary:
    """Simplex dictionary ``basic_i = B_i - sum_j A_ij nonbasic_j`` with
    objective ``z = obj + sum_j cost_j nonbasic_j``; Bland's rule."""

    def __init__(self, A, B, cost):
        self.A = A
        self.B = B
        self.cost = cost
        self.obj = _q(0)
        n = len(cost)
        self.nonbasic = list(range(n))
        self.basic = list(range(n, n + len(A)))

    def value(self, label):
        if label in self.nonbasic:
            return _q(0)
        return self.B[self.basic.index(label)]

    def pivot(self, leave, enter):
        A, B, cost = self.A, self.B, self.cost
        n = len(cost)
        inv = 1 / A[leave][enter]
        prow = [c * inv for c in A[leave]]
        prow[enter] = inv
        pb = B[leave] * inv
        nz = [j for j in range(n) if j != enter and prow[j]]
        for i in range(len(A)):
            if i == leave:
                continue
            f = A[i][enter]
            if not f:
                continue
            row = A[i]
            for j in nz:
                row[j] -= f * prow[j]
            row[enter] = -f * inv
            B[i] -= f * pb
        f = cost[enter]
        if f:
            for j in nz:
                cost[j] -= f * prow[j]
            cost[enter] = -f * inv
            self.obj += f * pb
        A[leave] = prow
        B[leave] = pb
        self.basic[leave], self.nonbasic[enter] = self.nonbasic[enter], self.basic[leave]

    def run(self, stop=None):
        """Maximise; ``stop`` is checked after every pivot for early exit."""
        A, B, cost = self.A, self.B, self.cost
        while True:
            if stop is not None and stop(self):
                return
            enter = None
            for j in sorted(range(len(cost)), key=lambda k: self.nonbasic[k]):
                if cost[j] > 0:
                    enter = j
                    break
            if enter is None:
                return
            leave = None
            best = None
            for i in range(len(A)):
                a = A[i][enter]
                if a > 0:
                    ratio = B[i] / a
                    if best is None or ratio < best or (
                        ratio == best and self.basic[i] < self.basic[leave]
                    ):
                        best, leave = ratio, i
            if leave is None:
                raise AssertionError("unbounded LP")
            self.pivot(leave, enter)


def _strict_lp(dim: int, rows: list, slacked: list, strict_lower: bool = True):
    """Maximise ``e`` in ``[0,1]`` subject to ``a.x + s*e <= b`` for each row,
    ``x_j + e <= 1`` and ``-x_j + e <= 0`` (the latter only when
    ``strict_lower``), ``x >= 0``.

    Returns a point ``x`` reached with ``e > 0``, or ``None`` if the optimum
    has ``e <= 0`` or the relaxed system is infeasible.
    """
    n = dim + 1
    E = dim
    A = []
    B = []
    for (a, b), s in zip(rows, slacked):
        A.append([_q(c) for c in a] + [_q(s)])
        B.append(_q(b))
    for j in range(dim):
        row = [_q(0)] * n
        row[j] = _q(1)
        row[E] = _q(1)
        A.append(row)
        B.append(_q(1))
        if strict_lower:
            row = [_q(0)] * n
            row[j] = _q(-1)
            row[E] = _q(1)
            A.append(row)
            B.append(_q(0))
    row = [_q(0)] * n
    row[E] = _q(1)
    A.append(row)
    B.append(_q(1))

    worst = min(range(len(B)), key=lambda i: B[i])
    if B[worst] < 0:
        # phase 1: auxiliary x0 (label n + m) added to every row
        m = len(A)
        for r in A:
            r.append(_q(-1))
        cost = [_q(0)] * n + [_q(-1)]
        D = _Dictionary(A, B, cost)
        aux = n
        D.nonbasic = list(range(n)) + [n + m]
        D.basic = list(range(n, n + m))
        D.pivot(worst, aux)
        D.run()
        if D.obj < 0:
            return None
        # drive x0 out of the basis if it is still there (degenerate)
        lab = n + m
        if lab in D.basic:
            i = D.basic.index(lab)
            for j in range(len(D.cost)):
                if D.A[i][j]:
                    D.pivot(i, j)
                    break
        k = D.nonbasic.index(lab)
        for r in D.A:
            r.pop(k)
        D.nonbasic.pop(k)
        # phase 2 objective: e expressed in the current dictionary
        cost = [_q(0)] * len(D.nonbasic)
        obj = _q(0)
        if E in D.nonbasic:
            cost[D.nonbasic.index(E)] = _q(1)
        else:
            i = D.basic.index(E)
            obj = D.B[i]
            cost = [-c for c in D.A[i]]
        D.cost = cost
        D.obj = obj
    else:
        cost = [_q(0)] * n
        cost[E] = _q(1)
        D = _Dictionary(A, B, cost)

    D.run(stop=lambda d: d.value(E) > 0)
    if D.value(E) <= 0:
        return None
    return tuple(_frac(D.value(j)) for j in range(dim))


@lru_cache(maxsize=65536)
def interior_point(P: Polytope):
    """A rational point satisfying every constraint of ``P`` strictly, or
    ``None`` when ``P`` has empty interior."""
    if not P.halfspaces:
        return tuple(Fraction(1, 2) for _ in range(P.dim))
    rows = [(h.normal, h.bound) for h in P.halfspaces]
    return _strict_lp(P.dim, rows, [1] * len(rows))


def feasible_interior(P: Polytope) -> bool:
    """True iff ``P`` has nonempty interior (positive measure)."""
    return interior_point(P) is not None


@lru_cache(maxsize=65536)
def _member_point(P: Polytope):
    if not P.halfspaces:
        return tuple(Fraction(0) for _ in range(P.dim))
    rows = [(h.normal, h.bound) for h in P.halfspaces]
    flags = [1 if h.strict else 0 for h in P.halfspaces]
    return _strict_lp(P.dim, rows, flags, strict_lower=False)


def is_empty(P: Polytope) -> bool:
    """Exact emptiness, honouring the strictness of every constraint."""
    return _member_point(P) is None


def intersect(P: Polytope, Q: Polytope) -> Polytope:
    return P.intersect(Q)


def prune_redundant(P: Polytope) -> Polytope:
    """Drop half-spaces whose removal does not change ``P`` up to a null set.

    One feasibility test per constraint.  Assumes ``P`` has interior.
    """
    kept = list(P.halfspaces)
    i = 0
    while i < len(kept):
        h = kept[i]
        rest = kept[:i] + kept[i + 1:]
        probe = Polytope(P.dim, tuple(rest) + (h.complement(),))
        if feasible_interior(probe):
            i += 1
        else:
            kept.pop(i)
    return Polytope(P.dim, tuple(kept))


# --------------------------------------------------------------------------
# arrangements


def _hyperplane(normal, bound):
    h = constraint(normal, bound, True)
    if isinstance(h, bool):
        return None
    return h.hyperplane()


def _step_inside(P: Polytope, w: tuple, direction: tuple) -> Fraction:
    """A positive step ``t`` such that ``w +- t*direction`` stays strictly
    inside ``P`` (``w`` is assumed strictly interior)."""
    limits = []
    for h in P.halfspaces:
        g = abs(dot(h.normal, direction))
        if g:
            limits.append(h.slack(w) / g)
    for j, dj in enumerate(direction):
        if dj:
            limits.append(min(w[j], 1 - w[j]) / abs(dj))
    return min(limits) / 2


def split_cell(P: Polytope, witness: tuple, hyperplane: tuple):
    """Split ``P`` by ``a.x = b`` into ``a.x < b`` and ``a.x >= b``.

    Returns a list of ``(polytope, witness, side)`` with ``side`` in
    ``{-1, +1}``.  If the hyperplane misses the interior of ``P`` the cell
    is returned unchanged (one entry).  Together the returned cells
    partition ``P`` pointwise.
    """
    a, b = hyperplane
    v = dot(a, witness) - b
    side = -1 if v < 0 else 1
    if v:
        lo = sum(c for c in a if c < 0)
        hi = sum(c for c in a if c > 0)
        if b <= lo or b >= hi:
            return [(P, witness, side)]
        for h in P.halfspaces:
            if h.hyperplane() == hyperplane:
                return [(P, witness, side)]
    below = HalfSpace._from_key(hyperplane, True)
    above = HalfSpace._from_key(hyperplane, False, flip=True)
    if v == 0:
        t = _step_inside(P, witness, a)
        lo = tuple(w - t * c for w, c in zip(witness, a))
        hi = tuple(w + t * c for w, c in zip(witness, a))
        return [(P.with_halfspaces(below), lo, -1), (P.with_halfspaces(above), hi, +1)]
    if v < 0:
        other = P.with_halfspaces(above)
        w2 = interior_point(other)
        if w2 is None:
            return [(P, witness, -1)]
        return [(P.with_halfspaces(below), witness, -1), (other, w2, +1)]
    other = P.with_halfspaces(below)
    w2 = interior_point(other)
    if w2 is None:
        return [(P, witness, +1)]
    return [(other, w2, -1), (P.with_halfspaces(above), witness, +1)]


def refine(cells: list, hyperplanes: Sequence[tuple]) -> list:
    """Refine ``(polytope, witness)`` cells by every hyperplane in turn."""
    for hp in hyperplanes:
        nxt = []
        for P, w in cells:
            for Q, wq, _ in split_cell(P, w, hp):
                nxt.append((Q, wq))
        cells = nxt
    return cells


def arrangement_cells(hyperplanes: Iterable, within: Polytope) -> list:
    """Full-dimensional cells cut out of ``within`` by the hyperplanes.

    ``hyperplanes`` is an iterable of ``(normal, bound)``.  Each returned
    cell lies on one side of every hyperplane; the cells partition
    ``within`` pointwise up to the cells of measure zero that are dropped.
    Ordering is by sign vector (``-1`` below, ``+1`` above) over the input
    hyperplanes.
    """
    hps = []
    for normal, bound in hyperplanes:
        if len(normal) != within.dim:
            raise DimensionError("hyperplane and polytope dimensions differ")
        hp = _hyperplane(as_point(normal), as_rational(bound))
        if hp is not None:
            hps.append(hp)
    w0 = interior_point(within)
    if w0 is None:
        return []
    unique = list(dict.fromkeys(hps))
    cells = refine([(within, w0)], unique)

    def signs(w):
        return tuple(-1 if dot(a, w) < b else 1 for a, b in hps)

    cells.sort(key=lambda c: signs(c[1]))
    return [P for P, _ in cells]
