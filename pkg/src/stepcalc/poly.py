"""Sparse exact multivariate polynomials and rational affine maps."""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .geometry import DimensionError, as_point, as_rational
from .serialize import parse_rat, rat_str


class Polynomial:
    """A polynomial in ``dim`` variables with ``Fraction`` coefficients.

    ``terms`` maps exponent tuples to nonzero coefficients.  Instances are
    treated as immutable.
    """

    __slots__ = ("dim", "terms", "_hash")

    def __init__(self, dim: int, terms: Mapping | None = None):
        self.dim = dim
        clean = {}
        if terms:
            for exps, c in terms.items():
                exps = tuple(exps)
                if len(exps) != dim:
                    raise DimensionError(f"exponent {exps} does not match dim {dim}")
                c = as_rational(c)
                if c:
                    clean[exps] = clean.get(exps, 0) + c
                    if not clean[exps]:
                        del clean[exps]
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, dim, terms):
        p = cls.__new__(cls)
        p.dim = dim
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, dim: int) -> "Polynomial":
        return cls._raw(dim, {})

    @classmethod
    def constant(cls, dim: int, c) -> "Polynomial":
        c = as_rational(c)
        return cls._raw(dim, {(0,) * dim: c} if c else {})

    @classmethod
    def variable(cls, dim: int, i: int) -> "Polynomial":
        e = [0] * dim
        e[i] = 1
        return cls._raw(dim, {tuple(e): Fraction(1)})

    @classmethod
    def linear(cls, coeffs: Sequence, const=0) -> "Polynomial":
        """``const + sum_i coeffs[i] * x_i``."""
        dim = len(coeffs)
        terms = {}
        c0 = as_rational(const)
        if c0:
            terms[(0,) * dim] = c0
        for i, c in enumerate(coeffs):
            c = as_rational(c)
            if c:
                e = [0] * dim
                e[i] = 1
                terms[tuple(e)] = c
        return cls._raw(dim, terms)

    # -- structure -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.dim, Fraction(0))

    def linear_part(self):
        """``(coeffs, const)`` of a polynomial of degree at most one."""
        if self.degree > 1:
            raise ValueError("polynomial is not affine")
        coeffs = [Fraction(0)] * self.dim
        for e, c in self.terms.items():
            for i, k in enumerate(e):
                if k:
                    coeffs[i] = c
        return tuple(coeffs), self.constant_term()

    def max_abs_coeff(self) -> Fraction:
        return max((abs(c) for c in self.terms.values()), default=Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"Polynomial({self.dim}, {self.to_string()})"

    def to_string(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        names = names or [f"x{i + 1}" for i in range(self.dim)]
        out = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            )
            if not mono:
                s = str(c)
            elif c == 1:
                s = mono
            elif c == -1:
                s = "-" + mono
            else:
                s = f"{c}*{mono}"
            out.append(s)
        return " + ".join(out).replace("+ -", "- ")

    # -- arithmetic ----------------------------------------------------

    def _check(self, other):
        if self.dim != other.dim:
            raise DimensionError(f"polynomial dims {self.dim} and {other.dim} differ")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            v = terms.get(e, 0) + c
            if v:
                terms[e] = v
            else:
                terms.pop(e, None)
        return Polynomial._raw(self.dim, terms)

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.dim, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scale(self, c) -> "Polynomial":
        c = as_rational(c)
        if not c:
            return Polynomial.zero(self.dim)
        return Polynomial._raw(self.dim, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = terms.get(e, 0) + c1 * c2
                if v:
                    terms[e] = v
                else:
                    terms.pop(e, None)
        return Polynomial._raw(self.dim, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        out = Polynomial.constant(self.dim, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- calculus and evaluation ----------------------------------------

    def __call__(self, point) -> Fraction:
        return self.evaluate(point)

    def evaluate(self, point) -> Fraction:
        if len(point) != self.dim:
            raise DimensionError(f"point of length {len(point)} for dim {self.dim}")
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= x**k
            total += v
        return total

    def antiderivative(self, coord: int) -> "Polynomial":
        terms = {}
        for e, c in self.terms.items():
            k = e[coord] + 1
            terms[e[:coord] + (k,) + e[coord + 1:]] = c / k
        return Polynomial._raw(self.dim, terms)

    def derivative(self, coord: int) -> "Polynomial":
        terms = {}
        for e, c in self.terms.items():
            k = e[coord]
            if k:
                terms[e[:coord] + (k - 1,) + e[coord + 1:]] = c * k
        return Polynomial._raw(self.dim, terms)

    def compose_affine(self, A: "AffineMap") -> "Polynomial":
        """``p(A x + b)`` as a polynomial in ``A.source_dim`` variables."""
        if A.target_dim != self.dim:
            raise DimensionError(f"affine map lands in dim {A.target_dim}, polynomial has dim {self.dim}")
        D = A.source_dim
        lin = A.as_polynomials()
        powers: dict = {}

        def power(i, k):
            key = (i, k)
            if key not in powers:
                powers[key] = lin[i] if k == 1 else power(i, k - 1) * lin[i]
            return powers[key]

        out = Polynomial.zero(D)
        one = Polynomial.constant(D, 1)
        for e, c in self.terms.items():
            term = one
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            out = out + term.scale(c)
        return out

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "terms": [
                {"exps": list(e), "coeff": rat_str(self.terms[e])} for e in sorted(self.terms)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Polynomial":
        dim = int(data["dim"])
        return cls(dim, {tuple(int(k) for k in t["exps"]): parse_rat(t["coeff"]) for t in data["terms"]})


class AffineMap:
    """``x -> M x + b`` from ``Q^source_dim`` to ``Q^target_dim``."""

    __slots__ = ("matrix", "offset", "_polys")

    def __init__(self, matrix: Sequence[Sequence], offset: Sequence | None = None):
        self.matrix = tuple(as_point(row) for row in matrix)
        r = len(self.matrix)
        if r == 0:
            raise ValueError("affine map needs at least one output row")
        widths = {len(row) for row in self.matrix}
        if len(widths) != 1:
            raise ValueError("ragged affine matrix")
        self.offset = as_point(offset) if offset is not None else (Fraction(0),) * r
        if len(self.offset) != r:
            raise DimensionError("offset length does not match matrix rows")
        self._polys = None

    @property
    def source_dim(self) -> int:
        return len(self.matrix[0])

    @property
    def target_dim(self) -> int:
        return len(self.matrix)

    @classmethod
    def identity(cls, dim: int) -> "AffineMap":
        return cls([[int(i == j) for j in range(dim)] for i in range(dim)])

    def __call__(self, x) -> tuple:
        if len(x) != self.source_dim:
            raise DimensionError("point does not match affine map source")
        return tuple(
            b + sum((m * xi for m, xi in zip(row, x) if m), Fraction(0))
            for row, b in zip(self.matrix, self.offset)
        )

    def compose(self, inner: "AffineMap") -> "AffineMap":
        """``self o inner``."""
        if inner.target_dim != self.source_dim:
            raise DimensionError("cannot compose affine maps of mismatched shape")
        cols = list(zip(*inner.matrix))
        M = [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols] for row in self.matrix]
        b = self(inner.offset)
        return AffineMap(M, b)

    def as_polynomials(self) -> list:
        if self._polys is None:
            self._polys = [Polynomial.linear(row, b) for row, b in zip(self.matrix, self.offset)]
        return self._polys

    def __eq__(self, other):
        return isinstance(other, AffineMap) and self.matrix == other.matrix and self.offset == other.offset

    def __hash__(self):
        return hash((self.matrix, self.offset))

    def __repr__(self):
        return f"AffineMap({[list(map(str, r)) for r in self.matrix]}, {list(map(str, self.offset))})"

    def to_json(self) -> dict:
        return {
            "matrix": [[rat_str(c) for c in row] for row in self.matrix],
            "offset": [rat_str(c) for c in self.offset],
        }

    @classmethod
    def from_json(cls, data: dict) -> "AffineMap":
        return cls(data["matrix"], data["offset"])


def poly_arith(p: Polynomial, q: Polynomial | None, op: str, c=None) -> Polynomial:
    """Dispatch ``add``/``sub``/``mul``/``scale`` by name."""
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    if op == "scale":
        return p.scale(c)
    raise ValueError(f"unknown polynomial op {op!r}")


def compose_affine(p: Polynomial, A: AffineMap) -> Polynomial:
    return p.compose_affine(A)


def antiderivative(p: Polynomial, coord: int) -> Polynomial:
    return p.antiderivative(coord)


def evaluate(p: Polynomial, point) -> Fraction:
    return p.evaluate(point)
