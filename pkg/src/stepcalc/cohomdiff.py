"""Cochains, coboundaries, effacement and the difference-equation checks.

Cochains are taken over a group ``W = M T^r + F`` acting on ``T^d`` by
translation, with trivial coefficients.  A degree-``p`` cochain is stored
on the parameter group ``(T^r x F)^p``: one step polynomial on
``[0,1)^(p r + d)`` per ``p``-tuple of indices into the enumerated finite
part, with coordinates laid out as ``(w_1, ..., w_p, z)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .calculus import integrate_out, permute_coords
from .geometry import DimensionError
from .serialize import rat_str
from .steppoly import StepPoly, residual_cells
from .torus import (
    AffineTorusMap,
    SubgroupSpec,
    TorusPoint,
    difference_op,
    frac_of_affine,
    precompose,
    shift_family,
)

REAL = "real"
MOD1 = "mod1"


class NotACocycle(ValueError):
    pass


class UnsupportedAction(ValueError):
    pass


@dataclass
class VerificationReport:
    holds: bool
    residual: StepPoly
    witnesses: list = field(default_factory=list)
    checks: list = field(default_factory=list)  # sub-reports
    label: str = ""

    def to_json(self) -> dict:
        out = {
            "holds": self.holds,
            "residual": self.residual.to_json(),
            "witnesses": [[rat_str(x) for x in w] for w in self.witnesses],
        }
        if self.label:
            out["label"] = self.label
        if self.checks:
            out["checks"] = [r.to_json() for r in self.checks]
        return out


def check_zero(f: StepPoly, mod1: bool, label: str = "") -> VerificationReport:
    """Report on ``f == 0`` a.e. (mod 1 when asked)."""
    bad = residual_cells(f, mod1=mod1)
    residual = StepPoly(f.dim, [(p, P) for P, _, p in bad])
    return VerificationReport(not bad, residual, [w for _, w, _ in bad], label=label)


def _merge(reports: Sequence[VerificationReport], dim: int, label: str = "") -> VerificationReport:
    failed = [r for r in reports if not r.holds]
    if not failed:
        return VerificationReport(True, StepPoly.zero(dim), [], list(reports), label)
    first = failed[0]
    return VerificationReport(False, first.residual, list(first.witnesses), list(reports), label)


# --------------------------------------------------------------------------
# cochains


@dataclass
class Cochain:
    degree: int
    group: SubgroupSpec
    values: dict  # tuple of finite indices -> StepPoly on [0,1)^(p r + d)
    value_class: str = REAL

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("cochain degree must be nonnegative")
        if self.value_class not in (REAL, MOD1):
            raise ValueError(f"unknown value class {self.value_class!r}")
        n = len(self.elements)
        want = set(itertools.product(range(n), repeat=self.degree))
        if set(self.values) != want:
            raise ValueError(f"cochain needs one value for each of the {len(want)} finite index tuples")
        dim = self.degree * self.group.torus_rank + self.base_dim
        for f in self.values.values():
            if f.dim != dim:
                raise DimensionError(f"cochain value of dim {f.dim}, expected {dim}")

    @property
    def base_dim(self) -> int:
        return self.group.ambient_dim

    @property
    def elements(self) -> list:
        return self.group.finite_elements()

    @property
    def dim(self) -> int:
        return self.degree * self.group.torus_rank + self.base_dim

    @classmethod
    def from_function(cls, f: StepPoly, degree: int, group: SubgroupSpec, value_class: str = REAL) -> "Cochain":
        """A cochain that ignores the finite indices (all equal to ``f``)."""
        n = len(group.finite_elements())
        return cls(degree, group, {k: f for k in itertools.product(range(n), repeat=degree)}, value_class)

    def __getitem__(self, idx) -> StepPoly:
        return self.values[tuple(idx)]

    def __sub__(self, other: "Cochain") -> "Cochain":
        return Cochain(self.degree, self.group, {k: v - other.values[k] for k, v in self.values.items()}, self.value_class)


def _element_sum_table(elems: list) -> list:
    index = {e: i for i, e in enumerate(elems)}
    return [[index[a + b] for b in elems] for a in elems]


def _rearrange(f: StepPoly, rows, offset) -> StepPoly:
    return precompose(f, frac_of_affine(AffineTorusMap(tuple(rows), tuple(offset))))


def coboundary(f: Cochain, action: str = "trivial") -> Cochain:
    """``df(w_1..w_{p+1}, z) = f(w_2..w_{p+1}, z + w_1)
    + sum_i (-1)^i f(.., w_i + w_{i+1}, .., z) + (-1)^{p+1} f(w_1..w_p, z)``."""
    if action != "trivial":
        raise UnsupportedAction("only the trivial coefficient action is supported")
    p = f.degree
    W = f.group
    r = W.torus_rank
    d = W.ambient_dim
    elems = f.elements
    add = _element_sum_table(elems)
    n_src = (p + 1) * r + d

    def unit(j):
        return tuple(int(k == j) for k in range(n_src))

    def block(i):  # source coordinates of w_i (1-based)
        return range((i - 1) * r, i * r)

    zcoords = range((p + 1) * r, n_src)
    out = {}
    for idx in itertools.product(range(len(elems)), repeat=p + 1):
        total = StepPoly.zero(n_src)
        # f(w_2..w_{p+1}, z + w_1)
        rows = [unit(j) for i in range(2, p + 2) for j in block(i)]
        for a, zj in enumerate(zcoords):
            row = list(unit(zj))
            for b, j in enumerate(block(1)):
                row[j] += W.torus_gens[a][b]
            rows.append(tuple(row))
        offset = [0] * (p * r) + list(elems[idx[0]])
        total = total + _rearrange(f[idx[1:]], rows, offset)
        # middle terms
        for i in range(1, p + 1):
            rows = []
            for k in range(1, p + 2):
                if k == i + 1:
                    continue
                for b, j in enumerate(block(k)):
                    row = list(unit(j))
                    if k == i:
                        row[list(block(i + 1))[b]] += 1
                    rows.append(tuple(row))
            rows += [unit(j) for j in zcoords]
            fidx = idx[: i - 1] + (add[idx[i - 1]][idx[i]],) + idx[i + 1:]
            term = _rearrange(f[fidx], rows, [0] * (p * r + d))
            total = total + (term if i % 2 == 0 else -term)
        # (-1)^{p+1} f(w_1..w_p, z)
        rows = [unit(j) for i in range(1, p + 1) for j in block(i)] + [unit(j) for j in zcoords]
        term = _rearrange(f[idx[:p]], rows, [0] * (p * r + d))
        total = total + (term if (p + 1) % 2 == 0 else -term)
        out[idx] = total
    return Cochain(p + 1, W, out, f.value_class)


def cochain_zero_report(f: Cochain, label: str = "") -> VerificationReport:
    mod1 = f.value_class == MOD1
    reports = [check_zero(v, mod1, label=f"index {k}") for k, v in sorted(f.values.items())]
    return _merge(reports, f.dim, label)


def is_cocycle(f: Cochain) -> VerificationReport:
    return cochain_zero_report(coboundary(f), "coboundary")


def cochains_equal(f: Cochain, g: Cochain) -> VerificationReport:
    return cochain_zero_report(f - g, "difference")


def efface(f: Cochain, check: bool = True) -> Cochain:
    """A primitive ``g`` with ``dg = f`` for a real-valued cocycle ``f``:
    ``g(w_1..w_{p-1}, z) = (-1)^p int_W f(w_1..w_{p-1}, w, z) dw``."""
    if f.value_class != REAL:
        raise ValueError("effacement needs a real-valued cochain")
    p = f.degree
    if p < 1:
        raise ValueError("effacement needs degree at least 1")
    if check and not is_cocycle(f).holds:
        raise NotACocycle("cochain is not a cocycle")
    W = f.group
    r = W.torus_rank
    d = W.ambient_dim
    nel = len(f.elements)
    dim = f.dim
    # move the block of w_p behind z so it can be integrated out
    perm = None
    if r:
        order = list(range((p - 1) * r)) + list(range(p * r, dim)) + list(range((p - 1) * r, p * r))
        # new coordinate k reads old coordinate order[k]; we need the inverse
        perm = [0] * dim
        for k, old in enumerate(order):
            perm[old] = k
    sign = 1 if p % 2 == 0 else -1
    out = {}
    for idx in itertools.product(range(nel), repeat=p - 1):
        acc = StepPoly.zero((p - 1) * r + d)
        for k in range(nel):
            v = f[idx + (k,)]
            if r:
                acc = acc + integrate_out(permute_coords(v, perm), r)
            else:
                acc = acc + v
        out[idx] = acc.scale(Fraction(sign, nel))
    return Cochain(p - 1, W, out, REAL)


# --------------------------------------------------------------------------
# functional equations


def verify_pdcee(f: StepPoly, subgroups: Sequence[SubgroupSpec]) -> VerificationReport:
    """Check ``d_{u_1} ... d_{u_k} f = 0 mod 1`` for all ``u_i in U_i``.

    Torus parts become symbolic coordinates ``(t_k, ..., t_1, z)``; finite
    parts are enumerated, one defect per tuple of finite elements.
    """
    d = f.dim
    for U in subgroups:
        if U.ambient_dim != d:
            raise DimensionError("subgroup and function dimensions differ")
    family = {(): f}
    head = 0
    for U in subgroups:
        nxt = {}
        for key, g in family.items():
            for k, h in shift_family(g, U, head).items():
                nxt[key + (k,)] = h
        family = nxt
        head += U.torus_rank
    reports = [check_zero(h, True, label=f"finite {key}") for key, h in sorted(family.items())]
    return _merge(reports, head + d, "pdcee")


def verify_zero_sum(fs: Sequence[StepPoly], subgroups: Sequence[SubgroupSpec]) -> VerificationReport:
    """Each ``f_i`` is ``U_i``-invariant mod 1 and ``sum f_i == 0`` mod 1."""
    if len(fs) != len(subgroups):
        raise ValueError("need one subgroup per function")
    if not fs:
        raise ValueError("empty zero-sum tuple")
    d = fs[0].dim
    for f, U in zip(fs, subgroups):
        if f.dim != d or U.ambient_dim != d:
            raise DimensionError("zero-sum functions and subgroups must share a dimension")
    reports = []
    for i, (f, U) in enumerate(zip(fs, subgroups)):
        sub = []
        if U.torus_rank:
            h = shift_family(f, U, 0, [TorusPoint.zero(d)])[0]
            sub.append(check_zero(h, True, label="torus part"))
        for j, u in enumerate(U.generator_elements()):
            sub.append(check_zero(difference_op(f, u), True, label=f"finite generator {j}"))
        reports.append(_merge(sub, d, f"invariance {i + 1}"))
    total = fs[0]
    for f in fs[1:]:
        total = total + f
    reports.append(check_zero(total, True, label="sum"))
    return _merge(reports, d, "zero-sum")

