"""Command-line entry point: ``stepcalc --manifest M.toml <command>``.

A manifest is a TOML document::

    vars = ["s", "t"]                      # default variables of every function

    [functions]
    lhs = "frac(s) + frac(t) - frac(s + t)"
    rhs = { source = "floor(frac(s) + frac(t))" }
    c   = { source = "frac(a) * frac(b)", vars = ["a", "b"] }
    q   = { file = "q.json" }             # a serialized StepPoly

    [subgroups]
    U = { torus = [[1], [0]] }            # d x r integer matrix, rows
    F = { finite = [{ g = [1, 0], n = 3 }] }
    V = { coords = [1] }                  # coordinate subtorus

    [equal]
    lhs = "lhs"
    rhs = "rhs"
    mod1 = false

Each command reads the table of the same name.  Reports go to
``<output>/<command>.json``.  Exit status: 0 success, 1 verification
failed, 2 malformed input.
"""
from __future__ import annotations

import argparse
import itertools
import random
import sys
from fractions import Fraction
from pathlib import Path

from .calculus import integrate_out
from .cohomdiff import (
    MOD1,
    REAL,
    Cochain,
    NotACocycle,
    UnsupportedAction,
    check_zero,
    coboundary,
    cochains_equal,
    efface,
    is_cocycle,
    verify_pdcee,
    verify_zero_sum,
)
from .dsl import ExprSyntaxError, compile_source
from .geometry import DimensionError, as_point
from .serialize import parse_rat, rat_str, write_atomic
from .steppoly import NotPiecewiseAffine, StepPoly, complexity_report
from .torus import NotSurjective, SubgroupSpec, cross_section, difference_op

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

OK, FAILED, MALFORMED = 0, 1, 2


class ManifestError(ValueError):
    pass


class Manifest:
    def __init__(self, data: dict, base: Path):
        self.data = data
        self.base = base
        self.vars = list(data.get("vars", []))
        self._functions: dict = {}

    @classmethod
    def load(cls, path) -> "Manifest":
        path = Path(path)
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except OSError as e:
            raise ManifestError(f"cannot read manifest: {e}") from e
        except tomllib.TOMLDecodeError as e:
            raise ManifestError(f"manifest is not valid TOML: {e}") from e
        return cls(data, path.parent)

    def section(self, name: str) -> dict:
        sec = self.data.get(name, {})
        if not isinstance(sec, dict):
            raise ManifestError(f"[{name}] must be a table")
        return sec

    def function(self, name: str) -> StepPoly:
        if name in self._functions:
            return self._functions[name]
        spec = self.section("functions").get(name)
        if spec is None:
            raise ManifestError(f"unknown function {name!r}")
        if isinstance(spec, str):
            spec = {"source": spec}
        if "file" in spec:
            import json

            try:
                f = StepPoly.from_json(json.loads((self.base / spec["file"]).read_text()))
            except (OSError, KeyError, TypeError, json.JSONDecodeError) as e:
                raise ManifestError(f"cannot load function {name!r}: {e}") from e
        elif "source" in spec:
            names = list(spec.get("vars", self.vars))
            if not names:
                raise ManifestError(f"function {name!r} has no variables")
            f = compile_source(spec["source"], names)
        else:
            raise ManifestError(f"function {name!r} needs 'source' or 'file'")
        self._functions[name] = f
        return f

    def subgroup(self, name: str, dim: int | None = None) -> SubgroupSpec:
        spec = self.section("subgroups").get(name)
        if spec is None:
            raise ManifestError(f"unknown subgroup {name!r}")
        d = int(spec.get("dim", dim if dim is not None else len(self.vars)))
        try:
            if "coords" in spec:
                if "torus" in spec:
                    raise ManifestError(f"subgroup {name!r}: give 'coords' or 'torus', not both")
                U = SubgroupSpec.coordinates(d, [int(i) for i in spec["coords"]])
                torus = U.torus_gens
            else:
                torus = tuple(tuple(row) for row in spec.get("torus", ()))
            finite = tuple((tuple(x["g"]), x["n"]) for x in spec.get("finite", ()))
            return SubgroupSpec(d, torus, finite)
        except (KeyError, TypeError) as e:
            raise ManifestError(f"malformed subgroup {name!r}: {e}") from e


def _need(sec: dict, key: str, table: str):
    if key not in sec:
        raise ManifestError(f"[{table}] is missing {key!r}")
    return sec[key]


def _point(text) -> tuple:
    if isinstance(text, str):
        parts = [p for p in text.replace(",", " ").split() if p]
    else:
        parts = list(text)
    return tuple(parse_rat(p) if isinstance(p, str) else as_point([p])[0] for p in parts)


def _cochain(m: Manifest, sec: dict, table: str, degree: int) -> Cochain:
    f = m.function(_need(sec, "function", table)) if "function" in sec else None
    value_class = sec.get("value_class", REAL)
    if value_class not in (REAL, MOD1):
        raise ManifestError(f"value_class must be {REAL!r} or {MOD1!r}")
    base = int(sec.get("base_dim", len(m.vars)))
    W = m.subgroup(_need(sec, "group", table), base)
    n = len(W.finite_elements())
    if "values" in sec:
        values = {}
        for key, fname in sec["values"].items():
            idx = tuple(int(k) for k in key.split(",") if k.strip())
            values[idx] = m.function(fname)
        for idx in itertools.product(range(n), repeat=degree):
            if idx not in values:
                if f is None:
                    raise ManifestError(f"no value for finite index {idx}")
                values[idx] = f
        return Cochain(degree, W, values, value_class)
    if f is None:
        raise ManifestError(f"[{table}] needs 'function' or 'values'")
    return Cochain.from_function(f, degree, W, value_class)


def cochain_to_json(c: Cochain) -> dict:
    return {
        "degree": c.degree,
        "group": c.group.to_json(),
        "valueClass": c.value_class,
        "values": [{"index": list(k), "value": v.to_json()} for k, v in sorted(c.values.items())],
    }


# -- commands ---------------------------------------------------------------
# each returns (exit code, report dict, summary line)


def cmd_verify_pdcee(m: Manifest, args):
    sec = m.section("verify-pdcee")
    f = m.function(_need(sec, "function", "verify-pdcee"))
    Us = [m.subgroup(n, f.dim) for n in _need(sec, "subgroups", "verify-pdcee")]
    r = verify_pdcee(f, Us)
    return (OK if r.holds else FAILED), r.to_json(), f"pdcee: holds={r.holds}"


def cmd_verify_zerosum(m: Manifest, args):
    sec = m.section("verify-zerosum")
    fs = [m.function(n) for n in _need(sec, "functions", "verify-zerosum")]
    if not fs:
        raise ManifestError("[verify-zerosum] needs at least one function")
    Us = [m.subgroup(n, fs[0].dim) for n in _need(sec, "subgroups", "verify-zerosum")]
    r = verify_zero_sum(fs, Us)
    return (OK if r.holds else FAILED), r.to_json(), f"zero-sum: holds={r.holds}"


def cmd_equal(m: Manifest, args):
    sec = m.section("equal")
    f = m.function(_need(sec, "lhs", "equal"))
    g = m.function(_need(sec, "rhs", "equal"))
    if f.dim != g.dim:
        raise DimensionError(f"lhs has dim {f.dim}, rhs has dim {g.dim}")
    mod1 = args.mod1 or bool(sec.get("mod1", False))
    r = check_zero(f - g, mod1)
    out = r.to_json()
    out["mod1"] = mod1
    return (OK if r.holds else FAILED), out, f"equal{' mod 1' if mod1 else ''}: holds={r.holds}"


def cmd_integrate(m: Manifest, args):
    sec = m.section("integrate")
    f = m.function(_need(sec, "function", "integrate"))
    k = args.out_coords if args.out_coords is not None else int(sec.get("out_coords", 1))
    g = integrate_out(f, k)
    if isinstance(g, Fraction):
        return OK, {"value": rat_str(g)}, f"integral = {g}"
    return OK, {"result": g.to_json()}, f"integrated out {k} coordinate(s): {len(g.pieces)} pieces"


def cmd_diff(m: Manifest, args):
    sec = m.section("diff")
    f = m.function(_need(sec, "function", "diff"))
    w = _point(args.w if args.w is not None else _need(sec, "w", "diff"))
    if len(w) != f.dim:
        raise DimensionError(f"shift of length {len(w)} for a {f.dim}-dim function")
    g = difference_op(f, w)
    return OK, {"w": [rat_str(x) for x in w], "result": g.to_json()}, f"difference: {len(g.pieces)} pieces"


def cmd_coboundary(m: Manifest, args):
    sec = dict(m.section("coboundary"))
    if args.group is not None:
        sec["group"] = args.group
    p = args.p if args.p is not None else int(_need(sec, "p", "coboundary"))
    c = _cochain(m, sec, "coboundary", p)
    d = coboundary(c, sec.get("action", "trivial"))
    return OK, cochain_to_json(d), f"coboundary: degree {d.degree}, {len(d.values)} value(s)"


def cmd_efface(m: Manifest, args):
    sec = m.section("efface")
    p = args.p if args.p is not None else int(_need(sec, "p", "efface"))
    c = _cochain(m, sec, "efface", p)
    r = is_cocycle(c)
    if not r.holds:
        out = r.to_json()
        out["error"] = "not a cocycle"
        return FAILED, out, "efface: input is not a cocycle"
    g = efface(c, check=False)
    back = coboundary(g)
    rt = cochains_equal(back, c)
    out = {"primitive": cochain_to_json(g), "roundTrip": rt.to_json()}
    return (OK if rt.holds else FAILED), out, f"efface: degree {g.degree}, round trip holds={rt.holds}"


def cmd_complexity(m: Manifest, args):
    sec = m.section("complexity")
    f = m.function(_need(sec, "function", "complexity"))
    rep = complexity_report(f)
    return OK, rep.to_json(), f"complexity: pieces={rep.pieces} maxDegree={rep.max_degree}"


def cmd_cross_section(m: Manifest, args):
    sec = m.section("cross-section")
    Q = _need(sec, "matrix", "cross-section")
    sigma = cross_section(Q)
    rng = random.Random(args.seed)
    n = int(sec.get("samples", 100))
    den = int(sec.get("denominator", 997))
    bad = []
    for _ in range(n):
        t = tuple(Fraction(rng.randrange(den), den) for _ in range(sigma.source_dim))
        x = sigma(t)
        img = tuple((sum(q * xi for q, xi in zip(row, x)) - ti) for row, ti in zip(Q, t))
        if any(v.denominator != 1 for v in img):
            bad.append([rat_str(c) for c in t])
    out = {"section": sigma.to_json(), "samples": n, "failures": bad}
    return (FAILED if bad else OK), out, f"cross-section: {len(sigma.cells)} cells, {n - len(bad)}/{n} checks passed"


COMMANDS = {
    "verify-pdcee": cmd_verify_pdcee,
    "verify-zerosum": cmd_verify_zerosum,
    "equal": cmd_equal,
    "integrate": cmd_integrate,
    "diff": cmd_diff,
    "coboundary": cmd_coboundary,
    "efface": cmd_efface,
    "complexity": cmd_complexity,
    "cross-section": cmd_cross_section,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stepcalc", description="Exact verification of identities between step polynomials on tori.")
    ap.add_argument("--manifest", required=True, help="TOML manifest")
    ap.add_argument("--output", default=".", help="directory for report files")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized sampling (verification itself is exact)")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("verify-pdcee")
    sub.add_parser("verify-zerosum")
    eq = sub.add_parser("equal")
    eq.add_argument("--mod1", action="store_true", help="compare modulo 1")
    it = sub.add_parser("integrate")
    it.add_argument("--out-coords", type=int, dest="out_coords")
    df = sub.add_parser("diff")
    df.add_argument("--w", help="shift, e.g. '1/3,0'")
    cb = sub.add_parser("coboundary")
    cb.add_argument("--p", type=int)
    cb.add_argument("--group")
    ef = sub.add_parser("efface")
    ef.add_argument("--p", type=int)
    sub.add_parser("complexity")
    sub.add_parser("cross-section")
    return ap


_INPUT_ERRORS = (
    ManifestError,
    ExprSyntaxError,
    DimensionError,
    NotPiecewiseAffine,
    NotSurjective,
    NotACocycle,
    UnsupportedAction,
    ValueError,
    KeyError,
    TypeError,
    IndexError,
)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for name in ("mod1", "out_coords", "w", "p", "group"):
        if not hasattr(args, name):
            setattr(args, name, None if name != "mod1" else False)
    try:
        m = Manifest.load(args.manifest)
        code, report, summary = COMMANDS[args.command](m, args)
    except _INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return MALFORMED
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    write_atomic(out / f"{args.command}.json", report)
    print(summary)
    return code


if __name__ == "__main__":
    sys.exit(main())
