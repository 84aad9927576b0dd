"""Shared JSON wire format.

Rationals are ``"p/q"`` strings (always with a denominator, so output is
bit-exact and canonical).  Objects know how to convert themselves via
``to_json``/``from_json``; this module holds the scalar helpers and the
deterministic dump used for every file the CLI writes.
"""
from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction


def rat_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rat(s) -> Fraction:
    if isinstance(s, bool) or isinstance(s, float):
        raise TypeError(f"not an exact rational: {s!r}")
    return Fraction(s)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_atomic(path, obj) -> None:
    """Write ``obj`` as canonical JSON; the target is replaced in one step."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(dumps(obj))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
