"""Undoing a coboundary by averaging.

For a real-valued cocycle f of degree p over a compact group W the cochain
g = (-1)^p * integral over w of f(.., w, z) satisfies dg = f.  We start from a
known 0-cochain, take its coboundary, efface it and compare.
"""
from fractions import Fraction

from stepcalc import Cochain, canonicalize, StepPoly, coboundary, cochains_equal, compile_source, efface, is_cocycle
from stepcalc.torus import SubgroupSpec

T = SubgroupSpec.full(1)
square = Cochain(0, T, {(): compile_source("frac(z)*frac(z)", ["z"])})
f = coboundary(square)  # f(w, z) = {z + w}^2 - {z}^2
print("f(w, z) =", f[(0,)].describe(["w", "z"]))
print("f is a cocycle:", is_cocycle(f).holds)

g = efface(f)
print("g(z) =", canonicalize(g[()]).describe(["z"]))
print("g(1/2) =", g[()]((Fraction(1, 2),)), "  ({z}^2 - 1/3 at 1/2 is", Fraction(1, 4) - Fraction(1, 3), ")")
print("dg == f:", cochains_equal(coboundary(g), f).holds)

# A finite group works the same way; the integral becomes an average.
Z3 = SubgroupSpec.cyclic(1, [1], 3)
h = Cochain(1, Z3, {(k,): compile_source(f"frac(z)*{k + 1}", ["z"]) for k in range(3)})
dh = coboundary(h)
print("Z/3: efface(dh) is a primitive:", cochains_equal(coboundary(efface(dh)), dh).holds)

# The floor cocycle {z} + {w} - {z + w} is not a cocycle for the translation
# action: its coboundary is {w1} + {w2} - {w1 + w2}.
c = Cochain(1, T, {(0,): compile_source("frac(z) + frac(w) - frac(z + w)", ["w", "z"])})
rep = is_cocycle(c)
print("floor cocycle is a translation cocycle:", rep.holds, "witness", [str(x) for x in rep.witnesses[0]])
print("zero primitive:", efface(Cochain(1, T, {(0,): StepPoly.zero(2)}))[()].pieces == ())
