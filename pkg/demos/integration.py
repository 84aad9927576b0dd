"""Integrating out coordinates exactly, checked against Monte Carlo."""
from fractions import Fraction

import numpy as np

from stepcalc import compile_source, integrate_out, total_integral

# The area of {v : v <= u} inside [0,1) is u.
tri = compile_source("floor(frac(u) - frac(v) + 1)", ["u", "v"])
q = integrate_out(tri)
print("slice area:", q.describe(["u"]))

# A product under the anti-diagonal.
f = compile_source("frac(u)*frac(v)*floor(2 - frac(u) - frac(v))", ["u", "v"])
q = integrate_out(f)
print("u * int_0^{1-u} v dv =", q.describe(["u"]))
print("total integral:", total_integral(f))

u = Fraction(1, 3)
rng = np.random.default_rng(0)
v = rng.random(10**6)
vals = float(u) * v * (float(u) + v <= 1)
print(f"exact q(1/3) = {q((u,))} = {float(q((u,))):.6f}, Monte Carlo {vals.mean():.6f} +- {vals.std() / 1e3:.6f}")
