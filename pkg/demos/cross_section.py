"""Step-affine sections of surjective homomorphisms between tori."""
import random
from fractions import Fraction

from stepcalc import cross_section
from stepcalc.torus import frac

sigma = cross_section([[2]])
print("section of x -> 2x:", [str(sigma((Fraction(k, 5),))[0]) for k in range(5)])

Q = [[1, 2, 0], [0, 3, 1]]
sigma = cross_section(Q)
rng = random.Random(0)
ok = 0
for _ in range(1000):
    t = tuple(Fraction(rng.randrange(997), 997) for _ in range(2))
    x = sigma(t)
    ok += all(frac(sum(q * c for q, c in zip(row, x))) == ti for row, ti in zip(Q, t))
print(f"Q sigma(t) = t for {ok}/1000 random points; the section has {len(sigma.cells)} cells")
