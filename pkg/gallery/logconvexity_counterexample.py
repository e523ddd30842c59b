"""
A midpoint counterexample and radial Fourier transforms
=======================================================

For ``r = 9`` the function ``h(s) = f(sqrt(s))`` fails midpoint
log-convexity at ``s = 9/25`` and ``16/25``. A function that is positive
definite in every dimension would have a completely monotone ``h``, which is
log-convex, so ``f`` fails in some dimension. The radial Fourier transform
locates dimensions where it already fails.
"""

import numpy as np

from posdef_lab import midpoint_logconvexity_check
from posdef_lab.search import bochner_radial_probe

rep = midpoint_logconvexity_check(9, 9 / 25, 16 / 25)
w = rep.witness
print(f"1/(h(x) h(y)) = {w['lhs']:.4f}   1/h(mid)^2 = {w['rhs']:.4f}   -> {rep.verdict.value}")

# transforms with quadrature error bars; a FAIL is negative beyond 10x its error
freqs = np.geomspace(0.5, 30, 64)
for r, n in [(9, 3), (9, 5), (8, 6), (4, 3)]:
    rep = bochner_radial_probe(r, n, freqs)
    print(f"r = {r}, n = {n}: {rep.verdict.value:4s} most negative {rep.worst_margin:+.3e}", rep.witness or "")
