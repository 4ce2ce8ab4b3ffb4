"""Rank two: the signed-permutation sum, its invariance and the plane-wave tail."""

from __future__ import annotations

import numpy as np

from toda_whittaker import TruncationPlan, c_function, group_enumerate, phi_eval, whittaker_eval
from toda_whittaker.connection import plane_wave_limit, whittaker_laplacian_residual
from toda_whittaker.core import cone_enumerate

# The series is indexed by the dominance cone; level m holds binom(n+m-1, m) vectors
levels = cone_enumerate(2, 6)
print("cone sizes per level:", [len(levels[m]) for m in range(7)])

xi = np.array([0.3 + 0.1j, 0.55 - 0.2j])
x, g = (2.5, 1.2), 0.7
plan = TruncationPlan(M=30)

# the tail bound is rigorous but very loose once n > 1; the actual
# truncation error at M = 30 is far below it
ev = phi_eval(tuple(xi), x, g, plan)
print(f"\nphi = {ev.value:.10f}   tail bound {ev.tail_bound:.2e}")
print("C(xi) =", c_function(tuple(xi), g).value)

# Phi takes the same value at all eight images of xi
for w in group_enumerate(2):
    val = whittaker_eval(tuple(w(xi)), x, g, plan).value
    print(f"{str(w):>28}  {val:.13f}")

print("\n|L Phi - <xi,xi> Phi| / |Phi| =", whittaker_laplacian_residual(tuple(xi), x, g, plan))

# Far out in the chamber the wall is invisible and only the plane waves remain
xi_im = (0.4j, 0.7j)
for gap in (5.0, 10.0, 15.0):
    far = (2 * gap, gap)
    err = abs(whittaker_eval(xi_im, far, g).value - plane_wave_limit(xi_im, far, g))
    print(f"gap {gap:4.1f}: distance from plane-wave sum {err:.2e}")
