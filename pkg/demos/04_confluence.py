"""From Calogero-Sutherland to Toda: translate, rescale and let c grow."""

from __future__ import annotations

import math
import warnings

from toda_whittaker import coupling_schedule, c_function
from toda_whittaker.cs_confluence import cs_coeff_U, cs_coeff_V, scaled_c_function, confluence_error
from toda_whittaker.dual_ops import SignedSubset, coeff_U, coeff_V
from toda_whittaker.errors import ConfluencePrecision

xi, x, g = (0.3 + 0.1j, 0.55 - 0.2j), (2.5, 1.2), 0.7

for c in (0.0, 4.0, 8.0):
    k = coupling_schedule(c, g)
    print(f"c = {c:3.0f}: k0 = {k.k0:9.3f}  k1 = {k.k1.real:.2f}  k2 = {k.k2:10.3f}")

with warnings.catch_warnings():
    warnings.simplefilter("ignore", ConfluencePrecision)
    pts = confluence_error(xi, x, g, (4.0, 6.0, 8.0, 10.0))
print("\n  c    |phi^cs - phi|   |Phi^cs - Phi|")
for p in pts:
    print(f"{p.c:4.0f}   {p.err_phi:.3e}      {p.err_Phi:.3e}")

C = c_function(xi, g).value
print("\nc-function limit errors:", [f"{abs(scaled_c_function(xi, g, c) - C) / abs(C):.1e}" for c in (4, 6, 8, 10)])

# The coefficient limits: U converges like e^{-c}, V only like e^{-c/2},
# because k0^2 = e^c + k0 leaves an O(k0) term in each cross factor.
s = SignedSubset((0,), (1,))
print("\n  c    V error * e^{c/2}   U error * e^{c}")
for c in (6.0, 10.0, 14.0, 18.0):
    k = coupling_schedule(c, g)
    eV = abs(math.exp(-2 * c) * cs_coeff_V(s, xi, k) - coeff_V(s, xi, g)) / abs(coeff_V(s, xi, g))
    eU = abs(math.exp(-2 * c) * cs_coeff_U((0, 1), 1, xi, k) - coeff_U((0, 1), 1, xi, g)) / abs(coeff_U((0, 1), 1, xi, g))
    print(f"{c:4.0f}   {eV * math.exp(c / 2):.4f}             {eU * math.exp(c):.4f}")
print("|1 + 2 xi_1| =", abs(1 + 2 * xi[0]))
