"""Rank one: the series, Kummer's function and Macdonald's K side by side."""

from __future__ import annotations

import numpy as np

from toda_whittaker import TruncationPlan, phi_eval, whittaker_eval
from toda_whittaker.univariate import bessel_K_quad, whittaker_M_phi, whittaker_W_Phi

# One particle against the wall: L = d^2/dx^2 - g e^{-x} - e^{-2x}/4.
xi, g = 0.35j, 0.7
xs = np.linspace(0.5, 3.0, 6)

# The Harish-Chandra series and the closed Kummer form are separate code paths
print("   x      series phi            Kummer phi           rel. diff")
for x in xs:
    a = phi_eval((xi,), (x,), g, TruncationPlan(M=40)).value
    b = whittaker_M_phi(xi, x, g)
    print(f"{x:5.2f}  {a:.12f}  {b:.12f}  {abs(a - b) / abs(b):.1e}")

# Phi is real on the imaginary axis and even in xi
x = 1.3
print("\nPhi(xi), Phi(-xi):", whittaker_W_Phi(xi, x, g), whittaker_W_Phi(-xi, x, g))

# With no linear wall term the eigenfunction is a Bessel function of e^{-x}/2
print("\n   x      Phi (g = 0)          K_xi(e^{-x}/2)/sqrt(pi)")
for x in xs:
    Phi = whittaker_eval((xi,), (x,), 0.0, TruncationPlan(M=40)).value
    K = bessel_K_quad(xi, np.exp(-x) / 2) / np.sqrt(np.pi)
    print(f"{x:5.2f}  {Phi.real:.14f}  {K.real:.14f}")
