"""The difference equations in the spectral variable, and the removable hyperplanes."""

from __future__ import annotations

from toda_whittaker import TruncationPlan
from toda_whittaker.dual_ops import dde_residual, identity_sum_rule, residue_probe

xi, x, g = (0.31 + 0.1j, 0.57 - 0.2j), (2.5, 1.2), 0.7
plan = TruncationPlan(M=30)

# D_l Phi = exp(x_1 + ... + x_l) Phi; the shifted values are cached between l
cache = {}
for ell in (1, 2):
    r = dde_residual(ell, xi, x, g, plan, cache=cache)
    print(f"D_{ell}: residual {r.residual:.2e}  (sum of |terms| / |rhs| = {r.condition:.1f})")
print("Phi evaluations used:", len(cache))

print("\nfirst-order sum rule:", abs(identity_sum_rule(xi, g)))

# phi has poles on 2 xi_1 = m; the combination Phi does not.  The probe
# multiplies by the linear factor and watches it go to zero linearly.
probe_plan = TruncationPlan(M=30, prec=128)
for target in ("phi", "Phi"):
    p = residue_probe("single", 1, (0.5, 0.3 + 0.2j), (3.0, 1.5), g, plan=probe_plan, target=target)
    print(f"{target:>3}: slope {p.slope:+.3f}  extrapolated residue {abs(complex(p.extrapolated_residue)):.2e}")
