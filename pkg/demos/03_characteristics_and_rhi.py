"""
Weight characteristics, witnesses, and reverse Holder self-improvement
======================================================================

Two finite characteristics drive the package. The subset-induced one scans
every canonical ball B and compares averages of w over B meet E against the
measure of the full ball; the domain one only admits balls whose member set
stays inside an open set D. Both report a witness ball attaining the maximum.
The reverse Holder constant then measures how much better than Jensen a
weight behaves, and the self-improvement search turns that into the largest
exponent eps with w^(1+eps) still within a characteristic budget.
"""

import numpy as np

from metricweights import (
    ap_domain_characteristic,
    ap_tilde_characteristic,
    conjugate_exponent,
    power_weight,
    reverse_holder_constant,
    self_improve_epsilon,
)
from metricweights.studies import interval_space, unit_band_subset

space = interval_space(50)  # 101 points on [-1, 1]
e_ids = unit_band_subset(space)  # the subset [0, 1]
w = power_weight(space, 0.5, ids=e_ids)  # |x|^(1/2), clamped at the origin

rep = ap_tilde_characteristic(space, e_ids, w, 2.0)
print(f"[w]_A2(E) = {rep.value:.6f}")
print(f"  witness: center {rep.witness_center}, ball #{rep.witness_prefix}")

# the same weight viewed through balls contained in the open band
d_rep = ap_domain_characteristic(space, e_ids, w, 2.0)
print(f"[w]_A2(D) = {d_rep.value:.6f} (domain balls only, never larger)")

# -- duality -------------------------------------------------------------------

# p and its conjugate exchange roles under w -> w^(1-p').
p = 3.0
q = conjugate_exponent(p)
char_p = ap_tilde_characteristic(space, e_ids, w, p).value
char_dual = ap_tilde_characteristic(space, e_ids, w ** (1.0 - q), q).value
print(f"\nduality at p={p}: [w]_p = {char_p:.6f}, [w^(1-p')]_p'^(p-1) = {char_dual ** (p - 1.0):.6f}")

# -- reverse Holder and self-improvement ---------------------------------------

for delta in (0.25, 0.5, 1.0):
    c = reverse_holder_constant(space, w, delta, domain=e_ids)
    print(f"reverse Holder constant at delta {delta:4.2f}: {c:.6f}")

# the self-improvement search scans the global characteristic, so hand it
# the weight defined on all of X
w_x = power_weight(space, 0.5)
base = ap_tilde_characteristic(space, None, w_x, 2.0).value
report = self_improve_epsilon(space, w_x, 2.0, np.linspace(0.0, 1.0, 21), budget=4.0 * base)
print(f"\nself-improvement of |x|^(1/2) on X within budget 4*[w]_A2:")
print(f"  best eps = {report.best_eps:.2f}")
for eps, char in report.table[::10]:
    print(f"  [w^(1+{eps:.1f})]_A2 = {char:.4f}")
