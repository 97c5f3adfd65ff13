"""
Maximal functions on X and against a subset E
=============================================

Mf takes, at each point, the largest ball average of |f|. The subset variant
m_E f integrates only over the part of each ball that meets E but still
normalizes by the measure of the whole ball, which is what the restricted
weight classes are built from. Raising Mf to a power below one produces an
A1-class weight (the Coifman-Rochberg construction), and that is the seed for
everything the factorization module does.
"""

import numpy as np

from metricweights import build_grid_space, coifman_rochberg_weight, maximal_fn

space = build_grid_space(1, 41, 0.05)  # the segment [0, 2] at spacing 0.05
x = np.linspace(0.0, 2.0, space.n)

# a spike at the midpoint: the maximal function spreads it out as 1/volume
f = np.where(np.abs(x - 1.0) < 0.051, 1.0, 0.0)
mf = maximal_fn(space, f)
print("spike input:   mass", float(np.sum(f * space.mu)))
print("Mf at spike   ", f"{mf[20]:.4f}")
print("Mf at distance 0.5", f"{mf[30]:.4f}")
print("Mf at the edge", f"{mf[40]:.4f}")

# restrict the data to the left half and watch the normalization penalty:
# balls reaching outside E keep their full measure in the denominator.
e_ids = np.flatnonzero(x <= 1.0)
m_e = maximal_fn(space, f[e_ids], E=e_ids)
print("\nm_E f with E = [0, 1]:")
print("  at the spike (inside E)  ", f"{m_e[20]:.4f}")
print("  at x = 1.5 (outside E)   ", f"{m_e[30]:.4f}")

# -- Coifman-Rochberg weights --------------------------------------------------

# w = (Mf)^eps is A1 for any eps in (0, 1); the constant degrades as eps -> 1.
print("\nA1 constants of (Mf)^eps:")
for eps in (0.2, 0.5, 0.8, 0.95):
    _, a1 = coifman_rochberg_weight(space, f, eps)
    print(f"  eps {eps:4.2f} -> [w]_A1 = {a1:8.3f}")
