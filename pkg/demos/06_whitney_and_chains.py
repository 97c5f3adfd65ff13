"""
Whitney covers, quasihyperbolic distance, and chains
====================================================

A proper subdomain D gets covered greedily by balls of radius one quarter of
the boundary distance. The cover's structure is checked exactly: quarter
balls disjoint, domain covered, doubles inside D, the 2r/6r sandwich, and
bounded radius ratios between neighbours. On top of the cover sit two
comparable metrics: the chain length k~ (hops through intersecting balls) and
the quasihyperbolic distance k (shortest path weighted by reciprocal boundary
distance). Weight averages along chains grow at most exponentially in k~.
"""

import numpy as np

from metricweights import (
    Ball,
    chain_weight_ratio,
    check_cover_invariants,
    make_domain,
    qh_distance,
    shortest_chain_length,
    whitney_cover,
    witness_intersection_ball,
)
from metricweights.studies import (
    chain_comparability_study,
    interval_space,
    qh_interval_study,
    square_domain,
)

# -- cover a square and check every invariant -----------------------------------

space, domain = square_domain(24)
cover = whitney_cover(space, domain)
inv = check_cover_invariants(cover)
print(f"square side 24: {len(cover)} Whitney balls, overlap N = {inv['overlap_n']}")
print(f"  sandwich delta/r in [{inv['sandwich_lo']:.2f}, {inv['sandwich_hi']:.2f}]"
      f" (theory: [2, 6])")
print(f"  all invariants hold: {all(inv[k] for k in ('quarter_disjoint', 'covers_domain', 'doubles_inside', 'sandwich_ok', 'radius_ratio_ok'))}")

# -- quasihyperbolic distance against the closed form ----------------------------

# on the interval (0, 1) the distance between x and y is log(y/x) exactly
row = qh_interval_study(1e-3)
print(f"\nqh(0.25, 0.50) on (0,1): measured {row['measured']:.6f}, "
      f"expected log 2 = {row['expected']:.6f}, rel err {row['rel_error']:.1e}")

# -- chains track the quasihyperbolic metric -------------------------------------

report = chain_comparability_study(32)
print(f"\nside 32: {report['n_pairs']} resolved ball pairs, "
      f"corr(k~, k) = {report['corr']:.3f}")

# one concrete pair: chain hops, qh distance, and the weight-average ratio
i, j = report["pairs"][0]["i"], report["pairs"][0]["j"]
space32, domain32 = square_domain(32)
cover32 = whitney_cover(space32, domain32)
w = domain32.boundary_dist[domain32.ids] ** 0.3  # on the domain, sorted ids
ratio = chain_weight_ratio(space32, domain32, w, 2.0, cover32, i, j)
print(f"pair ({i}, {j}): k~ = {ratio.k_tilde}, qh = {ratio.qh_centers:.3f}, "
      f"avg ratio = {ratio.ratio:.3f} over {len(ratio.step_ratios)} steps")
print(f"  chain length from the graph: {shortest_chain_length(cover32, i, j)}")

# -- a certified ball inside an intersection --------------------------------------

line = interval_space(80, lo=0.0, hi=1.0)
witness = witness_intersection_ball(line, Ball(40, 0.3), Ball(72, 0.45), a=1.0)
print(f"\nwitness ball inside B(0.5, 0.3) and B(0.9, 0.45): "
      f"center {witness.ball.center}, radius {witness.ball.radius:.4f} "
      f"(case {witness.case}, ratio {witness.radius_ratio:.3f})")
