"""Dyadic Douglas sums on power maps x -> x**alpha.

Level n contributes sum_k Phi(2^n |u(I_nk)|) 4^-n. For Phi = t^p and the
power map, the k = 1 term alone behaves like 2^{n(p(1-alpha)-2)}, so the sum
diverges once p exceeds 2/(1-alpha). The script prints both sides of that
threshold and compares the discrete sums with the continuous double integral.
"""

import numpy as np

from biorlicz import boundary, douglas, nfunc

DEPTH = 12

for alpha in (0.5, 0.1):
    bh = boundary.power_map(alpha)
    table = boundary.image_lengths(bh, DEPTH)
    print(f"\npower map alpha={alpha}: threshold p = {douglas.p_douglas_threshold(alpha):.3f}")
    for p in (2, 3):
        rep = douglas.discrete_douglas(table, nfunc.power(p), DEPTH)
        r = rep.per_level[1:] / rep.per_level[:-1]
        print(f"  Phi=t^{p}: verdict {rep.verdict:<12} last ratio {r[-1]:.4f} "
              f"cumulative {rep.cumulative[-1]:.6g}")

print("\ndiscrete vs continuous, power(0.5), Phi=t^2")
eq = douglas.equivalence_report(boundary.power_map(0.5), nfunc.power(2), DEPTH)
for lvl, (d, c, q) in enumerate(zip(eq.discrete.cumulative, eq.continuous.estimates, eq.ratios), 1):
    print(f"  level {lvl:2d}: discrete {d:.6f}  continuous {c:.6f}  ratio {q:.4f}")
print(f"  ratio bracket on levels 6..{DEPTH}: {eq.bracket(6)}")
