"""
Optimizing the delta sequence
=============================

For fixed Lambda the right-hand side of the delta forms is
sum a_i delta_i + b_i / delta_i. Without the ordering constraint each
delta_i would be sqrt(b_i / a_i); pool-adjacent-violators merges the
blocks where that order is broken.
"""

import numpy as np

from buckling import optimize_delta_monotone
from buckling.bounds import delta_objective

rng = np.random.default_rng(1)
a = rng.uniform(0.2, 2.0, 6)
b = rng.uniform(0.2, 2.0, 6)

free = np.sqrt(b / a)
pav = np.array(optimize_delta_monotone(a, b))
print("unconstrained:", np.round(free, 4))
print("monotone     :", np.round(pav, 4))

best_const = min(delta_objective(a, b, [c] * 6) for c in np.linspace(0.2, 3.0, 2801))
print(f"objective  unconstrained {delta_objective(a, b, free):.6f}"
      f"  monotone {delta_objective(a, b, pav):.6f}  best constant {best_const:.6f}")
