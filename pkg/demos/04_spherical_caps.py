"""
Spherical caps: the monotone-delta inequality against the constant-delta one
============================================================================

On a cap of the unit sphere, the non-increasing delta_i form improves on
the constant-delta inequality (SPHERE_WX). We compare the bounds each one
gives for Lambda_{k+1}.
"""

import math

from buckling import BoundForm, DomainSpec, compute_spectrum, next_upper_bound

F = BoundForm

for theta0 in (0.5, 1.0, math.pi / 2):
    spec, _ = compute_spectrum(DomainSpec("cap", 400, aperture=theta0, mode_count=8), 8)
    print(f"\ncap theta0={theta0:.3f}: " + " ".join(f"{v:.3f}" for v in spec.values))
    print(" k   actual    N2        MONO      WX")
    for k in range(1, 8):
        p = spec.prefix(k)
        b = [next_upper_bound(p, f).upper_bound for f in (F.SPHERE_N2, F.SPHERE_MONO, F.SPHERE_WX)]
        print(f"{k:2d}  {p.next_value:8.3f}  " + "  ".join(f"{x:8.3f}" for x in b))

# the hemisphere's axisymmetric values are l(l+1) for even l: 6, 20, ...
