"""
Bounding the next eigenvalue from a prefix
==========================================

Given Lambda_1..Lambda_k, each inequality confines Lambda_{k+1} to an
interval whose right end is an upper bound. The three quadratic forms
nest: CONJ <= THIS <= CY.
"""

from buckling import BoundForm, disk_buckling_spectrum, envelope, low_order_bounds
from buckling import next_upper_bound

F = BoundForm
disk = disk_buckling_spectrum(9)

print(" k   Lambda_k+1   CONJ      THIS      CY        MONO")
for k in range(1, 9):
    p = disk.prefix(k)
    row = [next_upper_bound(p, f).upper_bound
           for f in (F.EUCLID_CONJ, F.EUCLID_THIS, F.EUCLID_CY, F.EUCLID_MONO)]
    print(f"{k:2d}  {p.next_value:9.3f}  " + "  ".join(f"{b:8.3f}" for b in row))

# with nothing but Lambda_1 the bounds can be iterated into an envelope
lam1 = disk.values[0]
for f in (F.EUCLID_CONJ, F.EUCLID_THIS, F.EUCLID_CY):
    print(f.value, [round(v, 2) for v in envelope(lam1, 2, f, 5)])
print("classical:", low_order_bounds(lam1, 2).to_dict())
