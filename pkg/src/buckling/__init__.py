"""Buckling eigenvalues of clamped plates and the universal inequalities they obey."""

from .bounds import (AuditEntry, BoundForm, BoundResult, audit_all, envelope,
                     low_order_bounds, next_upper_bound, optimize_delta_monotone,
                     optimized_residual, residual)
from .discretize import (DomainSpec, OperatorPair, build_membrane, build_planar,
                         build_radial_cap, build_radial_disk)
from .eigensolve import EigenResult, dense_oracle, smallest_pairs
from .errors import BucklingError
from .oracle import (bessel_j, bessel_zero, disk_buckling_spectrum, disk_membrane_spectrum,
                     rectangle_membrane_spectrum)
from .probe import ProbeReport, probe
from .solve import compute_spectrum
from .spectrum import Spectrum, read_spectrum_file, validate_spectrum, write_spectrum_file

__all__ = [
    "AuditEntry", "BoundForm", "BoundResult", "BucklingError", "DomainSpec", "EigenResult",
    "OperatorPair", "ProbeReport", "Spectrum", "audit_all", "bessel_j", "bessel_zero",
    "build_membrane", "build_planar", "build_radial_cap", "build_radial_disk",
    "compute_spectrum", "dense_oracle", "disk_buckling_spectrum", "disk_membrane_spectrum",
    "envelope", "low_order_bounds", "next_upper_bound", "optimize_delta_monotone",
    "optimized_residual", "probe", "read_spectrum_file", "rectangle_membrane_spectrum",
    "residual", "smallest_pairs", "validate_spectrum", "write_spectrum_file",
]
