"""Central defaults for the solver, the probe and the command-line front end.

==================  =========  ===============================================
name                value      used by
==================  =========  ===============================================
tol                 1e-8       eigensolver relative residual target
seed                42         eigensolver start block
radial_resolution   400        radial point count for disks and caps
planar_resolution   128        grid points per unit length, rectangle/L-shape
modes               8          azimuthal modes m = 0..modes for disks and caps
count               8          eigenvalues requested by ``solve``
probe_count         4          eigenfunctions examined by ``probe``
audit_rtol          1e-12      relative slack before a residual is a violation
==================  =========  ===============================================
"""

TOL = 1e-8
SEED = 42
RADIAL_RESOLUTION = 400
PLANAR_RESOLUTION = 128
MODES = 8
COUNT = 8
PROBE_COUNT = 4
AUDIT_RTOL = 1e-12


def resolution_for(shape: str) -> int:
    return PLANAR_RESOLUTION if shape in ("rectangle", "lshape") else RADIAL_RESOLUTION
