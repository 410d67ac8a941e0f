"""Domain -> spectrum pipeline shared by the command line and the demos."""

from __future__ import annotations

import math

from .discretize import (DomainSpec, build_planar, build_radial, membrane_pair)
from .eigensolve import DEFAULT_SEED, DEFAULT_TOL, smallest_pairs
from .spectrum import Spectrum, merge_mode_values, validate_spectrum


def _geometry(spec: DomainSpec) -> str:
    return "sphere" if spec.shape == "cap" else "euclidean"


def _solve_record(pair, eig, mode=None) -> dict:
    return {
        "mode": mode,
        "dimension": pair.dimension,
        "values": [float(v) for v in eig.values],
        "residuals": [float(r) for r in eig.residuals],
        "residual_floors": [float(f) for f in eig.floors],
        "iterations": eig.iterations,
    }


def compute_spectrum(spec: DomainSpec, count: int, problem: str = "buckling",
                     tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED):
    """Lowest ``count`` eigenvalues on ``spec`` plus solver metadata.

    Disks and caps are solved mode by mode (m = 0..spec.mode_count); each
    value of a mode m >= 1 enters the merged spectrum twice. Mode 0 needs up
    to ``count`` values and every other mode at most ceil(count / 2).
    """
    if problem not in ("buckling", "membrane"):
        raise ValueError(f"problem must be buckling or membrane, got {problem!r}")
    if count < 1:
        raise ValueError("count must be positive")
    solves = []
    if spec.planar:
        pair = build_planar(spec)
        if problem == "membrane":
            pair = membrane_pair(pair)
        if count > pair.dimension:
            raise ValueError(f"count {count} exceeds the {pair.dimension} unknowns")
        eig = smallest_pairs(pair, count, tol=tol, seed=seed)
        solves.append(_solve_record(pair, eig))
        values = [float(v) for v in eig.values]
        truncated = False
    else:
        per_mode = []
        for m in range(spec.mode_count + 1):
            pair = build_radial(spec, m)
            if problem == "membrane":
                pair = membrane_pair(pair)
            want = count if m == 0 else math.ceil(count / 2)
            eig = smallest_pairs(pair, min(want, pair.dimension), tol=tol, seed=seed)
            solves.append(_solve_record(pair, eig, mode=m))
            per_mode.append((m, eig.values))
        merged = merge_mode_values(per_mode)
        if len(merged) < count:
            raise ValueError(f"only {len(merged)} values available from "
                             f"{spec.mode_count + 1} modes")
        values = merged[:count]
        # the first value of the highest mode bounds every value of the
        # modes left out; if it is not above the cut, the list may be short
        truncated = bool(per_mode[-1][1][0] <= values[-1])
    spectrum = validate_spectrum(
        values, problem=problem, geometry=_geometry(spec), dimension=2,
        provenance={"source": "solve", "domain": spec.to_dict()})
    meta = {
        "domain": spec.to_dict(),
        "problem": problem,
        "count": count,
        "tol": tol,
        "seed": seed,
        "solves": solves,
        "max_residual": max(max(s["residuals"]) for s in solves),
        "mode_truncation_possible": truncated,
    }
    return spectrum, meta


def first_values(spec: DomainSpec, count: int, **kw) -> Spectrum:
    return compute_spectrum(spec, count, **kw)[0]
