"""Shared fixtures-by-function for the test modules."""

import math

import numpy as np

from buckling.bounds import BoundForm, next_upper_bound_euclid
from buckling.discretize import (DomainSpec, build_planar, build_radial_cap,
                                 build_radial_disk, membrane_pair)
from buckling.spectrum import validate_spectrum


def small_operators():
    """Every pencil of dimension <= 600 that the suite compares against the
    dense solver, as (name, pair) pairs."""
    ops = []
    for res in (8, 16, 24):
        pair = build_planar(DomainSpec("rectangle", res))
        ops.append((f"square-{res}", pair))
        ops.append((f"square-{res}-membrane", membrane_pair(pair)))
    ops.append(("rect2x1-12", build_planar(DomainSpec("rectangle", 12, a=2.0, b=1.0))))
    for res in (16, 24):
        pair = build_planar(DomainSpec("lshape", res))
        ops.append((f"lshape-{res}", pair))
        ops.append((f"lshape-{res}-membrane", membrane_pair(pair)))
    for m in (0, 1, 4, 8):
        ops.append((f"disk-m{m}-400", build_radial_disk(m, 400)))
    ops.append(("disk-m0-400-membrane", membrane_pair(build_radial_disk(0, 400))))
    for ap in (0.5, 1.0, math.pi / 2):
        for m in (0, 3):
            ops.append((f"cap-{ap:.3f}-m{m}-200", build_radial_cap(ap, m, 200)))
    return ops


def random_valid_prefix(rng, k, n=2):
    """Prefix of length k built so each value respects the 4/n inequality
    given the ones before it (any admissible spectrum does)."""
    vals = [float(math.exp(rng.uniform(0.0, math.log(200.0))))]
    while len(vals) < k:
        spec = validate_spectrum(vals, dimension=n)
        top = next_upper_bound_euclid(spec.prefix(len(vals)), BoundForm.EUCLID_CONJ).upper_bound
        vals.append(float(rng.uniform(vals[-1], top)))
    return validate_spectrum(vals, dimension=n)


def _dp_on_grid(a, b, grid):
    """min sum a_i d_i + b_i / d_i over d_1 >= ... >= d_k on ``grid`` (ascending)."""
    grid = np.asarray(grid)
    k = len(a)
    choice = []
    V = a[0] * grid + b[0] / grid
    for i in range(1, k):
        # best value of the first i terms with d_i >= g: suffix minimum
        suf = np.minimum.accumulate(V[::-1])[::-1]
        arg = np.empty(len(grid), dtype=int)
        best = len(grid) - 1
        for j in range(len(grid) - 1, -1, -1):
            if V[j] <= V[best]:
                best = j
            arg[j] = best
        choice.append(arg)
        V = suf + a[i] * grid + b[i] / grid
    j = int(np.argmin(V))
    val = float(V[j])
    path = [j]
    for arg in reversed(choice):
        j = int(arg[j])
        path.append(j)
    return val, [float(grid[p]) for p in reversed(path)]


def grid_search_monotone(a, b, step=1e-3):
    """Exhaustive search on a step-1e-3 grid, then a 1e-6 grid around the
    coarse optimum."""
    free = [math.sqrt(bi / ai) for ai, bi in zip(a, b)]
    lo = max(step, min(free) - 10 * step)
    hi = max(free) + 10 * step
    grid = np.arange(lo, hi + step, step)
    _, coarse = _dp_on_grid(a, b, grid)
    fine = np.unique(np.concatenate([
        np.arange(max(1e-9, d - 2 * step), d + 2 * step, step * 1e-3) for d in coarse]))
    return _dp_on_grid(a, b, fine)
