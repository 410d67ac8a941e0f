"""Finite-difference operator pairs for the clamped buckling problem.

The discrete problem is ``A u = Lambda B u`` where

* ``B = G^T W_e G`` is the Dirichlet form of a staggered (edge) gradient, and
* ``A = L^T W L`` is the squared-Laplacian form, with ``L`` the 5-point (or
  radial 3-point) Laplacian evaluated at interior *and* boundary nodes.

Unknowns live on interior nodes; boundary nodes carry u = 0. The normal
derivative condition enters only through ``L`` at boundary nodes, where the
missing outside neighbour is replaced by its mirror image (ghost = interior
mirror value). Both matrices are assembled as triple products and are
exactly symmetric.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import ApertureOutOfRange, ResolutionTooCoarse

SHAPES = ("rectangle", "disk", "lshape", "cap")


@dataclass(frozen=True)
class DomainSpec:
    """Geometry plus resolution.

    ``resolution`` is grid points per unit length for planar shapes and the
    radial point count for disks and caps. The L-shape is the unit square
    with its upper-right quarter (x > 1/2, y > 1/2) removed.
    """

    shape: str
    resolution: int
    a: float = 1.0
    b: float = 1.0
    aperture: float | None = None
    mode_count: int = 8

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"shape must be one of {SHAPES}, got {self.shape!r}")
        if self.resolution < 8:
            raise ResolutionTooCoarse("resolution must be at least 8")
        if self.shape == "cap":
            if self.aperture is None or not 0.0 < self.aperture < math.pi:
                raise ApertureOutOfRange(
                    f"cap aperture must lie in (0, pi), got {self.aperture!r}")
        if self.mode_count < 0:
            raise ValueError("mode_count must be non-negative")

    @property
    def planar(self) -> bool:
        return self.shape in ("rectangle", "lshape")

    def to_dict(self) -> dict:
        out = {"shape": self.shape, "resolution": self.resolution}
        if self.shape == "rectangle":
            out.update(a=self.a, b=self.b)
        if self.shape == "cap":
            out["aperture"] = self.aperture
        if not self.planar:
            out["mode_count"] = self.mode_count
        return out


@dataclass
class DiscreteGradient:
    """Staggered-edge gradient ``G`` with quadrature weights.

    ``direction[e]`` is 0 for an x-edge (carrying d/dx) and 1 for a y-edge;
    ``midpoints[e]`` is the geometric midpoint of edge ``e``.
    """

    G: sp.csr_matrix
    weights: np.ndarray
    midpoints: np.ndarray
    direction: np.ndarray


@dataclass
class PlanarGrid:
    h: float
    shape: tuple  # (nx + 1, ny + 1) nodes in the bounding box
    interior: np.ndarray  # bool mask
    closed: np.ndarray  # bool mask, interior + boundary
    index: np.ndarray  # unknown number of each node, -1 off the unknowns
    coords: np.ndarray  # (n_unknowns, 2)
    lap_nodes: np.ndarray  # (rows of L, 2) node indices where L is evaluated


@dataclass
class OperatorPair:
    """Symmetric pencil (A, B) plus grid metadata.

    ``mass`` holds the diagonal of the lumped L2 mass matrix on the unknowns.
    """

    A: sp.csr_matrix
    B: sp.csr_matrix
    mass: np.ndarray
    grid: object = None
    mode: int | None = None
    gradient: DiscreteGradient | None = None
    laplacian: sp.csr_matrix | None = None
    laplacian_weights: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return self.A.shape[0]


# ---------------------------------------------------------------------------
# planar grids


def _rectangle_inside(a, b):
    def inside(x, y):
        return (0.0 <= x <= a) and (0.0 <= y <= b)
    return inside


def _lshape_inside(x, y):
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        return False
    return not (x > 0.5 and y > 0.5)


def _planar_grid(spec: DomainSpec, h: float):
    if spec.shape == "rectangle":
        a, b = spec.a, spec.b
        inside = _rectangle_inside(a, b)
    elif spec.shape == "lshape":
        a = b = 1.0
        inside = _lshape_inside
    else:
        raise ValueError(f"{spec.shape} is not a planar domain")
    nx = round(a / h)
    ny = round(b / h)
    if abs(nx * h - a) > 1e-9 * a or abs(ny * h - b) > 1e-9 * b:
        raise ResolutionTooCoarse(f"h = {h} does not divide the side lengths")
    if spec.shape == "lshape" and nx % 2:
        raise ResolutionTooCoarse("the L-shape needs an even number of cells per side")
    if nx < 4 or ny < 4 or (spec.shape == "lshape" and nx < 8):
        raise ResolutionTooCoarse("fewer than 3 interior nodes per side")

    # a node is interior when all four quadrants of its dual cell are inside
    q = h / 4.0
    closed = np.zeros((nx + 1, ny + 1), dtype=bool)
    frac = np.zeros((nx + 1, ny + 1))
    for i in range(nx + 1):
        for j in range(ny + 1):
            x, y = i * h, j * h
            if not inside(x, y):
                continue
            closed[i, j] = True
            frac[i, j] = sum(inside(x + sx * q, y + sy * q)
                             for sx in (-1, 1) for sy in (-1, 1)) / 4.0
    interior = closed & (frac == 1.0)
    # the outer frame of the box is always boundary
    interior[0, :] = interior[-1, :] = interior[:, 0] = interior[:, -1] = False
    index = -np.ones(closed.shape, dtype=np.int64)
    ii, jj = np.nonzero(interior)
    index[ii, jj] = np.arange(ii.size)
    coords = np.column_stack([ii * h, jj * h])
    li, lj = np.nonzero(closed)
    grid = PlanarGrid(h=h, shape=closed.shape, interior=interior, closed=closed,
                      index=index, coords=coords,
                      lap_nodes=np.column_stack([li, lj]))
    return grid, frac


def _planar_laplacian(grid: PlanarGrid, frac: np.ndarray):
    """5-point Laplacian at every closed node, mirror ghosts outside."""
    h = grid.h
    nx1, ny1 = grid.shape
    rows, cols, vals = [], [], []

    def node_value(i, j):
        """Unknown index of node (i, j), or None for a zero value."""
        if 0 <= i < nx1 and 0 <= j < ny1 and grid.interior[i, j]:
            return int(grid.index[i, j])
        return None

    for r, (i, j) in enumerate(grid.lap_nodes):
        c = node_value(i, j)
        if c is not None:
            rows.append(r)
            cols.append(c)
            vals.append(-4.0 / h**2)
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            ni, nj = i + di, j + dj
            in_closed = 0 <= ni < nx1 and 0 <= nj < ny1 and grid.closed[ni, nj]
            if not in_closed:
                # clamped ghost: mirror of the opposite neighbour
                ni, nj = i - di, j - dj
            c = node_value(ni, nj)
            if c is not None:
                rows.append(r)
                cols.append(c)
                vals.append(1.0 / h**2)
    n_rows = len(grid.lap_nodes)
    L = sp.csr_matrix((vals, (rows, cols)), shape=(n_rows, grid.coords.shape[0]))
    weights = h * h * frac[grid.lap_nodes[:, 0], grid.lap_nodes[:, 1]]
    return L, weights


def _planar_gradient(grid: PlanarGrid) -> DiscreteGradient:
    h = grid.h
    nx1, ny1 = grid.shape
    rows, cols, vals = [], [], []
    mids, dirs = [], []
    e = 0
    for d, (di, dj) in enumerate(((1, 0), (0, 1))):
        for i in range(nx1 - di):
            for j in range(ny1 - dj):
                i2, j2 = i + di, j + dj
                if not (grid.closed[i, j] and grid.closed[i2, j2]):
                    continue
                a_in, b_in = grid.interior[i, j], grid.interior[i2, j2]
                if not (a_in or b_in):
                    continue
                if b_in:
                    rows.append(e)
                    cols.append(grid.index[i2, j2])
                    vals.append(1.0 / h)
                if a_in:
                    rows.append(e)
                    cols.append(grid.index[i, j])
                    vals.append(-1.0 / h)
                mids.append(((i + 0.5 * di) * h, (j + 0.5 * dj) * h))
                dirs.append(d)
                e += 1
    G = sp.csr_matrix((vals, (rows, cols)), shape=(e, grid.coords.shape[0]))
    return DiscreteGradient(G=G, weights=np.full(e, h * h),
                            midpoints=np.array(mids), direction=np.array(dirs))


def _triple(M: sp.spmatrix, w: np.ndarray) -> sp.csr_matrix:
    """M^T diag(w) M, symmetrized against rounding in the sparse product."""
    P = (M.T @ sp.diags(w) @ M).tocsr()
    P = (P + P.T) * 0.5
    P.sum_duplicates()
    P.eliminate_zeros()
    return P.tocsr()


def build_planar(spec: DomainSpec, h: float | None = None) -> OperatorPair:
    """Buckling pencil on a rectangle or the L-shape with grid spacing h."""
    if not spec.planar:
        raise ValueError(f"{spec.shape} is not a planar domain")
    h = 1.0 / spec.resolution if h is None else float(h)
    grid, frac = _planar_grid(spec, h)
    L, lw = _planar_laplacian(grid, frac)
    grad = _planar_gradient(grid)
    A = _triple(L, lw)
    B = _triple(grad.G, grad.weights)
    mass = np.full(grid.coords.shape[0], h * h)
    return OperatorPair(A=A, B=B, mass=mass, grid=grid, gradient=grad,
                        laplacian=L.tocsr(), laplacian_weights=lw,
                        meta={"domain": spec.to_dict(), "h": h})


def build_membrane(spec: DomainSpec, h: float | None = None) -> OperatorPair:
    """Dirichlet Laplacian pencil: A = 5-point Dirichlet form, B = lumped mass."""
    pair = build_planar(spec, h)
    return membrane_pair(pair)


def membrane_pair(pair: OperatorPair) -> OperatorPair:
    """Turn a buckling pencil (A, B) into the membrane pencil (B, mass)."""
    return OperatorPair(A=pair.B, B=sp.diags(pair.mass).tocsr(), mass=pair.mass,
                        grid=pair.grid, mode=pair.mode, gradient=pair.gradient,
                        meta=dict(pair.meta, problem="membrane"))


# ---------------------------------------------------------------------------
# radial reductions


@dataclass
class RadialGrid:
    h: float
    nodes: np.ndarray  # unknown positions t_j = (j - 1/2) h
    boundary: float
    metric: str  # "disk" or "cap"


def _radial(N: int, m: int, outer: float, metric: str) -> OperatorPair:
    """Mode-m pencil of (1/s)(s u')' - m^2 u / s^2 with s = r or sin(theta).

    Nodes are cell centred, t_j = (j - 1/2) h for j = 1..N, with h chosen so
    that t_{N+1} = outer is a boundary node (u = 0). Fluxes use s at the
    half points; s(0) = 0 removes the pole flux, so no pole ghost is needed.
    """
    if N < 16:
        raise ResolutionTooCoarse("radial resolution must be at least 16")
    if m < 0:
        raise ValueError("mode index must be non-negative")
    h = outer / (N + 0.5)
    s_fn = (lambda t: t) if metric == "disk" else np.sin
    t = (np.arange(1, N + 2) - 0.5) * h  # N unknowns + boundary node
    s_node = s_fn(t)
    s_half = s_fn(np.arange(0, N + 2) * h)  # s at t_{j-1/2}, j = 1..N+2
    s_half[0] = 0.0

    # L at nodes 1..N+1 (row N is the boundary node)
    rows, cols, vals = [], [], []
    for r in range(N + 1):
        sl, sr = s_half[r], s_half[r + 1]
        inv = 1.0 / (s_node[r] * h * h)
        if r < N:
            rows.append(r)
            cols.append(r)
            vals.append(-(sl + sr) * inv - m * m / s_node[r] ** 2)
            if r + 1 < N:
                rows.append(r)
                cols.append(r + 1)
                vals.append(sr * inv)
            if r > 0:
                rows.append(r)
                cols.append(r - 1)
                vals.append(sl * inv)
        else:
            # boundary node: u = 0, ghost beyond mirrors node N
            rows.append(r)
            cols.append(r - 1)
            vals.append((sl + sr) * inv)
    L = sp.csr_matrix((vals, (rows, cols)), shape=(N + 1, N))
    w = s_node * h
    w[-1] *= 0.5

    # gradient: N + 1 edges (between node j and j+1, the last one hits the wall)
    rows, cols, vals = [], [], []
    for e in range(N):
        rows += [e, e] if e + 1 < N else [e]
        cols += [e + 1, e] if e + 1 < N else [e]
        vals += [1.0 / h, -1.0 / h] if e + 1 < N else [-1.0 / h]
    D = sp.csr_matrix((vals, (rows, cols)), shape=(N, N))
    edge_w = s_half[1:N + 1] * h
    B = _triple(D, edge_w)
    if m:
        B = (B + sp.diags(m * m * h / s_node[:N])).tocsr()
    A = _triple(L, w)
    grid = RadialGrid(h=h, nodes=t[:N], boundary=outer, metric=metric)
    return OperatorPair(A=A, B=B, mass=s_node[:N] * h, grid=grid, mode=m,
                        laplacian=L, laplacian_weights=w,
                        meta={"metric": metric, "N": N, "m": m, "outer": outer})


def build_radial_disk(m: int, N: int) -> OperatorPair:
    """Mode-m buckling pencil on the unit disk."""
    return _radial(N, m, 1.0, "disk")


def build_radial_cap(aperture: float, m: int, N: int) -> OperatorPair:
    """Mode-m buckling pencil on the geodesic cap {theta <= aperture} of S^2."""
    if not 0.0 < aperture < math.pi:
        raise ApertureOutOfRange(f"aperture must lie in (0, pi), got {aperture!r}")
    return _radial(N, m, float(aperture), "cap")


def build_radial(spec: DomainSpec, m: int) -> OperatorPair:
    if spec.shape == "disk":
        return build_radial_disk(m, spec.resolution)
    if spec.shape == "cap":
        return build_radial_cap(spec.aperture, m, spec.resolution)
    raise ValueError(f"{spec.shape} has no radial reduction")


# ---------------------------------------------------------------------------
# matrix dump


def dump_operator_pair(pair: OperatorPair, directory) -> None:
    """Write A.coo, B.coo (row col value per line) and grid.json."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, M in (("A", pair.A), ("B", pair.B)):
        coo = M.tocoo()
        order = np.lexsort((coo.col, coo.row))
        with open(directory / f"{name}.coo", "w") as fh:
            fh.write(f"# {M.shape[0]} {M.shape[1]} {coo.nnz}\n")
            for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
                fh.write(f"{int(r)} {int(c)} {float(v)!r}\n")
    desc = {"dimension": pair.dimension, "mode": pair.mode, "mass": pair.mass.tolist()}
    desc.update({k: v for k, v in pair.meta.items() if k != "problem"})
    g = pair.grid
    if isinstance(g, PlanarGrid):
        desc.update(kind="planar", h=g.h, coords=g.coords.tolist())
    elif isinstance(g, RadialGrid):
        desc.update(kind="radial", h=g.h, nodes=g.nodes.tolist(), metric=g.metric)
    (directory / "grid.json").write_text(json.dumps(desc, indent=1, sort_keys=True))
