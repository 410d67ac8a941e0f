"""Discrete diagnostics for the identities behind the planar eigenvalue bound.

For a computed eigenpair (Lambda_i, u_i) with ||G u_i||_W = 1 the probe forms,
for each coordinate p:

* the projection x^p G u_i = G h + w, with h on the clamped unknowns solving
  B h = G^T W (x^p G u_i), so w is W-orthogonal to every discrete gradient;
* grad q = G(x^p u_i) - G h, so that u_i grad x^p ~ grad q - w;
* the residuals of the three lemma-level identities and the statistic
  Lambda_i sum_p ||grad q||^2 that would settle the 4/n conjecture at >= 3.

Everything is evaluated with the same G, W and Laplacian as the pencil, so
the only error left in the residuals is discretization error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .discretize import DomainSpec, OperatorPair, PlanarGrid, build_planar
from .eigensolve import DEFAULT_SEED, DEFAULT_TOL, EigenResult, smallest_pairs
from .errors import SingularProjection

PROVED_FLOOR = 5.0 / 3.0
CONJECTURE_THRESHOLD = 3.0
CLUSTER_RTOL = 1e-6


@dataclass
class ProbeContext:
    """A planar pencil, its eigenpairs and the derived difference operators."""

    pair: OperatorPair
    eig: EigenResult
    grid: PlanarGrid
    x_nodes: np.ndarray  # (n_unknowns, 2)
    x_edges: np.ndarray  # (n_edges, 2) edge midpoints
    D: tuple  # centred differences d/dx, d/dy on the unknowns
    D_lap: tuple  # centred differences from Laplacian rows to unknowns
    _solve: object = field(default=None, repr=False)

    @property
    def values(self) -> np.ndarray:
        return self.eig.values

    @property
    def vectors(self) -> np.ndarray:
        return self.eig.vectors

    def solve_projection(self, rhs: np.ndarray) -> np.ndarray:
        if self._solve is None:
            try:
                self._solve = spla.splu(self.pair.B.tocsc()).solve
            except RuntimeError as exc:
                raise SingularProjection(f"gradient form is singular: {exc}") from exc
        x = self._solve(rhs)
        B = self.pair.B
        # one refinement step brings the residual to the 1e-12 target
        x = x + self._solve(rhs - B @ x)
        res = np.linalg.norm(rhs - B @ x, axis=0) / np.maximum(
            np.linalg.norm(rhs, axis=0), 1e-300)
        if not np.all(np.isfinite(x)) or np.any(res > 1e-12):
            raise SingularProjection(f"projection solve residual {np.max(res):.2e}")
        return x


def _centred(grid: PlanarGrid, axis: int, source_index: np.ndarray, n_source: int):
    """d/dx_axis at interior nodes from values stored at ``source_index``."""
    h = grid.h
    ii, jj = np.nonzero(grid.interior)
    rows = grid.index[ii, jj]
    di, dj = (1, 0) if axis == 0 else (0, 1)
    out_r, out_c, out_v = [], [], []
    for sign in (1, -1):
        ni, nj = ii + sign * di, jj + sign * dj
        cols = source_index[ni, nj]
        ok = cols >= 0
        out_r.append(rows[ok])
        out_c.append(cols[ok])
        out_v.append(np.full(ok.sum(), sign / (2.0 * h)))
    return sp.csr_matrix((np.concatenate(out_v), (np.concatenate(out_r),
                                                  np.concatenate(out_c))),
                         shape=(rows.size, n_source))


def _canonical_clusters(eig: EigenResult, gradient) -> EigenResult:
    """Fix the basis inside each degenerate cluster.

    Within a cluster the eigenvectors are only defined up to rotation, and
    the per-coordinate quantities are not rotation invariant. Diagonalizing
    the x-edge Dirichlet form inside the cluster gives a reproducible basis
    (on the square it separates the x- and y-oriented modes).
    """
    vals = eig.values
    V = eig.vectors.copy()
    xmask = gradient.direction == 0
    Gx = gradient.G[xmask]
    wx = gradient.weights[xmask]
    start = 0
    while start < len(vals):
        stop = start + 1
        while stop < len(vals) and vals[stop] - vals[stop - 1] <= CLUSTER_RTOL * vals[stop]:
            stop += 1
        if stop - start > 1:
            block = V[:, start:stop]
            GB = Gx @ block
            M = GB.T @ (wx[:, None] * GB)
            _, R = np.linalg.eigh(0.5 * (M + M.T))
            block = block @ R
            idx = np.argmax(np.abs(block), axis=0)
            signs = np.sign(block[idx, np.arange(block.shape[1])])
            signs[signs == 0] = 1.0
            V[:, start:stop] = block * signs
        start = stop
    return EigenResult(vals, V, eig.residuals, eig.floors, eig.iterations,
                       eig.tolerance, eig.seed)


def build_context(pair: OperatorPair, eig: EigenResult) -> ProbeContext:
    if not isinstance(pair.grid, PlanarGrid) or pair.gradient is None:
        raise ValueError("the probe needs a planar Cartesian grid")
    if np.any(np.linalg.norm(eig.vectors, axis=0) == 0):
        raise ValueError("zero vector is not an eigenfunction")
    grid = pair.grid
    n = grid.coords.shape[0]
    lap_index = -np.ones(grid.shape, dtype=np.int64)
    lap_index[grid.lap_nodes[:, 0], grid.lap_nodes[:, 1]] = np.arange(len(grid.lap_nodes))
    D = tuple(_centred(grid, a, grid.index, n) for a in (0, 1))
    D_lap = tuple(_centred(grid, a, lap_index, len(grid.lap_nodes)) for a in (0, 1))
    eig = _canonical_clusters(eig, pair.gradient)
    return ProbeContext(pair=pair, eig=eig, grid=grid, x_nodes=grid.coords,
                        x_edges=pair.gradient.midpoints, D=D, D_lap=D_lap)


def _edge_norm2(ctx: ProbeContext, f: np.ndarray) -> float:
    return float(np.dot(ctx.pair.gradient.weights, f * f))


def project_gradient_space(ctx: ProbeContext, i: int, p: int):
    """Split x^p G u_i into G h + w with w orthogonal to all discrete gradients.

    ``i`` is 1-based, ``p`` is 1 or 2. Returns (h, w).
    """
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    g = ctx.pair.gradient
    u = ctx.vectors[:, i - 1]
    xGu = ctx.x_edges[:, p - 1] * (g.G @ u)
    rhs = g.G.T @ (g.weights * xGu)
    h = ctx.solve_projection(rhs)
    w = xGu - g.G @ h
    return h, w


def orthogonality_defect(ctx: ProbeContext, w: np.ndarray) -> float:
    """max_j |<w, G phi_j>_W| / ||w||_W over the nodal basis phi_j."""
    g = ctx.pair.gradient
    proj = g.G.T @ (g.weights * w)
    nw = np.sqrt(_edge_norm2(ctx, w))
    # scale by ||G phi_j||_W so the ratio is a cosine
    col = np.sqrt(np.asarray((g.G.multiply(g.G)).T @ g.weights)).ravel()
    return float(np.max(np.abs(proj) / np.maximum(col * nw, 1e-300)))


def q_norms(ctx: ProbeContext, i: int, p: int, h: np.ndarray, w: np.ndarray | None = None):
    """(||grad q||^2, ||u_i||^2, defect) with defect = ||u||^2 - ||grad q||^2 - ||w||^2."""
    g = ctx.pair.gradient
    u = ctx.vectors[:, i - 1]
    gq = g.G @ (ctx.x_nodes[:, p - 1] * u) - g.G @ h
    gq2 = _edge_norm2(ctx, gq)
    u2 = float(np.dot(ctx.pair.mass, u * u))
    if w is None:
        w = project_gradient_space(ctx, i, p)[1]
    return gq2, u2, u2 - gq2 - _edge_norm2(ctx, w)


def partial_norm2(ctx: ProbeContext, i: int, p: int) -> float:
    """||d_p u_i||^2 from the edges of direction p."""
    g = ctx.pair.gradient
    gu = g.G @ ctx.vectors[:, i - 1]
    mask = g.direction == (p - 1)
    return float(np.dot(g.weights[mask], gu[mask] ** 2))


@dataclass
class ProbeEntry:
    i: int
    p: int
    L21: float
    L22: float
    w_norm2: float
    grad_q_norm2: float
    partial_norm2: float
    u_norm2: float
    norm_split_defect: float
    orthogonality_defect: float
    pythagoras_defect: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def probe_entry(ctx: ProbeContext, i: int, p: int) -> ProbeEntry:
    lam = float(ctx.values[i - 1])
    u = ctx.vectors[:, i - 1]
    g = ctx.pair.gradient
    h, w = project_gradient_space(ctx, i, p)
    gq2, u2, defect = q_norms(ctx, i, p, h, w)
    dp2 = partial_norm2(ctx, i, p)
    lap = ctx.pair.laplacian @ u
    dlap = ctx.D_lap[p - 1] @ lap
    moment = float(np.dot(ctx.pair.mass, ctx.x_nodes[:, p - 1] * u * dlap))
    L21 = 1.0 + 2.0 * dp2 - 2.0 * moment
    L22 = 3.0 * dp2 - 2.0 * lam * gq2 - 0.5 + 0.5 * lam * u2
    xGu = ctx.x_edges[:, p - 1] * (g.G @ u)
    total = _edge_norm2(ctx, xGu)
    pyth = abs(total - _edge_norm2(ctx, g.G @ h) - _edge_norm2(ctx, w)) / max(total, 1e-300)
    return ProbeEntry(i=i, p=p, L21=L21, L22=L22, w_norm2=_edge_norm2(ctx, w),
                      grad_q_norm2=gq2, partial_norm2=dp2, u_norm2=u2,
                      norm_split_defect=defect,
                      orthogonality_defect=orthogonality_defect(ctx, w),
                      pythagoras_defect=pyth)


def lemma_residuals(ctx: ProbeContext, i: int):
    """([(L21, L22) for p = 1, 2], L23) for eigenfunction i."""
    entries = [probe_entry(ctx, i, p) for p in (1, 2)]
    lam = float(ctx.values[i - 1])
    L23 = lam * sum(e.w_norm2 for e in entries) - 1.0
    return [(e.L21, e.L22) for e in entries], L23


def conjecture_statistic(ctx: ProbeContext, i: int) -> float:
    """Lambda_i sum_p ||grad q_pi||^2 (proved >= 5/3, conjectured >= 3)."""
    lam = float(ctx.values[i - 1])
    total = 0.0
    for p in (1, 2):
        h, _ = project_gradient_space(ctx, i, p)
        total += q_norms(ctx, i, p, h)[0]
    return lam * total


def coupling_matrices(ctx: ProbeContext, K: int):
    """b[p, i, j] = int x^p <grad u_i, grad u_j>, c[p, i, j] = int <grad d_p u_i, grad u_j>.

    Returns (b, c, b_defect, c_defect) where the defects are
    max |b_pij - b_pji| and max |c_pij + c_pji|.
    """
    if not 1 <= K <= ctx.vectors.shape[1]:
        raise ValueError(f"K must be in 1..{ctx.vectors.shape[1]}")
    g = ctx.pair.gradient
    U = ctx.vectors[:, :K]
    GU = g.G @ U
    b = np.empty((2, K, K))
    c = np.empty((2, K, K))
    BU = ctx.pair.B @ U
    for p in (1, 2):
        b[p - 1] = GU.T @ ((g.weights * ctx.x_edges[:, p - 1])[:, None] * GU)
        c[p - 1] = (ctx.D[p - 1] @ U).T @ BU
    b_defect = float(np.max(np.abs(b - b.transpose(0, 2, 1))))
    c_defect = float(np.max(np.abs(c + c.transpose(0, 2, 1))))
    return b, c, b_defect, c_defect


@dataclass
class ProbeReport:
    domain: dict
    resolution: int
    values: list
    entries: list
    per_i: list
    b: list
    c: list
    b_defect: float
    c_defect: float
    c_diagonal: float
    normalization_defect: float

    def to_dict(self) -> dict:
        return {
            "domain": self.domain,
            "resolution": self.resolution,
            "values": self.values,
            "entries": [e.to_dict() for e in self.entries],
            "per_i": self.per_i,
            "b": self.b,
            "c": self.c,
            "b_defect": self.b_defect,
            "c_defect": self.c_defect,
            "c_diagonal": self.c_diagonal,
            "normalization_defect": self.normalization_defect,
        }


def probe(spec: DomainSpec, count: int = 4, tol: float = DEFAULT_TOL,
          seed: int = DEFAULT_SEED, extra: int = 2) -> ProbeReport:
    """Solve on ``spec`` and evaluate every diagnostic for i = 1..count.

    ``extra`` additional pairs are computed so that a cluster straddling
    index ``count`` is still rotated as a whole.
    """
    if not spec.planar:
        raise ValueError(f"the probe needs a Cartesian grid; {spec.shape} is radial only")
    pair = build_planar(spec)
    eig = smallest_pairs(pair, min(count + extra, pair.dimension), tol=tol, seed=seed)
    ctx = build_context(pair, eig)
    return report_from_context(ctx, spec, count)


def report_from_context(ctx: ProbeContext, spec: DomainSpec, count: int) -> ProbeReport:
    entries, per_i = [], []
    norm_defect = 0.0
    for i in range(1, count + 1):
        lam = float(ctx.values[i - 1])
        es = [probe_entry(ctx, i, p) for p in (1, 2)]
        entries.extend(es)
        norm_defect = max(norm_defect, abs(sum(e.partial_norm2 for e in es) - 1.0))
        stat = lam * sum(e.grad_q_norm2 for e in es)
        per_i.append({
            "i": i,
            "lambda": lam,
            "L23": lam * sum(e.w_norm2 for e in es) - 1.0,
            "conjecture_statistic": stat,
            "proved_floor": PROVED_FLOOR,
            "conjecture_threshold": CONJECTURE_THRESHOLD,
            "above_proved_floor": bool(stat >= PROVED_FLOOR),
            "above_conjecture_threshold": bool(stat >= CONJECTURE_THRESHOLD),
        })
    b, c, b_def, c_def = coupling_matrices(ctx, count)
    c_diag = float(np.max(np.abs(np.diagonal(c, axis1=1, axis2=2))))
    return ProbeReport(domain=spec.to_dict(), resolution=spec.resolution,
                       values=[float(v) for v in ctx.values[:count]],
                       entries=entries, per_i=per_i, b=b.tolist(), c=c.tolist(),
                       b_defect=b_def, c_defect=c_def, c_diagonal=c_diag,
                       normalization_defect=norm_defect)


REFINED_QUANTITIES = ("L21", "L22", "norm_split_defect")


def refinement_ratios(coarse: ProbeReport, fine: ProbeReport) -> dict:
    """|q(h)| / |q(h/2)| for each per-(i, p) residual and the c defect."""
    out = {"entries": []}
    for ec, ef in zip(coarse.entries, fine.entries):
        row = {"i": ec.i, "p": ec.p}
        for name in REFINED_QUANTITIES:
            num, den = abs(getattr(ec, name)), abs(getattr(ef, name))
            row[name] = num / den if den > 0 else float("inf")
        out["entries"].append(row)
    out["c_defect"] = (coarse.c_defect / fine.c_defect if fine.c_defect > 0
                       else float("inf"))
    return out
