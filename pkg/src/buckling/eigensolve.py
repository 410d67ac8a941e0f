"""Lowest eigenpairs of symmetric definite pencils A u = Lambda B u."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ConvergenceFailure, DimensionTooLarge, InnerSolveFailure

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
DEFAULT_SEED = 42
MAX_SWEEPS = 500
DENSE_LIMIT = 600
BANDED_LIMIT = 8  # half-bandwidth below which a banded Cholesky is used


@dataclass
class EigenResult:
    values: np.ndarray
    vectors: np.ndarray  # columns are B-orthonormal
    residuals: np.ndarray
    floors: np.ndarray  # rounding floor of each residual, see residual_floors
    iterations: int
    tolerance: float | None
    seed: int | None

    def __len__(self):
        return len(self.values)


def _pencil(pair_or_A, B=None):
    if B is None:
        A, B = pair_or_A.A, pair_or_A.B
    else:
        A = pair_or_A
    A = sp.csr_matrix(A, dtype=float)
    B = sp.csr_matrix(B, dtype=float)
    if A.shape != B.shape or A.shape[0] != A.shape[1]:
        raise ValueError("A and B must be square matrices of equal size")
    return A, B


def relative_residuals(A, B, values, vectors) -> np.ndarray:
    """||A u - L B u|| / (||A u|| + L ||B u||) per column."""
    AX = A @ vectors
    BX = B @ vectors
    R = AX - BX * values
    num = np.linalg.norm(R, axis=0)
    den = np.linalg.norm(AX, axis=0) + np.abs(values) * np.linalg.norm(BX, axis=0)
    return num / np.where(den > 0, den, 1.0)


def residual_floors(A, B, values, vectors) -> np.ndarray:
    """eps ||A|| ||u|| / (||A u|| + L ||B u||): the smallest relative residual
    a double-precision vector can be expected to reach.

    For biharmonic pencils on fine grids this exceeds 1e-8 for the lowest
    modes, because A u cancels a factor h^-4 worth of digits.
    """
    eps = np.finfo(float).eps
    AX = A @ vectors
    BX = B @ vectors
    den = np.linalg.norm(AX, axis=0) + np.abs(values) * np.linalg.norm(BX, axis=0)
    num = eps * spla.norm(A, 1) * np.linalg.norm(vectors, axis=0)
    return num / np.where(den > 0, den, 1.0)


def _half_bandwidth(M: sp.spmatrix) -> int:
    coo = M.tocoo()
    if coo.nnz == 0:
        return 0
    return int(np.max(np.abs(coo.row - coo.col)))


class _Factor:
    """Solver for A x = y: banded Cholesky for narrow bands, sparse LU else."""

    def __init__(self, A: sp.csr_matrix):
        self.A = A
        self.n = A.shape[0]
        self.norm = spla.norm(A, 1)
        bw = _half_bandwidth(A)
        try:
            if bw <= BANDED_LIMIT:
                ab = np.zeros((bw + 1, self.n))
                dia = A.todia()
                for off, row in zip(dia.offsets, dia.data):
                    if off >= 0:
                        ab[bw - off, off:] = row[off:]
                self._cb = la.cholesky_banded(ab, lower=False)
                self._solve = lambda y: la.cho_solve_banded((self._cb, False), y)
            else:
                lu = spla.splu(A.tocsc())
                self._solve = lu.solve
        except (la.LinAlgError, RuntimeError) as exc:
            raise InnerSolveFailure(f"factorization of A failed: {exc}") from exc

    def __call__(self, Y: np.ndarray, tol: float) -> np.ndarray:
        X = self._solve(Y)
        # normwise backward error; one step of refinement if it is poor
        for _ in range(2):
            R = Y - self.A @ X
            err = np.linalg.norm(R, axis=0) / (
                self.norm * np.linalg.norm(X, axis=0) + np.linalg.norm(Y, axis=0))
            if np.all(err <= tol):
                return X
            X = X + self._solve(R)
        if not np.all(np.isfinite(X)):
            raise InnerSolveFailure("inner solve produced non-finite values")
        R = Y - self.A @ X
        err = np.linalg.norm(R, axis=0) / (
            self.norm * np.linalg.norm(X, axis=0) + np.linalg.norm(Y, axis=0))
        if np.any(err > 1e-6):
            raise InnerSolveFailure(f"inner solve backward error {err.max():.2e}")
        return X


def _normalize_signs(V: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def _rayleigh_ritz(A, B, Q):
    Ar = Q.T @ (A @ Q)
    Br = Q.T @ (B @ Q)
    Ar = 0.5 * (Ar + Ar.T)
    Br = 0.5 * (Br + Br.T)
    theta, C = la.eigh(Ar, Br)
    return theta, Q @ C


def smallest_pairs(pair, count: int, tol: float = DEFAULT_TOL,
                   seed: int = DEFAULT_SEED, B=None, block: int | None = None,
                   max_sweeps: int = MAX_SWEEPS) -> EigenResult:
    """Lowest ``count`` eigenpairs by blocked inverse iteration.

    Each sweep solves A Y = B X with a factorization of A computed once,
    orthonormalizes Y and applies Rayleigh-Ritz. ``pair`` is an
    :class:`OperatorPair` or, when ``B`` is given, the matrix A.

    A pair counts as converged once its relative residual is below ``tol``
    or below its rounding floor, whichever is larger.
    """
    A, B = _pencil(pair, B)
    n = A.shape[0]
    if count < 1 or count > n:
        raise ValueError(f"count must be in 1..{n}")
    p = block or max(count + 4, 2 * count)
    p = min(p, n)
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    if p == n:
        theta, X = _rayleigh_ritz(A, B, np.linalg.qr(X)[0])
        vals, vecs = theta[:count], _normalize_signs(X[:, :count])
        return EigenResult(vals, vecs, relative_residuals(A, B, vals, vecs),
                           residual_floors(A, B, vals, vecs), 1, tol, seed)

    solve = _Factor(A)
    inner_tol = tol / 100.0
    res = None
    for sweep in range(1, max_sweeps + 1):
        Y = solve(B @ X, inner_tol)
        Q, _ = np.linalg.qr(Y)
        theta, X = _rayleigh_ritz(A, B, Q)
        res = relative_residuals(A, B, theta[:count], X[:, :count])
        if np.all(res <= tol) or np.all(
                res <= np.maximum(tol, residual_floors(A, B, theta[:count], X[:, :count]))):
            vals = theta[:count].copy()
            vecs = _normalize_signs(X[:, :count])
            res = relative_residuals(A, B, vals, vecs)
            floors = residual_floors(A, B, vals, vecs)
            log.debug("converged after %d sweeps", sweep)
            return EigenResult(vals, vecs, res, floors, sweep, tol, seed)
    raise ConvergenceFailure(
        f"{count} eigenpairs not converged after {max_sweeps} sweeps "
        f"(worst residual {res.max():.2e})")


def dense_oracle(pair, count: int | None = None, B=None) -> EigenResult:
    """Full dense reduction: B = L L^T, eigen-decomposition of L^-1 A L^-T."""
    A, B = _pencil(pair, B)
    n = A.shape[0]
    if n > DENSE_LIMIT:
        raise DimensionTooLarge(f"dense oracle handles dimension <= {DENSE_LIMIT}, got {n}")
    count = n if count is None else count
    Ad, Bd = A.toarray(), B.toarray()
    Lc = la.cholesky(Bd, lower=True)
    C = la.solve_triangular(Lc, la.solve_triangular(Lc, Ad, lower=True).T, lower=True)
    C = 0.5 * (C + C.T)
    w, V = la.eigh(C, driver="ev")
    vecs = la.solve_triangular(Lc.T, V[:, :count], lower=False)
    vals = w[:count]
    vecs = _normalize_signs(vecs)
    return EigenResult(vals, vecs, relative_residuals(A, B, vals, vecs),
                       residual_floors(A, B, vals, vecs), 1, None, None)
