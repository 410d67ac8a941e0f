import numpy as np
import pytest
import scipy.sparse as sp

from helpers import small_operators

from buckling.discretize import DomainSpec, build_planar
from buckling.eigensolve import (dense_oracle, relative_residuals, residual_floors,
                                 smallest_pairs)
from buckling.errors import ConvergenceFailure, DimensionTooLarge, InnerSolveFailure


def test_diagonal_pencil():
    A = sp.diags([2.0, 8.0, 12.0, 20.0, 30.0, 42.0])
    B = sp.diags([1.0, 2.0, 2.0, 2.0, 2.0, 2.0])
    r = smallest_pairs(A, 2, B=B, block=6)
    assert r.values == pytest.approx([2.0, 4.0])
    d = dense_oracle(A, 2, B=B)
    assert d.values == pytest.approx([2.0, 4.0])


@pytest.fixture(scope="module")
def operators():
    return small_operators()


def test_iterative_matches_dense(operators):
    for name, pair in operators:
        it = smallest_pairs(pair, 6)
        de = dense_oracle(pair, 6)
        np.testing.assert_allclose(it.values, de.values, rtol=1e-8, err_msg=name)


def test_invariants(operators):
    for name, pair in operators:
        r = smallest_pairs(pair, 4)
        assert np.all(np.diff(r.values) >= 0), name
        G = r.vectors.T @ (pair.B @ r.vectors)
        assert np.abs(G - np.eye(4)).max() < 1e-8, name
        assert np.all(r.residuals <= np.maximum(r.tolerance, r.floors)), name


def test_residual_floor_binds_only_for_fine_radial(operators):
    pairs = dict(operators)
    planar = smallest_pairs(pairs["square-24"], 4)
    assert np.all(planar.residuals <= 1e-8)
    assert np.all(planar.floors < 1e-8)


def test_seeded_runs_are_identical():
    pair = build_planar(DomainSpec("rectangle", 24))
    a = smallest_pairs(pair, 5, seed=3)
    b = smallest_pairs(pair, 5, seed=3)
    assert np.array_equal(a.values, b.values) and np.array_equal(a.vectors, b.vectors)


def test_degenerate_pair_resolved():
    pair = build_planar(DomainSpec("rectangle", 24))
    r = smallest_pairs(pair, 3)
    assert r.values[1] == pytest.approx(r.values[2], rel=1e-10)
    assert np.all(relative_residuals(pair.A, pair.B, r.values, r.vectors) < 1e-8)


def test_failures():
    pair = build_planar(DomainSpec("rectangle", 24))
    with pytest.raises(ConvergenceFailure):
        smallest_pairs(pair, 4, tol=1e-15, max_sweeps=3)
    with pytest.raises(DimensionTooLarge):
        dense_oracle(build_planar(DomainSpec("rectangle", 32)))
    singular = sp.csr_matrix(np.diag([1.0, 0.0, 1.0, 1.0, 1.0, 1.0]))
    with pytest.raises(InnerSolveFailure):
        smallest_pairs(singular, 1, B=sp.identity(6), block=2)
    with pytest.raises(ValueError):
        smallest_pairs(pair, 0)


def test_floor_formula():
    A = sp.diags([1.0, 1e8])
    x = np.array([[1.0], [0.0]])
    f = residual_floors(A, sp.identity(2), np.array([1.0]), x)
    assert f[0] == pytest.approx(np.finfo(float).eps * 1e8 / 2)
