import numpy as np
import pytest

from buckling.discretize import DomainSpec, build_planar
from buckling.eigensolve import EigenResult, smallest_pairs
from buckling.probe import (PROVED_FLOOR, build_context, conjecture_statistic,
                            coupling_matrices, lemma_residuals, orthogonality_defect, probe,
                            project_gradient_space, q_norms, refinement_ratios)

LEMMA22_XFAIL = pytest.mark.xfail(strict=True, reason=(
    "Second lemma identity residual does not vanish under refinement; the proof needs w to be "
    "orthogonal to grad(Delta(x^p u)), which the projection does not provide"))


@pytest.fixture(scope="module")
def reports():
    return {r: probe(DomainSpec("rectangle", r), 4) for r in (32, 64, 96, 128)}


@pytest.fixture(scope="module")
def ctx64():
    pair = build_planar(DomainSpec("rectangle", 64))
    return build_context(pair, smallest_pairs(pair, 6))


def test_projection_orthogonal_and_pythagorean(ctx64):
    for i in range(1, 5):
        for p in (1, 2):
            h, w = project_gradient_space(ctx64, i, p)
            assert orthogonality_defect(ctx64, w) <= 1e-10
    for e in probe(DomainSpec("rectangle", 64), 4).entries:
        assert e.pythagoras_defect <= 1e-10
        assert e.orthogonality_defect <= 1e-10


def test_norms_and_normalization(reports):
    for rep in reports.values():
        assert rep.normalization_defect <= 1e-8
        for e in rep.entries:
            assert min(e.w_norm2, e.grad_q_norm2, e.partial_norm2, e.u_norm2) >= 0
            assert e.u_norm2 > 0
            assert all(np.isfinite(list(e.to_dict().values())))


def _ratios(reports, a, b):
    return refinement_ratios(reports[a], reports[b])


@pytest.mark.parametrize("name", ["L21", "norm_split_defect"])
def test_residuals_shrink(reports, name):
    for a, b in ((32, 64), (64, 128)):
        assert min(r[name] for r in _ratios(reports, a, b)["entries"]) >= 1.5


@LEMMA22_XFAIL
def test_lemma22_residual_shrinks(reports):
    for a, b in ((32, 64), (64, 128)):
        assert min(r["L22"] for r in _ratios(reports, a, b)["entries"]) >= 1.5


def test_lemma22_residual_settles_at_a_nonzero_limit(reports):
    # what actually happens: L22 converges, to a value far from zero
    l22 = {r: np.array([e.L22 for e in reports[r].entries]) for r in (64, 128)}
    assert np.all(np.abs(l22[128]) > 0.3)
    assert np.max(np.abs(l22[64] - l22[128])) < 0.02


def test_lemma23_margin(reports):
    assert min(r["L23"] for r in reports[128].per_i) >= -0.05


def test_coupling_defects(reports):
    for rep in reports.values():
        scale = np.max(np.abs(rep.b))
        assert rep.b_defect <= 1e-13 * scale
    for a, b in ((32, 64), (64, 128)):
        assert reports[a].c_defect / reports[b].c_defect >= 1.5
        # square eigenfunctions have a parity, so c_pii vanishes to rounding
        assert reports[a].c_diagonal <= 1e-12


def test_lshape_c_diagonal_shrinks():
    # no parity on the L-shape: c_pii is pure discretization error
    diag = [probe(DomainSpec("lshape", r), 4).c_diagonal for r in (32, 64)]
    assert diag[0] > 1e-6
    assert diag[0] / diag[1] >= 1.5


def test_statistic_stable_between_grids(reports):
    s96 = np.array([r["conjecture_statistic"] for r in reports[96].per_i])
    s128 = np.array([r["conjecture_statistic"] for r in reports[128].per_i])
    assert np.all(np.abs(s96 - s128) <= 0.02 * s128)


@pytest.mark.xfail(strict=True, reason="statistic sits near 1.04-1.27, below the claimed 5/3")
def test_statistic_above_proved_floor(reports):
    assert min(r["conjecture_statistic"] for r in reports[128].per_i) >= PROVED_FLOOR - 0.05


def test_statistic_never_asserted_against_three(reports):
    for row in reports[128].per_i:
        assert row["conjecture_threshold"] == 3.0
        assert row["above_conjecture_threshold"] == (row["conjecture_statistic"] >= 3.0)


def test_functional_api_agrees_with_report(ctx64):
    rep = probe(DomainSpec("rectangle", 64), 4)
    pairs, l23 = lemma_residuals(ctx64, 2)
    assert pairs[0] == pytest.approx((rep.entries[2].L21, rep.entries[2].L22), rel=1e-9)
    assert l23 == pytest.approx(rep.per_i[1]["L23"], rel=1e-9)
    assert conjecture_statistic(ctx64, 1) == pytest.approx(
        rep.per_i[0]["conjecture_statistic"], rel=1e-9)
    h, w = project_gradient_space(ctx64, 1, 1)
    gq2, u2, defect = q_norms(ctx64, 1, 1, h)
    assert defect == pytest.approx(u2 - gq2 - float(np.dot(ctx64.pair.gradient.weights, w * w)))
    b, c, bd, cd = coupling_matrices(ctx64, 3)
    assert b.shape == c.shape == (2, 3, 3)


def test_square_cluster_is_axis_aligned(reports):
    # Lambda_2 = Lambda_3 on the square: the canonical basis swaps x and y
    e = {(x.i, x.p): x for x in reports[64].entries}
    assert e[(2, 1)].partial_norm2 == pytest.approx(e[(3, 2)].partial_norm2, rel=1e-6)
    assert e[(2, 1)].L22 == pytest.approx(e[(3, 2)].L22, rel=1e-5)


def test_lshape_report():
    rep = probe(DomainSpec("lshape", 32), 4)
    assert [r["i"] for r in rep.per_i] == [1, 2, 3, 4]
    assert all(np.isfinite(r["conjecture_statistic"]) for r in rep.per_i)


def test_rejections():
    with pytest.raises(ValueError):
        probe(DomainSpec("disk", 64), 4)
    pair = build_planar(DomainSpec("rectangle", 16))
    eig = smallest_pairs(pair, 2)
    zero = EigenResult(eig.values, np.zeros_like(eig.vectors), eig.residuals, eig.floors,
                       1, None, None)
    with pytest.raises(ValueError):
        build_context(pair, zero)
    ctx = build_context(pair, eig)
    with pytest.raises(ValueError):
        project_gradient_space(ctx, 1, 3)
