import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import grid_search_monotone, random_valid_prefix

from buckling.bounds import (BoundForm, audit_all, compatible_forms, delta_objective, envelope,
                             low_order_bounds, next_upper_bound, next_upper_bound_euclid,
                             next_upper_bound_mono, optimal_delta, optimize_delta_fixed,
                             optimize_delta_monotone, optimized_residual, residual)
from buckling.errors import (FormMismatch, MissingDelta, NegativeDiscriminant, NonMonotoneDelta,
                             NonPositiveCoefficient, SphereBelowThreshold, UnboundedObjective)
from buckling.oracle import disk_buckling_spectrum, rectangle_membrane_spectrum
from buckling.spectrum import validate_spectrum

F = BoundForm


def eu(values, n=2):
    return validate_spectrum(values, dimension=n)


def sph(values, n=2):
    return validate_spectrum(values, geometry="sphere", dimension=n)


# residuals


def test_this_form_vanishes_at_closed_root():
    e = residual(eu([1.0]).prefix(1), 13.0 / 3.0, F.EUCLID_THIS)
    assert e.lhs == pytest.approx((10 / 3) ** 2)
    assert e.rhs == pytest.approx((10 / 3) ** 2)
    assert abs(e.residual) < 1e-12 and e.satisfied


def test_sphere_n2_factorization():
    e = residual(sph([2.0]).prefix(1), 6.0, F.SPHERE_N2)
    assert (e.lhs, e.rhs, e.residual) == (16.0, 16.0, 0.0)


@pytest.mark.parametrize("form", [F.EUCLID_CY, F.EUCLID_THIS, F.EUCLID_CONJ])
def test_empty_gap_is_zero(form):
    e = residual(eu([7.0]).prefix(1), 7.0, form)
    assert (e.lhs, e.rhs, e.residual) == (0.0, 0.0, 0.0)


def test_disk_conjecture_residual_positive():
    e = residual(eu([14.682, 26.3746]).prefix(2), 26.3746, F.EUCLID_CONJ)
    assert e.residual > 0


def test_corrupted_spectrum_violates_conjecture():
    e = residual(eu([1.0, 100.0]).prefix(1), 100.0, F.EUCLID_CONJ)
    assert (e.lhs, e.rhs) == (9801.0, 198.0)
    assert not e.satisfied


def test_delta_contract():
    p = eu([1.0, 2.0]).prefix(2)
    with pytest.raises(MissingDelta):
        residual(p, 3.0, F.EUCLID_MONO)
    with pytest.raises(NonMonotoneDelta):
        residual(p, 3.0, F.EUCLID_MONO, delta=[0.5, 1.0])
    with pytest.raises(FormMismatch):
        residual(p, 3.0, F.EUCLID_THIS, delta=[1.0, 1.0])
    with pytest.raises(ValueError):
        residual(p, 1.5, F.EUCLID_THIS)


def test_form_compatibility():
    with pytest.raises(FormMismatch):
        residual(sph([2.0]).prefix(1), 3.0, F.EUCLID_THIS)
    with pytest.raises(FormMismatch):
        residual(eu([2.0]).prefix(1), 3.0, F.SPHERE_N2)
    with pytest.raises(FormMismatch):
        residual(sph([2.0], n=3).prefix(1), 3.0, F.SPHERE_N2)
    with pytest.raises(FormMismatch):
        residual(eu([2.0]).prefix(1), 3.0, F.MEMBRANE_PPW)
    with pytest.raises(SphereBelowThreshold):
        residual(sph([0.5, 3.0], n=3).prefix(2), 4.0, F.SPHERE_MONO, delta=1.0)
    assert F.SPHERE_MONO not in compatible_forms(sph([0.5, 3.0], n=3))


def test_residual_is_pure():
    p = eu([1.0, 2.3, 2.9]).prefix(3)
    a = optimized_residual(p, 4.1, F.EUCLID_MONO)
    b = optimized_residual(p, 4.1, F.EUCLID_MONO)
    assert a == b


# closed-form and bisection bounds


@pytest.mark.parametrize("form, expected", [(F.EUCLID_THIS, 13 / 3), (F.EUCLID_CY, 5.0),
                                            (F.EUCLID_CONJ, 3.0)])
def test_unit_prefix_bounds(form, expected):
    r = next_upper_bound_euclid(eu([1.0]).prefix(1), form)
    assert r.upper_bound == pytest.approx(expected, rel=1e-14)
    assert r.method == "closed_root"


def test_conjecture_matches_ppw2():
    p = eu([1.0]).prefix(1)
    assert next_upper_bound(p, F.LOW_PPW2).upper_bound == 3.0
    assert next_upper_bound(p, F.EUCLID_CONJ).upper_bound == pytest.approx(3.0, rel=1e-15)


def test_two_term_disk_prefix():
    p = eu([14.682, 26.3746]).prefix(2)
    s1, s2, c = 14.682 + 26.3746, 14.682**2 + 26.3746**2, 10 / 3
    exact = ((2 + c) * s1 + math.sqrt(((2 + c) * s1) ** 2 - 8 * (1 + c) * s2)) / 4
    assert next_upper_bound(p, F.EUCLID_THIS).upper_bound == pytest.approx(exact, rel=1e-13)
    assert 86 < exact < 87.5


def test_sphere_bounds_for_unit_prefix():
    p = sph([2.0]).prefix(1)
    assert next_upper_bound(p, F.SPHERE_N2).upper_bound == pytest.approx(6.0)
    mono = next_upper_bound(p, F.SPHERE_MONO)
    assert mono.method == "bisection"
    assert mono.upper_bound == pytest.approx(6.0, rel=1e-8)
    assert mono.upper_bound <= next_upper_bound(p, F.SPHERE_WX).upper_bound


def test_mono_sharpens_constant_delta():
    p = eu([1.0]).prefix(1)
    r = next_upper_bound_mono(p, F.EUCLID_MONO)
    assert r.upper_bound <= 13 / 3 + 1e-9
    assert r.certificate_residual >= 0
    lo, hi = r.bracket
    assert hi - lo <= 1e-9 * hi


def test_negative_discriminant_detected():
    bad = eu([1.0, 50.0]).prefix(2)
    with pytest.raises(NegativeDiscriminant):
        next_upper_bound_euclid(bad, F.EUCLID_CONJ)


def test_envelopes():
    assert envelope(1.0, 2, F.EUCLID_CONJ, 2) == pytest.approx([1.0, 3.0])
    cy = envelope(1.0, 2, F.EUCLID_CY, 5)
    assert cy[:2] == pytest.approx([1.0, 5.0])
    assert all(b > a for a, b in zip(cy, cy[1:]))
    assert envelope(3.0, 2, F.EUCLID_CY, 5) == pytest.approx([3 * v for v in cy], rel=1e-12)


def test_low_order_bounds():
    lo = low_order_bounds(2.0, 2)
    assert lo.ppw2 == 6.0
    assert lo.hile_yeh == pytest.approx(2.0 * 40 / 16)
    assert lo.ashbaugh_sum == 12.0
    assert low_order_bounds(1.0, 3).ppw2 is None


def test_membrane_ppw():
    sq = rectangle_membrane_spectrum(1.0, 1.0, 4)
    r = next_upper_bound(sq.prefix(1), F.MEMBRANE_PPW)
    assert r.gap_bound == pytest.approx(4 / 2 * 2 * math.pi**2)
    assert sq.values[1] - sq.values[0] <= r.gap_bound


# delta optimization


def test_pav_examples():
    assert optimize_delta_monotone([1, 1], [4, 1]) == pytest.approx((2.0, 1.0))
    # violating pair pools to sqrt(5/2)
    assert optimize_delta_monotone([1, 1], [1, 4]) == pytest.approx((math.sqrt(2.5),) * 2)
    with pytest.raises(NonPositiveCoefficient):
        optimize_delta_monotone([0.0], [1.0])


coef = st.floats(min_value=0.05, max_value=20.0, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(coef, coef), min_size=1, max_size=3))
def test_pav_matches_grid_search(pairs):
    a = [p[0] for p in pairs]
    b = [p[1] for p in pairs]
    d = optimize_delta_monotone(a, b)
    assert all(x >= y for x, y in zip(d, d[1:]))
    best, _ = grid_search_monotone(a, b)
    assert delta_objective(a, b, d) <= best * (1 + 1e-9)
    assert delta_objective(a, b, d) == pytest.approx(best, rel=1e-6)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(coef, coef), min_size=1, max_size=8), coef)
def test_pav_beats_every_constant(pairs, const):
    a = [p[0] for p in pairs]
    b = [p[1] for p in pairs]
    d = optimize_delta_monotone(a, b)
    assert delta_objective(a, b, d) <= delta_objective(a, b, [const] * len(a)) * (1 + 1e-12)


def test_fixed_delta_minimizer():
    d, val = optimize_delta_fixed(sph([2.0]).prefix(1), 6.0)
    grid = np.exp(np.linspace(-6, 3, 20001))
    rhs = [residual(sph([2.0]).prefix(1), 6.0, F.SPHERE_WX, delta=g).rhs for g in grid]
    assert val <= min(rhs) * (1 + 1e-9)
    assert d == pytest.approx(float(grid[int(np.argmin(rhs))]), rel=1e-3)


def test_unbounded_objective():
    # Lambda_1 - 1/(Lambda_1 - 1) <= 0 for n = 3 once 1 < Lambda_1 <= (1+sqrt 5)/2
    with pytest.raises(UnboundedObjective):
        optimal_delta(sph([1.5], n=3).prefix(1), 2.0, F.SPHERE_MONO)


# properties


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 10),
       st.floats(min_value=1e-3, max_value=1e3))
def test_dominance_and_homogeneity(seed, k, t):
    rng = np.random.default_rng(seed)
    spec = random_valid_prefix(rng, k)
    pre = spec.prefix(k)
    b = [next_upper_bound_euclid(pre, f).upper_bound
         for f in (F.EUCLID_CONJ, F.EUCLID_THIS, F.EUCLID_CY)]
    assert b[0] <= b[1] * (1 + 1e-12) and b[1] <= b[2] * (1 + 1e-12)
    scaled = validate_spectrum([t * v for v in spec.values]).prefix(k)
    for f, val in zip((F.EUCLID_CONJ, F.EUCLID_THIS, F.EUCLID_CY), b):
        assert next_upper_bound_euclid(scaled, f).upper_bound == pytest.approx(t * val, rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(min_value=0.5, max_value=50.0), min_size=1, max_size=5),
       st.floats(min_value=0.05, max_value=5.0), st.floats(min_value=0.0, max_value=30.0))
def test_mono_sides_dominate_wang_xia(values, delta, extra):
    spec = sph(values)
    k = len(spec)
    lam = spec.values[-1] + extra
    wx = residual(spec.prefix(k), lam, F.SPHERE_WX, delta=delta)
    mono = residual(spec.prefix(k), lam, F.SPHERE_MONO, delta=delta)
    assert mono.rhs <= wx.rhs * (1 + 1e-12) + 1e-12
    assert mono.lhs >= wx.lhs * (1 - 1e-12)


def test_audit_on_true_spectra():
    disk = disk_buckling_spectrum(8)
    entries = audit_all(disk)
    assert all(e.satisfied for e in entries)
    keys = [(e.k, e.form.value) for e in entries]
    assert keys == sorted(keys, key=lambda t: (t[0], list(F).index(F(t[1]))))
    assert all(e.residual >= 0 for e in audit_all(disk, [F.EUCLID_CONJ]))
    sq = rectangle_membrane_spectrum(1.0, 1.0, 4)
    assert all(e.satisfied for e in audit_all(sq))
