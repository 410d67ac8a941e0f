import math

import numpy as np
import pytest
from scipy import special

from buckling.errors import RangeError
from buckling.oracle import (bessel_j, bessel_j_orders, bessel_zero, bessel_zero_table,
                             disk_buckling_spectrum, disk_buckling_value,
                             disk_membrane_spectrum, mcmahon_guess,
                             rectangle_membrane_spectrum)


@pytest.mark.parametrize("m", [0, 1, 2, 5, 10, 30, 61])
def test_bessel_against_scipy(m):
    xs = np.concatenate([np.linspace(0.0, 12.0, 61), np.linspace(12.5, 200.0, 120)])
    ours = np.array([bessel_j(m, float(x)) for x in xs])
    ref = special.jv(m, xs)
    assert np.max(np.abs(ours - ref)) <= 1e-12


def test_orders_share_one_recurrence():
    x = 37.3
    assert np.allclose(bessel_j_orders(20, x), special.jv(np.arange(21), x), atol=1e-13)


@pytest.mark.parametrize("m, x", [(-1, 1.0), (62, 1.0), (0, -0.1), (0, 200.5)])
def test_range_checks(m, x):
    with pytest.raises(RangeError):
        bessel_j(m, x)


def test_zeros_against_scipy():
    table = bessel_zero_table(12, 10)
    for m in range(13):
        assert np.allclose(table[m], special.jn_zeros(m, 10), rtol=1e-12, atol=0)
    assert bessel_zero(0, 1) == pytest.approx(2.404825557695773, rel=1e-14)
    assert bessel_zero(61, 40) == pytest.approx(special.jn_zeros(61, 40)[-1], rel=1e-12)
    with pytest.raises(RangeError):
        bessel_zero(0, 41)


def test_mcmahon_is_close_for_large_rank():
    assert abs(mcmahon_guess(0, 20) - bessel_zero(0, 20)) < 1e-3


def test_disk_buckling_first_values():
    s = disk_buckling_spectrum(8)
    expect = [14.682, 26.375, 26.375, 40.706, 40.706, 49.218, 57.583, 57.583]
    assert s.values == pytest.approx(expect, abs=1e-3)
    assert s.clusters == [(2, 3), (4, 5), (7, 8)]
    assert disk_buckling_value(0, 1) == pytest.approx(special.jn_zeros(1, 1)[0] ** 2)


def test_disk_membrane_and_rectangle():
    assert disk_membrane_spectrum(3).values == pytest.approx(
        [5.783185962946784, 14.681970642123893, 14.681970642123893])
    sq = rectangle_membrane_spectrum(1.0, 1.0, 4).values
    assert sq == pytest.approx([2 * math.pi**2, 5 * math.pi**2, 5 * math.pi**2, 8 * math.pi**2])
    r = rectangle_membrane_spectrum(2.0, 1.0, 30).values
    brute = sorted(math.pi**2 * (p * p / 4 + q * q) for p in range(1, 40) for q in range(1, 40))
    assert r == pytest.approx(brute[:30])


def test_count_limits():
    with pytest.raises(RangeError):
        disk_buckling_spectrum(201)
    assert len(disk_buckling_spectrum(200)) == 200
