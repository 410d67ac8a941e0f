"""Analytic reference spectra.

Bessel functions of the first kind are evaluated in-repo (power series for
small arguments, Miller backward recurrence otherwise) so the reference data
does not depend on a special-function library.

Clamped disk buckling modes have the form u = a J_m(k r) + b r^m. Imposing
u(1) = u'(1) = 0 and using the recurrence m J_m(x)/x - J_m'(x) = J_{m+1}(x)
leaves J_{m+1}(k) = 0, so the buckling eigenvalues of the unit disk are the
squared zeros j_{m+1,s}^2, doubly degenerate for m >= 1.
"""

from __future__ import annotations

import math
import numpy as np

from .errors import BracketingFailure, RangeError
from .spectrum import Spectrum, validate_spectrum

MAX_ORDER = 61  # disk buckling of mode m = 60 needs J_61
MAX_ARG = 200.0
_ZERO_SEARCH_LIMIT = 320.0  # j_{61,40} is about 226
SERIES_CUTOFF = 12.0


def _series(m: int, x: float) -> float:
    half = 0.5 * x
    term = half**m / math.factorial(m)
    total = term
    q = -half * half
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + m))
        total += term
        if abs(term) < 1e-17 * max(abs(total), 1e-300) and k > 2:
            return total


def bessel_j_orders(mmax: int, x: float) -> np.ndarray:
    """J_0(x), ..., J_mmax(x) by Miller's backward recurrence.

    Normalized with J_0 + 2 (J_2 + J_4 + ...) = 1.
    """
    if x == 0.0:
        out = np.zeros(mmax + 1)
        out[0] = 1.0
        return out
    top = max(mmax, int(x)) + 20 + int(math.sqrt(40.0 * max(mmax, int(x), 1)))
    top += top % 2
    out = np.zeros(mmax + 1)
    jp1, j = 0.0, 1e-300
    norm = 0.0
    for order in range(top, 0, -1):
        # j = J_order (unnormalized), compute J_{order-1}
        jm1 = 2.0 * order / x * j - jp1
        jp1, j = j, jm1
        if abs(j) > 1e250:
            j *= 1e-250
            jp1 *= 1e-250
            out *= 1e-250
            norm *= 1e-250
        o = order - 1
        if o <= mmax:
            out[o] = j
        if o % 2 == 0 and o > 0:
            norm += 2.0 * j
    norm += j  # J_0
    return out / norm


def bessel_j(m: int, x: float) -> float:
    """First-kind Bessel function J_m(x) for 0 <= m <= 61, 0 <= x <= 200."""
    if isinstance(m, bool) or int(m) != m or not 0 <= m <= MAX_ORDER:
        raise RangeError(f"order m={m!r} outside 0..{MAX_ORDER}")
    if not 0.0 <= x <= MAX_ARG:
        raise RangeError(f"argument x={x!r} outside [0, {MAX_ARG}]")
    return _j(int(m), float(x))


def _j(m: int, x: float) -> float:
    if x == 0.0:
        return 1.0 if m == 0 else 0.0
    if x <= SERIES_CUTOFF:
        return _series(m, x)
    return float(bessel_j_orders(m, x)[m])


def _j_and_derivative(m: int, x: float):
    if m == 0:
        j = bessel_j_orders(1, x) if x > SERIES_CUTOFF else (_j(0, x), _j(1, x))
        return j[0], -j[1]
    if x > SERIES_CUTOFF:
        j = bessel_j_orders(m, x)
        return j[m], j[m - 1] - m / x * j[m]
    jm = _j(m, x)
    return jm, _j(m - 1, x) - m / x * jm


def _refine_zero(m: int, lo: float, hi: float, guess: float) -> float:
    flo = _j(m, lo)
    fhi = _j(m, hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise BracketingFailure(f"J_{m} has no sign change on [{lo}, {hi}]")
    # a few bisection steps, then safeguarded Newton
    for _ in range(8):
        mid = 0.5 * (lo + hi)
        fm = _j(m, mid)
        if fm * flo > 0.0:
            lo, flo = mid, fm
        else:
            hi = mid
    x = guess if lo < guess < hi else 0.5 * (lo + hi)
    for _ in range(60):
        f, df = _j_and_derivative(m, x)
        if f * flo > 0.0:
            lo = x
        else:
            hi = x
        step = f / df if df != 0.0 else 0.0
        nxt = x - step
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - x) <= 1e-14 * nxt:
            return nxt
        x = nxt
        if hi - lo <= 1e-14 * hi:
            return 0.5 * (lo + hi)
    return x


def mcmahon_guess(m: int, s: int) -> float:
    beta = (s + 0.5 * m - 0.25) * math.pi
    return beta - (4.0 * m * m - 1.0) / (8.0 * beta)


_ZERO_CACHE: dict = {}


def _zeros_of_order(m: int, count: int) -> tuple:
    """First ``count`` positive zeros of J_m by sign-change scanning.

    Consecutive zeros are more than 2.5 apart for every order, so a scan
    step of 0.5 cannot skip one; the rank of each zero is therefore exact.
    Results are cached per order and extended on demand.
    """
    step = 0.5
    zeros, x = _ZERO_CACHE.get(m, ([], max(float(m), step)))
    if len(zeros) >= count:
        return tuple(zeros[:count])
    fx = _j(m, x)
    while len(zeros) < count:
        nx = x + step
        if nx > _ZERO_SEARCH_LIMIT:
            raise BracketingFailure(f"J_{m} zero #{len(zeros) + 1} not found below "
                                    f"{_ZERO_SEARCH_LIMIT}")
        fn = _j(m, nx)
        if fx == 0.0:
            zeros.append(x)
        elif fx * fn < 0.0:
            guess = mcmahon_guess(m, len(zeros) + 1)
            zeros.append(_refine_zero(m, x, nx, guess))
        x, fx = nx, fn
    _ZERO_CACHE[m] = (zeros, x)
    return tuple(zeros[:count])


def bessel_zero(m: int, s: int) -> float:
    """s-th positive zero j_{m,s} of J_m (m <= 61, s <= 40)."""
    if isinstance(m, bool) or int(m) != m or not 0 <= m <= MAX_ORDER:
        raise RangeError(f"order m={m!r} outside 0..{MAX_ORDER}")
    if isinstance(s, bool) or int(s) != s or not 1 <= s <= 40:
        raise RangeError(f"rank s={s!r} outside 1..40")
    return _zeros_of_order(int(m), int(s))[-1]


def bessel_zero_table(max_order: int, max_rank: int) -> np.ndarray:
    """Array ``t[m, s-1] = j_{m,s}``."""
    return np.array([_zeros_of_order(m, max_rank) for m in range(max_order + 1)])


def disk_buckling_value(m: int, s: int) -> float:
    """Buckling eigenvalue of angular mode m, radial rank s, on the unit disk."""
    return bessel_zero(m + 1, s) ** 2


def disk_membrane_value(m: int, s: int) -> float:
    return bessel_zero(m, s) ** 2


def _disk_values(count: int, order_shift: int) -> list:
    """Smallest ``count`` values of j_{m+shift,s}^2, mode m >= 1 doubled."""
    cutoff = 8.0
    while True:
        vals = []
        m = 0
        while m + order_shift <= MAX_ORDER and m + order_shift < cutoff:
            nu = m + order_shift
            s = 1
            while True:
                # first zeros grow with s; stop past the cutoff
                z = _zeros_of_order(nu, s)[-1]
                if z > cutoff:
                    break
                vals.extend([z * z] * (1 if m == 0 else 2))
                s += 1
            m += 1
        if len(vals) >= count:
            vals.sort()
            return vals[:count]
        cutoff *= 1.5
        if cutoff > MAX_ARG:
            raise RangeError("requested count needs zeros beyond the supported range")


def disk_buckling_spectrum(count: int) -> Spectrum:
    if not 1 <= count <= 200:
        raise RangeError("count must be in 1..200")
    return validate_spectrum(_disk_values(count, 1), problem="buckling",
                             geometry="euclidean", dimension=2,
                             provenance={"source": "oracle", "domain": "unit disk"})


def disk_membrane_spectrum(count: int) -> Spectrum:
    if not 1 <= count <= 500:
        raise RangeError("count must be in 1..500")
    return validate_spectrum(_disk_values(count, 0), problem="membrane",
                             geometry="euclidean", dimension=2,
                             provenance={"source": "oracle", "domain": "unit disk"})


def rectangle_membrane_spectrum(a: float, b: float, count: int) -> Spectrum:
    """pi^2 (p^2/a^2 + q^2/b^2) for p, q >= 1, smallest ``count`` values."""
    if not 1 <= count <= 500:
        raise RangeError("count must be in 1..500")
    if not (a > 0 and b > 0):
        raise ValueError("side lengths must be positive")
    # every value with p > P exceeds pi^2 P^2/a^2; grow P, Q until safe
    P = Q = 1
    while True:
        vals = sorted(math.pi**2 * (p * p / a**2 + q * q / b**2)
                      for p in range(1, P + 1) for q in range(1, Q + 1))
        if len(vals) >= count:
            top = vals[count - 1]
            if (top <= math.pi**2 * ((P + 1) ** 2 / a**2 + 1 / b**2)
                    and top <= math.pi**2 * (1 / a**2 + (Q + 1) ** 2 / b**2)):
                return validate_spectrum(
                    vals[:count], problem="membrane", geometry="euclidean",
                    dimension=2,
                    provenance={"source": "oracle", "domain": f"rectangle {a}x{b}"})
        P += 1
        Q += 1
