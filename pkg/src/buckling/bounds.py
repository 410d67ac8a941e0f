"""Universal eigenvalue inequalities for the buckling problem.

Every inequality is evaluated as a signed residual ``rhs - lhs`` at a
candidate value of Lambda_{k+1}, given the leading ``k`` eigenvalues. The
upper-bound extractors return the largest candidate keeping the residual
non-negative; for the delta-parameterized forms the right-hand side is first
minimized over all admissible delta sequences.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import (
    BracketingFailure,
    FormMismatch,
    MissingDelta,
    NegativeDiscriminant,
    NonMonotoneDelta,
    NonPositiveCoefficient,
    SphereBelowThreshold,
    UnboundedObjective,
)
from .spectrum import Spectrum, SpectrumPrefix, validate_spectrum

log = logging.getLogger(__name__)

fsum = math.fsum

DEFAULT_AUDIT_RTOL = 1e-12
DISCRIMINANT_RTOL = 1e-12
BISECTION_RTOL = 1e-9
GOLDEN_RTOL = 1e-10


class BoundForm(str, enum.Enum):
    EUCLID_CY = "EUCLID_CY"
    EUCLID_THIS = "EUCLID_THIS"
    EUCLID_CONJ = "EUCLID_CONJ"
    EUCLID_MONO = "EUCLID_MONO"
    SPHERE_WX = "SPHERE_WX"
    SPHERE_MONO = "SPHERE_MONO"
    SPHERE_N2 = "SPHERE_N2"
    MEMBRANE_PPW = "MEMBRANE_PPW"
    LOW_PPW2 = "LOW_PPW2"
    LOW_HILE_YEH = "LOW_HILE_YEH"
    LOW_ASHBAUGH = "LOW_ASHBAUGH"

    def __str__(self):
        return self.value


FORM_ORDER = {f: i for i, f in enumerate(BoundForm)}
EUCLID_QUADRATIC = (BoundForm.EUCLID_CY, BoundForm.EUCLID_THIS, BoundForm.EUCLID_CONJ)
DELTA_FORMS = (BoundForm.EUCLID_MONO, BoundForm.SPHERE_WX, BoundForm.SPHERE_MONO)
MONOTONE_FORMS = (BoundForm.EUCLID_MONO, BoundForm.SPHERE_MONO)
LOW_FORMS = (BoundForm.LOW_PPW2, BoundForm.LOW_HILE_YEH, BoundForm.LOW_ASHBAUGH)


def as_form(form) -> BoundForm:
    if isinstance(form, BoundForm):
        return form
    try:
        return BoundForm(str(form).upper())
    except ValueError:
        raise FormMismatch(f"unknown bound form {form!r}") from None


def euclid_coefficient(form, n: int) -> float:
    """The constant c in  sum (L - L_i)^2 <= c sum (L - L_i) L_i."""
    form = as_form(form)
    if form is BoundForm.EUCLID_CY:
        return 4.0 * (n + 2) / n**2
    if form is BoundForm.EUCLID_THIS:
        return 4.0 * (n + 4.0 / 3.0) / n**2
    if form is BoundForm.EUCLID_CONJ:
        return 4.0 / n
    raise FormMismatch(f"{form} is not a quadratic Euclidean form")


@dataclass(frozen=True)
class AuditEntry:
    form: BoundForm
    k: int
    lhs: float
    rhs: float
    residual: float
    satisfied: bool
    delta_used: tuple | None = None

    def to_dict(self) -> dict:
        out = {
            "form": self.form.value,
            "k": self.k,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "satisfied": self.satisfied,
        }
        if self.delta_used is not None:
            out["delta"] = list(self.delta_used)
        return out


@dataclass(frozen=True)
class BoundResult:
    form: BoundForm
    k: int
    base: float  # Lambda_k of the prefix
    upper_bound: float
    method: str  # "closed_root" | "bisection"
    certificate_residual: float
    bracket: tuple
    delta_used: tuple | None = None

    @property
    def gap_bound(self) -> float:
        """Upper bound on Lambda_{k+1} - Lambda_k."""
        return self.upper_bound - self.base

    def to_dict(self) -> dict:
        out = {
            "form": self.form.value,
            "k": self.k,
            "lambda_k": self.base,
            "upper_bound": self.upper_bound,
            "gap_bound": self.gap_bound,
            "method": self.method,
            "certificate_residual": self.certificate_residual,
            "bracket": list(self.bracket),
        }
        if self.delta_used is not None:
            out["delta"] = list(self.delta_used)
        return out


# ---------------------------------------------------------------------------
# compatibility checks


def check_compatible(prefix: SpectrumPrefix, form) -> BoundForm:
    """Raise unless ``form`` applies to the prefix's problem and geometry."""
    form = as_form(form)
    geo, prob, n = prefix.geometry, prefix.problem, prefix.dimension
    name = form.value
    if name.startswith("EUCLID") or name.startswith("LOW"):
        if geo != "euclidean" or prob != "buckling":
            raise FormMismatch(f"{name} needs a euclidean buckling spectrum")
        if form is BoundForm.LOW_PPW2 and n != 2:
            raise FormMismatch("LOW_PPW2 holds for n = 2 only")
    elif name.startswith("SPHERE"):
        if geo != "sphere" or prob != "buckling":
            raise FormMismatch(f"{name} needs a sphere buckling spectrum")
        if form is BoundForm.SPHERE_N2 and n != 2:
            raise FormMismatch("SPHERE_N2 holds for n = 2 only")
        if form is BoundForm.SPHERE_MONO and n >= 3:
            if any(v <= n - 2 for v in prefix.values):
                raise SphereBelowThreshold(
                    f"SPHERE_MONO divides by Lambda_i - (n-2); some of the first "
                    f"{prefix.k} values are <= {n - 2}")
    elif form is BoundForm.MEMBRANE_PPW:
        if prob != "membrane" or geo != "euclidean":
            raise FormMismatch("MEMBRANE_PPW needs a euclidean membrane spectrum")
    return form


def _low_form_k(form: BoundForm, n: int) -> int:
    return n if form is BoundForm.LOW_ASHBAUGH else 1


def compatible_forms(spectrum: Spectrum, forms=None) -> list:
    """Forms from ``forms`` (default: all) applicable to ``spectrum``."""
    forms = list(BoundForm) if forms is None else [as_form(f) for f in forms]
    probe = SpectrumPrefix(spectrum, len(spectrum.values))
    out = []
    for f in forms:
        try:
            check_compatible(probe, f)
        except SphereBelowThreshold:
            log.warning("skipping %s: spectrum below the n-2 threshold", f)
            continue
        except FormMismatch:
            continue
        out.append(f)
    return sorted(set(out), key=FORM_ORDER.get)


# ---------------------------------------------------------------------------
# delta handling


def _delta_tuple(delta, form: BoundForm, k: int) -> tuple:
    if delta is None:
        raise MissingDelta(f"{form} needs a delta parameter")
    if isinstance(delta, (int, float)):
        vals = (float(delta),) * k
    else:
        vals = tuple(float(d) for d in delta)
    if len(vals) != k:
        raise ValueError(f"delta has length {len(vals)}, expected {k}")
    if any(not (d > 0.0) or not math.isfinite(d) for d in vals):
        raise ValueError("delta values must be positive and finite")
    if form is BoundForm.SPHERE_WX and any(d != vals[0] for d in vals):
        raise FormMismatch("SPHERE_WX takes one constant delta")
    if form in MONOTONE_FORMS:
        for i in range(1, k):
            if vals[i] > vals[i - 1]:
                raise NonMonotoneDelta(
                    f"delta must be non-increasing; delta[{i}]={vals[i]} > "
                    f"delta[{i - 1}]={vals[i - 1]}")
    return vals


# ---------------------------------------------------------------------------
# residual evaluation


def _sides(values: Sequence[float], lam: float, form: BoundForm, n: int, delta):
    """Return (lhs, rhs) of ``form`` at candidate ``lam``."""
    k = len(values)
    gaps = [lam - v for v in values]
    if form in EUCLID_QUADRATIC:
        c = euclid_coefficient(form, n)
        return (fsum(g * g for g in gaps),
                c * fsum(g * v for g, v in zip(gaps, values)))
    if form is BoundForm.EUCLID_MONO:
        lhs = n * fsum(g * g for g in gaps)
        rhs = fsum([(n + 4.0 / 3.0) * fsum(d * g * g for d, g in zip(delta, gaps)),
                    fsum(g * v / d for g, v, d in zip(gaps, values, delta))])
        return lhs, rhs
    if form is BoundForm.SPHERE_WX:
        d = delta[0]
        m = n - 2
        lhs = 2.0 * fsum(g * g for g in gaps)
        quad = fsum(g * g * (d * v + d * d * (v - m) / (4.0 * (d * v + m)))
                    for g, v in zip(gaps, values))
        lin = fsum(g * (v + m * m / 4.0) for g, v in zip(gaps, values)) / d
        return lhs, fsum([quad, lin])
    if form is BoundForm.SPHERE_MONO:
        m = n - 2
        lhs = fsum([2.0 * fsum(g * g for g in gaps),
                    m * fsum(g * g / (v - m) for g, v in zip(gaps, values))])
        rhs = fsum([fsum(g * g * (v - m / (v - m)) * d
                         for g, v, d in zip(gaps, values, delta)),
                    fsum(g / d * (v + m * m / 4.0)
                         for g, v, d in zip(gaps, values, delta))])
        return lhs, rhs
    if form is BoundForm.SPHERE_N2:
        return (fsum(g * g for g in gaps),
                fsum(g * v * v for g, v in zip(gaps, values)))
    if form is BoundForm.MEMBRANE_PPW:
        return lam - values[-1], 4.0 / (k * n) * fsum(values)
    if form is BoundForm.LOW_PPW2:
        return lam, 3.0 * values[0]
    if form is BoundForm.LOW_HILE_YEH:
        return lam, (n * n + 8 * n + 20) / (n + 2) ** 2 * values[0]
    if form is BoundForm.LOW_ASHBAUGH:
        return fsum(list(values[1:]) + [lam]), (n + 4.0) * values[0]
    raise FormMismatch(f"unhandled form {form}")


def _entry(form, k, lhs, rhs, delta, rtol) -> AuditEntry:
    res = rhs - lhs
    atol = rtol * max(abs(lhs), abs(rhs), 1.0)
    return AuditEntry(form=form, k=k, lhs=lhs, rhs=rhs, residual=res,
                      satisfied=res >= -atol,
                      delta_used=None if delta is None else tuple(delta))


def residual(prefix: SpectrumPrefix, candidate: float, form, delta=None,
             rtol: float = DEFAULT_AUDIT_RTOL) -> AuditEntry:
    """Evaluate ``form`` at ``Lambda_{k+1} = candidate`` for a given delta."""
    form = check_compatible(prefix, form)
    values, k, n = prefix.values, prefix.k, prefix.dimension
    candidate = float(candidate)
    if candidate < values[-1]:
        raise ValueError(f"candidate {candidate} is below Lambda_k = {values[-1]}")
    if form in LOW_FORMS and k != _low_form_k(form, n):
        raise FormMismatch(f"{form} applies at k = {_low_form_k(form, n)} only")
    if form in DELTA_FORMS:
        delta = _delta_tuple(delta, form, k)
    elif delta is not None:
        raise FormMismatch(f"{form} takes no delta parameter")
    lhs, rhs = _sides(values, candidate, form, n, delta)
    return _entry(form, k, lhs, rhs, delta, rtol)


# ---------------------------------------------------------------------------
# delta optimization


def delta_objective(a: Sequence[float], b: Sequence[float], delta) -> float:
    """sum_i a_i delta_i + b_i / delta_i."""
    return fsum(ai * d + bi / d for ai, bi, d in zip(a, b, delta))


def optimize_delta_monotone(a: Sequence[float], b: Sequence[float]) -> tuple:
    """Minimize sum a_i d_i + b_i / d_i subject to d_1 >= d_2 >= ... > 0.

    Pool-adjacent-violators: each block takes the common minimizer
    sqrt(sum b / sum a); blocks violating the ordering are merged.
    """
    a = [float(x) for x in a]
    b = [float(x) for x in b]
    if len(a) != len(b):
        raise ValueError("a and b must have equal length")
    if not a:
        return ()
    for i, (ai, bi) in enumerate(zip(a, b)):
        if not ai > 0.0:
            raise NonPositiveCoefficient(f"a[{i}] = {ai} is not positive")
        if bi < 0.0:
            raise ValueError(f"b[{i}] = {bi} is negative")

    # each block: [sum_a, sum_b, count]
    blocks = []
    for ai, bi in zip(a, b):
        blocks.append([ai, bi, 1])
        while len(blocks) > 1:
            pa, pb, _ = blocks[-2]
            la, lb, _ = blocks[-1]
            # previous block must not sit below the last one: pb/pa >= lb/la
            if pb * la >= lb * pa:
                break
            la_, lb_, lc = blocks.pop()
            blocks[-1][0] += la_
            blocks[-1][1] += lb_
            blocks[-1][2] += lc
    out = []
    for sa, sb, cnt in blocks:
        if sb == 0.0:
            raise ValueError("a block of b coefficients sums to zero; "
                             "the infimum is not attained at positive delta")
        out.extend([math.sqrt(sb / sa)] * cnt)
    return tuple(out)


def _golden_min(f, lo: float, hi: float, rtol: float):
    """Golden-section search of a unimodal f on [lo, hi] in log coordinates."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = math.log(lo), math.log(hi)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(math.exp(c)), f(math.exp(d))
    while (b - a) > rtol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(math.exp(c))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(math.exp(d))
    x = math.exp(0.5 * (a + b))
    return x, f(x)


def optimize_delta_fixed(prefix: SpectrumPrefix, candidate: float,
                         form=BoundForm.SPHERE_WX) -> tuple:
    """Best constant delta for the constant-delta sphere form: returns (delta, rhs_min)."""
    form = check_compatible(prefix, form)
    if form is not BoundForm.SPHERE_WX:
        raise FormMismatch("optimize_delta_fixed handles SPHERE_WX only")
    values, n, k = prefix.values, prefix.dimension, prefix.k
    if candidate < values[-1]:
        raise ValueError("candidate below Lambda_k")
    if all(candidate == v for v in values):
        return 1.0, 0.0

    def rhs(d):
        return _sides(values, candidate, form, n, (d,) * k)[1]

    lo = 1e-12
    hi = 1.0
    for _ in range(2000):
        if rhs(2.0 * hi) >= rhs(hi):
            break
        hi *= 2.0
    else:
        raise BracketingFailure("no upper bracket for the optimal delta")
    hi *= 2.0
    return _golden_min(rhs, lo, hi, GOLDEN_RTOL)


def _monotone_coefficients(values, lam, form: BoundForm, n: int):
    gaps = [lam - v for v in values]
    if form is BoundForm.EUCLID_MONO:
        a = [(n + 4.0 / 3.0) * g * g for g in gaps]
        b = [g * v for g, v in zip(gaps, values)]
    else:
        m = n - 2
        a = [g * g * (v - m / (v - m)) for g, v in zip(gaps, values)]
        b = [g * (v + m * m / 4.0) for g, v in zip(gaps, values)]
        for i, v in enumerate(values):
            if v - m / (v - m) <= 0.0 and gaps[i] > 0.0:
                raise UnboundedObjective(
                    f"effective coefficient Lambda_i - (n-2)/(Lambda_i-(n-2)) is "
                    f"non-positive at i={i + 1}; the delta infimum is -infinity")
    return a, b


def optimal_delta(prefix: SpectrumPrefix, candidate: float, form) -> tuple:
    """Delta sequence minimizing the right-hand side of a delta-form."""
    form = check_compatible(prefix, form)
    values, n, k = prefix.values, prefix.dimension, prefix.k
    if form is BoundForm.SPHERE_WX:
        d, _ = optimize_delta_fixed(prefix, candidate, form)
        return (d,) * k
    if form not in MONOTONE_FORMS:
        raise FormMismatch(f"{form} takes no delta parameter")
    a, b = _monotone_coefficients(values, candidate, form, n)
    # zero-gap terms contribute nothing; they are the trailing indices
    active = [i for i in range(k) if a[i] > 0.0]
    if not active:
        return (1.0,) * k
    last = active[-1] + 1
    if active != list(range(last)):
        raise ValueError("zero-gap terms must be trailing")
    d = list(optimize_delta_monotone(a[:last], b[:last]))
    d.extend([d[-1]] * (k - last))
    return tuple(d)


def optimized_residual(prefix: SpectrumPrefix, candidate: float, form,
                       rtol: float = DEFAULT_AUDIT_RTOL) -> AuditEntry:
    """Residual with the right-hand side minimized over admissible delta."""
    form = as_form(form)
    if form in DELTA_FORMS:
        delta = optimal_delta(prefix, candidate, form)
        return residual(prefix, candidate, form, delta, rtol=rtol)
    return residual(prefix, candidate, form, rtol=rtol)


# ---------------------------------------------------------------------------
# upper bounds


def _larger_root(k: int, p: float, q: float, form: BoundForm) -> float:
    """Larger root of k L^2 - p L + q = 0."""
    disc = p * p - 4.0 * k * q
    if disc < 0.0:
        if disc < -DISCRIMINANT_RTOL * p * p:
            raise NegativeDiscriminant(
                f"{form}: discriminant {disc:.3e} < 0; the prefix violates the form")
        disc = 0.0
    return (p + math.sqrt(disc)) / (2.0 * k)


def _closed_result(prefix, form, bound, delta=None) -> BoundResult:
    cert = residual(prefix, bound, form, delta).residual if bound >= prefix.last else 0.0
    return BoundResult(form=form, k=prefix.k, base=prefix.last, upper_bound=bound,
                       method="closed_root", certificate_residual=cert,
                       bracket=(bound, bound), delta_used=delta)


def next_upper_bound_euclid(prefix: SpectrumPrefix, form) -> BoundResult:
    """Larger root of k L^2 - (2+c) S1 L + (1+c) S2 for the quadratic forms."""
    form = check_compatible(prefix, form)
    if form not in EUCLID_QUADRATIC:
        raise FormMismatch(f"{form} is not a quadratic Euclidean form")
    c = euclid_coefficient(form, prefix.dimension)
    vals = prefix.values
    s1 = fsum(vals)
    s2 = fsum(v * v for v in vals)
    bound = _larger_root(prefix.k, (2.0 + c) * s1, (1.0 + c) * s2, form)
    return _closed_result(prefix, form, max(bound, prefix.last))


def _sphere_n2_bound(prefix: SpectrumPrefix) -> BoundResult:
    vals = prefix.values
    s1 = fsum(vals)
    s2 = fsum(v * v for v in vals)
    s3 = fsum(v ** 3 for v in vals)
    form = BoundForm.SPHERE_N2
    bound = _larger_root(prefix.k, fsum([2.0 * s1, s2]), fsum([s2, s3]), form)
    return _closed_result(prefix, form, max(bound, prefix.last))


def next_upper_bound_mono(prefix: SpectrumPrefix, form) -> BoundResult:
    """Largest candidate whose delta-optimized residual stays non-negative."""
    form = check_compatible(prefix, form)
    if form is BoundForm.SPHERE_N2:
        return _sphere_n2_bound(prefix)
    if form not in DELTA_FORMS:
        raise FormMismatch(f"{form} is not a delta-parameterized form")

    base = prefix.last

    def f(lam):
        return optimized_residual(prefix, lam, form).residual

    lo = base
    step = max(1.0, base)
    hi = base + step
    for _ in range(200):
        if f(hi) < 0.0:
            break
        lo = hi
        step *= 2.0
        hi = base + step
    else:
        raise BracketingFailure(f"{form}: no infeasible candidate found")
    if f(lo) < 0.0:
        raise BracketingFailure(f"{form}: the prefix already violates the form at Lambda_k")
    while hi - lo > BISECTION_RTOL * hi:
        mid = 0.5 * (lo + hi)
        if f(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    entry = optimized_residual(prefix, lo, form)
    return BoundResult(form=form, k=prefix.k, base=base, upper_bound=lo,
                       method="bisection",
                       certificate_residual=entry.residual, bracket=(lo, hi),
                       delta_used=entry.delta_used)


def next_upper_bound(prefix: SpectrumPrefix, form) -> BoundResult:
    """Upper bound on Lambda_{k+1} (lambda_{k+1} for membranes) for any form."""
    form = check_compatible(prefix, form)
    if form in EUCLID_QUADRATIC:
        return next_upper_bound_euclid(prefix, form)
    if form in DELTA_FORMS or form is BoundForm.SPHERE_N2:
        return next_upper_bound_mono(prefix, form)
    n, vals = prefix.dimension, prefix.values
    if form is BoundForm.MEMBRANE_PPW:
        bound = vals[-1] + 4.0 / (prefix.k * n) * fsum(vals)
    elif form in LOW_FORMS:
        need = _low_form_k(form, n)
        if prefix.k != need:
            raise FormMismatch(f"{form} bounds from a prefix of length {need}")
        if form is BoundForm.LOW_ASHBAUGH:
            # bound on Lambda_{n+1} given Lambda_2..Lambda_n
            bound = (n + 4.0) * vals[0] - fsum(vals[1:])
        else:
            _, bound = _sides(vals, vals[0], form, n, None)
    else:
        raise FormMismatch(f"unhandled form {form}")
    return _closed_result(prefix, form, bound)


def envelope(lambda1: float, n: int, form, K: int) -> list:
    """Iterated bounds B_1 = Lambda_1, B_{k+1} = bound from (B_1..B_k)."""
    form = as_form(form)
    if not lambda1 > 0.0:
        raise ValueError("lambda1 must be positive")
    if K < 1:
        raise ValueError("K must be at least 1")
    if form.value.startswith("SPHERE"):
        geometry, problem = "sphere", "buckling"
    elif form is BoundForm.MEMBRANE_PPW:
        geometry, problem = "euclidean", "membrane"
    elif form.value.startswith("EUCLID"):
        geometry, problem = "euclidean", "buckling"
    else:
        raise FormMismatch(f"{form} cannot be iterated into an envelope")
    seq = [float(lambda1)]
    while len(seq) < K:
        spec = validate_spectrum(seq, problem=problem, geometry=geometry, dimension=n)
        seq.append(next_upper_bound(spec.prefix(len(seq)), form).upper_bound)
    return seq


@dataclass(frozen=True)
class LowOrderBounds:
    ppw2: float | None
    hile_yeh: float
    ashbaugh_sum: float

    def to_dict(self) -> dict:
        return {"ppw2": self.ppw2, "hile_yeh": self.hile_yeh,
                "ashbaugh_sum": self.ashbaugh_sum}


def low_order_bounds(lambda1: float, n: int) -> LowOrderBounds:
    """Classical bounds from Lambda_1 alone.

    ``ashbaugh_sum`` bounds Lambda_2 + ... + Lambda_{n+1}.
    """
    if not lambda1 > 0.0:
        raise ValueError("lambda1 must be positive")
    return LowOrderBounds(
        ppw2=3.0 * lambda1 if n == 2 else None,
        hile_yeh=(n * n + 8 * n + 20) / (n + 2) ** 2 * lambda1,
        ashbaugh_sum=(n + 4.0) * lambda1,
    )


def audit_all(spectrum: Spectrum, forms=None,
              rtol: float = DEFAULT_AUDIT_RTOL) -> list:
    """Residuals at every known Lambda_{k+1}, ordered by (k, form)."""
    if len(spectrum.values) < 2:
        raise ValueError("auditing needs at least two eigenvalues")
    chosen = compatible_forms(spectrum, forms)
    n = spectrum.dimension
    entries = []
    for k in range(1, len(spectrum.values)):
        prefix = spectrum.prefix(k)
        cand = spectrum.values[k]
        for form in chosen:
            if form in LOW_FORMS and k != _low_form_k(form, n):
                continue
            entries.append(optimized_residual(prefix, cand, form, rtol=rtol))
    return entries
