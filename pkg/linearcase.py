import logging
from fractions import Fraction
from typing import List, Tuple

import numpy as np

from config import settings
from digits import cantor_array, cantor_integer, digit_list, word_safe
from errors import ValidationFailure
from models import CantorSystem, CertifiedValue, Comparison, DigitString, LinearSystem, Precision, Verdict
from precision_utils import PowerQuotient, compare_certified, evaluate
from schemas import BoundsResponse, EnvelopeReport, format_rational
from sequence import (
    b, check_descent, check_scan_budget, compare_terms, compare_to_threshold, iter_batches,
)

logger = logging.getLogger(__name__)


def _order(cmp: Comparison, allowed) -> Verdict:
    if cmp == Comparison.INDETERMINATE:
        return Verdict.INDETERMINATE
    return Verdict.TRUE if cmp in allowed else Verdict.FALSE


# ==================== Extrema ====================

def exact_bounds(ls: LinearSystem) -> Tuple[Fraction, Fraction]:
    """Get (m, M) = ((q(s-1)+r)/(p-1), (q(p-1)+pr)/(p-1))"""
    q, r, p, s = ls.q, ls.r, ls.p, ls.s
    return Fraction(q * (s - 1) + r, p - 1), Fraction(q * (p - 1) + p * r, p - 1)


def bounds_response(ls: LinearSystem) -> BoundsResponse:
    m, M = exact_bounds(ls)
    return BoundsResponse(m=format_rational(m), M=format_rational(M), s=ls.s, A=list(ls.A))


def check_global_bounds(ls: LinearSystem, N: int) -> Verdict:
    """Whether every b_n with n <= N lies in [m, M]"""
    if N < 1:
        raise ValidationFailure(f"N must be at least 1, got {N}")
    check_scan_budget(N)
    sys = ls.system()
    m, M = exact_bounds(ls)
    low, high = float(m), float(M)
    verdicts = []
    for batch in iter_batches(sys, 1, N + 1):
        upper = batch.value + batch.error
        lower = batch.value - batch.error
        for j in np.flatnonzero((lower <= low) | (upper >= high)):
            n = int(batch.n[j])
            below = _order(compare_to_threshold(sys, n, m), (Comparison.GREATER, Comparison.EQUAL))
            above = _order(compare_to_threshold(sys, n, M), (Comparison.LESS, Comparison.EQUAL))
            verdict = Verdict.combine([below, above])
            if verdict != Verdict.TRUE:
                logger.warning("b(%d) not certified inside [%s, %s]: %s", n, m, M, verdict.value)
            verdicts.append(verdict)
    return Verdict.combine(verdicts)


def check_linear_growth(ls: LinearSystem, N: int) -> Verdict:
    """Whether a_n >= (q + r/(s-1)) n for every n <= N"""
    if N < 1:
        raise ValidationFailure(f"N must be at least 1, got {N}")
    check_scan_budget(N)
    sys = ls.system()
    s = ls.s
    slope = ls.q * (s - 1) + ls.r
    # integer form: (s-1) a_n >= (q(s-1)+r) n
    if word_safe(sys, N + 1) and slope * (N + 1) < 2 ** 62:
        for lo in range(1, N + 1, settings.CHUNK_SIZE):
            hi = min(lo + settings.CHUNK_SIZE, N + 1)
            n = np.arange(lo, hi, dtype=np.int64)
            if np.any((s - 1) * cantor_array(sys, lo, hi) < slope * n):
                return Verdict.FALSE
        return Verdict.TRUE
    for n in range(1, N + 1):
        if (s - 1) * cantor_integer(sys, n) < slope * n:
            return Verdict.FALSE
    return Verdict.TRUE


# ==================== Decomposition ====================

def _radix_exponent(n: int, s: int) -> int:
    return len(digit_list(n, s)) - 1


def b_tilde_numerators(ls: LinearSystem, n: int) -> Tuple[int, Fraction]:
    """(a~_n, r (p^(k+1)-1)/(p-1)) for s^k <= n < s^(k+1); they add up to a_n"""
    if n < 1:
        raise ValidationFailure(f"the sequence is indexed from n = 1, got n = {n}")
    tilde = 0
    for e in digit_list(n, ls.s):
        tilde = tilde * ls.p + ls.q * e
    k = _radix_exponent(n, ls.s)
    return tilde, Fraction(ls.r * (ls.p ** (k + 1) - 1), ls.p - 1)


def b_tilde_decompose(ls: LinearSystem, n: int, precision: Precision = None) -> Tuple[CertifiedValue, CertifiedValue]:
    """Get (b~_n, correction) with b_n = b~_n + r (p^(k+1)-1)/(p-1) n^-alpha"""
    tilde, correction = b_tilde_numerators(ls, n)
    sys = ls.system()
    b_tilde = evaluate(sys, PowerQuotient(Fraction(tilde), Fraction(n)), precision)
    if correction == 0:
        return b_tilde, CertifiedValue(value=0.0, abs_error=0.0)
    return b_tilde, evaluate(sys, PowerQuotient(correction, Fraction(n)), precision)


# ==================== Monotonicity in blocks ====================

def block_indices(ls: LinearSystem, prefix: DigitString, l: int) -> List[int]:
    """[prefix, e, (s-1)^l]_s for e = 0..s-1"""
    if prefix.base != ls.s:
        raise ValidationFailure(f"prefix is in base {prefix.base}, the system has s={ls.s}")
    if not prefix.digits:
        raise ValidationFailure("prefix must be non-empty")
    if l < 0:
        raise ValidationFailure(f"l must be non-negative, got {l}")
    head = 0
    for d in prefix.digits:
        head = head * ls.s + d
    span = ls.s ** l
    return [(head * ls.s + e) * span + span - 1 for e in range(ls.s)]


def check_block_descent(ls: LinearSystem, prefix: DigitString, l: int, precision: Precision = None) -> Verdict:
    """
    Whether b over [prefix, e, (s-1)^l]_s strictly decreases as e runs 0..s-1.
    At l = 0 the full chain b_{sn+s-1} < ... < b_{sn+1} < b_n <= b_{sn} is checked as well.
    """
    sys = ls.system()
    indices = block_indices(ls, prefix, l)
    verdicts = [_order(compare_terms(sys, later, earlier, precision), (Comparison.LESS,))
                for earlier, later in zip(indices, indices[1:])]
    if l == 0:
        head = indices[0] // ls.s
        verdicts.append(check_descent(sys, head, precision))
    return Verdict.combine(verdicts)


def check_scale_equality(ls: LinearSystem, n: int, precision: Precision = None) -> Verdict:
    """Whether b_{sn} = b_n holds exactly when r = 0"""
    cmp = compare_terms(ls.system(), ls.s * n, n, precision)
    if cmp == Comparison.INDETERMINATE:
        return Verdict.INDETERMINATE
    return Verdict.TRUE if (cmp == Comparison.EQUAL) == (ls.r == 0) else Verdict.FALSE


def check_top_digit_min(ls: LinearSystem, k: int, precision: Precision = None) -> Verdict:
    """
    Whether min over e in [1, s-1] of b at [e (s-1)^k]_s is attained at e = s-1.
    At k = 0 this is the chain b_{s-1} <= ... <= b_1.
    """
    if k < 0:
        raise ValidationFailure(f"k must be non-negative, got {k}")
    sys = ls.system()
    span = ls.s ** k
    candidates = [e * span + span - 1 for e in range(1, ls.s)]
    if len(candidates) == 1:
        return Verdict.TRUE
    allowed = (Comparison.LESS, Comparison.EQUAL)
    if k == 0:
        return Verdict.combine(_order(compare_terms(sys, later, earlier, precision), allowed)
                               for earlier, later in zip(candidates, candidates[1:]))
    last = candidates[-1]
    return Verdict.combine(_order(compare_terms(sys, last, other, precision), allowed)
                           for other in candidates[:-1])


# ==================== Envelope of each radix block ====================

def envelope_closed_forms(ls: LinearSystem, k: int) -> Tuple[Fraction, Fraction]:
    """
    (b_{s^k}, F) where b_{s^k} = M - r/((p-1)p^k) and
    b_{s^(k+1)-1} = F (p^(k+1)-1) / (s^(k+1)-1)^alpha with F = (q(s-1)+r)/(p-1).
    """
    if k < 0:
        raise ValidationFailure(f"k must be non-negative, got {k}")
    m, M = exact_bounds(ls)
    return M - Fraction(ls.r, (ls.p - 1) * ls.p ** k), m


def check_dyadic_envelope(ls: LinearSystem, k: int, precision: Precision = None) -> EnvelopeReport:
    """Whether b_{s^(k+1)-1} <= b_n <= b_{s^k} for every n in [s^k, s^(k+1))"""
    top_exact, factor = envelope_closed_forms(ls, k)
    sys = ls.system()
    s = ls.s
    start, stop = s ** k, s ** (k + 1)
    check_scan_budget(stop - start)
    bottom_n = stop - 1
    top = b(sys, start, precision)
    bottom = b(sys, bottom_n, precision)

    closed = Verdict.combine([
        Verdict.TRUE if Fraction(cantor_integer(sys, start), ls.p ** k) == top_exact else Verdict.FALSE,
        Verdict.TRUE if cantor_integer(sys, bottom_n) == factor * (ls.p ** (k + 1) - 1) else Verdict.FALSE,
    ])

    verdicts = []
    for batch in iter_batches(sys, start, stop):
        upper = batch.value + batch.error
        lower = batch.value - batch.error
        for j in np.flatnonzero((upper >= top.lower) | (lower <= bottom.upper)):
            n = int(batch.n[j])
            item = CertifiedValue(value=float(batch.value[j]), abs_error=float(batch.error[j]))
            results = []
            if upper[j] >= top.lower:
                results.append(_order(compare_to_threshold(sys, n, top_exact, precision),
                                      (Comparison.LESS, Comparison.EQUAL)))
            if lower[j] <= bottom.upper:
                cmp = compare_certified(item, bottom)
                if cmp == Comparison.INDETERMINATE:
                    cmp = compare_terms(sys, n, bottom_n, precision)
                results.append(_order(cmp, (Comparison.GREATER, Comparison.EQUAL)))
            verdicts.append(Verdict.combine(results))
    verdict = Verdict.combine(verdicts)
    logger.info("envelope at k=%d over %d terms: %s", k, stop - start, verdict.value)
    return EnvelopeReport(
        k=k,
        verdict=verdict,
        scanned=stop - start,
        top=top,
        top_exact=format_rational(top_exact),
        bottom=bottom,
        bottom_factor=format_rational(factor),
        closed_forms_match=closed,
    )


def envelope_rows(ls: LinearSystem, kmax: int, precision: Precision = None) -> List[EnvelopeReport]:
    return [check_dyadic_envelope(ls, k, precision) for k in range(kmax + 1)]


def linear_system_of(sys: CantorSystem) -> LinearSystem:
    linear = sys.as_linear()
    if linear is None:
        raise ValidationFailure(f"{sys.spec_string} is not of the form A = {{q i + r}}")
    return linear
