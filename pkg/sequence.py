import logging
import math
from fractions import Fraction
from typing import Iterator, List, NamedTuple, Optional, Tuple

import numpy as np
from mpmath import mp

from config import settings
from digits import cantor_array, cantor_integer, to_digits, word_safe
from errors import BudgetExceeded, ValidationFailure
from models import CantorSystem, CertifiedValue, Comparison, Precision, Verdict
from precision_utils import (
    PowerQuotient, Real, alpha_of, compare_quotients, compare_to_real, evaluate, relative_bound,
)
from schemas import (
    DensityReport, DensityStep, DescentReport, DescentRow, ExtremaReport, NormalizedTerm, format_rational,
)

logger = logging.getLogger(__name__)

# b(n) is returned with abs_error <= REL_TOL * value
REL_TOL = 2.0 ** -50


class TermBatch(NamedTuple):
    """b_n for a contiguous index range; `error` holds certified absolute bounds"""
    n: np.ndarray
    a: np.ndarray
    value: np.ndarray
    error: np.ndarray


def _quotient(a: int, n: int) -> PowerQuotient:
    return PowerQuotient(Fraction(a), Fraction(n))


def _require_index(n: int):
    if n < 1:
        raise ValidationFailure(f"the sequence is indexed from n = 1, got n = {n}")


# ==================== Single terms ====================

def b(sys: CantorSystem, n: int, precision: Precision = None) -> CertifiedValue:
    """Get b_n = a_n / n**alpha with abs_error <= 2**-50 * b_n"""
    _require_index(n)
    return evaluate(sys, _quotient(cantor_integer(sys, n), n), precision, rel_tol=REL_TOL)


def term(sys: CantorSystem, n: int, precision: Precision = None) -> NormalizedTerm:
    a = cantor_integer(sys, n)
    return NormalizedTerm(n=n, a_n=a, b_n=evaluate(sys, _quotient(a, n), precision, rel_tol=REL_TOL))


def mantissas(sys: CantorSystem, n: int) -> Tuple[Fraction, Fraction]:
    """(a_n / p**k, n / s**k) for s**k <= n < s**(k+1)"""
    _require_index(n)
    k = len(to_digits(n, sys.s)) - 1
    return Fraction(cantor_integer(sys, n), sys.p ** k), Fraction(n, sys.s ** k)


def check_growth(sys: CantorSystem, n: int) -> bool:
    """Mantissa containment: a_n / p**k in [1, p] and n / s**k in [1, s)"""
    top, bottom = mantissas(sys, n)
    return 1 <= top <= sys.p and 1 <= bottom < sys.s


def compare_terms(sys: CantorSystem, i: int, j: int, precision: Precision = None) -> Comparison:
    """Certified order of b_i against b_j"""
    _require_index(i)
    _require_index(j)
    if i == j:
        return Comparison.EQUAL
    return compare_quotients(sys, _quotient(cantor_integer(sys, i), i),
                             _quotient(cantor_integer(sys, j), j), precision)


def compare_to_threshold(sys: CantorSystem, n: int, t: Real, precision: Precision = None) -> Comparison:
    """Certified order of b_n against the exactly known real t"""
    _require_index(n)
    return compare_to_real(sys, _quotient(cantor_integer(sys, n), n), t, precision)


def descent_tail_limit(sys: CantorSystem, n: int) -> CertifiedValue:
    """Get lim_l b at s**l * n + s**l - 1, i.e. (a_n + h(s-1)/(p-1)) / (n+1)**alpha"""
    _require_index(n)
    numer = cantor_integer(sys, n) + Fraction(sys.h(sys.s - 1), sys.p - 1)
    return evaluate(sys, PowerQuotient(numer, Fraction(n + 1)))


# ==================== Vectorised ranges ====================

def radix_exponents(n: np.ndarray, s: int) -> np.ndarray:
    """k with s**k <= n < s**(k+1), elementwise"""
    k = np.zeros(n.shape, dtype=np.int64)
    rest = n // s
    while rest.any():
        k += rest > 0
        rest //= s
    return k


def b_batch(sys: CantorSystem, start: int, stop: int) -> TermBatch:
    """
    b_n for n in [start, stop) with per-term error bounds.

    Uses machine words only when every a_n in the range is provably below 2**53;
    falls back to exact integers term by term otherwise.
    """
    _require_index(start)
    if stop <= start:
        empty = np.zeros(0)
        return TermBatch(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), empty, empty)
    if not word_safe(sys, stop):
        terms = [term(sys, n) for n in range(start, stop)]
        return TermBatch(
            np.array([t.n for t in terms], dtype=object),
            np.array([t.a_n for t in terms], dtype=object),
            np.array([t.b_n.value for t in terms]),
            np.array([t.b_n.abs_error for t in terms]),
        )
    n = np.arange(start, stop, dtype=np.int64)
    a = cantor_array(sys, start, stop)
    k = radix_exponents(n, sys.s)
    # a_n >= p**k, so both powers stay below 2**53
    top = a / np.power(np.int64(sys.p), k)
    bottom = n / np.power(np.int64(sys.s), k)
    alpha = alpha_of(sys.p, sys.s)
    value = top / bottom ** alpha
    error = value * 1.02 * 2.0 ** -53 * (4.0 + alpha * (1.0 + np.log(bottom)))
    return TermBatch(n, a, value, np.maximum(error, np.spacing(value)))


def iter_batches(sys: CantorSystem, start: int, stop: int, chunk: int = None) -> Iterator[TermBatch]:
    """Partition [start, stop) into contiguous chunks"""
    chunk = chunk or settings.CHUNK_SIZE
    for lo in range(start, stop, chunk):
        hi = min(lo + chunk, stop)
        logger.debug("scanning b_n for n in [%d, %d)", lo, hi)
        yield b_batch(sys, lo, hi)


def iter_terms(sys: CantorSystem, start: int, stop: int, precision: Precision = None) -> Iterator[NormalizedTerm]:
    """Terms n in [start, stop); vectorised in double precision, one interval evaluation each in HIGH"""
    if Precision(precision or settings.PRECISION) == Precision.HIGH:
        for n in range(start, stop):
            yield term(sys, n, Precision.HIGH)
        return
    for batch in iter_batches(sys, start, stop):
        for n, a, value, error in zip(batch.n, batch.a, batch.value, batch.error):
            yield NormalizedTerm(n=int(n), a_n=int(a),
                                 b_n=CertifiedValue(value=float(value), abs_error=float(error)))


def check_scan_budget(count: int):
    if count > settings.SCAN_CAP:
        raise BudgetExceeded(f"scan of {count} indices exceeds the scan cap {settings.SCAN_CAP}")


# ==================== Extrema ====================

def scan_extrema(sys: CantorSystem, N: int, precision: Precision = None) -> ExtremaReport:
    """
    Get min and max of b_n over 1 <= n <= N with attaining indices.
    Near-ties are settled by certified comparison; exact ties go to the smaller n.
    """
    _require_index(N)
    check_scan_budget(N)
    low: List[Tuple[int, float, float]] = []
    high: List[Tuple[int, float, float]] = []
    for batch in iter_batches(sys, 1, N + 1):
        low = _near_extreme(low, batch, minimum=True)
        high = _near_extreme(high, batch, minimum=False)
    min_n = _certified_pick(sys, [c[0] for c in low], Comparison.LESS, precision)
    max_n = _certified_pick(sys, [c[0] for c in high], Comparison.GREATER, precision)
    report = dict(
        system=sys.spec_string, N=N,
        min_n=min_n, min_value=b(sys, min_n, precision),
        max_n=max_n, max_value=b(sys, max_n, precision),
        min_attained=False, max_attained=sys.h(0) == 0,
    )
    linear = sys.as_linear()
    if linear is not None:
        from linearcase import exact_bounds
        m, M = exact_bounds(linear)
        report.update(exact_m=format_rational(m), exact_M=format_rational(M))
    logger.info("extrema over n <= %d: min at %d, max at %d", N, min_n, max_n)
    return ExtremaReport(**report)


def _near_extreme(kept, batch: TermBatch, minimum: bool):
    """Candidates whose certified interval reaches the current best value"""
    value, error = batch.value, batch.error
    j = int(np.argmin(value)) if minimum else int(np.argmax(value))
    pool = kept + [(int(batch.n[j]), float(value[j]), float(error[j]))]
    if minimum:
        bound = min(v + e for _, v, e in pool)
        mask = value - error <= bound
        fresh = [(int(n), float(v), float(e)) for n, v, e in zip(batch.n[mask], value[mask], error[mask])]
        return [c for c in kept + fresh if c[1] - c[2] <= bound]
    bound = max(v - e for _, v, e in pool)
    mask = value + error >= bound
    fresh = [(int(n), float(v), float(e)) for n, v, e in zip(batch.n[mask], value[mask], error[mask])]
    return [c for c in kept + fresh if c[1] + c[2] >= bound]


def _certified_pick(sys: CantorSystem, candidates: List[int], better: Comparison,
                    precision: Precision = None) -> int:
    candidates = sorted(set(candidates))
    best = candidates[0]
    for n in candidates[1:]:
        if compare_terms(sys, n, best, precision) == better:
            best = n
    return best


# ==================== Descent chain ====================

def _links(sys: CantorSystem, n: int) -> List[Tuple[int, int, bool]]:
    """(i, j, strict) meaning b_i < b_j (strict) or b_i <= b_j"""
    s = sys.s
    links = [(s * n + i, s * n + i - 1, True) for i in range(s - 1, 1, -1)]
    links.append((s * n + 1, n, True))
    links.append((n, s * n, False))
    return links


def _link_verdict(cmp: Comparison, strict: bool) -> Verdict:
    if cmp == Comparison.INDETERMINATE:
        return Verdict.INDETERMINATE
    if cmp == Comparison.LESS or (cmp == Comparison.EQUAL and not strict):
        return Verdict.TRUE
    return Verdict.FALSE


def check_descent(sys: CantorSystem, n: int, precision: Precision = None) -> Verdict:
    """Whether b_{sn+s-1} < ... < b_{sn+1} < b_n <= b_{sn} holds at n"""
    _require_index(n)
    return Verdict.combine(
        _link_verdict(compare_terms(sys, i, j, precision), strict) for i, j, strict in _links(sys, n)
    )


def descent_verdicts(sys: CantorSystem, start: int, stop: int, precision: Precision = None) -> List[Verdict]:
    """check_descent for n in [start, stop); float intervals first, certified comparison where they overlap"""
    _require_index(start)
    if stop <= start:
        return []
    s = sys.s
    check_scan_budget(s * stop)
    lo = start
    batch = b_batch(sys, lo, s * (stop - 1) + s)
    upper = batch.value + batch.error
    lower = batch.value - batch.error
    verdicts = []
    for n in range(start, stop):
        results = []
        for i, j, strict in _links(sys, n):
            if upper[i - lo] < lower[j - lo]:
                results.append(Verdict.TRUE)
            elif lower[i - lo] > upper[j - lo]:
                results.append(Verdict.FALSE)
            else:
                results.append(_link_verdict(compare_terms(sys, i, j, precision), strict))
        verdicts.append(Verdict.combine(results))
    return verdicts


def discover_descent_threshold(sys: CantorSystem, limit: int = None, precision: Precision = None) -> int:
    """Largest n <= limit where the descent chain is not certified to hold (0 if none)"""
    limit = limit or settings.DESCENT_SCAN_LIMIT
    threshold = 0
    for start in range(1, limit + 1, settings.CHUNK_SIZE):
        stop = min(start + settings.CHUNK_SIZE, limit + 1)
        for n, verdict in zip(range(start, stop), descent_verdicts(sys, start, stop, precision)):
            if verdict != Verdict.TRUE:
                threshold = n
    logger.info("descent chain threshold for %s: N0 = %d (scanned to %d)", sys.spec_string, threshold, limit)
    return threshold


def descent_report(sys: CantorSystem, count: int, limit: int = None) -> DescentReport:
    rows = [DescentRow(n=n, verdict=v) for n, v in zip(range(1, count + 1), descent_verdicts(sys, 1, count + 1))]
    limit = limit or settings.DESCENT_SCAN_LIMIT
    return DescentReport(system=sys.spec_string, limit=limit,
                         threshold=discover_descent_threshold(sys, limit), rows=rows)


def check_prop_m(sys: CantorSystem, n: int, l: int, precision: Precision = None) -> Verdict:
    """Whether b at s**l * n + s**l - 1 lies strictly below b_n; needs 1 - s**-l > log_p s"""
    _require_index(n)
    if l < 1 or not _tail_exponent_ok(sys, l):
        raise ValidationFailure(f"l={l} violates 1 - s^-l > log_p s for {sys.spec_string}")
    span = sys.s ** l
    return _link_verdict(compare_terms(sys, span * n + span - 1, n, precision), strict=True)


def _tail_exponent_ok(sys: CantorSystem, l: int) -> bool:
    margin = 1 - Fraction(1, sys.s ** l)
    ratio = sys.alpha_ratio
    if ratio is not None:
        u, v = ratio
        return margin > Fraction(v, u)
    with mp.workprec(113):
        return mp.mpf(margin.numerator) / margin.denominator > mp.log(sys.s) / mp.log(sys.p)


# ==================== Density subsequence ====================

def observed_bounds(sys: CantorSystem) -> Tuple[Fraction, Fraction]:
    """Exact (m, M) for linear digit maps, scan-observed extrema otherwise"""
    linear = sys.as_linear()
    if linear is not None:
        from linearcase import exact_bounds
        return exact_bounds(linear)
    report = scan_extrema(sys, settings.DESCENT_SCAN_LIMIT)
    return Fraction(report.min_value.value), Fraction(report.max_value.value)


def density_subsequence(sys: CantorSystem, gamma: Real, K: int, precision: Precision = None) -> DensityReport:
    """
    Get K terms of n_{k+1} = s*n_k + i, i the largest digit with b_{s n_k + i} >= gamma.

    Starts from the smallest n_1 >= s**k0 with b_{n_1+1} < gamma <= b_{n_1}, where
    s**k0 exceeds the discovered descent threshold.
    """
    if K < 1:
        raise ValidationFailure(f"K must be at least 1, got {K}")
    gamma = Fraction(gamma)
    m, M = observed_bounds(sys)
    if not m < gamma < M:
        raise ValidationFailure(f"gamma={float(gamma)} must lie strictly between m={float(m)} and M={float(M)}")
    threshold = discover_descent_threshold(sys, precision=precision)
    k0 = 0
    while sys.s ** k0 <= threshold:
        k0 += 1
    n = find_crossing(sys, gamma, sys.s ** k0, precision)
    C = float(M) * sys.p * alpha_of(sys.p, sys.s)

    steps = []
    a = cantor_integer(sys, n)
    for k in range(1, K + 1):
        value = evaluate(sys, _quotient(a, n), precision, rel_tol=REL_TOL)
        steps.append(DensityStep(k=k, n=n, b_n=value, distance=value.value - float(gamma),
                                 step_bound=C * float(sys.s) ** -k))
        if k == K:
            break
        n, a = _next_index(sys, n, a, gamma, precision)
    return DensityReport(system=sys.spec_string, gamma=float(gamma), C=C,
                         descent_threshold=threshold, k0=k0, steps=steps)


def find_crossing(sys: CantorSystem, gamma: Fraction, start: int, precision: Precision = None) -> int:
    """Smallest n >= start with b_{n+1} < gamma <= b_n"""
    cap = settings.DENSITY_SCAN_CAP
    for lo in range(start, cap + 1, settings.CHUNK_SIZE):
        hi = min(lo + settings.CHUNK_SIZE, cap + 1)
        batch = b_batch(sys, lo, hi + 1)
        g = float(gamma)
        reach = batch.value + batch.error >= g
        below = batch.value - batch.error < g
        candidates = np.nonzero(reach[:-1] & below[1:])[0]
        for j in candidates:
            n = lo + int(j)
            if (compare_to_threshold(sys, n + 1, gamma, precision) == Comparison.LESS
                    and compare_to_threshold(sys, n, gamma, precision) in (Comparison.GREATER, Comparison.EQUAL)):
                logger.info("density start n1 = %d for gamma = %s", n, float(gamma))
                return n
    raise BudgetExceeded(f"no n1 >= {start} with b(n1+1) < {float(gamma)} <= b(n1) below the scan cap {cap}")


def _next_index(sys: CantorSystem, n: int, a: int, gamma: Fraction,
                precision: Precision = None) -> Tuple[int, int]:
    for i in range(sys.s - 1, -1, -1):
        child, child_a = sys.s * n + i, sys.p * a + sys.h(i)
        verdict = compare_to_real(sys, _quotient(child_a, child), gamma, precision)
        if verdict == Comparison.INDETERMINATE:
            logger.warning("b(%d) vs gamma unresolved; taking digit %d", child, i)
        if verdict != Comparison.LESS:
            return child, child_a
    logger.warning("no child of %d reaches gamma; descent chain fails there", n)
    return sys.s * n, sys.p * a + sys.h(0)
