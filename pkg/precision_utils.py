import logging
import math
from fractions import Fraction
from contextlib import contextmanager
from functools import lru_cache
from typing import Iterator, NamedTuple, Optional, Tuple, Union

from mpmath import iv, mp

from config import settings
from models import CantorSystem, CertifiedValue, Comparison, Precision

logger = logging.getLogger(__name__)

Real = Union[int, float, Fraction]

# unit roundoff of a double
_U = 2.0 ** -53


class PowerQuotient(NamedTuple):
    """The positive real numer / base**alpha, alpha = log_s p of the owning system"""
    numer: Fraction
    base: Fraction


# ==================== Interval working precision ====================

@contextmanager
def interval_precision(bits: int):
    """Run the block with iv.prec = bits, restoring the previous precision after"""
    saved = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = saved


# ==================== Exponent and radix helpers ====================

@lru_cache(maxsize=256)
def alpha_of(p: int, s: int) -> float:
    """log_s p rounded once from a 113-bit evaluation"""
    with mp.workprec(113):
        return float(mp.log(p) / mp.log(s))


def split_power(value: Fraction, s: int) -> Tuple[int, Fraction]:
    """(j, m) with value = m * s**j and 1 <= m < s"""
    value = Fraction(value)
    if value <= 0:
        raise ValueError("only positive values have a radix exponent")
    j = int(math.floor((math.log(value.numerator) - math.log(value.denominator)) / math.log(s)))
    # log rounding can be off by one either way
    while _scaled(value, s, j) < 1:
        j -= 1
    while _scaled(value, s, j) >= s:
        j += 1
    return j, _scaled(value, s, j)


def _scaled(value: Fraction, s: int, j: int) -> Fraction:
    return value / s ** j if j >= 0 else value * s ** (-j)


def rational_log(ratio: Fraction, s: int, max_den: int = 64) -> Optional[Fraction]:
    """t with ratio == s**t exactly when t is a rational of small denominator, else None"""
    ratio = Fraction(ratio)
    if ratio <= 0:
        return None
    if ratio == 1:
        return Fraction(0)
    estimate = (math.log(ratio.numerator) - math.log(ratio.denominator)) / math.log(s)
    t = Fraction(estimate).limit_denominator(max_den)
    if t == 0 or abs(float(t) - estimate) > 1e-9 * max(1.0, abs(estimate)):
        return None
    lhs = ratio ** t.denominator
    rhs = Fraction(s) ** t.numerator
    return t if lhs == rhs else None


def normalized(sys: CantorSystem, q: PowerQuotient) -> PowerQuotient:
    """Move the radix exponent of the base into the numerator: (s^j m)^alpha = p^j m^alpha"""
    j, mantissa = split_power(q.base, sys.s)
    numer = Fraction(q.numer)
    numer = numer / sys.p ** j if j >= 0 else numer * sys.p ** (-j)
    return PowerQuotient(numer, mantissa)


def relative_bound(alpha: float, mantissa: float) -> float:
    """
    Rounding budget of float(numer) / float(mantissa) ** alpha for a mantissa in [1, s).

    Counts the two input roundings, pow (1 ulp), the division and the rounding of
    alpha itself, which is amplified by ln(mantissa).
    """
    return 1.02 * _U * (4.0 + alpha * (1.0 + abs(math.log(mantissa))))


# ==================== Certified evaluation ====================

def evaluate_double(sys: CantorSystem, q: PowerQuotient) -> Optional[CertifiedValue]:
    q = normalized(sys, q)
    alpha = alpha_of(sys.p, sys.s)
    try:
        numer = float(q.numer)
        mantissa = float(q.base)
        value = numer / mantissa ** alpha
    except (OverflowError, ZeroDivisionError):
        return None
    if not math.isfinite(value) or value <= 0.0 or value < 2.0 ** -1000:
        return None
    error = value * relative_bound(alpha, mantissa)
    return CertifiedValue(value=value, abs_error=max(error, math.ulp(value)))


def evaluate_interval(sys: CantorSystem, q: PowerQuotient, bits: int = None):
    """Enclosure of the quotient as an mpmath interval at `bits` of working precision"""
    bits = bits or settings.HIGH_PRECISION_BITS
    q = normalized(sys, q)
    with interval_precision(bits):
        numer = iv.mpf(q.numer.numerator) / iv.mpf(q.numer.denominator)
        base = iv.mpf(q.base.numerator) / iv.mpf(q.base.denominator)
        alpha = iv.log(iv.mpf(sys.p)) / iv.log(iv.mpf(sys.s))
        return numer / iv.exp(alpha * iv.log(base))


def interval_to_certified(x) -> CertifiedValue:
    lo = math.nextafter(float(x.a), -math.inf)
    hi = math.nextafter(float(x.b), math.inf)
    value = lo + (hi - lo) / 2
    error = max(hi - value, value - lo)
    return CertifiedValue(value=value, abs_error=math.nextafter(error, math.inf))


def precision_ladder() -> Iterator[int]:
    """Working precisions tried in turn by the interval tier"""
    yield settings.HIGH_PRECISION_BITS
    yield 4 * settings.HIGH_PRECISION_BITS


def evaluate(sys: CantorSystem, q: PowerQuotient, precision: Precision = None,
             tol: float = None, rel_tol: float = None) -> CertifiedValue:
    """
    Evaluate numer / base**alpha with a certified error bound.

    The double tier is tried first unless `precision` is HIGH; the interval tier
    takes over when the double result is unavailable or looser than `tol`
    (absolute) or `rel_tol` (relative).
    """
    precision = Precision(precision or settings.PRECISION)
    if precision == Precision.DOUBLE:
        result = evaluate_double(sys, q)
        if result is not None and _fits(result, tol, rel_tol):
            return result
        logger.debug("escalating %s to %d bits", q, settings.HIGH_PRECISION_BITS)
    return interval_to_certified(evaluate_interval(sys, q))


def _fits(result: CertifiedValue, tol: Optional[float], rel_tol: Optional[float]) -> bool:
    if tol is not None and result.abs_error > tol:
        return False
    if rel_tol is not None and result.abs_error > rel_tol * abs(result.value):
        return False
    return True


# ==================== Certified comparison ====================

def compare_certified(x: CertifiedValue, y: CertifiedValue) -> Comparison:
    if x.upper < y.lower:
        return Comparison.LESS
    if x.lower > y.upper:
        return Comparison.GREATER
    return Comparison.INDETERMINATE


def compare_intervals(x, y) -> Comparison:
    if x.b < y.a:
        return Comparison.LESS
    if x.a > y.b:
        return Comparison.GREATER
    return Comparison.INDETERMINATE


def compare_exact(x: Fraction, y: Fraction) -> Comparison:
    if x < y:
        return Comparison.LESS
    if x > y:
        return Comparison.GREATER
    return Comparison.EQUAL


def compare_quotients(sys: CantorSystem, x: PowerQuotient, y: PowerQuotient,
                      precision: Precision = None) -> Comparison:
    """
    Certified order of two quotients.

    Decided exactly when alpha is rational or the ratio of the two bases is a
    rational power of s; otherwise climbs the precision ladder.
    """
    exact = _compare_exactly(sys, x, y)
    if exact is not None:
        return exact
    precision = Precision(precision or settings.PRECISION)
    if precision == Precision.DOUBLE:
        dx, dy = evaluate_double(sys, x), evaluate_double(sys, y)
        if dx is not None and dy is not None:
            verdict = compare_certified(dx, dy)
            if verdict != Comparison.INDETERMINATE:
                return verdict
    for bits in precision_ladder():
        with interval_precision(bits):
            verdict = compare_intervals(evaluate_interval(sys, x, bits), evaluate_interval(sys, y, bits))
        if verdict != Comparison.INDETERMINATE:
            return verdict
        logger.debug("comparison of %s and %s unresolved at %d bits", x, y, bits)
    logger.info("comparison %s vs %s indeterminate", x, y)
    return Comparison.INDETERMINATE


def compare_to_real(sys: CantorSystem, x: PowerQuotient, t: Real,
                    precision: Precision = None) -> Comparison:
    """Certified order of a quotient against an exactly known real t"""
    t = Fraction(t)
    exact = _compare_to_real_exactly(sys, x, t)
    if exact is not None:
        return exact
    precision = Precision(precision or settings.PRECISION)
    if precision == Precision.DOUBLE:
        dx = evaluate_double(sys, x)
        if dx is not None:
            verdict = compare_certified(dx, CertifiedValue.exact(t))
            if verdict != Comparison.INDETERMINATE:
                return verdict
    for bits in precision_ladder():
        with interval_precision(bits):
            enclosure = evaluate_interval(sys, x, bits)
            threshold = iv.mpf(t.numerator) / iv.mpf(t.denominator)
            verdict = compare_intervals(enclosure, threshold)
        if verdict != Comparison.INDETERMINATE:
            return verdict
        logger.debug("comparison of %s and %s unresolved at %d bits", x, t, bits)
    logger.info("comparison %s vs %s indeterminate", x, t)
    return Comparison.INDETERMINATE


def _compare_exactly(sys: CantorSystem, x: PowerQuotient, y: PowerQuotient) -> Optional[Comparison]:
    ratio = sys.alpha_ratio
    if ratio is not None:
        # alpha = u/v: compare the v-th powers
        u, v = ratio
        return compare_exact(Fraction(x.numer) ** v * Fraction(y.base) ** u,
                             Fraction(y.numer) ** v * Fraction(x.base) ** u)
    t = rational_log(Fraction(x.base) / Fraction(y.base), sys.s)
    if t is None:
        return None
    # (x.base / y.base)**alpha == p**t
    return compare_exact(Fraction(x.numer) ** t.denominator,
                         Fraction(y.numer) ** t.denominator * Fraction(sys.p) ** t.numerator)


def _compare_to_real_exactly(sys: CantorSystem, x: PowerQuotient, t: Fraction) -> Optional[Comparison]:
    if t <= 0:
        return Comparison.GREATER
    ratio = sys.alpha_ratio
    if ratio is not None:
        u, v = ratio
        return compare_exact(Fraction(x.numer) ** v, t ** v * Fraction(x.base) ** u)
    e = rational_log(Fraction(x.base), sys.s)
    if e is None:
        return None
    # x.base**alpha == p**e
    return compare_exact(Fraction(x.numer) ** e.denominator,
                         t ** e.denominator * Fraction(sys.p) ** e.numerator)
