import logging
import re
from fractions import Fraction
from typing import List, NamedTuple, Tuple

import numpy as np

from config import settings
from digits import cantor_array, cantor_integer, word_safe
from errors import BudgetExceeded, ValidationFailure
from models import CantorSystem, CertifiedValue, ContinuityVerdict, Precision, SAryReal, Side
from precision_utils import PowerQuotient, alpha_of, evaluate
from schemas import ContinuityReport, GridPoint, TruncationEstimate
from sequence import density_subsequence, radix_exponents

logger = logging.getLogger(__name__)

_SARY_PATTERN = re.compile(r"^([0-9a-z]+)(?:\.([0-9a-z]*)(?:\(([0-9a-z]+)\))?)?$")
_RATIO_PATTERN = re.compile(r"^(\d+)/(\d+)$")


class GridBatch(NamedTuple):
    n: np.ndarray
    value: np.ndarray
    error: np.ndarray


# ==================== Literals ====================

def parse_sary(text: str, base: int) -> SAryReal:
    """
    Parse `int.digits(repeat)` written in base `base`, or an exact rational `num/den`.
    Digits above 9 are written a-z.
    """
    compact = re.sub(r"\s+", "", (text or "").lower())
    ratio = _RATIO_PATTERN.match(compact)
    if ratio:
        num, den = int(ratio.group(1)), int(ratio.group(2))
        if den == 0:
            raise ValidationFailure(f"zero denominator in {text!r}")
        try:
            return SAryReal.from_fraction(Fraction(num, den), base, settings.PERIOD_CAP)
        except ValueError as e:
            raise ValidationFailure(str(e))
    match = _SARY_PATTERN.match(compact)
    if not match:
        raise ValidationFailure(f"invalid base-{base} literal {text!r}; expected 'int.digits(repeat)' or 'num/den'")
    try:
        integer_part = 0
        for c in match.group(1):
            integer_part = integer_part * base + _digit(c, base)
        digits = tuple(_digit(c, base) for c in match.group(2) or "")
        repeat = tuple(_digit(c, base) for c in match.group(3) or "")
        return SAryReal(base=base, integer_part=integer_part, digits=digits, repeat=repeat)
    except ValueError as e:
        raise ValidationFailure(str(e))


def _digit(c: str, base: int) -> int:
    d = int(c, 36)
    if d >= base:
        raise ValueError(f"digit {c!r} out of range for base {base}")
    return d


def _require_base(sys: CantorSystem, x: SAryReal):
    if x.base != sys.s:
        raise ValidationFailure(f"x is written in base {x.base}, the system needs base {sys.s}")


def _a(sys: CantorSystem, m: int) -> int:
    """a(m) with a(0) = 0"""
    return 0 if m == 0 else cantor_integer(sys, m)


# ==================== phi and lambda ====================

def phi_exact(sys: CantorSystem, x: SAryReal) -> Fraction:
    """sum_j h(d_j) p**-j over the fractional digits of x, tail summed as a geometric series"""
    _require_base(sys, x)
    p = sys.p
    value = Fraction(0)
    scale = Fraction(1)
    for d in x.digits:
        scale /= p
        value += sys.h(d) * scale
    if x.repeat:
        block = 0
        for d in x.repeat:
            block = block * p + sys.h(d)
        value += scale * Fraction(block, p ** len(x.repeat) - 1)
    else:
        value += scale * Fraction(sys.h(0), p - 1)
    return value


def phi_partial(sys: CantorSystem, x: SAryReal, K: int) -> CertifiedValue:
    """Partial sum over the first K digits with the tail bound h(s-1) p**-K / (p-1)"""
    if K < 1:
        raise ValidationFailure(f"K must be at least 1, got {K}")
    _require_base(sys, x)
    partial = sum((Fraction(sys.h(d), sys.p ** j) for j, d in enumerate(x.prefix(K), 1)), Fraction(0))
    rounded = CertifiedValue.exact(partial)
    tail = Fraction(sys.h(sys.s - 1), (sys.p - 1) * sys.p ** K)
    return CertifiedValue(value=rounded.value, abs_error=float(tail) * (1 + 2.0 ** -52) + rounded.abs_error)


def phi(sys: CantorSystem, x: SAryReal, K: int = None) -> CertifiedValue:
    """phi(x); exact (up to the final rounding) since every SAryReal is eventually periodic"""
    if K is not None and K < 1:
        raise ValidationFailure(f"K must be at least 1, got {K}")
    return CertifiedValue.exact(phi_exact(sys, x))


def lambda_numerator(sys: CantorSystem, x: SAryReal) -> Fraction:
    """a(floor(x)) + phi(x)"""
    return _a(sys, x.integer_part) + phi_exact(sys, x)


def _require_positive(x: SAryReal):
    if x.integer_part == 0 and not x.digits and not x.repeat:
        raise ValidationFailure("lambda is defined for x > 0 only")


def lambda_value(sys: CantorSystem, x: SAryReal, tol: float = None, precision: Precision = None) -> CertifiedValue:
    """Get lambda(x) = (a(floor x) + phi(x)) / x**alpha with abs_error <= tol"""
    _require_base(sys, x)
    _require_positive(x)
    tol = settings.LAMBDA_TOL if tol is None else tol
    if tol <= 0:
        raise ValidationFailure(f"tol must be positive, got {tol}")
    result = evaluate(sys, PowerQuotient(lambda_numerator(sys, x), x.to_fraction()), precision, tol=tol)
    if result.abs_error > tol:
        logger.warning("lambda(%s) error %.3g exceeds tol %.3g at %d bits",
                       x, result.abs_error, tol, settings.HIGH_PRECISION_BITS)
    return result


def lambda_truncation_error(sys: CantorSystem, x: SAryReal, k: int) -> TruncationEstimate:
    """Finite-stage value a(s^k x) / (s^k x)**alpha and the bound p**-k x**-alpha"""
    _require_base(sys, x)
    _require_positive(x)
    if k < 1:
        raise ValidationFailure(f"k must be at least 1, got {k}")
    n = x.floor_scaled(k)
    if n < 1:
        raise ValidationFailure(f"s^k x < 1 at k={k}; a(.) is undefined below 1")
    value = x.to_fraction()
    approx = evaluate(sys, PowerQuotient(Fraction(cantor_integer(sys, n)), value * sys.s ** k))
    bound = evaluate(sys, PowerQuotient(Fraction(1, sys.p ** k), value))
    return TruncationEstimate(x=str(x), k=k, approx=approx.value, bound=bound.upper)


# ==================== Continuity ====================

def _unit_interval(x: SAryReal):
    if x.integer_part != 0 or not x.digits and not x.repeat or x.digit(1) == 0:
        raise ValidationFailure(f"x = {x} must lie in [1/s, 1)")


def _last_digit_position(x: SAryReal) -> int:
    return len(x.digits)


def left_jump(sys: CantorSystem, x: SAryReal) -> Fraction:
    """
    phi(x) - phi(x-) at a terminating x, exactly:
    (h(d_N) - h(d_N - 1) - (h(s-1) - h(0))/(p-1)) / p**N.
    Zero for non-terminating x.
    """
    _require_base(sys, x)
    if x.repeat:
        return Fraction(0)
    N = _last_digit_position(x)
    p, s = sys.p, sys.s
    if N == 0:
        # integer x: x- = (x-1).(s-1)^inf
        return _a(sys, x.integer_part) - _a(sys, x.integer_part - 1) + Fraction(sys.h(0) - sys.h(s - 1), p - 1)
    d = x.digits[-1]
    return (sys.h(d) - sys.h(d - 1) - Fraction(sys.h(s - 1) - sys.h(0), p - 1)) / p ** N


def left_limit(sys: CantorSystem, x: SAryReal) -> CertifiedValue:
    """lambda(x-): the (d_N - 1)(s-1)^inf tail in closed form"""
    _require_base(sys, x)
    _require_positive(x)
    numer = lambda_numerator(sys, x) - left_jump(sys, x)
    return evaluate(sys, PowerQuotient(numer, x.to_fraction()))


def predicted_continuity(sys: CantorSystem, x: SAryReal, side: Side) -> ContinuityVerdict:
    """Right-continuous everywhere; from the left, continuous unless x terminates with a nonzero jump"""
    if side == Side.RIGHT or x.repeat:
        return ContinuityVerdict.CONTINUOUS
    return ContinuityVerdict.CONTINUOUS if left_jump(sys, x) == 0 else ContinuityVerdict.JUMP


def _approach_point(x: SAryReal, side: Side, n: int) -> Fraction:
    step = Fraction(1, x.base ** n)
    if side == Side.RIGHT:
        return Fraction(x.floor_scaled(n), x.base ** n) + step
    if x.repeat:
        return Fraction(x.floor_scaled(n), x.base ** n)
    return x.to_fraction() - step


def continuity_probe(sys: CantorSystem, x: SAryReal, side: Side, depth: int = 30,
                     precision: Precision = None) -> ContinuityReport:
    """
    Evaluate lambda along the approach sequence x_n from one side and classify the limit.

    The gap |lambda(x) - lambda(x_n)| of a continuous approach is bounded by
    x_n**-alpha (p**-n + alpha s**-n / x_n); a gap certified above that envelope
    is a jump, and its excess is a lower bound on the jump size.
    """
    _require_base(sys, x)
    _unit_interval(x)
    side = Side(side)
    if depth < 1:
        raise ValidationFailure(f"depth must be at least 1, got {depth}")
    alpha = alpha_of(sys.p, sys.s)
    target = lambda_value(sys, x, tol=1.0, precision=precision)
    n = len(x.digits) + depth
    point = _approach_point(x, side, n)
    sample = evaluate(sys, PowerQuotient(_lambda_numerator_of(sys, point), point), precision)
    gap = abs(target.value - sample.value)
    err = target.abs_error + sample.abs_error
    nearest = float(min(point, x.to_fraction()))
    envelope = nearest ** -alpha * (float(sys.p) ** -n + alpha * float(sys.s) ** -n / nearest)
    if gap + err <= envelope:
        verdict, lower_bound = ContinuityVerdict.CONTINUOUS, 0.0
    elif gap - err > envelope:
        verdict, lower_bound = ContinuityVerdict.JUMP, gap - err - envelope
    else:
        verdict, lower_bound = ContinuityVerdict.INDETERMINATE, 0.0
    logger.debug("continuity at %s (%s): gap %.3g, envelope %.3g", x, side.value, gap, envelope)
    return ContinuityReport(x=str(x), side=side, depth=depth, verdict=verdict,
                            predicted=predicted_continuity(sys, x, side),
                            jump_lower_bound=lower_bound, observed_gap=gap)


def _lambda_numerator_of(sys: CantorSystem, value: Fraction) -> Fraction:
    return lambda_numerator(sys, SAryReal.from_fraction(value, sys.s, settings.PERIOD_CAP))


# ==================== Grids and ranges ====================

def _quotient_arrays(sys: CantorSystem, numer: np.ndarray, base: np.ndarray, extra_roundings: int = 0):
    """numer / base**alpha for integer bases below 2**53, with certified error bounds"""
    k = radix_exponents(base, sys.s)
    top = numer / np.power(float(sys.p), k)
    bottom = base / np.power(np.int64(sys.s), k)
    alpha = alpha_of(sys.p, sys.s)
    value = top / bottom ** alpha
    error = value * 1.02 * 2.0 ** -53 * (4.0 + extra_roundings + alpha * (1.0 + np.log(bottom)))
    return value, np.maximum(error, np.spacing(value))


def grid_batch(sys: CantorSystem, k: int) -> GridBatch:
    """lambda(n / s^k) = (a_n + h(0)/(p-1)) / n**alpha for n in [s^(k-1), s^k)"""
    if k < 1:
        raise ValidationFailure(f"k must be at least 1, got {k}")
    start, stop = sys.s ** (k - 1), sys.s ** k
    if stop - start > settings.SCAN_CAP:
        raise BudgetExceeded(f"grid of {stop - start} points exceeds the scan cap {settings.SCAN_CAP}")
    if not word_safe(sys, stop):
        points = grid_lambda_exact(sys, k)
        return GridBatch(np.array([g.n for g in points], dtype=object),
                         np.array([g.value.value for g in points]),
                         np.array([g.value.abs_error for g in points]))
    n = np.arange(start, stop, dtype=np.int64)
    tail = sys.h(0) / (sys.p - 1)
    value, error = _quotient_arrays(sys, cantor_array(sys, start, stop) + tail, n, extra_roundings=3)
    return GridBatch(n, value, error)


def grid_lambda_exact(sys: CantorSystem, k: int) -> List[GridPoint]:
    tail = Fraction(sys.h(0), sys.p - 1)
    return [GridPoint(n=n, value=evaluate(sys, PowerQuotient(cantor_integer(sys, n) + tail, Fraction(n))))
            for n in range(sys.s ** (k - 1), sys.s ** k)]


def grid_lambda(sys: CantorSystem, k: int) -> List[GridPoint]:
    """Get (n, lambda(n / s^k)) for every n in [s^(k-1), s^k)"""
    batch = grid_batch(sys, k)
    return [GridPoint(n=int(n), value=CertifiedValue(value=float(v), abs_error=float(e)))
            for n, v, e in zip(batch.n, batch.value, batch.error)]


def lambda_range(sys: CantorSystem, lo: Fraction, hi: Fraction, depth: int = 16) -> Tuple[float, float]:
    """Certified enclosure (lower, upper) of lambda over [lo, hi] from the cells of s^depth x"""
    lo, hi = Fraction(lo), Fraction(hi)
    if not 0 < lo <= hi:
        raise ValidationFailure(f"need 0 < lo <= hi, got [{lo}, {hi}]")
    scale = sys.s ** depth
    first = int(lo * scale)
    last = int(hi * scale)
    if first < 1:
        raise ValidationFailure(f"depth {depth} too shallow for lo={float(lo)}")
    low, high = cell_bounds(sys, first, last + 1)
    return float(np.min(low)), float(np.max(high))


def cell_bounds(sys: CantorSystem, start: int, stop: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Certified lower and upper bounds of lambda on each cell [n, n+1), n in [start, stop).

    On the cell the numerator a_n + phi lies between a_n + h(0)/(p-1) and
    a_n + h(s-1)/(p-1).
    """
    if start < 1:
        raise ValidationFailure(f"cells start at n = 1, got {start}")
    if stop - start > settings.SCAN_CAP or not word_safe(sys, stop + 1):
        raise BudgetExceeded(f"{stop - start} cells from n = {start} exceed the scan budget")
    n = np.arange(start, stop, dtype=np.int64)
    a = cantor_array(sys, start, stop)
    low_tail = sys.h(0) / (sys.p - 1)
    high_tail = sys.h(sys.s - 1) / (sys.p - 1)
    low, low_err = _quotient_arrays(sys, a + low_tail, n + 1, extra_roundings=3)
    high, high_err = _quotient_arrays(sys, a + high_tail, n, extra_roundings=3)
    return low - low_err, high + high_err


def continuous_witness(sys: CantorSystem, gamma, K: int = 20) -> Tuple[SAryReal, CertifiedValue, CertifiedValue]:
    """
    A non-terminating x in [1/s, 1) with lambda(x) close to gamma:
    x = 0.(digits of n_K)(01)^inf for the density subsequence n_K of gamma.
    Returns (x, lambda(x), b at n_K).
    """
    report = density_subsequence(sys, gamma, K)
    last = report.steps[-1]
    digits = []
    n = last.n
    while n:
        n, d = divmod(n, sys.s)
        digits.append(d)
    x = SAryReal(base=sys.s, digits=tuple(reversed(digits)), repeat=(0, 1))
    return x, lambda_value(sys, x), last.b_n
