import logging
import math
from fractions import Fraction
from typing import Callable, List, NamedTuple, Tuple, Union

import numpy as np

from digits import cantor_integer, word_safe
from errors import BudgetExceeded, ValidationFailure
from limitfn import cell_bounds, grid_batch, lambda_range
from models import CantorSystem, CertifiedValue, Comparison, SAryReal, Verdict
from precision_utils import PowerQuotient, compare_to_real
from schemas import (
    DistributionCount, DistributionReport, DistributionRow, OscillationReport, OscillationRow, SandwichCheck,
)
from sequence import check_scan_budget, iter_batches
from summation_utils import CompensatedSum

logger = logging.getLogger(__name__)

Real = Union[int, float, Fraction]

# slack for the float sums entering a certified bound
_SUM_SLACK = 2.0 ** -40


class Membership(NamedTuple):
    """Per-index verdicts on `value <= threshold`"""
    n: np.ndarray
    sure: np.ndarray   # proven <= threshold
    maybe: np.ndarray  # not proven > threshold

    @property
    def unresolved(self) -> int:
        return int(np.count_nonzero(self.maybe & ~self.sure))


def _float_below(t: Fraction) -> float:
    f = float(t)
    return f if Fraction(f) <= t else math.nextafter(f, -math.inf)


def _float_above(t: Fraction) -> float:
    f = float(t)
    return f if Fraction(f) >= t else math.nextafter(f, math.inf)


def classify(sys: CantorSystem, n: np.ndarray, value: np.ndarray, error: np.ndarray, t: Real,
             quotient_of: Callable[[int], PowerQuotient]) -> Membership:
    """
    Decide value <= t for a batch of certified floats.

    Entries whose interval straddles t are re-decided one by one through the
    exact / interval comparison of their quotient; what is still open stays
    in `maybe` without entering `sure`.
    """
    t = Fraction(t)
    upper = np.nextafter(value + error, np.inf)
    lower = np.nextafter(value - error, -np.inf)
    sure = upper <= _float_below(t)
    maybe = lower <= _float_above(t)
    for idx in np.flatnonzero(maybe & ~sure):
        verdict = compare_to_real(sys, quotient_of(int(n[idx])), t)
        if verdict in (Comparison.LESS, Comparison.EQUAL):
            sure[idx] = True
        elif verdict == Comparison.GREATER:
            maybe[idx] = False
        else:
            logger.info("b or lambda at n=%d left undecided against %s", int(n[idx]), t)
    return Membership(n, sure, maybe)


def _term_quotient(sys: CantorSystem) -> Callable[[int], PowerQuotient]:
    return lambda n: PowerQuotient(Fraction(cantor_integer(sys, n)), Fraction(n))


def _grid_quotient(sys: CantorSystem) -> Callable[[int], PowerQuotient]:
    tail = Fraction(sys.h(0), sys.p - 1)
    return lambda n: PowerQuotient(cantor_integer(sys, n) + tail, Fraction(n))


def term_membership(sys: CantorSystem, start: int, stop: int, t: Real):
    """Membership of b_n <= t over [start, stop), one chunk at a time"""
    quotient_of = _term_quotient(sys)
    for batch in iter_batches(sys, start, stop):
        yield classify(sys, batch.n, batch.value, batch.error, t, quotient_of)


def grid_membership(sys: CantorSystem, k: int, t: Real) -> Membership:
    """Membership of lambda(n) <= t over the grid block [s^(k-1), s^k)"""
    batch = grid_batch(sys, k)
    return classify(sys, batch.n, batch.value, batch.error, t, _grid_quotient(sys))


def _harmonic(n: np.ndarray, mask: np.ndarray) -> CompensatedSum:
    total = CompensatedSum()
    # smallest terms first
    total.add_array(1.0 / n[mask][::-1].astype(np.float64))
    return total


# ==================== Cumulative and logarithmic counts ====================

def empirical_D(sys: CantorSystem, x: int, t: Real) -> DistributionCount:
    """Get #{1 <= n <= x : b_n <= t}"""
    if x < 1:
        raise ValidationFailure(f"x must be at least 1, got {x}")
    check_scan_budget(x)
    count = 0
    unresolved = 0
    for m in term_membership(sys, 1, x + 1, t):
        count += int(np.count_nonzero(m.sure))
        unresolved += m.unresolved
    if unresolved:
        logger.warning("%d of %d comparisons against %s stayed open", unresolved, x, t)
    return DistributionCount(x=x, threshold=float(t), count=count, unresolved=unresolved)


def empirical_L(sys: CantorSystem, x: int, t: Real) -> float:
    """Get (1/ln x) * sum of 1/n over n <= x with b_n <= t"""
    if x < 2:
        raise ValidationFailure(f"x must be at least 2, got {x}")
    check_scan_budget(x)
    chunks = list(term_membership(sys, 1, x + 1, t))
    total = CompensatedSum()
    for m in reversed(chunks):
        total = total.merge(_harmonic(m.n, m.sure))
    return total.value / math.log(x)


def sigma_block(sys: CantorSystem, k: int, t: Real) -> float:
    """sigma_k(t): sum of 1/n over n in [s^(k-1), s^k) with b_n <= t"""
    _check_depth(sys, k)
    total = CompensatedSum()
    for m in term_membership(sys, sys.s ** (k - 1), sys.s ** k, t):
        total = total.merge(_harmonic(m.n, m.sure))
    return total.value


def sigma_star(sys: CantorSystem, k: int, t: Real) -> float:
    """sigma*_k(t): sum of 1/n over the grid block with lambda(n) <= t"""
    _check_depth(sys, k)
    m = grid_membership(sys, k, t)
    return _harmonic(m.n, m.sure).value


def _check_depth(sys: CantorSystem, k: int, minimum: int = 1):
    if k < minimum:
        raise ValidationFailure(f"k must be at least {minimum}, got {k}")
    check_scan_budget(sys.s ** k - sys.s ** (k - 1))


def check_sandwich(sys: CantorSystem, k: int, t: Real) -> SandwichCheck:
    """
    sigma*_k(t - p^-(k-1)) <= sigma_k(t) <= sigma*_k(t + p^-(k-1)).

    Checked as set inclusions on the block, which imply the inequalities of
    the sums: 0 <= lambda(n) - b_n = h(0)/((p-1) n^alpha) < p^-(k-1) there.
    """
    _check_depth(sys, k)
    t = Fraction(t)
    shift = Fraction(1, sys.p ** (k - 1))
    below = grid_membership(sys, k, t - shift)
    above = grid_membership(sys, k, t + shift)
    terms = list(term_membership(sys, sys.s ** (k - 1), sys.s ** k, t))
    sure = np.concatenate([m.sure for m in terms])
    maybe = np.concatenate([m.maybe for m in terms])

    verdicts = []
    # lambda(n) <= t - shift  implies  b_n <= t
    if np.any(below.sure & ~maybe):
        verdicts.append(Verdict.FALSE)
    elif np.any(below.maybe & ~sure):
        verdicts.append(Verdict.INDETERMINATE)
    # b_n <= t  implies  lambda(n) <= t + shift
    if np.any(sure & ~above.maybe):
        verdicts.append(Verdict.FALSE)
    elif np.any(maybe & ~above.sure):
        verdicts.append(Verdict.INDETERMINATE)

    return SandwichCheck(
        k=k,
        threshold=float(t),
        shift=float(shift),
        sigma_star_below=_harmonic(below.n, below.sure).value,
        sigma=_harmonic(below.n, sure).value,
        sigma_star_above=_harmonic(above.n, above.sure).value,
        verdict=Verdict.combine(verdicts),
    )


# ==================== Logarithmic distribution ====================

def analytic_L(sys: CantorSystem, t: Real, k: int) -> CertifiedValue:
    """
    Get sigma*_k(t) / ln s with a certified bound on its distance to L(t).

    L(t) = (1/ln s) * integral of dx/x over {x in [1/s, 1) : lambda(x) <= t}.
    The cells of s^k x fully inside that set give a lower bound
    (ln(1 + 1/n) >= 1/n - 1/(2n^2)); the cells it may meet give an upper bound.
    """
    _check_depth(sys, k, minimum=2)
    start, stop = sys.s ** (k - 1), sys.s ** k
    if not word_safe(sys, stop + 1):
        raise BudgetExceeded(f"depth {k} needs integers beyond machine words for p={sys.p}")
    t = Fraction(t)
    log_s = math.log(sys.s)

    grid = grid_membership(sys, k, t)
    central = _harmonic(grid.n, grid.sure).value / log_s

    low, high = cell_bounds(sys, start, stop)
    n = np.arange(start, stop, dtype=np.int64).astype(np.float64)
    inside = high <= _float_below(t)
    touching = low <= _float_above(t)
    lower = CompensatedSum()
    lower.add_array((1.0 / n[inside] - 0.5 / n[inside] ** 2)[::-1])
    upper = CompensatedSum()
    upper.add_array((1.0 / n[touching])[::-1])
    lower_L = lower.value / log_s
    upper_L = upper.value / log_s

    error = max(central - lower_L, upper_L - central, 0.0) + _SUM_SLACK
    logger.debug("L(%s) at depth %d in [%.6f, %.6f]", t, k, lower_L, upper_L)
    return CertifiedValue(value=central, abs_error=error)


def level_set_probe(sys: CantorSystem, t: Real, k: int, eps: float) -> float:
    """Lebesgue measure estimate of {x in [1/s, 1) : |lambda(x) - t| < eps} on the depth-k grid"""
    if eps <= 0:
        raise ValidationFailure(f"eps must be positive, got {eps}")
    _check_depth(sys, k, minimum=2)
    batch = grid_batch(sys, k)
    hits = int(np.count_nonzero(np.abs(batch.value - float(t)) < eps))
    return hits / sys.s ** k


# ==================== Non-convergence of D(x, t)/x ====================

def _as_fraction(x) -> Fraction:
    if isinstance(x, SAryReal):
        return x.to_fraction()
    return Fraction(x)


def validate_windows(sys: CantorSystem, t: Real, x1, eta1, x2, eta2, depth: int = None) -> Tuple[float, float]:
    """
    Check sup lambda < t on [x1 - eta1, x1 + eta1] and inf lambda > t on [x2, x2 + eta2].
    Returns (window_sup, window_inf).
    """
    x1, eta1, x2, eta2 = (_as_fraction(v) for v in (x1, eta1, x2, eta2))
    t = Fraction(t)
    if eta1 <= 0 or eta2 <= 0:
        raise ValidationFailure("window widths must be positive")
    first = (x1 - eta1, x1 + eta1)
    second = (x2, x2 + eta2)
    for lo, hi in (first, second):
        if lo < Fraction(1, sys.s) or hi >= 1:
            raise ValidationFailure(f"window [{float(lo)}, {float(hi)}] must lie in [1/{sys.s}, 1)")
    if depth is None:
        # about 2**16 cells per unit of x
        depth = max(1, math.ceil(16 * math.log(2) / math.log(sys.s)))
    _, window_sup = lambda_range(sys, *first, depth=depth)
    window_inf, _ = lambda_range(sys, *second, depth=depth)
    if not window_sup < t:
        raise ValidationFailure(
            f"lambda reaches {window_sup:.6f} >= {float(t)} on [{float(first[0])}, {float(first[1])}]")
    if not window_inf > t:
        raise ValidationFailure(
            f"lambda drops to {window_inf:.6f} <= {float(t)} on [{float(second[0])}, {float(second[1])}]")
    return window_sup, window_inf


def cdf_oscillation(sys: CantorSystem, t: Real, x1, eta1, x2, eta2, kmax: int, kmin: int = 1) -> OscillationReport:
    """
    D(X, t)/X along X = s^k (x1 + eta1) and along X = s^k (x2 + eta2).

    The first family sits right after a stretch where lambda stays below t and
    the second right after a stretch where it stays above, so their ratios
    keep a gap for every k.
    """
    window_sup, window_inf = validate_windows(sys, t, x1, eta1, x2, eta2)
    low_end = _as_fraction(x1) + _as_fraction(eta1)
    high_end = _as_fraction(x2) + _as_fraction(eta2)
    rows: List[OscillationRow] = []
    for k in range(kmin, kmax + 1):
        low_scale = math.floor(sys.s ** k * low_end)
        high_scale = math.floor(sys.s ** k * high_end)
        if low_scale < 1 or high_scale < 1:
            continue
        low_ratio = empirical_D(sys, low_scale, t).ratio
        high_ratio = empirical_D(sys, high_scale, t).ratio
        logger.info("k=%d: D/x = %.6f vs %.6f", k, low_ratio, high_ratio)
        rows.append(OscillationRow(k=k, low_scale=low_scale, low_ratio=low_ratio,
                                   high_scale=high_scale, high_ratio=high_ratio,
                                   gap=low_ratio - high_ratio))
    return OscillationReport(system=sys.spec_string, threshold=float(t),
                             window_sup=window_sup, window_inf=window_inf, rows=rows)


def distribution_report(sys: CantorSystem, t: Real, kmax: int, kmin: int = 2) -> DistributionReport:
    """One row per k: D and L at x = s^k next to the grid estimate of L(t)"""
    if kmax < kmin:
        raise ValidationFailure(f"kmax must be at least {kmin}, got {kmax}")
    rows = []
    for k in range(kmin, kmax + 1):
        x = sys.s ** k
        analytic = analytic_L(sys, t, k)
        rows.append(DistributionRow(
            k=k,
            x=x,
            alpha=float(t),
            D_ratio=empirical_D(sys, x, t).ratio,
            L_empirical=empirical_L(sys, x, t),
            L_analytic=analytic.value,
            L_err=analytic.abs_error,
        ))
    return DistributionReport(system=sys.spec_string, rows=rows)
