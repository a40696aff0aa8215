import itertools
import logging
import math
import re
from fractions import Fraction
from typing import Iterator, List, Tuple, Union

import numpy as np

from config import settings
from errors import BudgetExceeded, ValidationFailure
from models import AtomicMeasure, CantorPoint, CantorSystem, CertifiedValue, IfsSystem, Precision, SAryReal
from precision_utils import PowerQuotient, evaluate

logger = logging.getLogger(__name__)

_POINT_PATTERN = re.compile(r"^(?:p-ary:)?0\.(\d*)(?:\((\d+)\))?$")

Real = Union[int, float, Fraction]


def _unit_value(x: Real) -> Fraction:
    try:
        value = Fraction(x)
    except (TypeError, ValueError):
        raise ValidationFailure(f"cannot read {x!r} as a real number")
    if not 0 <= value <= 1:
        raise ValidationFailure(f"x = {x} must lie in [0, 1]")
    return value


# ==================== CDF of the self-similar measure ====================

def mu_cdf(sys: CantorSystem, x: Real, tol: float = None) -> CertifiedValue:
    """
    Get mu_C([0, x]) digit by digit in base p.

    At level j the running prefix gains #{a in A : a < d_j} * s**-j; the walk stops
    at the first digit outside A. Rationals with a manageable period are exact
    (the repeating block is closed as a geometric series); otherwise the walk is
    cut after J levels with s**-J <= tol.
    """
    tol = settings.MU_CDF_TOL if tol is None else tol
    if tol <= 0:
        raise ValidationFailure(f"tol must be positive, got {tol}")
    value = _unit_value(x)
    if value == 1:
        return CertifiedValue(value=1.0, abs_error=0.0)
    if value == 0:
        return CertifiedValue(value=0.0, abs_error=0.0)
    if not isinstance(x, float):
        try:
            return CertifiedValue.exact(cdf_fraction(sys, value))
        except BudgetExceeded:
            logger.debug("period of %s in base %d too long; truncating", value, sys.p)
    return _mu_cdf_truncated(sys, value, tol)


def cdf_fraction(sys: CantorSystem, x: Real) -> Fraction:
    """mu_C([0, x]) as an exact rational; the p-ary period of x must stay under PERIOD_CAP"""
    value = _unit_value(x)
    if value == 1:
        return Fraction(1)
    try:
        expansion = SAryReal.from_fraction(value, sys.p, settings.PERIOD_CAP)
    except ValueError as e:
        raise BudgetExceeded(str(e))
    return _mu_cdf_exact(sys, expansion)


def _below(sys: CantorSystem, d: int) -> int:
    return sum(1 for a in sys.A if a < d)


def _mu_cdf_exact(sys: CantorSystem, x: SAryReal) -> Fraction:
    index = sys.digit_index
    mass = Fraction(0)
    scale = Fraction(1)
    for d in x.digits:
        scale /= sys.s
        mass += _below(sys, d) * scale
        if d not in index:
            return mass
    block = x.repeat or (0,)
    cycle = Fraction(0)
    step = Fraction(1)
    for d in block:
        step /= sys.s
        cycle += _below(sys, d) * step
        if d not in index:
            # leaves C inside the first pass through the block
            return mass + scale * cycle
    # the block stays in C: F = c / (1 - s**-L)
    return mass + scale * cycle / (1 - step)


def _mu_cdf_truncated(sys: CantorSystem, value: Fraction, tol: float) -> CertifiedValue:
    levels = max(1, math.ceil(-math.log(tol) / math.log(sys.s)))
    index = sys.digit_index
    mass = Fraction(0)
    scale = Fraction(1)
    rest = value
    for _ in range(levels):
        rest *= sys.p
        d = int(rest)
        rest -= d
        scale /= sys.s
        mass += _below(sys, d) * scale
        if d not in index:
            return CertifiedValue.exact(mass)
    # the unresolved tail holds at most s**-J of mass
    half = scale / 2
    centre = CertifiedValue.exact(mass + half)
    return CertifiedValue(value=centre.value, abs_error=float(half) * (1 + 2.0 ** -52) + centre.abs_error)


def staircase(sys: CantorSystem, points: int, tol: float = None) -> Iterator[Tuple[Fraction, CertifiedValue]]:
    """(x, mu_cdf(x)) on the uniform grid x = j/points, j = 0..points"""
    if points < 1:
        raise ValidationFailure(f"points must be positive, got {points}")
    for j in range(points + 1):
        x = Fraction(j, points)
        yield x, mu_cdf(sys, x, tol)


# ==================== IFS iteration ====================

def _check_atoms(sys: CantorSystem, k: int):
    if k < 0:
        raise ValidationFailure(f"k must be non-negative, got {k}")
    if sys.s ** k > settings.ATOM_CAP:
        raise BudgetExceeded(f"{sys.s}^{k} atoms exceed the atom cap {settings.ATOM_CAP}")


def iter_atoms(sys: CantorSystem, k: int) -> Iterator[Fraction]:
    """Atoms S_{i1} o ... o S_{ik}(0) in increasing order, generated lazily"""
    _check_atoms(sys, k)
    scale = sys.p ** k
    for word in itertools.product(sys.A, repeat=k):
        numerator = 0
        for digit in word:
            numerator = numerator * sys.p + digit
        yield Fraction(numerator, scale)


def ifs_iterate(sys: CantorSystem, k: int) -> AtomicMeasure:
    """Get F^k(delta_0): s**k equal-weight atoms, sorted"""
    _check_atoms(sys, k)
    ifs = IfsSystem.from_system(sys)
    dtype = np.int64 if sys.p ** k < 2 ** 62 else object
    numerators = np.zeros(1, dtype=dtype)
    shifts = np.asarray(ifs.shifts, dtype=dtype)
    for level in range(k):
        # appending the next map as the least significant p-ary digit keeps the order
        numerators = (numerators[:, None] * ifs.p + shifts[None, :]).ravel()
        logger.debug("ifs level %d: %d atoms", level + 1, numerators.shape[0])
    return AtomicMeasure(numerators=numerators, scale=ifs.p ** k)


def empirical_cdf(m: AtomicMeasure, x: Real) -> float:
    """Total weight of the atoms <= x"""
    value = _unit_value(x)
    cut = (value * m.scale).numerator // (value * m.scale).denominator
    count = int(np.searchsorted(m.numerators, cut, side='right'))
    return count / m.size


# ==================== Points of C ====================

def parse_cantor_point(sys: CantorSystem, text: str) -> CantorPoint:
    """Read `p-ary:0.d1d2...` (optionally `(repeat)`); every digit must lie in A"""
    compact = re.sub(r"\s+", "", text or "")
    match = _POINT_PATTERN.match(compact)
    if not match:
        raise ValidationFailure(f"invalid point {text!r}; expected 'p-ary:0.d1d2...' with digits in A")
    digits = tuple(int(c) for c in match.group(1))
    repeat = tuple(int(c) for c in match.group(2) or "")
    if sys.p > 10:
        raise ValidationFailure("single-character p-ary digits need p <= 10")
    for d in digits + repeat:
        if d not in sys.digit_index:
            raise ValidationFailure(f"digit {d} is not in A={list(sys.A)}")
    return CantorPoint(digits=digits, repeat=repeat)


def _addresses(sys: CantorSystem, point: CantorPoint):
    index = sys.digit_index
    return [index[d] for d in point.digits], [index[d] for d in point.repeat]


def _series(digits, repeat, base: int, tail_digit: int) -> Fraction:
    """0.digits(repeat) in `base`; without a repeat block the tail is tail_digit^inf"""
    value = Fraction(0)
    scale = Fraction(1)
    for d in digits:
        scale /= base
        value += d * scale
    block = repeat or [tail_digit]
    numer = 0
    for d in block:
        numer = numer * base + d
    return value + scale * Fraction(numer, base ** len(block) - 1)


def point_value(sys: CantorSystem, point: CantorPoint) -> Fraction:
    """x = sum h(e_i) p**-i; a finite string continues with h(0)"""
    return _series(list(point.digits), list(point.repeat), sys.p, sys.h(0))


def mass_below(sys: CantorSystem, point: CantorPoint) -> Fraction:
    """mu_C([0, x]) = [0.e1 e2 ...]_s read off the addresses"""
    digits, repeat = _addresses(sys, point)
    return _series(digits, repeat, sys.s, 0)


def address_real(sys: CantorSystem, point: CantorPoint) -> SAryReal:
    """The base-s real with the addresses as digits (normalized)"""
    digits, repeat = _addresses(sys, point)
    return SAryReal(base=sys.s, digits=tuple(digits), repeat=tuple(repeat))


def accumulation_map(sys: CantorSystem, point: CantorPoint, precision: Precision = None) -> CertifiedValue:
    """Get x / mu_C([0, x])**alpha for x in C with first digit >= h(1)"""
    digits, repeat = _addresses(sys, point)
    first = (digits or repeat or [0])[0]
    if first < 1:
        raise ValidationFailure(f"point {point} lies below h(1)/p = {sys.h(1)}/{sys.p}")
    return evaluate(sys, PowerQuotient(point_value(sys, point), mass_below(sys, point)), precision)


def truncation_indices(sys: CantorSystem, point: CantorPoint, k: int) -> List[int]:
    """n_j = [e_1 ... e_j]_s for j = 1..k"""
    digits, repeat = _addresses(sys, point)
    indices = []
    n = 0
    for j in range(k):
        if j < len(digits):
            e = digits[j]
        elif repeat:
            e = repeat[(j - len(digits)) % len(repeat)]
        else:
            e = 0
        n = n * sys.s + e
        indices.append(n)
    return indices
