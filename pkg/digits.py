import logging
import re
from typing import List, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from config import settings
from errors import ValidationFailure
from models import CantorSystem, DigitString

logger = logging.getLogger(__name__)

_SYSTEM_PATTERN = re.compile(r"^p=(\d+);A=(\d+(?:,\d+)*)$")


# ==================== Radix conversion ====================

def to_digits(n: int, base: int) -> DigitString:
    """Get the most-significant-first expansion of n; zero is the empty string"""
    if base < 2:
        raise ValidationFailure(f"base must be at least 2, got {base}")
    if n < 0:
        raise ValidationFailure(f"expected a non-negative integer, got {n}")
    digits = []
    while n:
        n, d = divmod(n, base)
        digits.append(d)
    return DigitString(base=base, digits=tuple(reversed(digits)))


def from_digits(d: DigitString) -> int:
    n = 0
    for digit in d.digits:
        if digit >= d.base:
            raise ValidationFailure(f"digit {digit} out of range for base {d.base}")
        n = n * d.base + digit
    return n


def digit_list(n: int, base: int) -> List[int]:
    return list(to_digits(n, base).digits)


# ==================== Cantor integers ====================

def cantor_integer(sys: CantorSystem, n: int, allow_zero: bool = False) -> int:
    """
    Get a_n: rewrite the base-s digits of n through h and read them in base p.
    a_0 = h(0) only when `allow_zero` is set.
    """
    if n == 0 and allow_zero:
        return sys.h(0)
    if n < 1:
        raise ValidationFailure(f"Cantor integers are indexed from n = 1, got n = {n}")
    a = 0
    for d in to_digits(n, sys.s).digits:
        a = a * sys.p + sys.h(d)
    return a


def is_cantor_integer(sys: CantorSystem, m: int) -> Tuple[bool, Optional[int]]:
    """
    Whether every base-p digit of m lies in A, plus the index n with a_n = m.

    The index is None for m = 0 and when the top digit is h(0) != 0: such m
    passes the digit filter but is no term a_n with n >= 1.
    """
    if m < 0:
        raise ValidationFailure(f"expected a non-negative integer, got {m}")
    if m == 0:
        return sys.h(0) == 0, None
    index = sys.digit_index
    preimage = []
    for d in to_digits(m, sys.p).digits:
        if d not in index:
            return False, None
        preimage.append(index[d])
    if preimage[0] == 0:
        return True, None
    return True, from_digits(DigitString(base=sys.s, digits=tuple(preimage)))


def enumerate_by_filter(sys: CantorSystem, limit: int) -> List[int]:
    """Get every m in [1, limit] whose base-p digits all lie in A (brute force)"""
    if limit < 1:
        return []
    if limit >= 2 ** 62:
        return [m for m in range(1, limit + 1) if is_cantor_integer(sys, m)[0]]
    allowed = np.zeros(sys.p, dtype=bool)
    allowed[list(sys.A)] = True
    found = []
    chunk = settings.CHUNK_SIZE * 16
    for lo in range(1, limit + 1, chunk):
        hi = min(lo + chunk, limit + 1)
        values = np.arange(lo, hi, dtype=np.int64)
        rest = values.copy()
        ok = np.ones(values.shape, dtype=bool)
        while rest.any():
            ok &= allowed[rest % sys.p] | (rest == 0)
            rest //= sys.p
        found.extend(int(m) for m in values[ok])
    return found


def cantor_range(sys: CantorSystem, start: int, stop: int) -> List[int]:
    """Get [a_start, ..., a_{stop-1}] through the recursion a_{sn+i} = p*a_n + h(i)"""
    if start < 1:
        raise ValidationFailure(f"Cantor integers are indexed from n = 1, got start = {start}")
    return _prefixed_range(sys, start, stop)


def _prefixed_range(sys: CantorSystem, start: int, stop: int) -> List[int]:
    # index 0 stands for the empty digit string, value 0
    if stop <= start:
        return []
    if stop <= sys.s:
        return [0 if n == 0 else sys.h(n) for n in range(start, stop)]
    lo = start // sys.s
    parents = _prefixed_range(sys, lo, (stop - 1) // sys.s + 1)
    return [0 if n == 0 else sys.p * parents[n // sys.s - lo] + sys.h(n % sys.s) for n in range(start, stop)]


def word_safe(sys: CantorSystem, stop: int) -> bool:
    """True when every a_n with n < stop is provably below 2**53"""
    width = len(to_digits(max(stop - 1, 1), sys.s))
    return sys.p ** width < 2 ** 53


def cantor_array(sys: CantorSystem, start: int, stop: int) -> np.ndarray:
    """Vectorised a_n for n in [start, stop); only valid when word_safe holds"""
    if not word_safe(sys, stop):
        raise ValueError(f"a_n for n < {stop} may exceed the float mantissa")
    rest = np.arange(start, stop, dtype=np.int64)
    h = np.asarray(sys.A, dtype=np.int64)
    a = np.zeros(rest.shape, dtype=np.int64)
    scale = 1
    while rest.any():
        a += np.where(rest > 0, h[rest % sys.s], 0) * scale
        rest //= sys.s
        scale *= sys.p
    return a


# ==================== System spec strings ====================

def parse_system(text: str) -> CantorSystem:
    """Parse `p=<int>;A=<d0>,<d1>,...`; whitespace is ignored"""
    compact = re.sub(r"\s+", "", text or "")
    match = _SYSTEM_PATTERN.match(compact)
    if not match:
        raise ValidationFailure(f"invalid system spec {text!r}; expected 'p=<int>;A=<d0>,<d1>,...'")
    p = int(match.group(1))
    digits = tuple(int(a) for a in match.group(2).split(","))
    try:
        return CantorSystem(p=p, A=digits)
    except ValidationError as e:
        raise ValidationFailure(validation_message(e))


def validation_message(e: ValidationError) -> str:
    """First pydantic error message without the 'Value error, ' prefix"""
    msg = e.errors()[0]["msg"]
    return msg.split(", ", 1)[1] if msg.startswith("Value error, ") else msg
