import math
from enum import Enum
from fractions import Fraction
from typing import Annotated, Dict, Optional, Tuple

import numpy as np
from mpmath import mp
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Arbitrary-precision non-negative integer; Python ints already carry the radix arithmetic
BigNat = Annotated[int, Field(ge=0)]


class Precision(str, Enum):
    DOUBLE = "double"
    HIGH = "high"


class Comparison(str, Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"
    INDETERMINATE = "indeterminate"


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


class Verdict(str, Enum):
    TRUE = "true"
    FALSE = "false"
    INDETERMINATE = "indeterminate"

    @classmethod
    def combine(cls, verdicts) -> "Verdict":
        """FALSE if any check fails, else INDETERMINATE if any is unresolved"""
        verdicts = list(verdicts)
        if cls.FALSE in verdicts:
            return cls.FALSE
        if cls.INDETERMINATE in verdicts:
            return cls.INDETERMINATE
        return cls.TRUE


class ContinuityVerdict(str, Enum):
    CONTINUOUS = "continuous"
    JUMP = "jump"
    INDETERMINATE = "indeterminate"


class CantorSystem(BaseModel):
    """Radix p with allowed digit set A; the digit map h sends i to A[i]."""
    model_config = ConfigDict(frozen=True)

    p: int = Field(..., ge=3)
    A: Tuple[int, ...]

    @field_validator('A')
    def strictly_increasing(cls, v):
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError(f"digit set {list(v)} must be strictly increasing")
        return v

    @model_validator(mode='after')
    def check_digits(self):
        s = len(self.A)
        if s < 2:
            raise ValueError("digit set needs at least two digits")
        if s >= self.p:
            raise ValueError(f"digit set must be a proper subset of 0..{self.p - 1}")
        for a in self.A:
            if a < 0 or a > self.p - 1:
                raise ValueError(f"digit {a} must lie in [0, {self.p - 1}]")
        return self

    @property
    def s(self) -> int:
        return len(self.A)

    @property
    def alpha(self) -> float:
        """Growth exponent log_s p (always > 1), rounded once from a 113-bit evaluation"""
        with mp.workprec(113):
            return float(mp.log(self.p) / mp.log(self.s))

    @property
    def alpha_ratio(self) -> Optional[Tuple[int, int]]:
        """(u, v) with p**v == s**u when log_s p = u/v is rational, else None"""
        for v in range(1, self.s.bit_length() + 1):
            u = round(v * self.alpha)
            if u > 0 and self.s ** u == self.p ** v:
                return u, v
        return None

    def h(self, i: int) -> int:
        return self.A[i]

    @property
    def digit_index(self) -> Dict[int, int]:
        return {a: i for i, a in enumerate(self.A)}

    @property
    def spec_string(self) -> str:
        return f"p={self.p};A={','.join(str(a) for a in self.A)}"

    def as_linear(self) -> Optional["LinearSystem"]:
        """The linear form h(i) = q*i + r when A holds every digit of one residue class"""
        q = self.A[1] - self.A[0]
        r = self.A[0]
        if any(b - a != q for a, b in zip(self.A, self.A[1:])):
            return None
        try:
            ls = LinearSystem(q=q, r=r, p=self.p)
        except ValueError:
            return None
        return ls if ls.A == self.A else None


class LinearSystem(BaseModel):
    """Digits sharing the remainder r modulo q: h(i) = q*i + r."""
    model_config = ConfigDict(frozen=True)

    q: int = Field(..., ge=1)
    r: int = Field(..., ge=0)
    p: int = Field(..., ge=3)

    @model_validator(mode='after')
    def check_parameters(self):
        if self.p <= self.q + self.r:
            raise ValueError(f"need p > q + r, got p={self.p}, q+r={self.q + self.r}")
        if self.s < 2 or self.s >= self.p:
            raise ValueError(f"(q={self.q}, r={self.r}, p={self.p}) gives s={self.s}; need 2 <= s < p")
        return self

    @property
    def s(self) -> int:
        # largest t with q(t-1) + r <= p - 1
        return (self.p - 1 - self.r) // self.q + 1

    @property
    def A(self) -> Tuple[int, ...]:
        return tuple(self.q * i + self.r for i in range(self.s))

    @property
    def is_residue_class(self) -> bool:
        """q >= 2 and r < q: A is a full residue class mod q"""
        return self.q >= 2 and self.r <= self.q - 1

    def system(self) -> CantorSystem:
        return CantorSystem(p=self.p, A=self.A)


class DigitString(BaseModel):
    """Most-significant-first digits; zero is the empty string."""
    model_config = ConfigDict(frozen=True)

    base: int = Field(..., ge=2)
    digits: Tuple[int, ...] = ()

    @model_validator(mode='after')
    def check_normalized(self):
        for d in self.digits:
            if d < 0 or d >= self.base:
                raise ValueError(f"digit {d} out of range for base {self.base}")
        if self.digits and self.digits[0] == 0:
            raise ValueError("leading zero in a normalized digit string")
        return self

    def __len__(self):
        return len(self.digits)


def _primitive_block(block: Tuple[int, ...]) -> Tuple[int, ...]:
    n = len(block)
    for d in range(1, n + 1):
        if n % d == 0 and block[:d] * (n // d) == block:
            return block[:d]
    return block


class SAryReal(BaseModel):
    """
    Non-negative real in base `base`: integer part, fractional digits and an optional
    repeating block. Stored canonically: no trailing (base-1)^inf tail, no trailing
    zeros, the shortest repeating block, and the shortest prefix before it.
    """
    model_config = ConfigDict(frozen=True)

    base: int = Field(..., ge=2)
    integer_part: BigNat = 0
    digits: Tuple[int, ...] = ()
    repeat: Tuple[int, ...] = ()

    @model_validator(mode='before')
    @classmethod
    def normalize(cls, data):
        if not isinstance(data, dict):
            return data
        base = data.get('base')
        integer_part = int(data.get('integer_part', 0))
        digits = list(data.get('digits', ()))
        repeat = tuple(data.get('repeat', ()))
        if base is None or base < 2:
            return data
        for d in digits + list(repeat):
            if d < 0 or d >= base:
                raise ValueError(f"digit {d} out of range for base {base}")
        if repeat:
            repeat = _primitive_block(repeat)
            if repeat == (0,):
                repeat = ()
            elif repeat == (base - 1,):
                # x.d1..dk(b-1)^inf == x.d1..(dk+1)
                repeat = ()
                carry = 1
                for j in range(len(digits) - 1, -1, -1):
                    digits[j] += carry
                    if digits[j] == base:
                        digits[j] = 0
                        carry = 1
                    else:
                        carry = 0
                        break
                integer_part += carry
            else:
                while digits and digits[-1] == repeat[-1]:
                    digits.pop()
                    repeat = (repeat[-1],) + repeat[:-1]
        if not repeat:
            while digits and digits[-1] == 0:
                digits.pop()
        return {**data, 'integer_part': integer_part, 'digits': tuple(digits), 'repeat': tuple(repeat)}

    @property
    def is_terminating(self) -> bool:
        return not self.repeat

    def digit(self, j: int) -> int:
        """j-th fractional digit, 1-indexed"""
        if j <= len(self.digits):
            return self.digits[j - 1]
        if not self.repeat:
            return 0
        return self.repeat[(j - len(self.digits) - 1) % len(self.repeat)]

    def prefix(self, k: int) -> Tuple[int, ...]:
        return tuple(self.digit(j) for j in range(1, k + 1))

    def floor_scaled(self, k: int) -> int:
        """floor(base**k * x), exactly"""
        n = self.integer_part
        for d in self.prefix(k):
            n = n * self.base + d
        return n

    def shift(self, k: int = 1) -> "SAryReal":
        """base**k * x"""
        head = self.prefix(k)
        integer_part = self.integer_part
        for d in head:
            integer_part = integer_part * self.base + d
        if len(self.digits) >= k:
            return SAryReal(base=self.base, integer_part=integer_part,
                            digits=self.digits[k:], repeat=self.repeat)
        offset = (k - len(self.digits)) % len(self.repeat) if self.repeat else 0
        return SAryReal(base=self.base, integer_part=integer_part, digits=(),
                        repeat=self.repeat[offset:] + self.repeat[:offset])

    def to_fraction(self) -> Fraction:
        value = Fraction(self.integer_part)
        scale = Fraction(1)
        for d in self.digits:
            scale /= self.base
            value += d * scale
        if self.repeat:
            block = 0
            for d in self.repeat:
                block = block * self.base + d
            period = self.base ** len(self.repeat)
            value += scale * Fraction(block, period - 1)
        return value

    @classmethod
    def from_fraction(cls, value: Fraction, base: int, period_cap: int = 10 ** 5) -> "SAryReal":
        """Long division; the remainder cycle gives the repeating block"""
        value = Fraction(value)
        if value < 0:
            raise ValueError("negative values have no s-ary expansion here")
        integer_part = value.numerator // value.denominator
        remainder = value.numerator - integer_part * value.denominator
        den = value.denominator
        seen: Dict[int, int] = {}
        digits = []
        while remainder and remainder not in seen:
            if len(digits) > period_cap:
                raise ValueError(f"expansion of {value} in base {base} exceeds {period_cap} digits")
            seen[remainder] = len(digits)
            remainder *= base
            digits.append(remainder // den)
            remainder %= den
        if not remainder:
            return cls(base=base, integer_part=integer_part, digits=tuple(digits))
        start = seen[remainder]
        return cls(base=base, integer_part=integer_part,
                   digits=tuple(digits[:start]), repeat=tuple(digits[start:]))

    def __str__(self):
        text = f"{self.integer_part}." + "".join(str(d) for d in self.digits)
        if self.repeat:
            text += "(" + "".join(str(d) for d in self.repeat) + ")"
        return text


class CantorPoint(BaseModel):
    """A point of the missing-digit set given by its p-ary digits (all in A)."""
    model_config = ConfigDict(frozen=True)

    digits: Tuple[int, ...] = ()
    repeat: Tuple[int, ...] = ()

    def __str__(self):
        text = "0." + "".join(str(d) for d in self.digits)
        if self.repeat:
            text += "(" + "".join(str(d) for d in self.repeat) + ")"
        return text


class CertifiedValue(BaseModel):
    """An approximation with a rigorous absolute error bound."""
    model_config = ConfigDict(frozen=True)

    value: float
    abs_error: float = Field(0.0, ge=0.0)

    @field_validator('abs_error')
    def finite_error(cls, v):
        if not math.isfinite(v):
            raise ValueError("error bound must be finite")
        return v

    @classmethod
    def exact(cls, value: Fraction) -> "CertifiedValue":
        """Nearest float to an exact rational, with the rounding error as the bound"""
        value = Fraction(value)
        approx = float(value)
        error = abs(Fraction(approx) - value)
        return cls(value=approx, abs_error=_round_up(error))

    @property
    def lower(self) -> float:
        return math.nextafter(self.value - self.abs_error, -math.inf)

    @property
    def upper(self) -> float:
        return math.nextafter(self.value + self.abs_error, math.inf)

    def contains(self, x) -> bool:
        return abs(Fraction(x) - Fraction(self.value)) <= Fraction(self.abs_error)

    def __str__(self):
        return f"{self.value!r} ± {self.abs_error:.3g}"


def _round_up(error: Fraction) -> float:
    bound = float(error)
    if Fraction(bound) < error:
        bound = math.nextafter(bound, math.inf)
    return bound


class IfsSystem(BaseModel):
    """The contractions S_i(x) = (x + h(i))/p on [0, 1]."""
    model_config = ConfigDict(frozen=True)

    p: int
    shifts: Tuple[int, ...]

    @classmethod
    def from_system(cls, sys: CantorSystem) -> "IfsSystem":
        return cls(p=sys.p, shifts=sys.A)

    def apply(self, i: int, x: Fraction) -> Fraction:
        return (Fraction(x) + self.shifts[i]) / self.p


class AtomicMeasure(BaseModel):
    """
    Equal-weight atoms at numerators[j] / scale, sorted ascending.
    Every atom carries weight 1 / len(numerators).
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    numerators: np.ndarray
    scale: int

    @property
    def size(self) -> int:
        return int(self.numerators.shape[0])

    @property
    def weight(self) -> Fraction:
        return Fraction(1, self.size)

    def locations(self):
        return [Fraction(int(a), self.scale) for a in self.numerators]

    def total_weight(self) -> Fraction:
        return self.weight * self.size
