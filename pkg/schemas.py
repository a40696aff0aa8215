from fractions import Fraction
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from models import CantorSystem, CertifiedValue, ContinuityVerdict, LinearSystem, Precision, Side, Verdict


def format_rational(value: Fraction) -> str:
    """Rationals print as num/den, integers without a denominator"""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# ==================== Sequence ====================

class NormalizedTerm(BaseModel):
    n: int = Field(..., ge=1)
    a_n: int = Field(..., ge=0)
    b_n: CertifiedValue


class ExtremaReport(BaseModel):
    system: str
    N: int
    min_n: int
    min_value: CertifiedValue
    max_n: int
    max_value: CertifiedValue
    # closed forms, only for linear digit maps
    exact_m: Optional[str] = None
    exact_M: Optional[str] = None
    # inf is never attained; sup is attained iff h(0) = 0
    min_attained: bool = False
    max_attained: bool

    @model_validator(mode='after')
    def check_order(self):
        if self.min_value.value > self.max_value.value:
            raise ValueError("observed minimum exceeds observed maximum")
        return self


class DescentRow(BaseModel):
    n: int
    verdict: Verdict


class DescentReport(BaseModel):
    system: str
    limit: int
    threshold: int  # largest n <= limit where the chain fails, 0 if none
    rows: List[DescentRow] = []


class DensityStep(BaseModel):
    k: int
    n: int
    b_n: CertifiedValue
    distance: float
    step_bound: float


class DensityReport(BaseModel):
    system: str
    gamma: float
    C: float
    descent_threshold: int
    k0: int
    steps: List[DensityStep]


# ==================== Limit function ====================

class TruncationEstimate(BaseModel):
    x: str
    k: int
    approx: float
    bound: float


class ContinuityReport(BaseModel):
    x: str
    side: Side
    depth: int
    verdict: ContinuityVerdict
    predicted: ContinuityVerdict
    jump_lower_bound: float = 0.0
    observed_gap: float = 0.0


class GridPoint(BaseModel):
    n: int
    value: CertifiedValue


# ==================== Distribution ====================

class OscillationRow(BaseModel):
    k: int
    low_scale: int
    low_ratio: float
    high_scale: int
    high_ratio: float
    gap: float


class OscillationReport(BaseModel):
    system: str
    threshold: float
    window_sup: float  # sup of lambda over the window below the threshold
    window_inf: float  # inf of lambda over the window above the threshold
    rows: List[OscillationRow]

    @field_validator('rows')
    def ratios_in_unit_interval(cls, v):
        for row in v:
            if not (0.0 <= row.low_ratio <= 1.0 and 0.0 <= row.high_ratio <= 1.0):
                raise ValueError(f"ratio outside [0, 1] at k={row.k}")
        return v


class DistributionCount(BaseModel):
    """#{n <= x : b_n <= threshold}; unresolved near-ties are counted on both sides"""
    x: int = Field(..., ge=1)
    threshold: float
    count: int = Field(..., ge=0)
    unresolved: int = Field(0, ge=0)

    @property
    def upper(self) -> int:
        return self.count + self.unresolved

    @property
    def ratio(self) -> float:
        return self.count / self.x


class SandwichCheck(BaseModel):
    k: int
    threshold: float
    shift: float  # p^-(k-1)
    sigma_star_below: float
    sigma: float
    sigma_star_above: float
    verdict: Verdict


class DistributionRow(BaseModel):
    k: int
    x: int
    alpha: float
    D_ratio: float
    L_empirical: float
    L_analytic: float
    L_err: float


class DistributionReport(BaseModel):
    system: str
    rows: List[DistributionRow]

    @field_validator('rows')
    def ratios_in_unit_interval(cls, v):
        for row in v:
            if not 0.0 <= row.D_ratio <= 1.0:
                raise ValueError(f"D ratio {row.D_ratio} outside [0, 1] at k={row.k}")
        return v


# ==================== Linear digit maps ====================

class BoundsResponse(BaseModel):
    m: str
    M: str
    s: int
    A: List[int]


class EnvelopeReport(BaseModel):
    k: int
    verdict: Verdict
    scanned: int
    top: CertifiedValue        # b at s^k
    top_exact: str
    bottom: CertifiedValue     # b at s^(k+1) - 1
    bottom_factor: str         # rational factor multiplying (p^(k+1)-1)/(s^(k+1)-1)^alpha
    closed_forms_match: Verdict


# ==================== Run configuration ====================

class RunConfig(BaseModel):
    """One CLI invocation: the system, the output and the budgets"""
    model_config = ConfigDict(frozen=True)

    system: Optional[CantorSystem] = None
    linear: Optional[LinearSystem] = None
    fmt: Literal["csv", "json"] = "csv"
    out: Optional[str] = None
    precision: Precision = Precision.DOUBLE
    cap_atoms: int = Field(..., gt=0)
    cap_scan: int = Field(..., gt=0)

    @model_validator(mode='after')
    def one_system_form(self):
        if self.system is not None and self.linear is not None:
            raise ValueError("give either a general system spec or a linear (q, r, p) spec, not both")
        return self

    def resolved_system(self) -> CantorSystem:
        if self.linear is not None:
            return self.linear.system()
        if self.system is None:
            raise ValueError("no system given; use --sys 'p=..;A=..' or --q/--r/--p")
        return self.system
