import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import limitfn
import sequence
from errors import ValidationFailure
from models import CantorSystem, ContinuityVerdict, Precision, SAryReal, Side

MIDDLE_THIRD = CantorSystem(p=3, A=(0, 2))
SHIFTED_THIRD = CantorSystem(p=3, A=(1, 2))
SYSTEMS = [MIDDLE_THIRD, SHIFTED_THIRD, CantorSystem(p=5, A=(0, 1, 3))]


def test_parse_sary():
    assert limitfn.parse_sary("0.1", 2).to_fraction() == Fraction(1, 2)
    assert limitfn.parse_sary("3/4", 2).to_fraction() == Fraction(3, 4)
    assert limitfn.parse_sary("0.(01)", 2).to_fraction() == Fraction(1, 3)
    assert limitfn.parse_sary("10.1", 3).to_fraction() == Fraction(10, 3)


@pytest.mark.parametrize("text", ["0.2", "1/0", "x", "0.1(", ""])
def test_parse_sary_rejects(text):
    with pytest.raises(ValidationFailure):
        limitfn.parse_sary(text, 2)


def test_phi_examples():
    assert limitfn.phi_exact(MIDDLE_THIRD, limitfn.parse_sary("0.1", 2)) == Fraction(2, 3)
    assert limitfn.phi_exact(MIDDLE_THIRD, limitfn.parse_sary("0.11", 2)) == Fraction(8, 9)
    assert limitfn.phi_exact(SHIFTED_THIRD, limitfn.parse_sary("1", 2)) == Fraction(1, 2)
    assert limitfn.phi(MIDDLE_THIRD, limitfn.parse_sary("0.1", 2)).contains(Fraction(2, 3))


def test_phi_partial_encloses_phi():
    x = limitfn.parse_sary("0.(011)", 2)
    exact = limitfn.phi_exact(MIDDLE_THIRD, x)
    for K in (1, 5, 30):
        assert limitfn.phi_partial(MIDDLE_THIRD, x, K).contains(exact)


def test_phi_requires_matching_base():
    with pytest.raises(ValidationFailure):
        limitfn.phi_exact(MIDDLE_THIRD, limitfn.parse_sary("0.1", 3))


def test_lambda_examples():
    assert limitfn.lambda_value(MIDDLE_THIRD, limitfn.parse_sary("1/2", 2)).contains(2)
    three_quarters = limitfn.lambda_value(MIDDLE_THIRD, limitfn.parse_sary("3/4", 2))
    assert three_quarters.value == pytest.approx(1.40245, abs=1e-4)
    assert abs(three_quarters.value - sequence.b(MIDDLE_THIRD, 3).value) <= 1e-12
    assert limitfn.lambda_value(SHIFTED_THIRD, limitfn.parse_sary("1", 2)).contains(Fraction(5, 2))


def test_lambda_rejects_zero():
    with pytest.raises(ValidationFailure):
        limitfn.lambda_value(MIDDLE_THIRD, limitfn.parse_sary("0", 2))


def test_lambda_meets_tolerance():
    x = limitfn.parse_sary("0.(0110)", 2)
    assert limitfn.lambda_value(MIDDLE_THIRD, x, tol=1e-13).abs_error <= 1e-13


def test_lambda_below_float_resolution():
    # the interval tier answers; the bound cannot shrink past the float spacing
    x = limitfn.parse_sary("0.(0110)", 2)
    result = limitfn.lambda_value(MIDDLE_THIRD, x, tol=1e-40)
    assert result.abs_error <= 2 * math.ulp(result.value)
    assert result.contains(limitfn.lambda_value(MIDDLE_THIRD, x, precision=Precision.HIGH).value)


@pytest.mark.parametrize("sys", SYSTEMS)
@given(x=st.fractions(min_value=Fraction(1, 2), max_value=4, max_denominator=200))
def test_lambda_scale_invariance(sys, x):
    inner = limitfn.lambda_value(sys, SAryReal.from_fraction(x, sys.s))
    outer = limitfn.lambda_value(sys, SAryReal.from_fraction(sys.s * x, sys.s))
    assert abs(inner.value - outer.value) <= inner.abs_error + outer.abs_error


@pytest.mark.parametrize("sys", SYSTEMS)
@given(n=st.integers(min_value=1, max_value=10 ** 6))
def test_lambda_matches_b_when_zero_digit_allowed(sys, n):
    value = limitfn.lambda_value(sys, SAryReal(base=sys.s, integer_part=n))
    term = sequence.b(sys, n)
    gap = value.value - term.value
    if sys.h(0) == 0:
        assert abs(gap) <= value.abs_error + term.abs_error
    else:
        assert gap > 0


@pytest.mark.parametrize("sys", SYSTEMS)
@given(x=st.fractions(min_value=Fraction(1, 2), max_value=1, max_denominator=200),
       k=st.integers(min_value=1, max_value=25))
def test_truncation_bound(sys, x, k):
    point = SAryReal.from_fraction(x, sys.s)
    estimate = limitfn.lambda_truncation_error(sys, point, k)
    value = limitfn.lambda_value(sys, point)
    assert value.value - estimate.approx <= estimate.bound + value.abs_error + 1e-12
    assert estimate.approx <= value.value + value.abs_error + 1e-12


def test_truncation_bound_example():
    estimate = limitfn.lambda_truncation_error(SHIFTED_THIRD, limitfn.parse_sary("1/2", 2), 5)
    assert estimate.bound == pytest.approx(3.0 ** -4, rel=1e-12)


def test_left_jump_and_limit():
    half = limitfn.parse_sary("0.1", 2)
    # phi drops by (2 - 1)/3 just left of 1/2
    assert limitfn.left_jump(MIDDLE_THIRD, half) == Fraction(1, 3)
    assert limitfn.left_limit(MIDDLE_THIRD, half).contains(1)
    assert limitfn.left_jump(MIDDLE_THIRD, limitfn.parse_sary("0.(01)", 2)) == 0
    assert limitfn.left_jump(CantorSystem(p=4, A=(0, 2, 3)), limitfn.parse_sary("0.2", 3)) == 0


def test_predicted_continuity():
    half = limitfn.parse_sary("0.1", 2)
    assert limitfn.predicted_continuity(MIDDLE_THIRD, half, Side.LEFT) == ContinuityVerdict.JUMP
    assert limitfn.predicted_continuity(MIDDLE_THIRD, half, Side.RIGHT) == ContinuityVerdict.CONTINUOUS
    assert limitfn.predicted_continuity(SHIFTED_THIRD, half, Side.LEFT) == ContinuityVerdict.JUMP


def test_probe_finds_left_jump():
    half = limitfn.parse_sary("0.1", 2)
    for sys in (MIDDLE_THIRD, SHIFTED_THIRD):
        report = limitfn.continuity_probe(sys, half, Side.LEFT)
        assert report.verdict == ContinuityVerdict.JUMP == report.predicted
        assert report.jump_lower_bound > 0.4


def test_probe_right_continuity():
    report = limitfn.continuity_probe(MIDDLE_THIRD, limitfn.parse_sary("0.1", 2), Side.RIGHT)
    assert report.verdict == ContinuityVerdict.CONTINUOUS


def test_probe_left_continuity_when_jump_vanishes():
    sys = CantorSystem(p=4, A=(0, 2, 3))
    report = limitfn.continuity_probe(sys, limitfn.parse_sary("0.2", 3), Side.LEFT, depth=10)
    assert report.verdict == ContinuityVerdict.CONTINUOUS == report.predicted


def test_probe_rejects_points_outside_unit_block():
    with pytest.raises(ValidationFailure):
        limitfn.continuity_probe(MIDDLE_THIRD, limitfn.parse_sary("0.01", 2), Side.LEFT)
    with pytest.raises(ValidationFailure):
        limitfn.continuity_probe(MIDDLE_THIRD, limitfn.parse_sary("1.1", 2), Side.LEFT)


def test_grid_examples():
    (only,) = limitfn.grid_lambda(MIDDLE_THIRD, 1)
    assert only.n == 1 and only.value.contains(2)
    second = limitfn.grid_lambda(MIDDLE_THIRD, 2)
    assert [g.n for g in second] == [2, 3]
    assert second[0].value.contains(2)
    assert second[1].value.value == pytest.approx(1.40245, abs=1e-4)
    assert limitfn.grid_lambda(SHIFTED_THIRD, 1)[0].value.contains(Fraction(5, 2))


@pytest.mark.parametrize("sys", SYSTEMS)
def test_grid_matches_exact_evaluation(sys):
    fast = limitfn.grid_lambda(sys, 6)
    exact = limitfn.grid_lambda_exact(sys, 6)
    for a, b in zip(fast, exact):
        assert a.n == b.n
        assert abs(a.value.value - b.value.value) <= a.value.abs_error + b.value.abs_error


def test_grid_point_equals_lambda_at_scaled_point():
    k = 5
    for point in limitfn.grid_lambda(SHIFTED_THIRD, k)[::5]:
        x = SAryReal.from_fraction(Fraction(point.n, 2 ** k), 2)
        value = limitfn.lambda_value(SHIFTED_THIRD, x)
        assert abs(value.value - point.value.value) <= value.abs_error + point.value.abs_error


@pytest.mark.parametrize("sys", SYSTEMS)
def test_cell_bounds_enclose_lambda(sys):
    start, stop = sys.s ** 5, sys.s ** 6
    low, high = limitfn.cell_bounds(sys, start, stop)
    for j in range(0, stop - start, 7):
        n = start + j
        for offset in (Fraction(0), Fraction(1, 3), Fraction(7, 8)):
            x = SAryReal.from_fraction(n + offset, sys.s)
            value = limitfn.lambda_value(sys, x)
            assert low[j] <= value.value <= high[j]


def test_lambda_range_windows():
    below = limitfn.lambda_range(MIDDLE_THIRD, Fraction(7, 10), Fraction(49, 50))
    above = limitfn.lambda_range(MIDDLE_THIRD, Fraction(1, 2), Fraction(61, 100))
    assert below[1] < 1.5
    assert above[0] > 1.5
    assert below[1] == pytest.approx(1.40245, abs=1e-3)


def test_continuous_witness():
    x, value, term = limitfn.continuous_witness(MIDDLE_THIRD, Fraction(3, 2), K=20)
    assert x.repeat
    assert abs(value.value - 1.5) < 1e-3
    assert abs(value.value - term.value) < 1e-3
