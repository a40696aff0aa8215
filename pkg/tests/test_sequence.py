from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

import sequence
from config import settings
from errors import BudgetExceeded, ValidationFailure
from models import CantorSystem, Comparison, Precision, Verdict

MIDDLE_THIRD = CantorSystem(p=3, A=(0, 2))
SHIFTED_THIRD = CantorSystem(p=3, A=(1, 2))
SYSTEMS = [MIDDLE_THIRD, SHIFTED_THIRD, CantorSystem(p=5, A=(0, 1, 3)), CantorSystem(p=7, A=(0, 2, 4, 6))]


def test_b_examples():
    assert sequence.b(MIDDLE_THIRD, 2).contains(2)
    assert sequence.b(MIDDLE_THIRD, 1).contains(2)
    assert sequence.b(MIDDLE_THIRD, 7).value == pytest.approx(1.18987, abs=1e-4)
    assert sequence.b(SHIFTED_THIRD, 2).contains(Fraction(7, 3))


def test_b_rejects_zero_index():
    with pytest.raises(ValidationFailure):
        sequence.b(MIDDLE_THIRD, 0)


def test_b_relative_error():
    for n in (3, 10 ** 6 + 3, 2 ** 200 + 1):
        value = sequence.b(MIDDLE_THIRD, n)
        assert value.abs_error <= sequence.REL_TOL * value.value


def test_mantissas():
    assert sequence.mantissas(MIDDLE_THIRD, 5) == (Fraction(20, 9), Fraction(5, 4))


@pytest.mark.parametrize("sys", SYSTEMS)
@given(n=st.integers(min_value=1, max_value=10 ** 12))
def test_growth_mantissas(sys, n):
    assert sequence.check_growth(sys, n)


@given(st.integers(min_value=1, max_value=10 ** 9))
def test_scale_invariance_iff_zero_digit(n):
    assert sequence.compare_terms(MIDDLE_THIRD, 2 * n, n) == Comparison.EQUAL
    assert sequence.compare_terms(SHIFTED_THIRD, 2 * n, n) != Comparison.EQUAL


@pytest.mark.parametrize("sys", SYSTEMS)
def test_batch_agrees_with_single_terms(sys):
    batch = sequence.b_batch(sys, 1, 3000)
    for n in (1, 2, 17, 1000, 2999):
        single = sequence.b(sys, n)
        j = n - 1
        assert batch.a[j] == sequence.term(sys, n).a_n
        assert abs(batch.value[j] - single.value) <= batch.error[j] + single.abs_error


def test_batch_beyond_machine_words():
    start = 2 ** 40
    batch = sequence.b_batch(MIDDLE_THIRD, start, start + 3)
    assert batch.n.tolist() == [start, start + 1, start + 2]
    assert batch.value[0] == pytest.approx(2.0)


def test_iter_terms_streams_in_order():
    terms = list(sequence.iter_terms(MIDDLE_THIRD, 1, 11))
    assert [t.n for t in terms] == list(range(1, 11))
    assert [t.a_n for t in terms[:3]] == [2, 6, 8]
    assert list(sequence.iter_terms(MIDDLE_THIRD, 1, 1)) == []


def test_iter_terms_honours_high_precision():
    double = list(sequence.iter_terms(MIDDLE_THIRD, 1, 20, Precision.DOUBLE))
    high = list(sequence.iter_terms(MIDDLE_THIRD, 1, 20, Precision.HIGH))
    assert [t.a_n for t in high] == [t.a_n for t in double]
    for d, h in zip(double, high):
        assert abs(d.b_n.value - h.b_n.value) <= d.b_n.abs_error + h.b_n.abs_error
        assert h.b_n == sequence.b(MIDDLE_THIRD, h.n, Precision.HIGH)


def test_scan_extrema_middle_third():
    report = sequence.scan_extrema(MIDDLE_THIRD, 7)
    assert report.min_n == 7
    assert report.max_n == 1
    assert report.max_value.contains(2)
    assert report.exact_m == "1" and report.exact_M == "2"
    assert report.max_attained and not report.min_attained


def test_scan_extrema_shifted_third():
    report = sequence.scan_extrema(SHIFTED_THIRD, 2)
    assert report.max_n == 2
    assert report.max_value.contains(Fraction(7, 3))
    assert not report.max_attained


def test_scan_extrema_respects_budget():
    settings.SCAN_CAP = 10
    with pytest.raises(BudgetExceeded):
        sequence.scan_extrema(MIDDLE_THIRD, 11)


def test_descent_examples():
    assert sequence.check_descent(MIDDLE_THIRD, 1) == Verdict.TRUE
    assert sequence.check_descent(MIDDLE_THIRD, 3) == Verdict.TRUE


def test_descent_holds_from_the_start_for_middle_third():
    assert set(sequence.descent_verdicts(MIDDLE_THIRD, 1, 500)) == {Verdict.TRUE}
    assert sequence.discover_descent_threshold(MIDDLE_THIRD, limit=500) == 0


def test_descent_report_rows():
    report = sequence.descent_report(MIDDLE_THIRD, 5, limit=64)
    assert [row.n for row in report.rows] == [1, 2, 3, 4, 5]
    assert report.threshold == 0


def test_descent_tail_limit():
    limit = sequence.descent_tail_limit(MIDDLE_THIRD, 1)
    assert limit.contains(1)
    # b at 2**20 * 1 + 2**20 - 1 approaches it
    assert abs(sequence.b(MIDDLE_THIRD, 2 ** 21 - 1).value - limit.value) < 1e-5


def test_prop_m():
    assert sequence.check_prop_m(MIDDLE_THIRD, 1, 2) == Verdict.TRUE
    assert sequence.check_prop_m(MIDDLE_THIRD, 5, 3) == Verdict.TRUE
    with pytest.raises(ValidationFailure):
        sequence.check_prop_m(MIDDLE_THIRD, 1, 1)


def test_find_crossing():
    assert sequence.find_crossing(MIDDLE_THIRD, Fraction(3, 2), 1) == 2


def test_density_subsequence_converges():
    report = sequence.density_subsequence(MIDDLE_THIRD, Fraction(3, 2), 20)
    assert len(report.steps) == 20
    assert abs(report.steps[-1].distance) <= 1e-3
    for step, following in zip(report.steps, report.steps[1:]):
        assert following.n // MIDDLE_THIRD.s == step.n
        slack = step.b_n.abs_error + following.b_n.abs_error
        assert abs(following.b_n.value - step.b_n.value) <= step.step_bound + slack


def test_density_subsequence_shifted_third():
    report = sequence.density_subsequence(SHIFTED_THIRD, 2, 25)
    assert abs(report.steps[-1].distance) <= 1e-3


def test_density_rejects_gamma_outside_range():
    with pytest.raises(ValidationFailure):
        sequence.density_subsequence(MIDDLE_THIRD, 2, 5)
    with pytest.raises(ValidationFailure):
        sequence.density_subsequence(MIDDLE_THIRD, Fraction(3, 2), 0)


@pytest.mark.slow
@pytest.mark.parametrize("sys", [MIDDLE_THIRD, SHIFTED_THIRD])
def test_density_grid(sys):
    m, M = sequence.observed_bounds(sys)
    low, high = m + Fraction(1, 100), M - Fraction(1, 100)
    for j in range(21):
        gamma = low + (high - low) * Fraction(j, 20)
        report = sequence.density_subsequence(sys, gamma, 30)
        assert abs(report.steps[-1].distance) <= 1e-3


@pytest.mark.slow
def test_descent_chain_past_threshold():
    threshold = sequence.discover_descent_threshold(SHIFTED_THIRD)
    verdicts = sequence.descent_verdicts(SHIFTED_THIRD, threshold + 1, 10 ** 5)
    assert set(verdicts) == {Verdict.TRUE}
    assert np.all(np.array(sequence.descent_verdicts(MIDDLE_THIRD, 1, 10 ** 5)) == Verdict.TRUE)
