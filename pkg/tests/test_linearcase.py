from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import linearcase
import sequence
from digits import cantor_integer
from errors import ValidationFailure
from models import CantorSystem, Comparison, DigitString, LinearSystem, Verdict

MIDDLE_THIRD = LinearSystem(q=2, r=0, p=3)
SHIFTED_THIRD = LinearSystem(q=1, r=1, p=3)
EVEN_SEVEN = LinearSystem(q=2, r=0, p=7)
ODD_SEVEN = LinearSystem(q=2, r=1, p=7)
SYSTEMS = [MIDDLE_THIRD, SHIFTED_THIRD, EVEN_SEVEN, ODD_SEVEN, LinearSystem(q=2, r=0, p=4)]


def test_exact_bounds_examples():
    assert linearcase.exact_bounds(MIDDLE_THIRD) == (1, 2)
    assert linearcase.exact_bounds(LinearSystem(q=2, r=0, p=4)) == (Fraction(2, 3), 2)
    assert linearcase.exact_bounds(SHIFTED_THIRD) == (1, Fraction(5, 2))
    assert linearcase.exact_bounds(ODD_SEVEN) == (Fraction(5, 6), Fraction(19, 6))


def test_bounds_response():
    response = linearcase.bounds_response(LinearSystem(q=2, r=0, p=4))
    assert response.model_dump() == {"m": "2/3", "M": "2", "s": 2, "A": [0, 2]}


@pytest.mark.parametrize("ls", [MIDDLE_THIRD, SHIFTED_THIRD, EVEN_SEVEN, ODD_SEVEN])
def test_global_bounds(ls):
    assert linearcase.check_global_bounds(ls, 10 ** 4) == Verdict.TRUE


@pytest.mark.parametrize("ls", SYSTEMS)
def test_linear_growth(ls):
    assert linearcase.check_linear_growth(ls, 10 ** 4) == Verdict.TRUE


def test_b_tilde_examples():
    assert linearcase.b_tilde_numerators(SHIFTED_THIRD, 2) == (3, 4)
    assert linearcase.b_tilde_numerators(SHIFTED_THIRD, 1) == (1, 1)
    tilde, correction = linearcase.b_tilde_decompose(SHIFTED_THIRD, 2)
    assert tilde.contains(1)
    assert correction.contains(Fraction(4, 3))


def test_b_tilde_without_remainder():
    tilde, correction = linearcase.b_tilde_decompose(MIDDLE_THIRD, 7)
    assert correction.value == 0.0
    assert abs(tilde.value - sequence.b(MIDDLE_THIRD.system(), 7).value) <= tilde.abs_error * 2


@pytest.mark.parametrize("ls", SYSTEMS)
@given(n=st.integers(min_value=1, max_value=10 ** 8))
def test_b_tilde_numerators_add_up(ls, n):
    tilde, correction = linearcase.b_tilde_numerators(ls, n)
    assert tilde + correction == cantor_integer(ls.system(), n)


def test_block_descent():
    prefix = DigitString(base=2, digits=(1,))
    assert linearcase.block_indices(MIDDLE_THIRD, prefix, 1) == [5, 7]
    assert linearcase.check_block_descent(MIDDLE_THIRD, prefix, 1) == Verdict.TRUE
    assert linearcase.check_block_descent(MIDDLE_THIRD, prefix, 0) == Verdict.TRUE


def test_block_descent_over_prefixes():
    for head in range(1, 40):
        prefix = DigitString(base=2, digits=tuple(int(c) for c in format(head, "b")))
        for l in range(0, 4):
            assert linearcase.check_block_descent(MIDDLE_THIRD, prefix, l) == Verdict.TRUE


def test_block_indices_rejects():
    with pytest.raises(ValidationFailure):
        linearcase.block_indices(MIDDLE_THIRD, DigitString(base=3, digits=(1,)), 1)
    with pytest.raises(ValidationFailure):
        linearcase.block_indices(MIDDLE_THIRD, DigitString(base=2), 1)
    with pytest.raises(ValidationFailure):
        linearcase.block_indices(MIDDLE_THIRD, DigitString(base=2, digits=(1,)), -1)


@pytest.mark.parametrize("ls", [MIDDLE_THIRD, SHIFTED_THIRD, ODD_SEVEN])
def test_scale_equality(ls):
    for n in range(1, 60):
        assert linearcase.check_scale_equality(ls, n) == Verdict.TRUE


def test_top_digit_min():
    for k in range(3):
        assert linearcase.check_top_digit_min(EVEN_SEVEN, k) == Verdict.TRUE
    # one candidate when s = 2
    assert linearcase.check_top_digit_min(MIDDLE_THIRD, 5) == Verdict.TRUE
    with pytest.raises(ValidationFailure):
        linearcase.check_top_digit_min(EVEN_SEVEN, -1)


def test_envelope_middle_third():
    report = linearcase.check_dyadic_envelope(MIDDLE_THIRD, 2)
    assert report.verdict == Verdict.TRUE
    assert report.closed_forms_match == Verdict.TRUE
    assert report.top.contains(2)
    assert report.top_exact == "2" and report.bottom_factor == "1"
    assert report.scanned == 4


def test_envelope_closed_forms():
    top, factor = linearcase.envelope_closed_forms(SHIFTED_THIRD, 3)
    assert top == Fraction(5, 2) - Fraction(1, 54)
    assert factor == 1
    report = linearcase.check_dyadic_envelope(SHIFTED_THIRD, 3)
    assert report.closed_forms_match == Verdict.TRUE
    assert report.top.contains(Fraction(67, 27))


@pytest.mark.parametrize("ls", [MIDDLE_THIRD, EVEN_SEVEN, ODD_SEVEN])
def test_envelope_rows(ls):
    rows = linearcase.envelope_rows(ls, 4)
    assert [row.k for row in rows] == list(range(5))
    if ls == MIDDLE_THIRD:
        assert all(row.verdict == Verdict.TRUE for row in rows)
    assert all(row.closed_forms_match == Verdict.TRUE for row in rows)


def test_envelope_tightness():
    sys = MIDDLE_THIRD.system()
    assert abs(sequence.b(sys, 2 ** 40).value - 2) < 1e-15
    assert abs(sequence.b(SHIFTED_THIRD.system(), 2 ** 40).value - 2.5) < 1e-15
    assert abs(sequence.b(sys, 2 ** 41 - 1).value - 1) < 1e-3


def test_envelope_monotone():
    tops = [linearcase.envelope_closed_forms(SHIFTED_THIRD, k)[0] for k in range(20)]
    assert all(a < b for a, b in zip(tops, tops[1:]))
    sys = MIDDLE_THIRD.system()
    for k in range(20):
        assert sequence.compare_terms(sys, 2 ** (k + 2) - 1, 2 ** (k + 1) - 1) == Comparison.LESS


def test_linear_system_of():
    assert linearcase.linear_system_of(CantorSystem(p=3, A=(0, 2))) == MIDDLE_THIRD
    with pytest.raises(ValidationFailure):
        linearcase.linear_system_of(CantorSystem(p=5, A=(0, 1, 3)))


@pytest.mark.slow
@pytest.mark.parametrize("ls", [MIDDLE_THIRD, SHIFTED_THIRD, EVEN_SEVEN, ODD_SEVEN])
def test_global_bounds_at_scale(ls):
    assert linearcase.check_global_bounds(ls, 10 ** 6) == Verdict.TRUE
