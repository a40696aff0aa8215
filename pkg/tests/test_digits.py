import numpy as np
import pytest
from hypothesis import given, strategies as st

from digits import (
    cantor_array, cantor_integer, cantor_range, digit_list, enumerate_by_filter, from_digits,
    is_cantor_integer, parse_system, to_digits, word_safe,
)
from errors import ValidationFailure
from models import CantorSystem, DigitString

SYSTEMS = [
    CantorSystem(p=3, A=(0, 2)),
    CantorSystem(p=3, A=(1, 2)),
    CantorSystem(p=4, A=(0, 2)),
    CantorSystem(p=5, A=(0, 1, 3)),
    CantorSystem(p=7, A=(0, 2, 4, 6)),
]

systems = st.sampled_from(SYSTEMS)


def test_to_digits_examples():
    assert to_digits(5, 2).digits == (1, 0, 1)
    assert to_digits(12, 2).digits == (1, 1, 0, 0)
    assert to_digits(0, 7).digits == ()


def test_to_digits_rejects_bad_input():
    with pytest.raises(ValidationFailure):
        to_digits(-1, 2)
    with pytest.raises(ValidationFailure):
        to_digits(5, 1)


@given(st.integers(min_value=0, max_value=10 ** 30), st.integers(min_value=2, max_value=36))
def test_digits_inverse(n, base):
    assert from_digits(to_digits(n, base)) == n


def test_digit_string_rejects_leading_zero():
    with pytest.raises(ValueError):
        DigitString(base=2, digits=(0, 1))


def test_cantor_integer_examples():
    middle = CantorSystem(p=3, A=(0, 2))
    assert cantor_integer(middle, 1) == 2
    assert cantor_integer(middle, 3) == 8
    assert cantor_integer(CantorSystem(p=3, A=(1, 2)), 2) == 7


def test_cantor_integer_is_one_indexed():
    middle = CantorSystem(p=3, A=(0, 2))
    with pytest.raises(ValidationFailure):
        cantor_integer(middle, 0)
    assert cantor_integer(middle, 0, allow_zero=True) == 0
    assert cantor_integer(CantorSystem(p=3, A=(1, 2)), 0, allow_zero=True) == 1


@given(systems, st.integers(min_value=1, max_value=10 ** 6), st.data())
def test_recursion(sys, n, data):
    i = data.draw(st.integers(min_value=0, max_value=sys.s - 1))
    assert cantor_integer(sys, sys.s * n + i) == sys.p * cantor_integer(sys, n) + sys.h(i)


@given(systems, st.integers(min_value=1, max_value=10 ** 9))
def test_digits_lie_in_digit_set(sys, n):
    assert set(digit_list(cantor_integer(sys, n), sys.p)) <= set(sys.A)


@given(systems, st.integers(min_value=1, max_value=10 ** 6))
def test_strictly_increasing(sys, n):
    assert cantor_integer(sys, n + 1) > cantor_integer(sys, n)


def test_is_cantor_integer_examples():
    middle = CantorSystem(p=3, A=(0, 2))
    assert is_cantor_integer(middle, 6) == (True, 2)
    assert is_cantor_integer(middle, 8) == (True, 3)
    assert is_cantor_integer(middle, 5)[0] is False
    assert is_cantor_integer(middle, 0) == (True, None)


def test_is_cantor_integer_top_digit_h0():
    shifted = CantorSystem(p=3, A=(1, 2))
    # 4 = 11 in base 3 starts with h(0): it passes the digit test but is no a_n
    assert is_cantor_integer(shifted, 4) == (True, None)
    assert is_cantor_integer(shifted, 7) == (True, 2)
    assert is_cantor_integer(shifted, 0) == (False, None)


@given(systems, st.integers(min_value=1, max_value=10 ** 6))
def test_is_cantor_integer_recovers_index(sys, n):
    assert is_cantor_integer(sys, cantor_integer(sys, n)) == (True, n)


def test_filter_examples():
    assert enumerate_by_filter(CantorSystem(p=3, A=(0, 2)), 10) == [2, 6, 8]
    assert enumerate_by_filter(CantorSystem(p=3, A=(1, 2)), 8) == [1, 2, 4, 5, 7, 8]
    assert enumerate_by_filter(CantorSystem(p=4, A=(0, 2)), 11) == [2, 8, 10]
    assert enumerate_by_filter(CantorSystem(p=3, A=(0, 2)), 0) == []


@pytest.mark.parametrize("sys", [s for s in SYSTEMS if s.h(0) == 0])
def test_filter_matches_recursion(sys):
    direct = cantor_range(sys, 1, 3001)
    assert enumerate_by_filter(sys, direct[-1]) == direct


def test_range_without_zero_digit():
    shifted = CantorSystem(p=3, A=(1, 2))
    assert cantor_range(shifted, 1, 8) == [2, 7, 8, 22, 23, 25, 26]
    assert cantor_range(shifted, 1, 500) == [cantor_integer(shifted, n) for n in range(1, 500)]


def test_filter_is_superset_without_zero_digit():
    # the filter also admits strings led by h(0), which no index produces
    shifted = CantorSystem(p=3, A=(1, 2))
    direct = cantor_range(shifted, 1, 200)
    filtered = enumerate_by_filter(shifted, direct[-1])
    assert set(direct) <= set(filtered)
    extra = set(filtered) - set(direct)
    assert 1 in extra and 4 in extra
    assert all(digit_list(m, 3)[0] == shifted.h(0) for m in extra)


@pytest.mark.parametrize("sys", SYSTEMS)
def test_range_and_array_agree(sys):
    start, stop = 17, 2000
    expected = [cantor_integer(sys, n) for n in range(start, stop)]
    assert cantor_range(sys, start, stop) == expected
    assert cantor_array(sys, start, stop).tolist() == expected


def test_word_safe():
    middle = CantorSystem(p=3, A=(0, 2))
    assert word_safe(middle, 2 ** 20)
    assert not word_safe(middle, 2 ** 40)


def test_parse_system():
    assert parse_system("p=3;A=0,2") == CantorSystem(p=3, A=(0, 2))
    assert parse_system(" p = 5 ; A = 0, 1, 3 ") == CantorSystem(p=5, A=(0, 1, 3))


@pytest.mark.parametrize("text", [
    "p=3;A=2,0",
    "p=3;A=0,1,2",
    "p=3;A=0,3",
    "p=3;A=1",
    "p=2;A=0,1",
    "A=0,2",
    "",
])
def test_parse_system_rejects(text):
    with pytest.raises(ValidationFailure):
        parse_system(text)


FULL_SIZE = 10 ** 5
ZERO_DIGIT_SYSTEMS = [
    CantorSystem(p=3, A=(0, 2)),
    CantorSystem(p=5, A=(0, 1, 3)),
    CantorSystem(p=5, A=(0, 2, 4)),
    CantorSystem(p=7, A=(0, 2, 4, 6)),
]


@pytest.mark.slow
@pytest.mark.parametrize("sys", ZERO_DIGIT_SYSTEMS)
def test_filter_matches_recursion_at_full_size(sys):
    direct = cantor_range(sys, 1, FULL_SIZE + 1)
    assert direct == cantor_array(sys, 1, FULL_SIZE + 1).tolist()
    assert enumerate_by_filter(sys, direct[-1]) == direct


@pytest.mark.slow
@pytest.mark.parametrize("sys", SYSTEMS)
def test_recursion_at_full_size(sys):
    s = sys.s
    parents = cantor_array(sys, 1, FULL_SIZE + 1)
    children = cantor_array(sys, s, s * (FULL_SIZE + 1)).reshape(FULL_SIZE, s)
    h = np.asarray(sys.A, dtype=np.int64)
    assert np.array_equal(children, sys.p * parents[:, None] + h[None, :])
