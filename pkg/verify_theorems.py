#!/usr/bin/env python3
"""
Run the desk-scale checks of every module and report SUCCESS / ERROR per check
"""
import sys
from fractions import Fraction

import digits
import distribution
import limitfn
import linearcase
import measure
import sequence
from errors import CantorError
from models import CantorSystem, LinearSystem, Verdict

MIDDLE_THIRD = CantorSystem(p=3, A=(0, 2))


def check_bounds():
    for q, r, p in [(2, 0, 3), (2, 0, 4), (1, 1, 3), (2, 1, 7)]:
        ls = LinearSystem(q=q, r=r, p=p)
        m, M = linearcase.exact_bounds(ls)
        verdict = linearcase.check_global_bounds(ls, 10 ** 4)
        if verdict != Verdict.TRUE:
            return False, f"(q={q}, r={r}, p={p}): b_n outside [{m}, {M}]"
    return True, "every b_n with n <= 10^4 lies in [m, M] for four linear systems"


def check_filter():
    for sys in [MIDDLE_THIRD, CantorSystem(p=4, A=(0, 2)), CantorSystem(p=5, A=(0, 1, 3))]:
        direct = digits.cantor_range(sys, 1, 2001)
        filtered = digits.enumerate_by_filter(sys, direct[-1])
        if filtered != direct:
            return False, f"digit filter disagrees with the recursion for {sys.spec_string}"
    return True, "digit filter matches the recursion on the first 2000 terms"


def check_lambda():
    x = limitfn.parse_sary("3/4", 2)
    value = limitfn.lambda_value(MIDDLE_THIRD, x)
    limit = measure.accumulation_map(MIDDLE_THIRD, measure.parse_cantor_point(MIDDLE_THIRD, "0.22"))
    if abs(value.value - limit.value) > value.abs_error + limit.abs_error:
        return False, f"lambda(3/4) = {value} differs from the accumulation value {limit}"
    return True, f"lambda(3/4) = {value} equals the accumulation value at 0.22 (base 3)"


def check_measure():
    for x in [Fraction(1, 2), Fraction(2, 3), Fraction(5, 7)]:
        for i, shift in enumerate(MIDDLE_THIRD.A):
            image = (x + shift) / MIDDLE_THIRD.p
            lhs = measure.mu_cdf(MIDDLE_THIRD, image)
            rhs = (i + measure.mu_cdf(MIDDLE_THIRD, x).value) / MIDDLE_THIRD.s
            if abs(lhs.value - rhs) > 1e-15:
                return False, f"self-similarity of the staircase fails at x={x}, i={i}"
    return True, "staircase satisfies mu([0, S_i(x)]) = (i + mu([0, x]))/s"


def check_density():
    report = sequence.density_subsequence(MIDDLE_THIRD, Fraction(3, 2), 20)
    last = report.steps[-1]
    if abs(last.distance) > 1e-3:
        return False, f"b at n_20 = {last.b_n} is still far from 3/2"
    return True, f"b at n_20 = {last.n} is {last.b_n.value:.9f}"


def check_sandwich():
    check = distribution.check_sandwich(MIDDLE_THIRD, 10, Fraction(3, 2))
    if check.verdict != Verdict.TRUE:
        return False, f"sandwich at k=10: {check.verdict.value}"
    return True, (f"sigma*(t-) = {check.sigma_star_below:.6f} <= sigma = {check.sigma:.6f}"
                  f" <= sigma*(t+) = {check.sigma_star_above:.6f}")


CHECKS = [
    ("linear extrema", check_bounds),
    ("digit filter", check_filter),
    ("limit function", check_lambda),
    ("self-similar measure", check_measure),
    ("density subsequence", check_density),
    ("logarithmic sandwich", check_sandwich),
]


def run_checks() -> bool:
    print("Running desk-scale checks...")
    ok = True
    for name, check in CHECKS:
        try:
            passed, detail = check()
        except CantorError as e:
            passed, detail = False, e.detail
        if passed:
            print(f"SUCCESS: {name}: {detail}")
        else:
            print(f"ERROR: {name}: {detail}")
            ok = False
    return ok


if __name__ == "__main__":
    sys.exit(0 if run_checks() else 1)
