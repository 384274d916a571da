import math
from fractions import Fraction

import numpy as np
import pytest

from cantornet.errors import ParameterError
from cantornet.fibodelta import (
    compute_delta,
    fib_digit,
    fib_prefix_morphism,
    fib_word,
    floor_phi_multiple,
)

# Printed prefix of the word (51 digits).
PRINTED_PREFIX = "010010100100101001010010010100100101001010010010100"


def test_first_digits():
    assert fib_digit(0) == 0
    assert fib_digit(1) == 1
    assert "".join(str(fib_digit(i)) for i in range(16)) == "0100101001001010"
    assert "".join(map(str, fib_word(len(PRINTED_PREFIX)))) == PRINTED_PREFIX


def test_negative_index_rejected():
    with pytest.raises(ParameterError):
        fib_digit(-1)


def test_floor_against_decimal_phi():
    from decimal import Decimal, getcontext

    getcontext().prec = 60
    phi = (1 + Decimal(5).sqrt()) / 2
    for m in list(range(200)) + [10**6, 10**12 + 7, 2**60 + 3]:
        assert floor_phi_multiple(m) == int((m * phi).to_integral_value(rounding="ROUND_FLOOR"))


def test_huge_index_is_exact():
    # Digits satisfy the Sturmian recurrence at any scale: w_i = 1 iff floor grows by 1.
    i = 10**30
    d = fib_digit(i)
    assert d in (0, 1)
    assert d == 2 + floor_phi_multiple(i + 1) - floor_phi_multiple(i + 2)


def test_morphism_small():
    assert str(fib_prefix_morphism(5)) == "01001"
    assert str(fib_prefix_morphism(1)) == "0"
    assert fib_prefix_morphism(16).digits.tolist() == [fib_digit(i) for i in range(16)]


def test_morphism_matches_floor_formula():
    n = 100_000
    assert np.array_equal(fib_prefix_morphism(n).digits, fib_word(n))


def test_delta_small_K():
    d = compute_delta(2)
    assert d.delta == 0.625
    assert d.tail_bound == 0.125
    assert d.theta == 2 * (1 - 0.625)


def exact_delta(K):
    return Fraction(1, 2) + Fraction(1, 4) * sum(Fraction(fib_digit(k), 2**k) for k in range(K))


def test_delta_64_against_rational_oracle():
    d = compute_delta(64)
    exact = exact_delta(64)
    assert abs(Fraction(d.delta) - exact) <= Fraction(math.ulp(d.delta))
    assert d.delta == pytest.approx(0.6450982786, abs=1e-10)
    assert d.theta == pytest.approx(0.7098034429, abs=1e-10)
    assert d.tail_bound <= 2.0**-64


def test_delta_single_term():
    # w_0 = 0, so one term leaves delta at 1/2 (theta = 1)
    d = compute_delta(1)
    assert d.delta == 0.5 and d.theta == 1.0


@pytest.mark.parametrize("K", [2, 3, 5, 10, 30, 64, 200])
def test_delta_bounds_and_theta_identity(K):
    d = compute_delta(K)
    assert 0.625 <= d.delta < 0.75
    assert d.theta == 2.0 * (1.0 - d.delta)
    assert 0.5 < d.theta <= 0.75
    assert d.tail_bound <= 0.25 * 2.0 ** -(K - 1)


def test_delta_monotone_with_bounded_increments():
    prev = compute_delta(1)
    for K in range(2, 80):
        cur = compute_delta(K)
        assert cur.delta >= prev.delta
        assert cur.delta - prev.delta <= prev.tail_bound
        prev = cur


def test_digit_one_frequency():
    N = 100_000
    ones = int(fib_word(N).sum())
    assert abs(ones / N - math.floor(N * (2 - (1 + 5**0.5) / 2)) / N) <= 2 / N
