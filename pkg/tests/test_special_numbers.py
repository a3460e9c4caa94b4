import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction as F

import pytest

from rrhsim import special_numbers as sn


def test_eulerian_base_cases():
    assert sn.eulerian(0, 0) == 1
    assert sn.eulerian(2, 0) == 1
    assert sn.eulerian(2, 1) == 1
    assert sn.eulerian_row(3) == (1, 4, 1)


def test_eulerian_out_of_support_is_zero():
    assert sn.eulerian(5, -1) == 0
    assert sn.eulerian(5, 5) == 0
    assert sn.eulerian(0, 1) == 0
    with pytest.raises(ValueError):
        sn.eulerian(-1, 0)


def test_eulerian_second_column_closed_form():
    for n in range(1, 11):
        assert sn.eulerian(n, 1) == 2**n - n - 1


def test_eulerian_row_sums_are_factorials():
    for n in range(61):
        assert sum(sn.eulerian_row(n)) == math.factorial(n)


def test_eulerian_mirror_symmetry():
    for n in range(1, 61):
        row = sn.eulerian_row(n)
        for m in range(n):
            assert row[m] == row[n - 1 - m]


def test_eulerian_bernoulli_identity_alternating_sum():
    # sum_m (-1)^m <n,m> = 2^(n+1) (2^(n+1)-1) B_{n+1}/(n+1), n >= 0
    for n in range(41):
        lhs = sum((-1) ** m * sn.eulerian(n, m) for m in range(max(n, 1)))
        rhs = F(2 ** (n + 1) * (2 ** (n + 1) - 1)) * sn.bernoulli(n + 1) / (n + 1)
        assert lhs == rhs


def test_eulerian_bernoulli_identity_binomial_weighted():
    # sum_m (-1)^m <n,m> / C(n,m) = (n+1) B_n, n >= 0 (needs B1 = +1/2)
    for n in range(41):
        lhs = sum(
            F((-1) ** m * sn.eulerian(n, m), sn.binomial(n, m))
            for m in range(max(n, 1))
        )
        assert lhs == (n + 1) * sn.bernoulli(n)


def test_stirling_extremal_columns():
    for n in range(1, 30):
        assert sn.stirling_first(n, 1) == math.factorial(n - 1)
        assert sn.stirling_first(n, n) == 1
    for n in range(2, 30):
        assert sn.stirling_first(n, 2) == math.factorial(n - 1) * sn.harmonic(n - 1)
        assert sn.stirling_first(n, n - 1) == sn.binomial(n, 2)


def test_stirling_row_sums_are_factorials():
    for n in range(61):
        assert sum(sn.stirling1_row(n)) == math.factorial(n)


def test_stirling_out_of_support_is_zero():
    assert sn.stirling_first(4, -1) == 0
    assert sn.stirling_first(4, 5) == 0


def test_bernoulli_convention_and_values():
    assert sn.bernoulli(0) == 1
    assert sn.bernoulli(1) == F(1, 2)
    assert sn.bernoulli(2) == F(1, 6)
    for p in range(3, 40, 2):
        assert sn.bernoulli(p) == 0
    # B2/2 * N must reproduce the variance N/12 of the degree-one count
    assert sn.bernoulli(2) / 2 == F(1, 12)
    assert sn.bernoulli(12) == F(-691, 2730)


def test_harmonic():
    assert sn.harmonic(3) == F(11, 6)
    assert sn.harmonic(0, 5) == 0
    assert sn.harmonic(4, 2) == F(205, 144)
    assert sn.harmonic(10) - sn.harmonic(9) == F(1, 10)
    with pytest.raises(ValueError):
        sn.harmonic(3, 0)


def test_binomial():
    assert sn.binomial(5, 2) == 10
    assert sn.binomial(7, 0) == 1
    assert sn.binomial(7, 3) == 35
    assert sn.binomial(7, 8) == 0
    assert sn.binomial(7, -1) == 0


def _close_in_log(logval, exact):
    # |delta log| ~ relative error of the value itself
    return abs(logval - math.log(exact)) < 1e-12 * max(1.0, abs(math.log(exact)))


@pytest.mark.parametrize("n", [1, 2, 10, 150, 400])
def test_log_eulerian_matches_exact(n):
    for m in range(0, n, max(1, n // 7)):
        assert _close_in_log(sn.log_eulerian(n, m), sn.eulerian(n, m))


@pytest.mark.parametrize("n", [1, 2, 10, 150, 400])
def test_log_stirling_matches_exact(n):
    for k in range(1, n + 1, max(1, n // 7)):
        assert _close_in_log(sn.log_stirling_first(n, k), sn.stirling_first(n, k))


def test_log_space_zeros_are_neg_inf():
    assert sn.log_eulerian(5, 5) == float("-inf")
    assert sn.log_stirling_first(5, 0) == float("-inf")


def test_rising_factorial():
    assert sn.rising_factorial(F(1, 2), 3) == F(1, 2) * F(3, 2) * F(5, 2)
    assert sn.rising_factorial(F(0), 4) == 0
    assert sn.rising_factorial(F(3), 0) == 1


def test_concurrent_readers_get_identical_rows():
    def work(i):
        return (
            sn.eulerian_row(120 + i % 3),
            sn.stirling1_row(120 + i % 3),
            sn.bernoulli(40 + i % 3),
            sn.harmonic(200 + i % 3),
        )

    with ThreadPoolExecutor(max_workers=8) as pool:
        results = list(pool.map(work, range(64)))
    for i, res in enumerate(results):
        assert res == work(i)
