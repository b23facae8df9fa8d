from collections import Counter
from fractions import Fraction
from math import comb, floor

import pytest
from hypothesis import given, strategies as st

from alphapart.core import AlphaParams, g_values, max_length
from alphapart.exact import (
    BruteForceSizeError,
    MemoryBudgetError,
    brute_force_counts,
    build_count_table,
    distribution_summary,
    exact_moments,
    log_mgf_value,
    q_series,
    tail_probability,
)


def floor_power(a: int, p: int, q: int) -> int:
    k = 0
    while (k + 1) ** q <= a ** p:
        k += 1
    return k


def subset_oracle(p: int, q: int, n: int) -> Counter:
    """Count sets of distinct a with sum floor(a^(p/q)) = n, by size."""
    values = []
    a = 1
    while True:
        v = floor_power(a, p, q)
        if v > n:
            break
        if v >= 1:
            values.append(v)
        a += 1
    out = Counter()

    def walk(i, remaining, size):
        if remaining == 0:
            out[size] += 1
            return
        for t in range(i, len(values)):
            if values[t] > remaining:
                break
            walk(t + 1, remaining - values[t], size + 1)

    walk(0, n, 0)
    return out


@pytest.mark.parametrize("p,q,n", [(1, 2, 8), (1, 3, 5), (2, 3, 12), (7, 10, 12)])
def test_table_matches_subset_enumeration(p, q, n):
    params = AlphaParams.from_rational(p, q)
    table = build_count_table(params, n)
    for m in range(1, n + 1):
        oracle = subset_oracle(p, q, m)
        row = table.row(m)
        assert {j: c for j, c in enumerate(row) if c} == dict(oracle)


def test_small_values_half():
    params = AlphaParams.parse("1/2")
    table = build_count_table(params, 3)
    assert [table.q(n) for n in range(4)] == [1, 3, 8, 23]
    assert table.row(3) == [0, 7, 15, 1]
    assert brute_force_counts(params, 2) == [(1, 5), (2, 3)]
    m = exact_moments(params, 3)
    assert m.mean == Fraction(40, 23) and m.variance == Fraction(148, 529)


@pytest.mark.parametrize("alpha", ["1/2", "1/3", "2/3", "0.7"])
def test_series_table_brute_agree(alpha):
    params = AlphaParams.parse(alpha)
    table = build_count_table(params, 18)
    q = q_series(params, 18)
    for n in range(1, 19):
        assert table.q(n) == q[n]
        assert [(j, c) for j, c in enumerate(table.row(n)) if c] == brute_force_counts(params, n)
    assert not any(table.overflow_column)


@given(n=st.integers(1, 40), alpha=st.sampled_from(["1/2", "2/3", "3/4", "0.55"]))
def test_single_part_and_longest(n, alpha):
    params = AlphaParams.parse(alpha)
    table = build_count_table(params, n)
    row = table.row(n)
    assert row[1] == g_values(params, n)[n - 1]
    assert max(j for j, c in enumerate(row) if c) == max_length(params, n)
    assert row[0] == 0


@given(n=st.integers(2, 60))
def test_moments_consistent(n):
    params = AlphaParams.parse("1/2")
    table = build_count_table(params, n)
    s = distribution_summary(table, n)
    m = exact_moments(params, n)
    assert s.q_n == m.q_n and s.mean == m.mean and s.variance == m.variance
    assert sum(p for _, p in s.pmf) == 1
    assert 0 <= s.ks_to_normal <= 1


def test_generating_identity_for_lengths():
    # sum_j q(n, j) (-1)^j is the coefficient of prod (1 - z^k)^g(k)
    params = AlphaParams.parse("1/2")
    N = 30
    g = g_values(params, N)
    poly = [1] + [0] * N
    for k in range(1, N + 1):
        for _ in range(g[k - 1]):
            for i in range(N, k - 1, -1):
                poly[i] -= poly[i - k]
    table = build_count_table(params, N)
    for n in range(N + 1):
        assert sum(c * (-1) ** j for j, c in enumerate(table.row(n))) == poly[n]


def test_binomial_single_class():
    # q(n, j) for n = 2: C(g1, 2) ways with two 1s plus g2 single 2s
    params = AlphaParams.parse("1/3")
    g1, g2 = g_values(params, 2)
    assert brute_force_counts(params, 2) == [(1, g2), (2, comb(g1, 2))]


def test_mgf_at_zero_and_degenerate():
    params = AlphaParams.parse("1/2")
    table = build_count_table(params, 40)
    s = distribution_summary(table, 40)
    row = table.row(40)
    assert abs(log_mgf_value(row, s.q_n, s.mean, s.variance, 0.0)) < 1e-15
    one = distribution_summary(table, 1)
    assert one.variance == 0 and one.ks_to_normal == 0.0
    assert tail_probability(one, 1.0) == (0, 0)


def test_tail_probability_exact():
    params = AlphaParams.parse("1/2")
    table = build_count_table(params, 30)
    s = distribution_summary(table, 30)
    up, low = tail_probability(s, 0.0)
    assert up + low >= 1
    up2, low2 = tail_probability(s, 1.0)
    expected_up = sum(p for j, p in s.pmf if j - s.mean >= 0 and (j - s.mean) ** 2 >= s.variance)
    assert up2 == expected_up


def test_guards():
    params = AlphaParams.parse("1/2")
    with pytest.raises(BruteForceSizeError):
        brute_force_counts(params, 1000)
    with pytest.raises(MemoryBudgetError):
        build_count_table(params, 500, memory_budget=10_000)
    with pytest.raises(ValueError):
        build_count_table(params, 0)
