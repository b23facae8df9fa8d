"""Exact big-integer ground truth for the length of a random alpha-partition.

Two engines are provided.

* :func:`build_count_table` expands prod_k (1 + u z^k)^g(k) modulo z^(n+1)
  one part value at a time.  Each row [z^n'] is a polynomial in u, stored
  packed into a single integer with one fixed-width slot per power of u,
  so a whole row is shifted and added with one big-integer operation.
* :func:`exact_moments` only needs [z^n] of Q, Q_u and Q_uu at u = 1 and
  works with univariate series, which keeps n around 10^4 cheap.

:func:`brute_force_counts` enumerates multiplicity vectors directly and is
the independent oracle for both.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

import gmpy2
import numpy as np
from scipy.special import ndtr

from .core import AlphaParams, g_values, max_length

__all__ = [
    "BruteForceSizeError",
    "CountTable",
    "DistributionSummary",
    "ExactMoments",
    "MemoryBudgetError",
    "brute_force_counts",
    "build_count_table",
    "distribution_summary",
    "exact_moments",
    "q_series",
    "tail_probability",
]

DEFAULT_MEMORY_BUDGET = 2_000_000_000  # bytes
BRUTE_FORCE_LIMIT = 40


class MemoryBudgetError(MemoryError):
    pass


class BruteForceSizeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# univariate series


def _divisor_sums(g: Sequence[int], n: int) -> tuple[list[int], list[int], list[int]]:
    """Coefficients up to z^n of z d/dz log Q, d/du log Q and d2/du2 log Q at u = 1.

    log Q(z, u) = sum_k g(k) sum_l (-1)^(l+1) u^l z^(kl) / l.
    """
    s = [0] * (n + 1)
    lu = [0] * (n + 1)
    luu = [0] * (n + 1)
    for k in range(1, n + 1):
        gk = g[k - 1]
        for l in range(1, n // k + 1):
            sign = 1 if l % 2 else -1
            m = k * l
            s[m] += sign * k * gk
            lu[m] += sign * gk
            if l >= 2:
                luu[m] += sign * (l - 1) * gk
    return s, lu, luu


def q_series(params: AlphaParams, n_max: int) -> list[int]:
    """[q(0), q(1), ..., q(n_max)] with q(0) = 1.

    Uses n q(n) = sum_{m=1}^n s(m) q(n-m), where s(m) is the coefficient of
    z^m in z d/dz log Q(z, 1).
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if n_max == 0:
        return [1]
    g = g_values(params, n_max)
    s, _, _ = _divisor_sums(g, n_max)
    s_arr = np.array(s, dtype=object)
    q = np.empty(n_max + 1, dtype=object)
    q[0] = gmpy2.mpz(1)
    for n in range(1, n_max + 1):
        acc = np.dot(s_arr[1:n + 1], q[n - 1::-1]) if n > 1 else s_arr[1] * q[0]
        val, rem = gmpy2.f_divmod(gmpy2.mpz(acc), n)
        assert rem == 0, "log-derivative recurrence must divide exactly"
        q[n] = val
    return [int(v) for v in q]


def _convolve_exact(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    """Truncated product of two integer series (signed) via Kronecker packing."""
    bound = max(max((abs(x) for x in a), default=0), 1) * max(max((abs(x) for x in b), default=0), 1)
    width = (bound * (n + 1)).bit_length() + 2
    width = 8 * ((width + 7) // 8)

    def pack(c):
        return sum(int(x) << (width * i) for i, x in enumerate(c[:n + 1]) if x)

    def split(c):
        return [max(x, 0) for x in c], [max(-x, 0) for x in c]

    ap, an = split(list(a))
    bp, bn = split(list(b))
    pos = pack(ap) * pack(bp) + pack(an) * pack(bn)
    neg = pack(ap) * pack(bn) + pack(an) * pack(bp)
    return [p - q for p, q in zip(_unpack(pos, width, n + 1), _unpack(neg, width, n + 1))]


def _unpack(value: int, width: int, count: int) -> list[int]:
    nbytes = width // 8
    raw = int(value).to_bytes(max(nbytes * count, (int(value).bit_length() + 7) // 8), "little")
    return [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") for i in range(count)]


@dataclass(frozen=True)
class ExactMoments:
    n: int
    q_n: int
    mean: Fraction
    variance: Fraction


def exact_moments(params: AlphaParams, n: int, q: Optional[Sequence[int]] = None) -> ExactMoments:
    """Exact mean and variance of the length from the coefficient ratios.

    mean = [z^n] Q_u(z,1) / [z^n] Q(z,1) and
    variance = [z^n] Q_uu / [z^n] Q + mean - mean^2.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if q is None:
        q = q_series(params, n)
    g = g_values(params, n)
    _, lu, luu = _divisor_sums(g, n)
    lu2 = _convolve_exact(lu, lu, n)
    w = [x + y for x, y in zip(lu2, luu)]
    qu = sum(lu[m] * q[n - m] for m in range(1, n + 1))
    quu = sum(w[m] * q[n - m] for m in range(2, n + 1))
    qn = q[n]
    mean = Fraction(qu, qn)
    var = Fraction(quu, qn) + mean - mean * mean
    return ExactMoments(n=n, q_n=qn, mean=mean, variance=var)


# ---------------------------------------------------------------------------
# bivariate table


@dataclass(frozen=True)
class CountTable:
    """q(n', j) for 0 <= n' <= n_max and 0 <= j <= k_cap.

    Rows are held packed: row n' is sum_j q(n', j) 2^(slot_bits * j).
    ``k_cap`` is the largest length any partition of n_max can have, so the
    overflow column is zero by construction; :attr:`overflow_column` decodes
    and reports it anyway.
    """

    params: AlphaParams
    n_max: int
    k_cap: int
    slot_bits: int
    packed: tuple = field(repr=False)

    def _decode(self, n: int) -> list[int]:
        if not (0 <= n <= self.n_max):
            raise IndexError(f"row {n} outside 0..{self.n_max}")
        value = int(self.packed[n])
        count = max(self.k_cap + 1, -(-value.bit_length() // self.slot_bits))
        return _unpack(value, self.slot_bits, count)

    def row(self, n: int) -> list[int]:
        return self._decode(n)[: self.k_cap + 1]

    def q(self, n: int) -> int:
        return sum(self.row(n))

    def q_nk(self, n: int, j: int) -> int:
        if j < 0:
            raise IndexError(j)
        return self.row(n)[j] if j <= self.k_cap else 0

    @cached_property
    def counts(self) -> list[list[int]]:
        return [self.row(n) for n in range(self.n_max + 1)]

    @cached_property
    def overflow_column(self) -> list[int]:
        return [sum(self._decode(n)[self.k_cap + 1:]) for n in range(self.n_max + 1)]


def projected_table_bytes(params: AlphaParams, n_max: int, q_max: int) -> int:
    slot = 64 * (((q_max.bit_length() + 1) + 63) // 64)
    k_cap = max_length(params, n_max)
    return (n_max + 1) * (k_cap + 1) * slot // 8


def build_count_table(params: AlphaParams, n_max: int,
                      memory_budget: int = DEFAULT_MEMORY_BUDGET) -> CountTable:
    """Expand prod_{k <= n_max} sum_i C(g(k), i) u^i z^(k i) modulo z^(n_max+1)."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    q = q_series(params, n_max)
    q_max = max(q)
    # three live copies of the row array during an update
    projected = 3 * projected_table_bytes(params, n_max, q_max)
    if projected > memory_budget:
        raise MemoryBudgetError(
            f"table for n_max={n_max} needs ~{projected / 1e9:.2f} GB, budget {memory_budget / 1e9:.2f} GB")

    # every partial product is coefficient-wise below the full product
    slot_bits = 64 * (((q_max.bit_length() + 1) + 63) // 64)
    k_cap = max_length(params, n_max)
    g = g_values(params, n_max)

    rows = np.empty(n_max + 1, dtype=object)
    rows[:] = gmpy2.mpz(0)
    rows[0] = gmpy2.mpz(1)
    for k in range(1, n_max + 1):
        gk = g[k - 1]
        top = min(gk, n_max // k)
        if top == 0:
            continue
        new = rows.copy()
        binom = 1
        for i in range(1, top + 1):
            binom = binom * (gk - i + 1) // i
            shift = k * i
            new[shift:] += (rows[: n_max + 1 - shift] * binom) << (slot_bits * i)
        rows = new

    table = CountTable(params=params, n_max=n_max, k_cap=k_cap, slot_bits=slot_bits,
                       packed=tuple(int(r) for r in rows))
    if table.q(n_max) != q[n_max]:
        raise AssertionError("bivariate table disagrees with the univariate series")
    return table


# ---------------------------------------------------------------------------
# brute force oracle


def brute_force_counts(params: AlphaParams, n: int) -> list[tuple[int, int]]:
    """q(n, j) for every length j with q(n, j) > 0, by direct enumeration.

    Enumerates multiplicity vectors (m_1, m_2, ...) with sum k m_k = n and
    0 <= m_k <= g(k); each contributes prod_k C(g(k), m_k) to length sum m_k.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > BRUTE_FORCE_LIMIT:
        raise BruteForceSizeError(f"brute force is limited to n <= {BRUTE_FORCE_LIMIT}")
    g = g_values(params, n)
    by_length: dict[int, int] = {}

    def walk(k: int, remaining: int, length: int, weight: int) -> None:
        if remaining == 0:
            by_length[length] = by_length.get(length, 0) + weight
            return
        if k > remaining:
            return
        for mk in range(0, min(g[k - 1], remaining // k) + 1):
            walk(k + 1, remaining - k * mk, length + mk, weight * math.comb(g[k - 1], mk))

    walk(1, n, 0, 1)
    return sorted(by_length.items())


# ---------------------------------------------------------------------------
# distribution of the length


@dataclass(frozen=True)
class DistributionSummary:
    n: int
    q_n: int
    mean: Fraction
    variance: Fraction
    pmf: list = field(repr=False)  # (j, Fraction)
    cdf: list = field(repr=False)  # (j, Fraction)
    ks_to_normal: float
    mgf_samples: list  # (t, float)

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


def _normal_cdf_at(j: int, mean: Fraction, var: Fraction) -> float:
    z = Fraction(2 * j + 1, 2) - mean
    if var == 0:
        return 1.0 if z > 0 else 0.0
    return float(ndtr(float(z) / math.sqrt(var)))


def distribution_summary(table: CountTable, n: int, t_grid: Iterable[float] = ()) -> DistributionSummary:
    """Exact law of the length for partitions of n, plus KS distance and MGF samples."""
    if not (1 <= n <= table.n_max):
        raise ValueError(f"n must lie in 1..{table.n_max}")
    row = table.row(n)
    qn = sum(row)
    assert qn > 0, "g(1) >= 1 makes every n representable"
    pmf = [(j, Fraction(c, qn)) for j, c in enumerate(row)]
    mean = sum((j * c for j, c in enumerate(row)), 0)
    second = sum((j * j * c for j, c in enumerate(row)), 0)
    mean = Fraction(mean, qn)
    variance = Fraction(second, qn) - mean * mean

    top = max(j for j, c in enumerate(row) if c)
    cdf = []
    acc = Fraction(0)
    ks = 0.0
    for j in range(0, top + 1):
        acc += pmf[j][1]
        cdf.append((j, acc))
        ks = max(ks, abs(float(acc) - _normal_cdf_at(j, mean, variance)))

    mgf = [(float(t), mgf_value(row, qn, mean, variance, float(t))) for t in t_grid]
    return DistributionSummary(n=n, q_n=qn, mean=mean, variance=variance, pmf=pmf, cdf=cdf,
                               ks_to_normal=ks, mgf_samples=mgf)


def log_mgf_value(row: Sequence[int], qn: int, mean: Fraction, variance: Fraction, t: float) -> float:
    """ln E exp((L - mean) t / sd) from exact counts, evaluated in log space."""
    if variance == 0 or t == 0:
        return 0.0
    sd = math.sqrt(variance)
    mu = float(mean)
    logs = np.array([math.log(c) + (j - mu) * t / sd for j, c in enumerate(row) if c])
    peak = logs.max()
    return float(peak + math.log(np.exp(logs - peak).sum()) - math.log(qn))


def mgf_value(row, qn, mean, variance, t: float) -> float:
    return math.exp(log_mgf_value(row, qn, mean, variance, t))


def tail_probability(summary: DistributionSummary, x: float) -> tuple[Fraction, Fraction]:
    """P((L - mean)/sd >= x) and P((L - mean)/sd <= -x), exactly.

    A point mass has standardized value 0.
    """
    if x < 0:
        raise ValueError("x must be >= 0")
    if summary.variance == 0:
        return (Fraction(1), Fraction(1)) if x == 0 else (Fraction(0), Fraction(0))
    x2var = Fraction(x) ** 2 * summary.variance
    upper = Fraction(0)
    lower = Fraction(0)
    for j, p in summary.pmf:
        d = j - summary.mean
        if d >= 0 and d * d >= x2var:
            upper += p
        if d <= 0 and d * d >= x2var:
            lower += p
    return upper, lower
