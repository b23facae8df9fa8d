"""Problem instance and exact evaluation of the part multiplicities g(k).

A restricted alpha-partition of n writes n = floor(a_1^alpha) + ... +
floor(a_l^alpha) with distinct positive integers a_j.  Grouping the a_j by
their part value k = floor(a^alpha), the value k is available
g(k) = ceil((k+1)^beta) - ceil(k^beta) times, with beta = 1/alpha.

Everything downstream (the exact tables, the saddle sums, the sampler)
consumes g(k), so the ceilings here are computed exactly: by integer roots
whenever alpha has a small exact rational form, and otherwise in extended
precision with a guard that refuses to round when k^beta sits too close to
an integer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

import gmpy2
import mpmath
import numpy as np

__all__ = [
    "AlphaParams",
    "PartMultiplicity",
    "PrecisionExhaustedError",
    "ceil_power",
    "g_of_k",
    "g_prefix",
    "g_values",
    "g_float_array",
    "max_length",
]

# Numerators above this use the guarded floating path instead of integer roots.
_EXACT_NUMERATOR_LIMIT = 64
_GUARD_RETRIES = 4


class PrecisionExhaustedError(ArithmeticError):
    """The extended-precision guard could not certify a ceiling."""


@dataclass(frozen=True)
class AlphaParams:
    """A fixed exponent 0 < alpha < 1 together with the numeric policy.

    Use :meth:`from_float`, :meth:`from_rational` or :meth:`parse` rather
    than the raw constructor so that beta and m are filled consistently.
    """

    alpha: float
    beta: float
    m: int
    alpha_rational: Optional[tuple[int, int]] = None
    delta: float = 0.25
    eps_num: float = 1e-12
    guard_digits: int = 30

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not (0.0 < self.delta <= 1.0):
            raise ValueError(f"delta must lie in (0, 1], got {self.delta!r}")
        if self.alpha_rational is not None:
            p, q = self.alpha_rational
            if not (0 < p < q) or math.gcd(p, q) != 1:
                raise ValueError(f"alpha_rational must be coprime 0 < p < q, got {p}/{q}")
            if Fraction(p, q) != Fraction(self.alpha) and float(Fraction(p, q)) != self.alpha:
                raise ValueError("alpha_rational does not match alpha")
        if self.eps_num <= 0 or self.guard_digits < 10:
            raise ValueError("invalid precision policy")

    @classmethod
    def from_float(cls, alpha: float, **policy) -> "AlphaParams":
        alpha = float(alpha)
        if not (0.0 < alpha < 1.0):
            raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
        # beta and m from the exact binary value of alpha
        frac = Fraction(alpha)
        return cls(alpha=alpha, beta=1.0 / alpha, m=_m_from_beta(1 / frac), **policy)

    @classmethod
    def from_rational(cls, p: int, q: int, **policy) -> "AlphaParams":
        p, q = int(p), int(q)
        if not (0 < p < q):
            raise ValueError(f"need 0 < p < q, got {p}/{q}")
        d = math.gcd(p, q)
        p, q = p // d, q // d
        return cls(alpha=p / q, beta=q / p, m=_m_from_beta(Fraction(q, p)),
                   alpha_rational=(p, q), **policy)

    @classmethod
    def parse(cls, text: str, **policy) -> "AlphaParams":
        """Parse ``"p/q"`` (exact rational path) or a decimal such as ``"0.7"``."""
        text = str(text).strip()
        if "/" in text:
            num, den = text.split("/", 1)
            return cls.from_rational(int(num), int(den), **policy)
        return cls.from_float(float(text), **policy)

    @property
    def exact_alpha(self) -> Fraction:
        """alpha as an exact fraction (the binary value when no rational form is given)."""
        if self.alpha_rational is not None:
            return Fraction(*self.alpha_rational)
        return Fraction(self.alpha)

    @property
    def exponent(self) -> float:
        """Growth exponent beta/(beta+1) = 1/(1+alpha) of mean and variance."""
        return self.beta / (self.beta + 1.0)

    def label(self) -> str:
        if self.alpha_rational is not None:
            return f"{self.alpha_rational[0]}/{self.alpha_rational[1]}"
        return repr(self.alpha)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "alpha_rational": None if self.alpha_rational is None else list(self.alpha_rational),
            "beta": self.beta,
            "m": self.m,
            "delta": self.delta,
            "eps_num": self.eps_num,
            "guard_digits": self.guard_digits,
        }


def _m_from_beta(beta: Fraction) -> int:
    # m < beta <= m + 1
    return math.ceil(beta) - 1


class PartMultiplicity(NamedTuple):
    k: int
    g: int


def _exact_path(params: AlphaParams) -> Optional[tuple[int, int]]:
    frac = params.exact_alpha
    if params.alpha_rational is not None or frac.numerator <= _EXACT_NUMERATOR_LIMIT:
        return frac.numerator, frac.denominator
    return None


def _ceil_root(k: int, p: int, q: int) -> int:
    # smallest M with M^p >= k^q
    if p == 1:
        return k ** q
    root, exact = gmpy2.iroot(gmpy2.mpz(k) ** q, p)
    return int(root) + (0 if exact else 1)


def _ceil_guarded(k: int, params: AlphaParams) -> int:
    frac = params.exact_alpha
    p, q = frac.numerator, frac.denominator
    # k^(q/p) is an integer iff k is a perfect p-th power
    if k == 1:
        return 1
    if p.bit_length() < 64:
        c, exact = gmpy2.iroot(gmpy2.mpz(k), p)
        if exact:
            return int(c) ** q
    digits = params.guard_digits
    for _ in range(_GUARD_RETRIES + 1):
        with mpmath.workdps(digits):
            beta = mpmath.mpf(q) / mpmath.mpf(p)
            x = mpmath.power(mpmath.mpf(k), beta)
            nearest = mpmath.nint(x)
            if abs(x - nearest) > mpmath.mpf(10) ** (-(digits // 2)):
                return int(mpmath.ceil(x))
        digits *= 2
    raise PrecisionExhaustedError(
        f"cannot certify ceil({k}^{params.beta!r}) at {digits // 2} digits")


def ceil_power(params: AlphaParams, k: int) -> int:
    """Exact ceil(k^beta) for an integer k >= 1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    exact = _exact_path(params)
    if exact is not None:
        return _ceil_root(k, *exact)
    return _ceil_guarded(k, params)


def g_of_k(params: AlphaParams, k: int) -> int:
    """Number of integers a >= 1 with floor(a^alpha) == k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return ceil_power(params, k + 1) - ceil_power(params, k)


def g_values(params: AlphaParams, k_max: int) -> list[int]:
    """``[g(1), ..., g(k_max)]`` from k_max + 1 ceiling evaluations."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    ceils = [ceil_power(params, k) for k in range(1, k_max + 2)]
    return [ceils[i + 1] - ceils[i] for i in range(k_max)]


def g_prefix(params: AlphaParams, k_max: int) -> list[PartMultiplicity]:
    return [PartMultiplicity(k, g) for k, g in enumerate(g_values(params, k_max), start=1)]


@dataclass
class _FloatCache:
    values: np.ndarray = field(default_factory=lambda: np.zeros(0))


_float_caches: dict[AlphaParams, _FloatCache] = {}


def g_float_array(params: AlphaParams, k_max: int) -> np.ndarray:
    """g(1..k_max) as float64, grown on demand and kept per parameter set."""
    cache = _float_caches.setdefault(params, _FloatCache())
    have = cache.values.size
    if have < k_max:
        new_size = max(k_max, 2 * have)
        cache.values = np.asarray(g_values(params, new_size), dtype=float)
    return cache.values[:k_max]


def max_length(params: AlphaParams, n: int) -> int:
    """Largest possible number of summands in a restricted alpha-partition of n.

    The l smallest distinct integers minimise the total of their part values,
    so the bound is attained greedily from part value 1 upwards.
    """
    total = 0
    length = 0
    k = 1
    while True:
        g = g_of_k(params, k)
        take = min(g, (n - total) // k)
        total += take * k
        length += take
        if take < g:
            return length
        k += 1
