"""Gamma, zeta and the polylogarithm at negative real arguments.

Only real arguments occur in the leading-order formulas: Gamma and zeta at
s > 0 (resp. s > 1) and Li_s(-u) for u in a compact subinterval of (0, inf).
Every value carries an absolute error bound.
"""
from __future__ import annotations

import math
import warnings
from typing import NamedTuple

import numpy as np
from scipy import integrate, special as sp

__all__ = [
    "DomainError",
    "SpecialValue",
    "gamma",
    "zeta",
    "eta_value",
    "polylog_neg",
    "polylog_neg_series",
    "polylog_neg_integral",
]

_CVZ_TERMS = 40
_FD_CUTOFF = 40.0
_FD_TOL = 1e-13


class DomainError(ValueError):
    pass


class SpecialValue(NamedTuple):
    value: float
    abs_error_bound: float

    def __float__(self) -> float:
        return self.value


def gamma(s: float) -> SpecialValue:
    if s <= 0:
        raise DomainError(f"gamma: need s > 0, got {s!r}")
    v = math.gamma(s)
    return SpecialValue(v, 8 * float(np.spacing(abs(v))))


def zeta(s: float) -> SpecialValue:
    if s <= 1:
        raise DomainError(f"zeta: need s > 1, got {s!r}")
    v = float(sp.zeta(s, 1))
    return SpecialValue(v, 16 * float(np.spacing(abs(v))))


def _alternating_sum(terms) -> tuple[float, float]:
    """Sum_{k>=0} (-1)^k a_k for a completely monotone sequence a_k.

    Cohen, Rodriguez Villegas and Zagier's first algorithm; the error is
    at most 2 a_0 / (3 + sqrt 8)^N.
    """
    n = _CVZ_TERMS
    d = (3.0 + math.sqrt(8.0)) ** n
    d = (d + 1.0 / d) / 2.0
    b = -1.0
    c = -d
    s = 0.0
    a0 = None
    for k in range(n):
        a = terms(k)
        if a0 is None:
            a0 = a
        c = b - c
        s += c * a
        b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1.0))
    value = s / d
    err = 2.0 * abs(a0) / (3.0 + math.sqrt(8.0)) ** n + 16 * float(np.spacing(abs(value)))
    return value, err


def eta_value(s: float) -> SpecialValue:
    """Dirichlet eta (1 - 2^(1-s)) zeta(s) = -Li_s(-1)."""
    if s <= 0:
        raise DomainError(f"eta: need s > 0, got {s!r}")
    if s <= 1:
        v, err = _alternating_sum(lambda k: (k + 1.0) ** (-s))
        return SpecialValue(v, err)
    factor = -math.expm1((1.0 - s) * math.log(2.0))
    z = zeta(s)
    v = factor * z.value
    return SpecialValue(v, factor * z.abs_error_bound + 4 * float(np.spacing(abs(v))))


def polylog_neg_series(s: float, u: float) -> SpecialValue:
    """Li_s(-u) for 0 < u <= 1 by accelerated alternating series."""
    if s <= 0 or u <= 0:
        raise DomainError(f"polylog: need s > 0 and u > 0, got s={s!r}, u={u!r}")
    if u > 1:
        raise DomainError("series path requires u <= 1")
    # Li_s(-u) = -sum_{k>=0} (-1)^k u^(k+1) / (k+1)^s
    v, err = _alternating_sum(lambda k: u ** (k + 1) * (k + 1.0) ** (-s))
    return SpecialValue(-v, err)


def polylog_neg_integral(s: float, u: float) -> SpecialValue:
    """Li_s(-u) via the complete Fermi-Dirac integral with mu = ln u.

    -Li_s(-e^mu) = (1/Gamma(s)) int_0^inf t^(s-1) / (e^(t-mu) + 1) dt.
    The range is cut at mu + 40; the remainder is bounded by
    e^mu Gamma(s, mu + 40) and added as an estimate.
    """
    if s <= 0 or u <= 0:
        raise DomainError(f"polylog: need s > 0 and u > 0, got s={s!r}, u={u!r}")
    mu = math.log(u)
    top = max(mu, 0.0) + _FD_CUTOFF
    breaks = [0.0] + ([mu] if mu > 0 else []) + [top]

    if s >= 1:
        def integrand(t):
            return t ** (s - 1) * sp.expit(mu - t)
        edges = breaks
        scale = 1.0
    else:
        # t = x^(1/s) removes the t^(s-1) endpoint singularity
        def integrand(x):
            return sp.expit(mu - x ** (1.0 / s))
        edges = [b ** s for b in breaks]
        scale = 1.0 / s

    total = 0.0
    abserr = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings():
            # roundoff warnings near the requested floor; abserr is still reported
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err = integrate.quad(integrand, lo, hi, epsabs=_FD_TOL, epsrel=1e-14, limit=200)
        total += val
        abserr += err
    total *= scale
    abserr *= scale
    tail = math.exp(mu) * float(sp.gammaincc(s, top)) * math.gamma(s)
    total += tail
    abserr += tail * math.exp(-_FD_CUTOFF)
    g = math.gamma(s)
    v = -total / g
    return SpecialValue(v, abserr / g + 16 * float(np.spacing(abs(v))))


def polylog_neg(s: float, u: float) -> SpecialValue:
    """Li_s(-u) for s > 0, u > 0."""
    if s <= 0 or u <= 0:
        raise DomainError(f"polylog: need s > 0 and u > 0, got s={s!r}, u={u!r}")
    if u <= 1:
        return polylog_neg_series(s, u)
    return polylog_neg_integral(s, u)
