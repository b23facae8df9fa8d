"""Saddle-point machinery for Q_n(u) = [z^n] Q(z, u).

With f(tau, u) = log Q(e^-tau, u) = sum_k g(k) log(1 + u e^(-k tau)), the
saddle point r(n, u) solves -f_tau(r, u) = n.  All sums are evaluated
directly, truncated at a cutoff K whose tail is bounded by an incomplete
gamma integral.

Mixed partials use x = u e^(-k tau) and theta = x d/dx: on functions of x,
d/dtau = -k theta and d/du = theta / u, so every partial derivative is a
polynomial in theta applied to log(1 + x).  theta^m log(1 + x) for m >= 1
is a polynomial in the Fermi factor sigma = x / (1 + x).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy import optimize
from scipy import special as sp

from .core import AlphaParams, g_float_array
from .special import gamma as gamma_fn, polylog_neg

__all__ = [
    "BracketError",
    "SaddleSolution",
    "TruncationError",
    "eval_f_derivatives",
    "f_mellin_leading",
    "f_partial",
    "f_partials",
    "h_sum",
    "h_sum_leading",
    "leading_r0",
    "q_ratio_on_circle",
    "saddle_qn_approx",
    "solve_saddle",
]

MAX_TERMS = 10 ** 8
_NEWTON_STEPS = 6


class TruncationError(ArithmeticError):
    pass


class BracketError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# operator algebra


@lru_cache(maxsize=None)
def _theta_poly(m: int) -> Polynomial:
    """theta^m log(1+x) as a polynomial in sigma, for m >= 1."""
    if m == 1:
        return Polynomial([0.0, 1.0])
    prev = _theta_poly(m - 1)
    return prev.deriv() * Polynomial([0.0, 1.0, -1.0])


@lru_cache(maxsize=None)
def _operator_coeffs(a: int, b: int) -> tuple:
    """Coefficients c_m with theta^a (theta)(theta-1)...(theta-b+1) = sum_m c_m theta^m."""
    op = Polynomial([0.0] * a + [1.0])
    for i in range(b):
        op = op * Polynomial([-float(i), 1.0])
    return tuple(op.coef)


def _bound_constant(a: int, b: int) -> float:
    # |theta^m log(1+x)| <= const * x on sigma in [0, 1]
    total = 0.0
    for m, c in enumerate(_operator_coeffs(a, b)):
        if c == 0:
            continue
        if m == 0:
            total += abs(c)
        else:
            total += abs(c) * np.abs((_theta_poly(m) // Polynomial([0.0, 1.0])).coef).sum()
    return max(total, 1.0)


def _log_tail_integral(s: float, lower: float, tau: float) -> float:
    """log of int_lower^inf y^s e^(-y tau) dy."""
    q = sp.gammaincc(s + 1.0, lower * tau)
    if q <= 0:
        return -math.inf
    return math.log(q) + sp.gammaln(s + 1.0) - (s + 1.0) * math.log(tau)


def _initial_cutoff(tau: float, s: float, u: float) -> int:
    return int(math.ceil((max(s, 0.0) + 40.0 + math.log(max(u, 1.0))) / tau)) + 8


def _truncated(params: AlphaParams, tau: float, s: float, prefactor: float, evaluate):
    """Grow K until the certified tail is below eps_num times the absolute sum.

    ``evaluate(K)`` returns ``(values, abs_sum)`` for the sums over k <= K;
    the terms are bounded by prefactor * k^s * e^(-k tau).
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    K = _initial_cutoff(tau, s, 1.0)
    while True:
        if K > MAX_TERMS:
            raise TruncationError(f"cutoff would exceed {MAX_TERMS} terms at tau={tau!r}")
        # y^s e^(-y tau) is decreasing beyond s / tau
        if K >= s / tau:
            values, abs_sum = evaluate(K)
            log_tail = math.log(prefactor) + tau + _log_tail_integral(s, K, tau)
            if abs_sum > 0 and log_tail <= math.log(params.eps_num * abs_sum):
                return values, K, math.exp(log_tail)
            if abs_sum == 0 and log_tail < -700:
                return values, K, 0.0
        K *= 2


def _fermi_arrays(params: AlphaParams, tau: float, u: float, K: int):
    k = np.arange(1, K + 1, dtype=float)
    x = u * np.exp(-k * tau)
    sigma = x / (1.0 + x)
    return k, x, sigma, g_float_array(params, K)


def _partials_upto(params: AlphaParams, tau: float, u: float, orders: Sequence[tuple], K: int):
    k, x, sigma, g = _fermi_arrays(params, tau, u, K)
    need = {m for a, b in orders for m, c in enumerate(_operator_coeffs(a, b)) if c != 0}
    base = {}
    for m in need:
        base[m] = np.log1p(x) if m == 0 else _theta_poly(m)(sigma)
    values = []
    abs_sum = 0.0
    for a, b in orders:
        inner = sum(c * base[m] for m, c in enumerate(_operator_coeffs(a, b)) if c != 0)
        terms = g * (-k) ** a * inner / u ** b
        values.append(float(terms.sum()))
        abs_sum = max(abs_sum, float(np.abs(terms).sum()))
    return values, abs_sum


def f_partials(params: AlphaParams, tau: float, u: float, orders: Iterable[tuple]) -> dict:
    """Mixed partials d^a/dtau^a d^b/du^b f(tau, u) for each (a, b) in ``orders``."""
    orders = list(orders)
    if u <= 0:
        raise ValueError("u must be positive")
    a_max = max(a for a, _ in orders)
    b_max = max(b for _, b in orders)
    s = params.beta - 1.0 + a_max
    pref = (params.beta + 1.0) * max(_bound_constant(a, b) for a, b in orders) * u / min(u, 1.0) ** b_max
    values, K, _ = _truncated(params, tau, s, pref,
                              lambda K: _partials_upto(params, tau, u, orders, K))
    return dict(zip(orders, values))


def f_partial(params: AlphaParams, tau: float, u: float, a: int, b: int = 0) -> float:
    return f_partials(params, tau, u, [(a, b)])[(a, b)]


def eval_f_derivatives(params: AlphaParams, tau: float, u: float, j_max: int) -> list[float]:
    """[f, f_tau, ..., d^j_max f / dtau^j_max] at (tau, u)."""
    if not (0 <= j_max <= 4):
        raise ValueError("j_max must lie in 0..4")
    out = f_partials(params, tau, u, [(j, 0) for j in range(j_max + 1)])
    return [out[(j, 0)] for j in range(j_max + 1)]


def cutoff_for(params: AlphaParams, tau: float, u: float, a: int = 0) -> int:
    s = params.beta - 1.0 + a
    pref = (params.beta + 1.0) * _bound_constant(a, 0) * u
    _, K, _ = _truncated(params, tau, s, pref,
                         lambda K: _partials_upto(params, tau, u, [(a, 0)], K))
    return K


# ---------------------------------------------------------------------------
# Mellin leading terms


def f_mellin_leading(params: AlphaParams, tau: float, u: float, j: int) -> float:
    """Main terms of d^j f / dtau^j from the poles of zeta(s - gamma - j) Li Gamma.

    (-1)^(j+1) sum_{nu=1}^m C(beta, nu) Li_{beta-nu+2}(-u) Gamma(beta-nu+j+1) tau^(-beta+nu-j-1)
    """
    beta = params.beta
    total = 0.0
    for nu in range(1, params.m + 1):
        li = polylog_neg(beta - nu + 2.0, u).value
        total += sp.binom(beta, nu) * li * gamma_fn(beta - nu + j + 1.0).value * tau ** (-beta + nu - j - 1.0)
    return (-1.0) ** (j + 1) * total


def leading_r0(params: AlphaParams, n: float, u: float = 1.0) -> float:
    """Leading-order saddle point from n = beta (-Li_{beta+1}(-u)) Gamma(beta+1) r^-(beta+1)."""
    beta = params.beta
    coeff = beta * (-polylog_neg(beta + 1.0, u).value) * gamma_fn(beta + 1.0).value
    return (coeff / n) ** (1.0 / (beta + 1.0))


# ---------------------------------------------------------------------------
# saddle point


@dataclass(frozen=True)
class SaddleSolution:
    n: int
    u: float
    r: float
    residual: float
    K_trunc: int
    f_value: float
    f_tau: float
    B_squared: float
    f_tau3: float
    t_n: float

    def to_dict(self) -> dict:
        return asdict(self)


def solve_saddle(params: AlphaParams, n: int, u: float = 1.0) -> SaddleSolution:
    """Unique r > 0 with sum_k k g(k) / (e^(k r)/u + 1) = n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if u <= 0:
        raise ValueError("u must be positive")

    def excess(r):
        return -f_partial(params, r, u, 1) - n

    r0 = leading_r0(params, n, u)
    lo, hi = r0 / 8.0, r0 * 8.0
    for _ in range(60):
        if excess(lo) > 0:
            break
        lo /= 2.0
    else:
        raise BracketError(f"no lower bracket for n={n}, u={u}")
    for _ in range(60):
        if excess(hi) < 0:
            break
        hi *= 2.0
    else:
        raise BracketError(f"no upper bracket for n={n}, u={u}")

    r = optimize.brentq(excess, lo, hi, xtol=1e-15 * r0, rtol=4 * np.finfo(float).eps, maxiter=200)
    for _ in range(_NEWTON_STEPS):
        d = f_partials(params, r, u, [(1, 0), (2, 0)])
        step = (-d[(1, 0)] - n) / d[(2, 0)]
        r_new = r + step
        if not (lo <= r_new <= hi):
            break
        r = r_new
        if abs(step) < 1e-14 * r:
            break

    vals = eval_f_derivatives(params, r, u, 3)
    return SaddleSolution(
        n=n, u=u, r=r,
        residual=abs(n + vals[1]),
        K_trunc=cutoff_for(params, r, u, a=3),
        f_value=vals[0], f_tau=vals[1], B_squared=vals[2], f_tau3=vals[3],
        t_n=r ** (1.0 + 3.0 * params.beta / 7.0),
    )


def saddle_qn_approx(params: AlphaParams, sol: SaddleSolution) -> float:
    """log of e^(n r + f(r, u)) / sqrt(2 pi B^2)."""
    return sol.n * sol.r + sol.f_value - 0.5 * math.log(2.0 * math.pi * sol.B_squared)


def q_ratio_on_circle(params: AlphaParams, sol: SaddleSolution, y: float) -> float:
    """|Q(e^-(r+iy), u)| / Q(e^-r, u) from the factorwise modulus identity."""
    y = float(y)
    if y == 0:
        return 1.0
    r, u = sol.r, sol.u

    def evaluate(K):
        k, x, _, g = _fermi_arrays(params, r, u, K)
        # 1 - cos(ky) = 2 sin^2(ky/2)
        drop = 4.0 * x * np.sin(k * y / 2.0) ** 2 / (1.0 + x) ** 2
        terms = g * np.log1p(-drop)
        return float(terms.sum()), float(np.abs(terms).sum())

    # -log(1 - d) <= d / (1 - d) and d <= 4x / (1+x)^2 <= 1
    pref = 8.0 * (params.beta + 1.0) * u
    log2ratio, _, _ = _truncated(params, r, params.beta - 1.0, pref, evaluate)
    return math.exp(0.5 * log2ratio)


# ---------------------------------------------------------------------------
# harmonic sums


def h_sum(params: AlphaParams, gamma: float, j: int, tau: float, u: float) -> float:
    """h_{gamma,j}(tau, u) = sum_k k^(gamma+j) sum_l (-u)^l l^(j-1) e^(-k l tau).

    The inner sum over l is Li_{1-j}(-x) with x = u e^(-k tau), i.e.
    -log(1 + x) for j = 0 and -theta^j log(1 + x) for j >= 1.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if j < 0:
        raise ValueError("j must be >= 0")
    s = gamma + j

    def evaluate(K):
        k = np.arange(1, K + 1, dtype=float)
        x = u * np.exp(-k * tau)
        inner = np.log1p(x) if j == 0 else _theta_poly(j)(x / (1.0 + x))
        terms = -(k ** s) * inner
        return float(terms.sum()), float(np.abs(terms).sum())

    pref = _bound_constant(j, 0) * u
    value, _, _ = _truncated(params, tau, s, pref, evaluate)
    return value


def h_sum_leading(gamma: float, j: int, tau: float, u: float) -> float:
    """Gamma(gamma+j+1) Li_(gamma+2)(-u) tau^(-(gamma+j+1)), the first Mellin pole of h_sum."""
    if gamma <= 0 or j < 0:
        raise ValueError("need gamma > 0 and j >= 0")
    return gamma_fn(gamma + j + 1.0).value * polylog_neg(gamma + 2.0, u).value * tau ** (-(gamma + j + 1.0))
