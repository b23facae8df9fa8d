"""Asymptotic mean and variance of the length, and their leading constants."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .core import AlphaParams
from .saddle import _truncated, _fermi_arrays, f_partials, solve_saddle
from .special import eta_value, gamma

__all__ = ["AsymptoticEstimate", "c1_c2_constants", "mu_sigma_sums", "predict", "sigma2_from_partials"]


def mu_sigma_sums(params: AlphaParams, eta: float) -> tuple[float, float]:
    """Mean and variance sums at the saddle point eta = r(n, 1).

    mu = sum g / (e^(eta k) + 1)
    sigma^2 = sum g s - (sum g k s)^2 / sum g k^2 s,  s = e^(eta k) / (e^(eta k) + 1)^2
    """
    def evaluate(K):
        k, _, sigma, g = _fermi_arrays(params, eta, 1.0, K)
        spread = g * sigma * (1.0 - sigma)
        mu = float((g * sigma).sum())
        s0 = float(spread.sum())
        s1 = float((k * spread).sum())
        s2 = float((k * k * spread).sum())
        return (mu, s0, s1, s2), s2

    (mu, s0, s1, s2), _, _ = _truncated(params, eta, params.beta + 1.0, params.beta + 1.0, evaluate)
    return mu, s0 - s1 * s1 / s2


def sigma2_from_partials(params: AlphaParams, eta: float) -> float:
    """f_u + f_uu - f_(u tau)^2 / f_(tau tau) at (eta, 1)."""
    d = f_partials(params, eta, 1.0, [(0, 1), (0, 2), (1, 1), (2, 0)])
    return d[(0, 1)] + d[(0, 2)] - d[(1, 1)] ** 2 / d[(2, 0)]


def c1_c2_constants(params: AlphaParams) -> tuple[float, float]:
    """Leading constants with mu_n ~ c1 n^(1/(1+alpha)) and sigma_n^2 ~ c2 n^(1/(1+alpha)).

    With A = beta eta(beta+1) Gamma(beta+1) and eta(s) = -Li_s(-1):
      c1 = beta eta(beta) Gamma(beta) A^(-beta/(beta+1))
      c2 = [beta eta(beta-1) Gamma(beta)
            - beta Gamma(beta+1)^2 eta(beta)^2 / (Gamma(beta+2) eta(beta+1))] A^(-beta/(beta+1))
    """
    beta = params.beta
    A = beta * eta_value(beta + 1.0).value * gamma(beta + 1.0).value
    scale = A ** (-beta / (beta + 1.0))
    e_b = eta_value(beta).value
    c1 = beta * e_b * gamma(beta).value * scale
    spread = beta * eta_value(beta - 1.0).value * gamma(beta).value
    tilt = beta * gamma(beta + 1.0).value ** 2 * e_b ** 2 / (gamma(beta + 2.0).value * eta_value(beta + 1.0).value)
    c2 = (spread - tilt) * scale
    return c1, c2


@dataclass(frozen=True)
class AsymptoticEstimate:
    n: int
    eta: float
    mu_n: float
    sigma2_n: float
    c1: float
    c2: float
    exponent: float
    mu_leading: float
    sigma2_leading: float

    def to_dict(self) -> dict:
        return asdict(self)


def predict(params: AlphaParams, n: int) -> AsymptoticEstimate:
    sol = solve_saddle(params, n, 1.0)
    mu, s2 = mu_sigma_sums(params, sol.r)
    c1, c2 = c1_c2_constants(params)
    e = params.exponent
    return AsymptoticEstimate(n=n, eta=sol.r, mu_n=mu, sigma2_n=s2, c1=c1, c2=c2, exponent=e,
                              mu_leading=c1 * n ** e, sigma2_leading=c2 * n ** e)
