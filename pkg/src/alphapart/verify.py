"""Convergence diagnostics for the central limit theorem of the length.

Ties together the exact tables, the saddle-point sums and the asymptotic
constants, and provides a Boltzmann sampler for uniform random
alpha-partitions of a fixed n.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import stats
from scipy.special import expit

from .asym import mu_sigma_sums
from .core import AlphaParams, g_values
from .exact import (
    CountTable,
    build_count_table,
    distribution_summary,
    log_mgf_value,
    tail_probability,
)
from .saddle import SaddleSolution, q_ratio_on_circle, solve_saddle

__all__ = [
    "CltReport",
    "I2Point",
    "SampleBatch",
    "SamplerStarvationError",
    "TailCheck",
    "check_i2_bound",
    "fit_c3",
    "rho_from_c3",
    "run_clt_report",
    "sample_partitions",
]

TAIL_SLACK = 2.0
DEFAULT_X_GRID = (0.5, 1.0, 1.5, 2.0)
DEFAULT_T_GRID = (-2.0, -1.5, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0)
GENERATOR_ID = "numpy.random.Philox(4x64, key=seed)"
MAX_ATTEMPTS = 10 ** 6


class SamplerStarvationError(RuntimeError):
    pass


@dataclass(frozen=True)
class TailCheck:
    n: int
    x: float
    side: str  # "upper" or "lower"
    exact_tail: float
    bound: float
    passed: bool


@dataclass
class CltReport:
    alpha: float
    alpha_label: str
    n_grid: list
    t_grid: list
    x_grid: list
    ks_values: list = field(default_factory=list)
    mgf_deviation: list = field(default_factory=list)  # (n, max_t |ln M_n(t) - t^2/2|)
    mean_rel_gap: list = field(default_factory=list)
    var_rel_gap: list = field(default_factory=list)
    tail_check: list = field(default_factory=list)
    exact_mean: list = field(default_factory=list)
    exact_variance: list = field(default_factory=list)
    predicted_mean: list = field(default_factory=list)
    predicted_variance: list = field(default_factory=list)
    eta: list = field(default_factory=list)
    tail_threshold_T: list = field(default_factory=list)  # n^(beta/(6 beta + 6))
    gaussian_regime_limit: list = field(default_factory=list)  # T / log n
    tail_slack: float = TAIL_SLACK

    def to_dict(self) -> dict:
        return asdict(self)


def _rel_gap(predicted: float, exact: float) -> Optional[float]:
    if exact == 0:
        return None
    return abs(predicted - exact) / abs(exact)


def run_clt_report(params: AlphaParams, n_grid: Sequence[int], t_grid: Sequence[float] = DEFAULT_T_GRID,
                   x_grid: Sequence[float] = DEFAULT_X_GRID, table: Optional[CountTable] = None) -> CltReport:
    """Exact law versus normal limit, MGF, moment predictions and tail bounds on a grid of n."""
    n_grid = [int(n) for n in n_grid]
    if any(abs(t) > 3 for t in t_grid):
        raise ValueError("t_grid must lie in [-3, 3]")
    if table is None or table.n_max < max(n_grid):
        table = build_count_table(params, max(n_grid))
    beta = params.beta
    report = CltReport(alpha=params.alpha, alpha_label=params.label(), n_grid=n_grid,
                       t_grid=[float(t) for t in t_grid], x_grid=[float(x) for x in x_grid])
    for n in n_grid:
        summary = distribution_summary(table, n)
        row = table.row(n)
        report.ks_values.append(summary.ks_to_normal)
        dev = max((abs(log_mgf_value(row, summary.q_n, summary.mean, summary.variance, t) - t * t / 2)
                   for t in t_grid), default=0.0)
        report.mgf_deviation.append((n, dev))

        sol = solve_saddle(params, n, 1.0)
        mu, s2 = mu_sigma_sums(params, sol.r)
        report.eta.append(sol.r)
        report.exact_mean.append(float(summary.mean))
        report.exact_variance.append(float(summary.variance))
        report.predicted_mean.append(mu)
        report.predicted_variance.append(s2)
        report.mean_rel_gap.append(_rel_gap(mu, float(summary.mean)))
        report.var_rel_gap.append(_rel_gap(s2, float(summary.variance)))

        T = n ** (beta / (6 * beta + 6))
        report.tail_threshold_T.append(T)
        report.gaussian_regime_limit.append(T / math.log(n) if n > 1 else None)
        for x in x_grid:
            upper, lower = tail_probability(summary, x)
            bound = math.exp(-x * x / 2)
            for side, tail in (("upper", upper), ("lower", lower)):
                report.tail_check.append(TailCheck(n=n, x=float(x), side=side, exact_tail=float(tail),
                                                   bound=bound, passed=float(tail) <= bound * TAIL_SLACK))
    return report


# ---------------------------------------------------------------------------
# circle decay


@dataclass(frozen=True)
class I2Point:
    y: float
    ratio: float
    bound_shape: float  # -ln(ratio) * r^(beta/7)


def check_i2_bound(params: AlphaParams, n: int, u: float = 1.0,
                   y_grid: Optional[Sequence[float]] = None, points: int = 21) -> list[I2Point]:
    """|Q(e^-(r+iy), u)| / Q(e^-r, u) on [t_n, pi] against the shape exp(-c3 r^(-beta/7))."""
    sol = solve_saddle(params, n, u)
    if y_grid is None:
        y_grid = np.linspace(sol.t_n, math.pi, points)
    out = []
    scale = sol.r ** (params.beta / 7.0)
    for y in y_grid:
        if not (sol.t_n * (1 - 1e-12) <= abs(y) <= math.pi):
            raise ValueError(f"y={y} outside [t_n, pi] = [{sol.t_n}, {math.pi}]")
        ratio = q_ratio_on_circle(params, sol, y)
        shape = -math.log(ratio) * scale if ratio > 0 else math.inf
        out.append(I2Point(y=float(y), ratio=ratio, bound_shape=shape))
    return out


def fit_c3(points: Sequence[I2Point]) -> float:
    """Largest c3 with ratio <= exp(-c3 r^(-beta/7)) on the grid."""
    return min(p.bound_shape for p in points)


def rho_from_c3(params: AlphaParams, c3: float, u: float = 1.0) -> float:
    """rho implied by exp(-(2u(beta-1)/(1+u)^2) rho r^(-beta/7) / 4) at the fitted c3."""
    return 4.0 * c3 * (1.0 + u) ** 2 / (2.0 * u * (params.beta - 1.0))


# ---------------------------------------------------------------------------
# Boltzmann sampler


@dataclass
class SampleBatch:
    n: int
    r_used: float
    attempts: int
    accepted: int
    lengths: list
    seed: int
    exact_classes: int
    generator: str = GENERATOR_ID
    parts: Optional[list] = None  # per sample [[k, multiplicity], ...] when recorded

    def to_dict(self) -> dict:
        return asdict(self)


def _tail_cutoff(gp: np.ndarray, limit: float = 1e-3) -> int:
    # smallest K with sum_{k > K} g p_k <= limit
    suffix = np.cumsum(gp[::-1])[::-1]
    over = np.nonzero(suffix > limit)[0]
    return int(over[-1]) + 1 if over.size else 0


class _ConditionalBlock:
    """Exact law of (X_1..X_c) given sum_k k X_k = s for independent binomial X_k."""

    def __init__(self, g: np.ndarray, p: np.ndarray, c: int, n: int):
        self.c = c
        self.pmfs = []
        self.partial = [np.zeros(n + 1)]
        self.partial[0][0] = 1.0
        for k in range(1, c + 1):
            top = min(int(g[k - 1]), n // k)
            pmf = stats.binom.pmf(np.arange(top + 1), int(g[k - 1]), p[k - 1])
            self.pmfs.append(pmf)
            spread = np.zeros(k * top + 1)
            spread[::k] = pmf
            self.partial.append(np.convolve(self.partial[-1], spread)[: n + 1])
        self.weights = self.partial[-1]
        self.peak = float(self.weights.max())

    def draw(self, rest: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Class counts (one column per k <= c) for each residual in ``rest``."""
        s = np.asarray(rest, dtype=np.int64).copy()
        counts = np.zeros((s.size, self.c), dtype=np.int64)
        for k in range(self.c, 0, -1):
            pmf = self.pmfs[k - 1]
            i = np.arange(pmf.size)
            idx = s[:, None] - k * i[None, :]
            w = np.where(idx >= 0, pmf[None, :] * self.partial[k - 1][np.maximum(idx, 0)], 0.0)
            cum = np.cumsum(w, axis=1)
            pick = (cum < rng.random(s.size)[:, None] * cum[:, -1:]).sum(axis=1)
            counts[:, k - 1] = pick
            s -= k * pick
        assert not s.any()
        return counts


def sample_partitions(params: AlphaParams, n: int, target_accepted: int, seed: int,
                      max_attempts: int = MAX_ATTEMPTS, exact_classes: Optional[int] = None,
                      batch_size: int = 4096, record_parts: bool = False) -> SampleBatch:
    """Uniform random alpha-partitions of n by Boltzmann rejection.

    Under the product measure each integer a with floor(a^alpha) = k is
    included independently with probability e^(-kr) / (1 + e^(-kr)); the
    class counts are Binomial(g(k), p_k) and, conditioned on total n, the
    partition is uniform.  Classes k > n cannot occur in an accepted sample
    and are not drawn.

    With ``exact_classes = c > 0`` the classes k <= c are not drawn
    blindly: given the total R of the other classes, the attempt is kept
    with probability P(S_c = n - R) / max_s P(S_c = s) and the small
    classes are then drawn from their exact conditional law.  ``None``
    picks c = ceil(3 / r).  ``record_parts`` keeps the class
    multiplicities of every accepted sample.
    """
    if n < 1 or target_accepted < 1:
        raise ValueError("need n >= 1 and target_accepted >= 1")
    rng = np.random.Generator(np.random.Philox(seed))
    sol: SaddleSolution = solve_saddle(params, n, 1.0)
    r = sol.r
    g = np.asarray(g_values(params, n), dtype=np.int64)
    k_all = np.arange(1, n + 1)
    p = expit(-k_all * r)

    c = min(n, math.ceil(3.0 / r)) if exact_classes is None else min(int(exact_classes), n)
    block = _ConditionalBlock(g, p, c, n) if c > 0 else None

    # free classes c+1..n: a dense head up to K0 plus a rarely-hit tail
    free_k = k_all[c:]
    free_g = g[c:]
    free_p = p[c:]
    split = _tail_cutoff(free_g * free_p)
    head_k, head_g, head_p = free_k[:split], free_g[:split], free_p[:split]
    tail_k, tail_g, tail_p = free_k[split:], free_g[split:], free_p[split:]
    log_q = tail_g * np.log1p(-tail_p)  # log P(X_k = 0)
    log_none_from = np.concatenate([np.cumsum(log_q[::-1])[::-1], [0.0]])
    p_any = -math.expm1(float(log_none_from[0])) if tail_k.size else 0.0

    def draw_tail() -> tuple[int, int, list]:
        # tail counts conditioned on at least one success
        total = 0
        length = 0
        hits = []
        forced = True
        for idx in range(tail_k.size):
            k = int(tail_k[idx])
            if forced:
                p_hit = -math.expm1(float(log_q[idx])) / -math.expm1(float(log_none_from[idx]))
                if rng.random() >= p_hit:
                    continue
                forced = False
                top = min(int(tail_g[idx]), n // k + 1)
                i = np.arange(1, top + 1)
                w = stats.binom.pmf(i, int(tail_g[idx]), tail_p[idx])
                w[-1] = max(1.0 - stats.binom.cdf(top - 1, int(tail_g[idx]), tail_p[idx]), 0.0)
                x = int(rng.choice(i, p=w / w.sum()))
            else:
                x = int(rng.binomial(int(tail_g[idx]), tail_p[idx]))
            total += k * x
            length += x
            if x:
                hits.append((k, x))
            if total > n:
                break
        return total, length, hits

    lengths: list[int] = []
    parts: Optional[list] = [] if record_parts else None
    attempts = 0
    while len(lengths) < target_accepted and attempts < max_attempts:
        size = min(batch_size, max_attempts - attempts)
        if head_k.size:
            X = rng.binomial(head_g, head_p, size=(size, head_k.size))
            totals, lens = X @ head_k, X.sum(axis=1)
        else:
            totals, lens = np.zeros(size, np.int64), np.zeros(size, np.int64)
        tail_hits = {}
        for row in np.nonzero(rng.random(size) < p_any)[0]:
            t_total, t_len, tail_hits[row] = draw_tail()
            totals[row] += t_total
            lens[row] += t_len
        keep_u = rng.random(size)
        if block is None:
            ok = totals == n
        else:
            rest = n - totals
            weight = np.zeros(size)
            inside = rest >= 0
            weight[inside] = block.weights[rest[inside]]
            ok = keep_u * block.peak < weight
            small = block.draw(rest[ok], rng)
            lens[ok] += small.sum(axis=1)
        hits = np.nonzero(ok)[0]
        need = target_accepted - len(lengths)
        if hits.size >= need:
            hits = hits[:need]
            attempts += int(hits[-1]) + 1
        else:
            attempts += size
        lengths.extend(int(v) for v in lens[hits])
        if parts is not None:
            for pos, row in enumerate(hits):
                mult = {}
                if block is not None:
                    mult.update((k + 1, int(v)) for k, v in enumerate(small[pos]) if v)
                if head_k.size:
                    mult.update((int(k), int(v)) for k, v in zip(head_k, X[row]) if v)
                mult.update(tail_hits.get(row, []))
                parts.append([[k, mult[k]] for k in sorted(mult)])
    if not lengths:
        raise SamplerStarvationError(f"no accepted sample in {attempts} attempts")
    return SampleBatch(n=n, r_used=r, attempts=attempts, accepted=len(lengths), lengths=lengths,
                       seed=seed, exact_classes=c, parts=parts)
