"""Command-line entry point: ``alphapart <command> --alpha A ...``.

Exit status: 0 on success, 2 on invalid input, 3 when a numerical
routine cannot certify its result.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__
from .asym import c1_c2_constants, predict
from .core import AlphaParams, PrecisionExhaustedError
from .exact import (
    DEFAULT_MEMORY_BUDGET,
    BruteForceSizeError,
    MemoryBudgetError,
    brute_force_counts,
    build_count_table,
    distribution_summary,
)
from .saddle import BracketError, TruncationError, h_sum, h_sum_leading, saddle_qn_approx, solve_saddle
from .serialize import atomic_write, csv_text, json_text
from .special import DomainError
from .verify import (
    GENERATOR_ID,
    SamplerStarvationError,
    check_i2_bound,
    fit_c3,
    rho_from_c3,
    run_clt_report,
    sample_partitions,
)

OUTPUT_DIR_ENV = "ALPHAPART_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "alphapart_out"
COMMANDS = ("count", "saddle", "asym", "verify", "sample", "h-check")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERIC = 3

NUMERIC_ERRORS = (PrecisionExhaustedError, TruncationError, BracketError, SamplerStarvationError,
                  MemoryBudgetError, ArithmeticError)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    alpha: str
    n_grid: list = field(default_factory=list)
    u: float = 1.0
    t_grid: list = field(default_factory=lambda: [-2.0, -1.5, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0])
    x_grid: list = field(default_factory=lambda: [0.5, 1.0, 1.5, 2.0])
    tau_grid: list = field(default_factory=lambda: [0.1, 0.05, 0.02, 0.01])
    gamma: float = 2.0
    j: int = 0
    method: str = "table"
    circle: bool = False
    target: int = 10000
    seed: int = 0
    exact_classes: Optional[int] = None
    max_attempts: int = 10 ** 6
    format: str = "json"
    output: Optional[str] = None
    delta: float = 0.25
    eps_num: float = 1e-12
    guard_digits: int = 30
    memory_budget: float = DEFAULT_MEMORY_BUDGET

    def params(self) -> AlphaParams:
        return AlphaParams.parse(self.alpha, delta=self.delta, eps_num=self.eps_num,
                                 guard_digits=self.guard_digits)

    def resolved(self, params: AlphaParams) -> dict:
        d = asdict(self)
        d["params"] = params.to_dict()
        d["version"] = __version__
        return d


def _floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _ints(text: str) -> list:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alphapart", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"alphapart {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", required=True, help='"p/q" (exact path) or a decimal in (0, 1)')
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", help=f"file path, '-' for stdout; default under ${OUTPUT_DIR_ENV}")
    common.add_argument("--delta", type=float, default=0.25)
    common.add_argument("--eps-num", type=float, default=1e-12)
    common.add_argument("--guard-digits", type=int, default=30)
    common.add_argument("--memory-budget", type=float, default=DEFAULT_MEMORY_BUDGET, help="bytes")

    def n_args(p, default=None):
        g = p.add_mutually_exclusive_group(required=default is None)
        g.add_argument("--n", type=int)
        g.add_argument("--n-grid", type=_ints, help="comma separated")
        p.set_defaults(default_grid=default)

    p = sub.add_parser("count", parents=[common], help="exact q(n, j)")
    n_args(p)
    p.add_argument("--method", choices=("table", "brute"), default="table")

    p = sub.add_parser("saddle", parents=[common], help="saddle point r(n, u)")
    n_args(p)
    p.add_argument("--u", type=float, default=1.0)

    p = sub.add_parser("asym", parents=[common], help="mean and variance asymptotics")
    n_args(p)

    p = sub.add_parser("verify", parents=[common], help="CLT convergence report")
    n_args(p, default=[100, 300, 1000, 3000])
    p.add_argument("--t-grid", type=_floats, default=None)
    p.add_argument("--x-grid", type=_floats, default=None)
    p.add_argument("--circle", action="store_true", help="add the circle-decay check at each n")

    p = sub.add_parser("sample", parents=[common], help="Boltzmann sampler")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--target", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact-classes", type=int, default=None, help="0 for plain rejection")
    p.add_argument("--max-attempts", type=int, default=10 ** 6)

    p = sub.add_parser("h-check", parents=[common], help="h-sum against its Mellin leading term")
    p.add_argument("--gamma", type=float, default=2.0)
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--u", type=float, default=1.0)
    p.add_argument("--tau-grid", type=_floats, default=None)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command, alpha=ns.alpha, format=ns.format, output=ns.output,
                    delta=ns.delta, eps_num=ns.eps_num, guard_digits=ns.guard_digits,
                    memory_budget=ns.memory_budget)
    if getattr(ns, "n_grid", None):
        cfg.n_grid = list(ns.n_grid)
    elif getattr(ns, "n", None) is not None:
        cfg.n_grid = [ns.n]
    elif getattr(ns, "default_grid", None):
        cfg.n_grid = list(ns.default_grid)
    for name in ("u", "method", "circle", "target", "seed", "exact_classes", "max_attempts", "gamma", "j"):
        if hasattr(ns, name):
            setattr(cfg, name, getattr(ns, name))
    for name in ("t_grid", "x_grid", "tau_grid"):
        if getattr(ns, name, None):
            setattr(cfg, name, list(getattr(ns, name)))
    return cfg


def validate(cfg: RunConfig) -> AlphaParams:
    if cfg.command not in COMMANDS:
        raise ConfigError(f"unknown command {cfg.command!r}")
    try:
        params = cfg.params()
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"--alpha {cfg.alpha!r}: {exc}") from None
    if cfg.command != "h-check":
        if not cfg.n_grid or any(n < 1 for n in cfg.n_grid):
            raise ConfigError("n must be >= 1")
    if cfg.u <= 0:
        raise ConfigError("u must be positive")
    if any(abs(t) > 3 for t in cfg.t_grid):
        raise ConfigError("t-grid must lie in [-3, 3]")
    if cfg.command == "sample" and cfg.target < 1:
        raise ConfigError("target must be >= 1")
    if cfg.command == "h-check" and (cfg.gamma <= 0 or cfg.j < 0 or any(t <= 0 for t in cfg.tau_grid)):
        raise ConfigError("need gamma > 0, j >= 0 and positive tau")
    return params


# ---------------------------------------------------------------------------
# commands; each returns (result, csv header, csv rows, summary)


def _count(cfg, params):
    results, rows = [], []
    if cfg.method == "brute":
        for n in cfg.n_grid:
            pairs = brute_force_counts(params, n)
            results.append({"n": n, "q_n": str(sum(c for _, c in pairs)),
                            "counts": [{"j": j, "q": str(c)} for j, c in pairs]})
            rows += [(n, j, str(c)) for j, c in pairs]
    else:
        table = build_count_table(params, max(cfg.n_grid), memory_budget=int(cfg.memory_budget))
        for n in cfg.n_grid:
            s = distribution_summary(table, n)
            pairs = [(j, c) for j, c in enumerate(table.row(n)) if c]
            results.append({"n": n, "q_n": str(s.q_n), "mean": float(s.mean), "mean_exact": s.mean,
                            "variance": float(s.variance), "variance_exact": s.variance,
                            "ks_to_normal": s.ks_to_normal, "k_cap": table.k_cap,
                            "counts": [{"j": j, "q": str(c)} for j, c in pairs]})
            rows += [(n, j, str(c)) for j, c in pairs]
    last = results[-1]
    return {"rows": results}, ("n", "j", "q"), rows, f"q({last['n']})={last['q_n']}"


def _saddle(cfg, params):
    results, rows = [], []
    for n in cfg.n_grid:
        sol = solve_saddle(params, n, cfg.u)
        d = sol.to_dict()
        if cfg.u == 1.0:
            d["log_q_approx"] = saddle_qn_approx(params, sol)
        results.append(d)
        rows += [(n, cfg.u, k, v) for k, v in sorted(d.items()) if k not in ("n", "u")]
    return {"solutions": results}, ("n", "u", "metric", "value"), rows, f"r={results[-1]['r']!r}"


def _asym(cfg, params):
    c1, c2 = c1_c2_constants(params)
    est = [predict(params, n).to_dict() for n in cfg.n_grid]
    rows = [(e["n"], k, v) for e in est for k, v in sorted(e.items()) if k != "n"]
    result = {"c1": c1, "c2": c2, "exponent": params.exponent, "estimates": est}
    return result, ("n", "metric", "value"), rows, f"c1={c1!r} c2={c2!r} exponent={params.exponent!r}"


def _verify(cfg, params):
    rep = run_clt_report(params, cfg.n_grid, cfg.t_grid, cfg.x_grid)
    result = rep.to_dict()
    rows = []
    for i, n in enumerate(rep.n_grid):
        for key in ("ks_values", "mean_rel_gap", "var_rel_gap", "exact_mean", "exact_variance",
                    "predicted_mean", "predicted_variance", "eta", "tail_threshold_T", "gaussian_regime_limit"):
            rows.append((n, key, "", getattr(rep, key)[i]))
        rows.append((n, "mgf_deviation", "", rep.mgf_deviation[i][1]))
    for t in rep.tail_check:
        rows.append((t.n, f"tail_{t.side}", t.x, t.exact_tail))
        rows.append((t.n, f"tail_{t.side}_pass", t.x, int(t.passed)))
    if cfg.circle:
        circle = []
        for n in rep.n_grid:
            pts = check_i2_bound(params, n, cfg.u)
            c3 = fit_c3(pts)
            circle.append({"n": n, "c3": c3, "rho": rho_from_c3(params, c3, cfg.u),
                           "max_ratio": max(p.ratio for p in pts), "points": pts})
            rows.append((n, "c3", "", c3))
            rows.append((n, "max_circle_ratio", "", circle[-1]["max_ratio"]))
        result["circle"] = circle
    last = rep.n_grid[-1]
    passed = all(t.passed for t in rep.tail_check if t.n == last)
    summary = f"ks={rep.ks_values[-1]:.3g} mgf_dev={rep.mgf_deviation[-1][1]:.3g} tails={'pass' if passed else 'FAIL'}"
    return result, ("n", "metric", "param", "value"), rows, summary


def _sample(cfg, params):
    n = cfg.n_grid[0]
    batch = sample_partitions(params, n, cfg.target, cfg.seed, max_attempts=cfg.max_attempts,
                              exact_classes=cfg.exact_classes)
    result = batch.to_dict()
    rows = [(i, v) for i, v in enumerate(batch.lengths)]
    mean = sum(batch.lengths) / batch.accepted
    return result, ("sample", "length"), rows, f"accepted={batch.accepted}/{batch.attempts} mean_length={mean:.6g}"


def _h_check(cfg, params):
    out, rows = [], []
    for tau in cfg.tau_grid:
        h = h_sum(params, cfg.gamma, cfg.j, tau, cfg.u)
        lead = h_sum_leading(cfg.gamma, cfg.j, tau, cfg.u)
        gap = abs(h / lead - 1.0)
        out.append({"tau": tau, "h": h, "leading": lead, "rel_gap": gap})
        rows.append((tau, h, lead, gap))
    return {"gamma": cfg.gamma, "j": cfg.j, "u": cfg.u, "points": out}, ("tau", "h", "leading", "rel_gap"), \
        rows, f"final rel_gap={out[-1]['rel_gap']:.3g}"


HANDLERS = {"count": _count, "saddle": _saddle, "asym": _asym, "verify": _verify,
            "sample": _sample, "h-check": _h_check}


def default_output_path(cfg: RunConfig) -> Path:
    base = Path(os.environ.get(OUTPUT_DIR_ENV, DEFAULT_OUTPUT_DIR))
    alpha = cfg.alpha.strip().replace("/", "_")
    parts = [cfg.command, f"alpha{alpha}"]
    if cfg.n_grid:
        parts.append("n" + "-".join(str(n) for n in cfg.n_grid))
    if cfg.command == "sample":
        parts.append(f"seed{cfg.seed}")
    return base / ("_".join(parts) + "." + cfg.format)


def run(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        params = validate(cfg)
    except ConfigError as exc:
        print(f"alphapart: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if cfg.command == "sample":
        cfg.n_grid = cfg.n_grid[:1]
    try:
        result, header, rows, summary = HANDLERS[cfg.command](cfg, params)
    except (BruteForceSizeError, DomainError) as exc:
        print(f"alphapart: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NUMERIC_ERRORS as exc:
        print(f"alphapart: numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    kind = cfg.command.replace("-", "_")
    config = cfg.resolved(params)
    if cfg.command == "sample":
        config["generator"] = GENERATOR_ID
    if cfg.format == "json":
        text = json_text(kind, config, result)
    else:
        text = csv_text(kind, config, header, rows)
    if cfg.output == "-":
        stdout.write(text)
        print(f"{cfg.command} alpha={params.label()} {summary}", file=sys.stderr)
    else:
        path = Path(cfg.output) if cfg.output else default_output_path(cfg)
        atomic_write(path, text)
        print(f"{cfg.command} alpha={params.label()} {summary} -> {path}", file=stdout)
    return EXIT_OK


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
