"""Exact mean and variance of the length against the saddle sums and c1, c2."""
import argparse

import numpy as np

from alphapart.asym import c1_c2_constants, mu_sigma_sums
from alphapart.core import AlphaParams
from alphapart.exact import exact_moments, q_series
from alphapart.saddle import solve_saddle

from _common import write_csv

ap = argparse.ArgumentParser()
ap.add_argument("--alpha", default="1/2")
ap.add_argument("--n-grid", default="300,1000,3000,10000")
args = ap.parse_args()
params = AlphaParams.parse(args.alpha)
grid = [int(v) for v in args.n_grid.split(",")]
q = q_series(params, max(grid))
c1, c2 = c1_c2_constants(params)
e = params.exponent

rows, means, variances = [], [], []
for n in grid:
    m = exact_moments(params, n, q)
    mu, s2 = mu_sigma_sums(params, solve_saddle(params, n).r)
    means.append(float(m.mean))
    variances.append(float(m.variance))
    rows.append((n, means[-1], mu, c1 * n ** e, variances[-1], s2, c2 * n ** e))
    print(f"n={n:6d} mean {means[-1]:.3f} / sum {mu:.3f} / leading {c1 * n ** e:.3f}   "
          f"var {variances[-1]:.3f} / sum {s2:.3f} / leading {c2 * n ** e:.3f}")
print("fitted exponents:", np.polyfit(np.log(grid), np.log(means), 1)[0],
      np.polyfit(np.log(grid), np.log(variances), 1)[0], "expected", e)
write_csv(f"moments_{args.alpha.replace('/', '_')}.csv", vars(args),
          ("n", "exact_mean", "mu_sum", "c1_leading", "exact_var", "sigma2_sum", "c2_leading"), rows)
