"""Relative error of the saddle-point estimate of q(n) against exact counts."""
import argparse
import math

from alphapart.core import AlphaParams
from alphapart.exact import q_series
from alphapart.saddle import saddle_qn_approx, solve_saddle

from _common import write_csv

ap = argparse.ArgumentParser()
ap.add_argument("--alpha", default="1/2")
ap.add_argument("--n-grid", default="50,100,200,500,1000,2000,5000")
args = ap.parse_args()
params = AlphaParams.parse(args.alpha)
grid = [int(v) for v in args.n_grid.split(",")]
q = q_series(params, max(grid))

rows = []
for n in grid:
    sol = solve_saddle(params, n)
    err = math.exp(saddle_qn_approx(params, sol) - math.log(q[n])) - 1
    # the error should scale like r^(2 beta / 7) or better
    rows.append((n, sol.r, err, sol.r ** (2 * params.beta / 7)))
    print(f"n={n:6d} r={sol.r:.5f} rel.err={err:+.3e}")
write_csv(f"saddle_accuracy_{args.alpha.replace('/', '_')}.csv", vars(args),
          ("n", "r", "rel_error", "r_pow_2beta_over_7"), rows)
