"""Decay of |Q| off the positive axis and the fitted constants c3 and rho."""
import argparse

from alphapart.core import AlphaParams
from alphapart.verify import check_i2_bound, fit_c3, rho_from_c3

from _common import write_csv

ap = argparse.ArgumentParser()
ap.add_argument("--alpha", default="1/2")
ap.add_argument("--u", type=float, default=1.0)
ap.add_argument("--n-grid", default="500,2000,8000,32000")
args = ap.parse_args()
params = AlphaParams.parse(args.alpha)

rows = []
for n in (int(v) for v in args.n_grid.split(",")):
    pts = check_i2_bound(params, n, args.u)
    c3 = fit_c3(pts)
    print(f"n={n:6d} c3={c3:.4f} rho={rho_from_c3(params, c3, args.u):.3f} "
          f"max ratio={max(p.ratio for p in pts):.3e}")
    rows += [(n, p.y, p.ratio, p.bound_shape) for p in pts]
write_csv(f"circle_{args.alpha.replace('/', '_')}.csv", vars(args), ("n", "y", "ratio", "shape"), rows)
