"""Boltzmann samples at large n against the exact mean and variance."""
import argparse
import math

import numpy as np

from alphapart.core import AlphaParams
from alphapart.exact import exact_moments
from alphapart.verify import sample_partitions

from _common import write_csv

ap = argparse.ArgumentParser()
ap.add_argument("--alpha", default="1/2")
ap.add_argument("--n", type=int, default=3000)
ap.add_argument("--samples", type=int, default=10000)
ap.add_argument("--seed", type=int, default=1)
args = ap.parse_args()
params = AlphaParams.parse(args.alpha)

batch = sample_partitions(params, args.n, args.samples, args.seed)
L = np.asarray(batch.lengths, dtype=float)
m = exact_moments(params, args.n)
z = (L.mean() - float(m.mean)) / (L.std(ddof=1) / math.sqrt(L.size))
print(f"{batch.accepted} samples from {batch.attempts} attempts; "
      f"mean {L.mean():.3f} vs exact {float(m.mean):.3f} (z={z:+.2f}); "
      f"var {L.var(ddof=1):.3f} vs exact {float(m.variance):.3f}")
write_csv(f"samples_{args.alpha.replace('/', '_')}_n{args.n}_seed{args.seed}.csv",
          {**vars(args), "attempts": batch.attempts, "generator": batch.generator},
          ("sample", "length"), enumerate(batch.lengths))
