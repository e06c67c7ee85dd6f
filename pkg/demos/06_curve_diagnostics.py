"""Diagnostics for the unipotent step measure's curve.

Two checks on the pushforward of Uniform[0,1] along the curve phi:
  1. Non-planarity: the determinant F = det[psi'(x_1), ..., psi'(x_k)]
     vanishes only on a null set for the moment curve, but identically
     for a planar curve.  This is what makes the walk measure spread out.
  2. Density reconstruction (k = 1): the sampled pushforward matches the
     change-of-variables density 1/|phi'| on each monotone piece; for
     phi(t) = t^2 that density is 1/(2 sqrt(y)).
"""

import numpy as np

from latticewalk import (CurveSpec, Dims, nonplanarity_check,
                         pushforward_density_check)

print("== non-planarity, k = 2 ==")
for kind in ("moment", "planar_demo"):
    rep = nonplanarity_check(CurveSpec(kind, Dims(2, 1)), 100_000,
                             rng=np.random.default_rng(0))
    print(f"  {kind:<12} zero fraction = {rep.zero_fraction}  "
          f"median |F| = {rep.abs_det_quantiles[0.5]:.3e}")

print("== pushforward density, phi(t) = t^2 ==")
curve = CurveSpec("custom_polynomial", Dims(1, 1),
                  coefficients=((0.0, 0.0, 1.0),))
edges = np.linspace(0.0, 1.0, 21)
diag = pushforward_density_check([1.0], curve, edges, 200_000,
                                 rng=np.random.default_rng(0))
print(f"  total-variation discrepancy: {diag.tv_discrepancy:.4f}")
print(f"  {'cell':>12} {'hist':>8} {'analytic':>9} {'density':>8} "
      f"{'1/(2 sqrt y)':>12}")
for c in range(0, 20, 4):
    y = 0.5 * (edges[c] + edges[c + 1])
    print(f"  [{edges[c]:.2f}, {edges[c+1]:.2f}] {diag.hist_mass[c]:>8.4f} "
          f"{diag.analytic_mass[c]:>9.4f} {diag.density_at_centers[c]:>8.3f} "
          f"{0.5 / np.sqrt(y):>12.3f}")
