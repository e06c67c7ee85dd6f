"""Ensemble averages of the Siegel count converge to the ball volume.

Runs the random walk z_n = a_n u(x_n) ... a_1 u(x_1) Z^2 for an ensemble of
independent trials and compares the mean lattice-point count in a ball of
radius R with the Haar expectation pi R^2 (the Siegel integral formula).
Scaled down from the full acceptance run so it finishes in a few seconds.
"""

import numpy as np

from latticewalk import (CurveSpec, DiagonalLawSpec, Dims, LatticePoint,
                         Observable, UnipotentLawSpec, WalkConfig,
                         run_ensemble)

R = 1.5
d = Dims(1, 1)

cfg = WalkConfig(
    dims=d,
    diagonal_law=DiagonalLawSpec(d, np.array([0.5, -0.5]),
                                 np.array([0.2, 0.2])),
    unipotent_law=UnipotentLawSpec(CurveSpec("moment", d)),
    steps=40,
    trials=2000,
    seed=0,
    start=LatticePoint.standard(d),
    observables=(Observable("siegel_count", radius=R),),
    record_schedule=tuple(range(2, 41, 2)),
)

result = run_ensemble(cfg)
target = np.pi * R ** 2

print(f"target (Haar mean) = pi R^2 = {target:.4f}")
print(f"{'n':>4} {'mean':>8} {'stderr':>8} {'dev/SE':>7}")
for n, mean, stderr, count in result.series(0):
    z = (mean - target) / stderr if stderr > 0 else float("nan")
    print(f"{n:>4} {mean:>8.4f} {stderr:>8.4f} {z:>7.2f}")
print(f"aborted trials: {result.aborted} / {cfg.trials}")
