"""Fitting an exponential convergence rate to the ensemble deviation.

The deviation |mean_n - pi R^2| of the Siegel-count average decays roughly
like C e^{-eta n} until it drops below Monte Carlo noise.  estimate_rate
restricts the fit to steps where the deviation is resolved above 2 standard
errors and reports either a rate with confidence interval or the step at
which the noise floor was reached.
"""

import numpy as np

from latticewalk import (CurveSpec, DiagonalLawSpec, Dims, LatticePoint,
                         Observable, UnipotentLawSpec, WalkConfig,
                         estimate_rate, run_ensemble)

R = 1.5
d = Dims(1, 1)

cfg = WalkConfig(
    dims=d,
    diagonal_law=DiagonalLawSpec(d, np.array([0.5, -0.5]),
                                 np.array([0.2, 0.2])),
    unipotent_law=UnipotentLawSpec(CurveSpec("moment", d)),
    steps=40,
    trials=4000,
    seed=0,
    start=LatticePoint.standard(d),
    observables=(Observable("siegel_count", radius=R),),
    record_schedule=tuple(range(2, 41, 2)),
)

result = run_ensemble(cfg)
fit = estimate_rate(result.series(0), np.pi * R ** 2)

if fit.floor_reached:
    print(f"noise floor reached at n = {fit.floor_n} "
          f"({fit.points_used} resolved points, too few to fit)")
else:
    print(f"eta_hat = {fit.eta_hat:.4f}  "
          f"[{fit.eta_lo:.4f}, {fit.eta_hi:.4f}] (95%)")
    print(f"C_hat   = {fit.c_hat:.4f}")
    print(f"R^2     = {fit.r2:.4f} over n in [{fit.n_min}, {fit.n_max}]")
    if fit.floor_n is not None:
        print(f"noise floor first hit at n = {fit.floor_n}")
