"""Uniform expansion of the adjoint action along walk words.

For every nonzero traceless v, the product Ad(g_n ... g_1) applied to v
grows exponentially along almost every word of the walk.  The empirical
exponent (1/n) log ||Ad(word) v|| should be strictly positive for random
directions; a zero-width law with zero unipotent step gives the exact
exponent alpha_1 - alpha_2 as a sanity anchor.
"""

import numpy as np

from latticewalk import (CurveSpec, DiagonalLawSpec, Dims, LatticePoint,
                         Observable, UnipotentLawSpec, WalkConfig,
                         lyapunov_check)


def config(widths, **uni_kwargs):
    d = Dims(1, 1)
    return WalkConfig(
        dims=d,
        diagonal_law=DiagonalLawSpec(d, np.array([0.5, -0.5]),
                                     np.array([widths, widths])),
        unipotent_law=UnipotentLawSpec(CurveSpec("moment", d), **uni_kwargs),
        steps=200, trials=1, seed=0,
        start=LatticePoint.standard(d),
        observables=(Observable("siegel_count", radius=1.5),),
        record_schedule=(200,),
    )


rng = np.random.default_rng(0)
vs = []
for _ in range(10):
    m = rng.standard_normal((2, 2))
    m -= np.trace(m) / 2 * np.eye(2)
    vs.append(m)

rep = lyapunov_check(config(0.2), vs, n=200, trials=30)
print("random traceless directions, 30 trials x 200 steps:")
print(f"  exponent range: [{rep.exponents.min():.4f}, "
      f"{rep.exponents.max():.4f}]")
print(f"  nonpositive (trial, v) pairs: {rep.nonpositive_pairs}")

det = lyapunov_check(
    config(0.0, mixture=1.0, aux_kind="point_mass", aux_point=(0.0,)),
    [np.array([[0.0, 1.0], [0.0, 0.0]])], n=200, trials=1)
print(f"deterministic anchor (v = E_12, w = 0, u = id): "
      f"{det.exponents[0, 0]:.12f} (exact: 1.0)")
