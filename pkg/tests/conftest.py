import numpy as np
import pytest

from latticewalk import (CurveSpec, DiagonalLawSpec, Dims, LatticePoint,
                         Observable, UnipotentLawSpec, WalkConfig)


@pytest.fixture
def dims11():
    return Dims(1, 1)


@pytest.fixture
def dims21():
    return Dims(2, 1)


def make_walk_config(dims=None, alpha=None, widths=0.2, curve="moment",
                     steps=10, trials=4, seed=0, schedule=None,
                     observables=None, **uni_kwargs):
    dims = dims or Dims(1, 1)
    if alpha is None:
        alpha = (0.5, -0.5) if dims.k0 == 2 else (0.4, 0.1, -0.5)
    if np.isscalar(widths):
        widths = (widths,) * dims.k0
    dl = DiagonalLawSpec(dims, np.asarray(alpha, float),
                         np.asarray(widths, float))
    ul = UnipotentLawSpec(CurveSpec(curve, dims), **uni_kwargs)
    if observables is None:
        observables = (Observable("siegel_count", radius=1.5),)
    if schedule is None:
        schedule = (steps,)
    return WalkConfig(dims=dims, diagonal_law=dl, unipotent_law=ul,
                      steps=steps, trials=trials, seed=seed,
                      start=LatticePoint.standard(dims),
                      observables=tuple(observables),
                      record_schedule=tuple(schedule))
