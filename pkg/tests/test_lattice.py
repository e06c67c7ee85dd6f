import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticewalk.core import Dims, GroupElement
from latticewalk.lattice import (EnumerationBudgetError, LatticePoint,
                                 Observable, _lll, apply, ball_volume,
                                 bump_profile, reduce, shortest_bump,
                                 shortest_vector_len, siegel_count)


def unimodular_int(rng, n, mixes=6):
    """Random integer matrix with determinant +/-1 (product of shears)."""
    m = np.eye(n)
    for _ in range(mixes):
        i, j = rng.integers(0, n, 2)
        if i != j:
            m[:, j] += rng.integers(-3, 4) * m[:, i]
    return m


def test_lattice_point_rejects_non_unimodular():
    with pytest.raises(ValueError):
        LatticePoint(Dims(1, 1), 2.0 * np.eye(2))
    with pytest.raises(ValueError):
        LatticePoint(Dims(1, 1), np.eye(3))


def test_lll_known_shear():
    # [[1, 100], [0, 1]] reduces to the standard basis up to signs/order
    out = _lll(np.array([[1.0, 100.0], [0.0, 1.0]]))
    norms = sorted(np.linalg.norm(out, axis=0))
    assert np.allclose(norms, [1.0, 1.0])


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10_000))
def test_lll_preserves_lattice(n, seed):
    """Output basis generates the same lattice: change of basis is integer
    with determinant +/-1."""
    rng = np.random.default_rng(seed)
    b = unimodular_int(rng, n)
    out = _lll(b)
    change = np.linalg.solve(b, out)
    assert np.allclose(change, np.round(change), atol=1e-6)
    assert np.isclose(abs(np.linalg.det(change)), 1.0, atol=1e-6)


def test_shortest_vector_oracles():
    d = Dims(1, 1)
    assert shortest_vector_len(LatticePoint.standard(d)) == 1.0
    p = LatticePoint(d, np.diag([2.0, 0.5]))
    assert np.isclose(shortest_vector_len(p), 0.5)
    # sheared basis of Z^2 still has shortest vector 1
    q = LatticePoint(d, np.array([[1.0, 7.0], [0.0, 1.0]]))
    assert np.isclose(shortest_vector_len(q), 1.0)


def test_siegel_count_oracles():
    # hand enumeration of Z^2: R=1.5 gives (+-1,0),(0,+-1),(+-1,+-1) = 8;
    # R=2.1 adds (+-2,0),(0,+-2) = 12
    z2 = LatticePoint.standard(Dims(1, 1))
    assert siegel_count(z2, 1.5) == 8
    assert siegel_count(z2, 2.1) == 12
    # Z^3 at R=1.5: 6 unit vectors + 12 of type (+-1,+-1,0)
    z3 = LatticePoint.standard(Dims(2, 1))
    assert siegel_count(z3, 1.5) == 18
    with pytest.raises(ValueError):
        siegel_count(z2, 0.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.6, 2.5))
def test_siegel_count_is_basis_invariant(seed, radius):
    """The count depends only on the lattice, not on the generating basis."""
    rng = np.random.default_rng(seed)
    d = Dims(1, 1)
    b = unimodular_int(rng, 2, mixes=4)
    assert siegel_count(LatticePoint(d, b), radius) == \
        siegel_count(LatticePoint.standard(d), radius)


def test_apply_moves_the_lattice():
    d = Dims(1, 1)
    g = GroupElement(d, np.diag([2.0, 0.5]))
    p = apply(g, LatticePoint.standard(d))
    assert np.isclose(shortest_vector_len(p), 0.5)


def test_ball_volume_oracles():
    assert np.isclose(ball_volume(1, 2.0), 4.0)
    assert np.isclose(ball_volume(2, 1.5), np.pi * 2.25)
    assert np.isclose(ball_volume(3, 1.2), 4.0 / 3.0 * np.pi * 1.2 ** 3)


def test_enumeration_budget_guard():
    with pytest.raises(EnumerationBudgetError):
        siegel_count(LatticePoint.standard(Dims(1, 1)), 5000.0)


def test_bump_profile():
    assert bump_profile(1.0) == 0.0
    assert bump_profile(-2.0) == 0.0
    assert bump_profile(0.0) == 1.0
    assert 0.0 < bump_profile(0.5) < 1.0


def test_shortest_bump_values():
    z2 = LatticePoint.standard(Dims(1, 1))
    assert shortest_bump(z2, center=1.0, width=0.5) == 1.0
    assert shortest_bump(z2, center=3.0, width=0.5) == 0.0
    with pytest.raises(ValueError):
        shortest_bump(z2, center=1.0, width=0.0)


def test_observable_names_and_haar_means():
    d = Dims(1, 1)
    o = Observable("siegel_count", radius=1.5)
    assert o.name == "siegel_count[R=1.5]"
    assert np.isclose(o.haar_mean(d), np.pi * 2.25)
    b = Observable("shortest_bump", center=1.0, width=0.5)
    assert b.name == "shortest_bump[c=1,w=0.5]"
    assert b.haar_mean(d) is None
    s = Observable("shortest_log", haar_mean_ref=-0.1)
    assert s.name == "shortest_log"
    assert s.haar_mean(d) == -0.1
    with pytest.raises(ValueError):
        Observable("siegel_count", radius=0.0)
    with pytest.raises(ValueError):
        Observable("nope")


def test_observable_evaluation():
    z2 = LatticePoint.standard(Dims(1, 1))
    assert Observable("siegel_count", radius=1.5)(z2) == 8.0
    assert Observable("shortest_log")(z2) == 0.0
