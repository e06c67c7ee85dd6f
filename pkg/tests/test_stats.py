import numpy as np
import pytest

from latticewalk.core import Dims
from latticewalk.measures import CurveSpec, DiagonalLawSpec, UnipotentLawSpec
from latticewalk.stats import (chernoff_rate, chernoff_tail,
                               conjugation_growth, estimate_rate,
                               expansion_set_mass, lyapunov_check,
                               q_nonvanishing_check, wilson_interval)

from conftest import make_walk_config


def law2(widths=0.2, law="uniform_box"):
    return DiagonalLawSpec(Dims(1, 1), np.array([0.5, -0.5]),
                           np.array([widths, widths]), law=law)


# ---------------------------------------------------------------------------
# Wilson intervals

def test_wilson_interval_frozen_value():
    # 5 successes of 10, z = 1.96: center 0.5, half-width 0.263410 (hand
    # evaluation of the score formula)
    lo, hi = wilson_interval(5, 10)
    assert np.isclose(lo, 0.236590, atol=2e-6)
    assert np.isclose(hi, 0.763410, atol=2e-6)


def test_wilson_interval_edges():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and 0.0 < hi < 0.05
    lo, hi = wilson_interval(100, 100)
    assert 0.95 < lo < 1.0 and np.isclose(hi, 1.0)
    assert wilson_interval(0, 0) == (0.0, 1.0)


def test_wilson_interval_contains_estimate():
    for s, n in [(1, 7), (3, 11), (50, 200)]:
        lo, hi = wilson_interval(s, n)
        assert lo <= s / n <= hi


# ---------------------------------------------------------------------------
# rate fitting

def test_estimate_rate_recovers_synthetic_rate():
    eta, c, haar = 0.31, 4.2, 7.0686
    series = [(n, haar + c * np.exp(-eta * n), 1e-9) for n in range(2, 30, 2)]
    fit = estimate_rate(series, haar)
    assert not fit.floor_reached
    assert np.isclose(fit.eta_hat, eta, rtol=1e-6)
    assert np.isclose(fit.c_hat, c, rtol=1e-5)
    assert fit.r2 > 0.999999
    assert fit.eta_lo <= eta <= fit.eta_hi
    assert (fit.n_min, fit.n_max) == (2, 28)


def test_estimate_rate_noise_floor():
    # deviations all below 2 standard errors: floor report, no fit
    series = [(n, 7.0686 + 0.01, 0.5) for n in (2, 4, 6, 8)]
    fit = estimate_rate(series, 7.0686)
    assert fit.floor_reached
    assert fit.floor_n == 2
    assert fit.points_used == 0


def test_estimate_rate_partial_floor():
    haar = 1.0
    series = [(2, 3.0, 0.01), (4, 2.0, 0.01), (6, 1.5, 0.01),
              (8, 1.0, 0.01), (10, 1.0, 0.01)]
    fit = estimate_rate(series, haar)
    assert not fit.floor_reached
    assert fit.floor_n == 8
    assert fit.points_used == 3


# ---------------------------------------------------------------------------
# Chernoff

def test_chernoff_rate_two_point_closed_form():
    # +-w coin: I(eps) = r atanh(r) + log(1 - r^2)/2 with r = eps/w
    law = law2(law="discrete_two_point")
    r = 0.05 / 0.2
    exact = r * np.arctanh(r) + 0.5 * np.log(1 - r * r)
    assert np.isclose(chernoff_rate(law, 0, 0.05), exact, atol=1e-9)


def test_chernoff_rate_uniform_properties():
    law = law2()
    r1 = chernoff_rate(law, 0, 0.05)
    r2 = chernoff_rate(law, 0, 0.10)
    assert 0 < r1 < r2
    # the uniform law on [-w, w] has lighter tails than the +-w coin
    assert r1 > chernoff_rate(law2(law="discrete_two_point"), 0, 0.05)
    # beyond the support the deviation is impossible
    assert chernoff_rate(law, 0, 0.25) == np.inf
    with pytest.raises(ValueError):
        chernoff_rate(law, 0, 0.0)


def test_chernoff_rate_forced_coordinate():
    # the last coordinate of the k0=3 law is the sum of two free ones, so
    # its rate at fixed eps is smaller (heavier tails) than a single one
    law = DiagonalLawSpec(Dims(2, 1), np.array([0.4, 0.1, -0.5]),
                          np.array([0.2, 0.2, 0.2]))
    assert chernoff_rate(law, 2, 0.05) < chernoff_rate(law, 0, 0.05)


def test_chernoff_tail_structure():
    law = law2()
    curve = chernoff_tail(law, 0, 0.05, (5, 10, 20), 4000,
                          rng=np.random.default_rng(0))
    assert curve.ns == (5, 10, 20)
    for p, lo, hi in zip(curve.probs, curve.lo, curve.hi):
        assert 0 <= lo <= p <= hi <= 1
    # empirical tail below the analytic bound at every n
    for p, lb in zip(curve.probs, curve.analytic_log_bound):
        if p > 0:
            assert np.log(p) <= lb + 1e-9 or p <= np.exp(lb)
    assert curve.probs[0] >= curve.probs[-1]


# ---------------------------------------------------------------------------
# expansion sets and conjugation growth

def test_expansion_set_mass_decays():
    curve = expansion_set_mass(law2(), (5, 40), 4000,
                               rng=np.random.default_rng(0))
    assert curve.probs[0] >= curve.probs[1]
    assert curve.probs[1] < 0.05


def test_expansion_set_mass_rejects_nonexpanding():
    bad = DiagonalLawSpec(Dims(1, 1), np.array([-0.5, 0.5]),
                          np.array([0.2, 0.2]))
    with pytest.raises(ValueError, match=r"\(1, 2\)"):
        expansion_set_mass(bad, (5,), 10)


def test_conjugation_growth_small_failure_mass():
    law = law2()
    uni = UnipotentLawSpec(CurveSpec("moment", Dims(1, 1)))
    curve = conjugation_growth(law, uni, (10, 40), 4000,
                               c_probe=float(np.exp(law.beta)),
                               rng=np.random.default_rng(0))
    assert curve.probs[1] < 0.05
    with pytest.raises(ValueError):
        conjugation_growth(law, uni, (10,), 10, c_probe=1.0)


# ---------------------------------------------------------------------------
# Lyapunov exponents

def test_lyapunov_deterministic_oracle():
    """Zero-width diagonal law, zero unipotent step, v = E_12: the adjoint
    multiplies v by exp(t_1 - t_2) = e each step, exponent exactly 1."""
    cfg = make_walk_config(widths=0.0, steps=50, trials=1, mixture=1.0,
                           aux_kind="point_mass", aux_point=(0.0,))
    v = np.array([[0.0, 1.0], [0.0, 0.0]])
    rep = lyapunov_check(cfg, [v], 50, 1)
    assert abs(rep.exponents[0, 0] - 1.0) < 1e-12
    assert rep.nonpositive_pairs == 0
    assert rep.underflows == 0


def test_lyapunov_positive_for_random_directions():
    cfg = make_walk_config(steps=100, trials=5)
    rng = np.random.default_rng(0)
    vs = []
    for _ in range(4):
        m = rng.standard_normal((2, 2))
        m -= np.trace(m) / 2 * np.eye(2)
        vs.append(m)
    rep = lyapunov_check(cfg, vs, 100, 5)
    assert rep.exponents.shape == (5, 4)
    assert np.all(rep.exponents > 0)


def test_lyapunov_input_validation():
    cfg = make_walk_config(steps=5, trials=1)
    with pytest.raises(ValueError):
        lyapunov_check(cfg, [np.zeros((2, 2))], 5, 1)
    with pytest.raises(ValueError):
        lyapunov_check(cfg, [np.eye(2)], 5, 1)


# ---------------------------------------------------------------------------
# Q non-vanishing

def test_q_nonvanishing_random_directions():
    rng = np.random.default_rng(0)
    for dims in (Dims(1, 1), Dims(2, 1)):
        vs = []
        for _ in range(5):
            m = rng.standard_normal((dims.k0, dims.k0))
            m -= np.trace(m) / dims.k0 * np.eye(dims.k0)
            vs.append(m)
        rep = q_nonvanishing_check(dims, vs, 2000,
                                   rng=np.random.default_rng(1))
        assert rep.fractions == (0.0,) * 5


def test_q_nonvanishing_lower_triangular_direction():
    # v = E_21 gives Q(Ad(u(x)) v) = -x^2, zero only on a null set
    v = np.array([[0.0, 0.0], [1.0, 0.0]])
    rep = q_nonvanishing_check(Dims(1, 1), [v], 2000,
                               rng=np.random.default_rng(2))
    assert rep.fractions == (0.0,)
    with pytest.raises(ValueError):
        q_nonvanishing_check(Dims(1, 1), [np.zeros((2, 2))], 10)
