"""Quantitative post-processing of walk output: exponential-rate fits,
Chernoff tails with analytic bounds, expansion-set masses, conjugation growth,
and Lyapunov (uniform-expansion) checks.

Tail estimators always carry Wilson intervals; downstream assertions should
use the interval endpoints, never the point estimates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp
from scipy.stats import t as student_t

from .core import Dims
from .measures import DiagonalLawSpec, UnipotentLawSpec


def wilson_interval(successes: int, n: int, z: float = 1.96):
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        return 0.0, 1.0
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


# ---------------------------------------------------------------------------
# exponential-rate fitting

@dataclass(frozen=True)
class RateFit:
    floor_reached: bool
    eta_hat: float = float("nan")
    c_hat: float = float("nan")
    r2: float = float("nan")
    eta_lo: float = float("nan")
    eta_hi: float = float("nan")
    n_min: int = 0
    n_max: int = 0
    floor_n: int | None = None       # first n at which the noise floor is hit
    points_used: int = 0


def estimate_rate(series, haar_mean: float, signal_z: float = 2.0) -> RateFit:
    """Least-squares fit of log|mean - haar_mean| against n over the region
    where the deviation is resolved above Monte Carlo noise.

    `series` holds (n, mean, stderr) triples.  With fewer than 3 resolved
    points a floor-reached report is returned instead of a fit.
    """
    rows = sorted((int(r[0]), float(r[1]), float(r[2]) if len(r) > 2 else 0.0)
                  for r in series)
    ns, diffs = [], []
    floor_n = None
    for n, m, s in rows:
        d = abs(m - haar_mean)
        if d > signal_z * s and d > 0:
            ns.append(n)
            diffs.append(d)
        elif floor_n is None:
            floor_n = n
    if len(ns) < 3:
        return RateFit(floor_reached=True, floor_n=floor_n, points_used=len(ns))
    x = np.asarray(ns, dtype=float)
    y = np.log(np.asarray(diffs))
    A = np.vstack([x, np.ones_like(x)]).T
    coef, res, *_ = np.linalg.lstsq(A, y, rcond=None)
    slope, intercept = coef
    yhat = A @ coef
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    dof = len(x) - 2
    if dof > 0 and ss_res > 0:
        s2 = ss_res / dof
        se_slope = np.sqrt(s2 / np.sum((x - x.mean()) ** 2))
        tcrit = student_t.ppf(0.975, dof)
        lo, hi = slope - tcrit * se_slope, slope + tcrit * se_slope
    else:
        lo = hi = slope
    return RateFit(floor_reached=False, eta_hat=float(-slope),
                   c_hat=float(np.exp(intercept)), r2=r2,
                   eta_lo=float(-hi), eta_hi=float(-lo),
                   n_min=int(x[0]), n_max=int(x[-1]), floor_n=floor_n,
                   points_used=len(ns))


# ---------------------------------------------------------------------------
# tails

@dataclass(frozen=True)
class TailCurve:
    ns: tuple
    probs: tuple
    lo: tuple                        # Wilson lower endpoints
    hi: tuple                        # Wilson upper endpoints
    trials: tuple
    slope: float = float("nan")      # fitted log-linear decay of the tail
    analytic_log_bound: tuple = ()   # log of the analytic Chernoff bound per n


def _fit_tail_slope(ns, probs) -> float:
    pts = [(n, p) for n, p in zip(ns, probs) if p > 0]
    if len(pts) < 2:
        return float("nan")
    x = np.array([n for n, _ in pts], dtype=float)
    y = np.log([p for _, p in pts])
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[0])


def _coordinate_cgf(law: DiagonalLawSpec, coordinate: int):
    """Cumulant generating function of the centered coordinate law.

    Free coordinates are uniform (or two-point) of the stated half-width; the
    forced last coordinate is minus the sum of the free ones, whose centered
    law is the convolution of the (symmetric) free laws.
    """
    k0 = law.dims.k0
    if not 0 <= coordinate < k0:
        raise ValueError("coordinate out of range")
    if coordinate < k0 - 1:
        widths = [float(law.widths[coordinate])]
    else:
        widths = [float(w) for w in law.widths[: k0 - 1]]

    def single(w, t):
        if w == 0.0:
            return 0.0
        if law.law == "uniform_box":
            tw = t * w
            if abs(tw) < 1e-8:
                return tw * tw / 6.0
            return float(np.log(np.sinh(tw) / tw))
        return float(np.log(np.cosh(t * w)))

    return lambda t: sum(single(w, t) for w in widths)


def chernoff_rate(law: DiagonalLawSpec, coordinate: int, epsilon: float) -> float:
    """Large-deviation rate I(eps) = sup_t [t*eps - K(t)] for the centered
    coordinate law, by one-dimensional optimization of the cgf."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    K = _coordinate_cgf(law, coordinate)
    support = sum(float(w) for w in
                  ([law.widths[coordinate]] if coordinate < law.dims.k0 - 1
                   else law.widths[: law.dims.k0 - 1]))
    if support == 0.0:
        return float("inf")
    if epsilon >= support:
        return float("inf")        # deviation beyond the support is impossible
    obj = lambda t: -(t * epsilon - K(t))
    res = minimize_scalar(obj, bounds=(0.0, 200.0 / max(support, 1e-12)),
                          method="bounded",
                          options={"xatol": 1e-12})
    return float(-res.fun)


def chernoff_tail(law: DiagonalLawSpec, coordinate: int, epsilon: float,
                  n_grid, trials: int,
                  rng: np.random.Generator | None = None) -> TailCurve:
    """Empirical P(|S_n/n - rho| > eps) for sums of the coordinate law, with
    Wilson intervals and the analytic Chernoff bound log(2) - n*I(eps)."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    rng = rng or np.random.default_rng(0)
    k0 = law.dims.k0
    rho = float(law.alpha[coordinate])
    ns, probs, los, his, logb = [], [], [], [], []
    for n in n_grid:
        full = law.sample_full(rng, (trials, int(n)))
        s = full[..., coordinate].sum(axis=-1)
        exceed = int((np.abs(s / n - rho) > epsilon).sum())
        p = exceed / trials
        lo, hi = wilson_interval(exceed, trials)
        ns.append(int(n))
        probs.append(p)
        los.append(lo)
        his.append(hi)
        if epsilon > 0:
            rate = chernoff_rate(law, coordinate, epsilon)
            logb.append(float(np.log(2.0) - n * rate) if np.isfinite(rate)
                        else -np.inf)
        else:
            logb.append(0.0)
    return TailCurve(ns=tuple(ns), probs=tuple(probs), lo=tuple(los),
                     hi=tuple(his), trials=tuple([trials] * len(ns)),
                     slope=_fit_tail_slope(ns, probs),
                     analytic_log_bound=tuple(logb))


def expansion_set_mass(law: DiagonalLawSpec, n_grid, trials: int,
                       rng: np.random.Generator | None = None) -> TailCurve:
    """Complement mass 1 - mu_A^{*n}(E_n) of the expansion sets
    E_n = {all block gaps a_i - a_j > n * beta_{i,j}}."""
    if not law.expanding:
        raise ValueError(
            f"law is not asymptotically U-expanding: violations at "
            f"{law.expansion_violations()}")
    rng = rng or np.random.default_rng(0)
    k1 = law.dims.k1
    beta = law.beta_matrix
    ns, probs, los, his = [], [], [], []
    for n in n_grid:
        full = law.sample_full(rng, (trials, int(n)))
        s = full.sum(axis=1)                       # (trials, k0)
        gaps = s[:, :k1, None] - s[:, None, k1:]   # (trials, k1, k2)
        ok = (gaps > n * beta[None]).all(axis=(1, 2))
        fail = int(trials - ok.sum())
        lo, hi = wilson_interval(fail, trials)
        ns.append(int(n))
        probs.append(fail / trials)
        los.append(lo)
        his.append(hi)
    return TailCurve(ns=tuple(ns), probs=tuple(probs), lo=tuple(los),
                     hi=tuple(his), trials=tuple([trials] * len(ns)),
                     slope=_fit_tail_slope(ns, probs))


def conjugation_growth(law: DiagonalLawSpec, uni_law: UnipotentLawSpec,
                       n_grid, trials: int, c_probe: float,
                       rng: np.random.Generator | None = None) -> TailCurve:
    """Failure mass of ||a u a^-1|| / ||u|| > c_probe^n for a a product of n
    diagonal samples and u from the unipotent law.

    Conjugating u(x) by a expands parameter coordinate (i, j) by
    exp(t_i - t_{k1+j}); the ratio is computed in log scale.
    """
    if c_probe <= 1.0:
        raise ValueError("c_probe must exceed 1")
    rng = rng or np.random.default_rng(0)
    d = law.dims
    k1 = d.k1
    ns, probs, los, his = [], [], [], []
    for n in n_grid:
        full = law.sample_full(rng, (trials, int(n)))
        s = full.sum(axis=1)
        # log expansion coefficients, row-major over (i, j)
        g = (s[:, :k1, None] - s[:, None, k1:]).reshape(trials, d.k)
        xs = uni_law.sample_params(rng, trials)
        # resample zero parameter draws (null event for curve measures)
        resample_count = 0
        bad = np.nonzero((xs == 0).all(axis=1))[0]
        while bad.size:
            resample_count += bad.size
            xs[bad] = uni_law.sample_params(rng, bad.size)
            bad = bad[(xs[bad] == 0).all(axis=1)]
        with np.errstate(divide="ignore"):
            logx2 = 2.0 * np.log(np.abs(xs))
        log_num = logsumexp(2.0 * g + logx2, axis=1)
        log_den = logsumexp(logx2, axis=1)
        log_ratio = 0.5 * (log_num - log_den)
        fail = int((log_ratio <= n * np.log(c_probe)).sum())
        lo, hi = wilson_interval(fail, trials)
        ns.append(int(n))
        probs.append(fail / trials)
        los.append(lo)
        his.append(hi)
    return TailCurve(ns=tuple(ns), probs=tuple(probs), lo=tuple(los),
                     hi=tuple(his), trials=tuple([trials] * len(ns)),
                     slope=_fit_tail_slope(ns, probs))


# ---------------------------------------------------------------------------
# Lyapunov / uniform expansion

@dataclass(frozen=True)
class LyapunovReport:
    exponents: np.ndarray        # (trials, n_vectors) empirical exponents
    nonpositive_pairs: int
    underflows: int


def lyapunov_check(cfg, v_list, n: int, trials: int) -> LyapunovReport:
    """Empirical exponents (1/n) log ||Ad(g_n ... g_1) v|| for each direction v
    (traceless, nonzero) over independent walk words from cfg's laws.

    The adjoint product is accumulated with per-step renormalization and a
    running log-norm to avoid overflow at large n.
    """
    from .walk import step_matrix, step_matrix_inverse, trial_randomness

    vs = []
    for v in v_list:
        m = np.asarray(getattr(v, "entries", v), dtype=float)
        if not np.any(m):
            raise ValueError("directions must be nonzero")
        if abs(np.trace(m)) > 1e-9 * max(1.0, float(np.abs(m).max())):
            raise ValueError("directions must be traceless")
        vs.append(m)
    V0 = np.stack(vs)                            # (m, k0, k0)
    norms0 = np.sqrt((V0 ** 2).sum(axis=(1, 2)))
    V0 = V0 / norms0[:, None, None]
    nv = V0.shape[0]
    exps = np.empty((trials, nv))
    underflows = 0
    for tr in range(trials):
        V = V0.copy()
        logn = np.log(norms0.copy())
        dead = np.zeros(nv, dtype=bool)
        ts, xs = trial_randomness(cfg, tr, n)
        for step in range(1, n + 1):
            g = step_matrix(cfg.dims, ts[step - 1], xs[step - 1])
            ginv = step_matrix_inverse(cfg.dims, ts[step - 1], xs[step - 1])
            V = np.einsum("ab,mbc,cd->mad", g, V, ginv)
            nrm = np.sqrt((V ** 2).sum(axis=(1, 2)))
            zero = nrm == 0.0
            if zero.any():
                dead |= zero
                nrm = np.where(zero, 1.0, nrm)
            logn += np.log(nrm)
            V /= nrm[:, None, None]
        e = logn / n
        e[dead] = -np.inf
        underflows += int(dead.sum())
        exps[tr] = e
    nonpos = int((exps <= 0).sum())
    return LyapunovReport(exponents=exps, nonpositive_pairs=nonpos,
                          underflows=underflows)


# ---------------------------------------------------------------------------
# Q non-vanishing

@dataclass(frozen=True)
class QNonvanishingReport:
    fractions: tuple             # per direction: fraction of x with Q ~ 0
    samples: int
    tol: float


def q_nonvanishing_check(dims: Dims, v_list, x_samples: int,
                         radius: float = 1.0, tol: float = 1e-10,
                         rng: np.random.Generator | None = None
                         ) -> QNonvanishingReport:
    """For each nonzero direction v, the fraction of absolutely continuous x
    draws (uniform ball of the given radius in R^k) with
    ||Q(Ad(u(x)) v)|| <= tol.  Expected 0 for every v != 0."""
    rng = rng or np.random.default_rng(0)
    k1, k2, k = dims.k1, dims.k2, dims.k
    # uniform draws in the euclidean ball of R^k, reshaped to blocks
    vnorm = rng.standard_normal((x_samples, k))
    vnorm /= np.linalg.norm(vnorm, axis=1, keepdims=True)
    radii = radius * rng.random(x_samples) ** (1.0 / k)
    xs = (radii[:, None] * vnorm).reshape(x_samples, k1, k2)
    fractions = []
    for v in v_list:
        m = np.asarray(getattr(v, "entries", v), dtype=float)
        if not np.any(m):
            raise ValueError("directions must be nonzero")
        A, B = m[:k1, :k1], m[:k1, k1:]
        C, D = m[k1:, :k1], m[k1:, k1:]
        q = (B[None] - np.matmul(A, xs) + np.matmul(xs, D)
             - np.matmul(xs, np.matmul(C, xs)))
        nrm = np.sqrt((q ** 2).sum(axis=(1, 2)))
        fractions.append(float((nrm <= tol).mean()))
    return QNonvanishingReport(fractions=tuple(fractions), samples=x_samples,
                               tol=tol)
