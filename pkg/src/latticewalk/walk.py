"""Seeded, reproducible Monte Carlo execution of the random walk
z_n = a_n u_n ... a_1 u_1 z_0 on lattice points.

Random streams: each (base seed, trial) pair keys its own Philox counter-based
generator, and every trial draws all of its step randomness up front in a
fixed layout.  Trials are therefore independent tasks, results do not depend
on execution order or thread count, and observables consume no randomness.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import Dims, DiagonalSample, embed_u
from .lattice import (LatticePoint, Observable, ReductionError, _lll, apply,
                      reduce, shortest_vector_len)
from .measures import DiagonalLawSpec, UnipotentLawSpec

_MASK32 = (1 << 32) - 1
_MASK64 = (1 << 64) - 1


def step_rng(base_seed: int, trial: int, step: int) -> np.random.Generator:
    """Counter-based generator keyed by (base seed, trial, step)."""
    key = ((base_seed & _MASK64) << 64) | ((trial & _MASK32) << 32) | (step & _MASK32)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class WalkConfig:
    dims: Dims
    diagonal_law: DiagonalLawSpec
    unipotent_law: UnipotentLawSpec
    steps: int
    trials: int
    seed: int
    start: LatticePoint
    observables: tuple[Observable, ...]
    record_schedule: tuple[int, ...]
    det_drift_tol: float = 1e-6

    def __post_init__(self):
        if self.steps < 1 or self.trials < 1:
            raise ValueError("steps and trials must be >= 1")
        sched = tuple(sorted(set(int(s) for s in self.record_schedule)))
        if sched and (sched[0] < 1 or sched[-1] > self.steps):
            raise ValueError("record schedule must lie within 1..steps")
        object.__setattr__(self, "record_schedule", sched)
        object.__setattr__(self, "observables", tuple(self.observables))
        if self.diagonal_law.dims != self.dims or self.unipotent_law.dims != self.dims:
            raise ValueError("law dimensions do not match the walk dimensions")


@dataclass
class TrialTrace:
    trial: int
    values: np.ndarray           # (len(schedule), len(observables)); NaN after abort
    excursions: list             # step indices where reduction failed
    det_drift_flag: bool
    aborted_at: int | None
    final_shortest: float


def trial_randomness(cfg: WalkConfig, trial: int, steps: int):
    """All step randomness of one trial, drawn in a fixed layout from the
    counter-based stream keyed by (base seed, trial): first the unipotent
    parameters for steps 1..n, then the free diagonal coordinates.  The layout
    never depends on observables or the record schedule, so adding either
    cannot perturb draws.  Returns (log-diagonals (n, k0), u-params (n, k))."""
    rng = step_rng(cfg.seed, trial, 0)
    xs = cfg.unipotent_law.sample_params(rng, steps)
    ts = cfg.diagonal_law.sample_full(rng, steps)
    return ts, xs


def step_matrix(dims: Dims, t: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Matrix of one mu-step a . u(x) from its log-diagonal t and parameter x."""
    m = np.eye(dims.k0)
    m[: dims.k1, dims.k1:] = x.reshape(dims.k1, dims.k2)
    return np.exp(t)[:, None] * m       # diag(e^t) @ u(x)


def step_matrix_inverse(dims: Dims, t: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Exact inverse (a . u(x))^-1 = u(-x) . a^-1."""
    m = np.eye(dims.k0)
    m[: dims.k1, dims.k1:] = -x.reshape(dims.k1, dims.k2)
    return m * np.exp(-t)[None, :]      # u(-x) @ diag(e^-t)


def _one_step(cfg: WalkConfig, z: LatticePoint, trial: int, step: int):
    """Single mu-step as a GroupElement acting on a LatticePoint (slow path
    used by tests; the trial loop works on raw bases)."""
    from .core import GroupElement
    ts, xs = trial_randomness(cfg, trial, step)
    g = GroupElement(cfg.dims, step_matrix(cfg.dims, ts[step - 1], xs[step - 1]))
    return g, apply(g, z)


def _advance_basis(dims: Dims, basis: np.ndarray, m: np.ndarray, step: int,
                   excursions: list) -> np.ndarray | None:
    """One raw-basis step with reduction; records an excursion on reduction
    failure and returns None only when the basis is unusable (abort)."""
    b = m @ basis
    try:
        return _lll(b)
    except (ReductionError, np.linalg.LinAlgError):
        excursions.append(step)
        if np.all(np.isfinite(b)) and np.linalg.cond(b) <= 1e15:
            return b
        return None


def run_trial(cfg: WalkConfig, trial: int) -> TrialTrace:
    """One walk of cfg.steps steps; deterministic given (cfg, trial)."""
    basis = reduce(cfg.start).basis
    sched = cfg.record_schedule
    values = np.full((len(sched), len(cfg.observables)), np.nan)
    excursions: list[int] = []
    drift_flag = False
    aborted_at = None
    rec = 0
    ts, xs = trial_randomness(cfg, trial, cfg.steps)
    for step in range(1, cfg.steps + 1):
        m = step_matrix(cfg.dims, ts[step - 1], xs[step - 1])
        nxt = _advance_basis(cfg.dims, basis, m, step, excursions)
        if nxt is None:
            aborted_at = step
            break
        basis = nxt
        if rec < len(sched) and sched[rec] == step:
            d = abs(np.linalg.det(basis))
            if abs(d - 1.0) > cfg.det_drift_tol:
                drift_flag = True
            z = LatticePoint(cfg.dims, basis, reduced=True, det_tol=1e-3)
            for oi, obs in enumerate(cfg.observables):
                values[rec, oi] = obs(z)
            rec += 1
    if aborted_at is None:
        final = shortest_vector_len(
            LatticePoint(cfg.dims, basis, reduced=True, det_tol=1e-3))
    else:
        final = float("nan")
    return TrialTrace(trial=trial, values=values, excursions=excursions,
                      det_drift_flag=drift_flag, aborted_at=aborted_at,
                      final_shortest=final)


@dataclass
class EnsembleResult:
    config: WalkConfig
    traces: list                 # TrialTrace, sorted by trial index
    counts: np.ndarray           # valid samples per (recorded step, observable)
    means: np.ndarray
    stderrs: np.ndarray
    aborted: int

    def series(self, obs_index: int):
        """(n, mean, stderr, count) rows for one observable."""
        sched = self.config.record_schedule
        return [(sched[i], float(self.means[i, obs_index]),
                 float(self.stderrs[i, obs_index]), int(self.counts[i, obs_index]))
                for i in range(len(sched))]


def _merge_stats(traces, n_steps, n_obs):
    """Associative merge of per-trial sufficient statistics."""
    count = np.zeros((n_steps, n_obs))
    total = np.zeros((n_steps, n_obs))
    total_sq = np.zeros((n_steps, n_obs))
    for tr in traces:
        ok = np.isfinite(tr.values)
        count += ok
        v = np.where(ok, tr.values, 0.0)
        total += v
        total_sq += v * v
    return count, total, total_sq


def run_ensemble(cfg: WalkConfig, n_workers: int = 1) -> EnsembleResult:
    """Run cfg.trials independent trials; aggregates are independent of
    execution order and worker count (merge over sorted trial indices)."""
    indices = range(cfg.trials)
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            traces = list(pool.map(lambda i: run_trial(cfg, i), indices))
    else:
        traces = [run_trial(cfg, i) for i in indices]
    traces.sort(key=lambda tr: tr.trial)
    aborted = sum(1 for tr in traces if tr.aborted_at is not None)
    if aborted == cfg.trials:
        raise RuntimeError("all trials aborted")
    count, total, total_sq = _merge_stats(traces, len(cfg.record_schedule),
                                          len(cfg.observables))
    with np.errstate(invalid="ignore", divide="ignore"):
        means = total / count
        var = np.maximum(total_sq / count - means ** 2, 0.0)
        stderrs = np.sqrt(var / np.maximum(count, 1))
    return EnsembleResult(config=cfg, traces=traces, counts=count,
                          means=means, stderrs=stderrs, aborted=aborted)


@dataclass
class BirkhoffResult:
    config: WalkConfig
    checkpoints: np.ndarray      # step indices n at which averages are reported
    averages: np.ndarray         # (len(checkpoints), n_obs) running means
    stderrs: np.ndarray          # autocorrelation-inflated standard errors
    excursions: list


def _iact_stderr(x: np.ndarray) -> float:
    """Standard error of the mean of a correlated series, inflated by the
    integrated autocorrelation time (initial positive sequence estimator)."""
    n = x.size
    if n < 2:
        return float("nan")
    x = x - x.mean()
    var = float(x @ x) / n
    if var == 0.0:
        return 0.0
    tau = 1.0
    max_lag = min(n // 2, 1000)
    for lag in range(1, max_lag):
        rho = float(x[:-lag] @ x[lag:]) / ((n - lag) * var)
        if rho <= 0.0:
            break
        tau += 2.0 * rho
    return float(np.sqrt(var * tau / n))


def run_birkhoff(cfg: WalkConfig, total_steps: int,
                 n_checkpoints: int = 40) -> BirkhoffResult:
    """Single long trajectory; running averages (1/n) sum_{i<=n} f(z_i) of each
    observable, reported on a logarithmic grid of n."""
    if total_steps < 1:
        raise ValueError("total_steps must be >= 1")
    grid = np.unique(np.round(np.geomspace(1, total_steps, n_checkpoints))
                     .astype(int))
    n_obs = len(cfg.observables)
    samples = np.empty((total_steps, n_obs))
    basis = reduce(cfg.start).basis
    excursions: list[int] = []
    ts, xs = trial_randomness(cfg, 0, total_steps)
    for step in range(1, total_steps + 1):
        m = step_matrix(cfg.dims, ts[step - 1], xs[step - 1])
        nxt = _advance_basis(cfg.dims, basis, m, step, excursions)
        if nxt is None:
            raise ReductionError(f"trajectory unusable at step {step}",
                                 basis=basis)
        basis = nxt
        z = LatticePoint(cfg.dims, basis, reduced=True, det_tol=1e-3)
        for oi, obs in enumerate(cfg.observables):
            samples[step - 1, oi] = obs(z)
    csum = np.cumsum(samples, axis=0)
    averages = csum[grid - 1] / grid[:, None]
    stderrs = np.empty((grid.size, n_obs))
    for gi, n in enumerate(grid):
        for oi in range(n_obs):
            stderrs[gi, oi] = _iact_stderr(samples[:n, oi])
    return BirkhoffResult(config=cfg, checkpoints=grid, averages=averages,
                          stderrs=stderrs, excursions=excursions)
