"""Samplers and analytic diagnostics for the walk's two step measures.

The diagonal law draws log coordinates around means alpha with sum(alpha)=0;
asymptotic U-expansion means alpha_i > alpha_j whenever i is in the first
block and j in the second.  The unipotent law is the pushforward of Lebesgue
measure on [0,1] along a curve, optionally mixed with an auxiliary law.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .core import Dims, DiagonalSample, UnipotentParam, conj_scaling, theta_i


# ---------------------------------------------------------------------------
# curves

@dataclass(frozen=True)
class CurveSpec:
    """Curve phi: [0,1] -> R^k with an evaluable derivative.

    kinds:
      moment            phi(t) = (t, t^2, ..., t^k); totally non-planar
      planar_demo       phi(t) = (t, t, ..., t); derivative stuck in a hyperplane
      constant_demo     phi(t) = (1, ..., 1); zero derivative
      custom_polynomial coefficient table, k rows x (degree+1) columns,
                        row i = coefficients of phi_i in increasing degree
    """

    kind: str
    dims: Dims
    coefficients: tuple = ()
    smoothness: int = 0          # reported C^m class, not enforced

    def __post_init__(self):
        if self.kind not in ("moment", "planar_demo", "constant_demo",
                             "custom_polynomial"):
            raise ValueError(f"unknown curve kind {self.kind!r}")
        if self.kind == "custom_polynomial":
            table = np.asarray(self.coefficients, dtype=float)
            if table.ndim != 2 or table.shape[0] != self.dims.k:
                raise ValueError(
                    f"coefficient table must have {self.dims.k} rows")
            object.__setattr__(self, "coefficients",
                               tuple(map(tuple, table.tolist())))

    def value(self, t):
        """phi(t); vectorized, output shape (..., k)."""
        t = np.asarray(t, dtype=float)
        k = self.dims.k
        if self.kind == "moment":
            powers = np.arange(1, k + 1)
            return t[..., None] ** powers
        if self.kind == "planar_demo":
            return np.repeat(t[..., None], k, axis=-1)
        if self.kind == "constant_demo":
            return np.ones(t.shape + (k,))
        table = np.asarray(self.coefficients)
        degs = np.arange(table.shape[1])
        return np.einsum("...d,kd->...k", t[..., None] ** degs, table)

    def deriv(self, t):
        """phi'(t); vectorized, output shape (..., k)."""
        t = np.asarray(t, dtype=float)
        k = self.dims.k
        if self.kind == "moment":
            powers = np.arange(1, k + 1)
            return powers * t[..., None] ** (powers - 1)
        if self.kind == "planar_demo":
            return np.ones(t.shape + (k,))
        if self.kind == "constant_demo":
            return np.zeros(t.shape + (k,))
        table = np.asarray(self.coefficients)
        if table.shape[1] == 1:
            return np.zeros(t.shape + (k,))
        dtable = table[:, 1:] * np.arange(1, table.shape[1])
        degs = np.arange(dtable.shape[1])
        return np.einsum("...d,kd->...k", t[..., None] ** degs, dtable)


# ---------------------------------------------------------------------------
# diagonal law

@dataclass(frozen=True)
class DiagonalLawSpec:
    """Compactly supported law on the diagonal group in log coordinates.

    The first k0-1 coordinates are drawn independently; the last is forced to
    minus their sum, so samples are exactly traceless in log scale.
    """

    dims: Dims
    alpha: np.ndarray            # means, length k0, sum 0
    widths: np.ndarray           # half-widths, length k0
    law: str = "uniform_box"     # uniform_box | discrete_two_point

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=float)
        w = np.asarray(self.widths, dtype=float)
        k0 = self.dims.k0
        if a.shape != (k0,) or w.shape != (k0,):
            raise ValueError(f"alpha and widths must have length {k0}")
        if abs(a.sum()) > 1e-12:
            raise ValueError(f"means must sum to zero, got sum = {a.sum()!r}")
        if (w < 0).any():
            raise ValueError("half-widths must be nonnegative")
        if self.law not in ("uniform_box", "discrete_two_point"):
            raise ValueError(f"unknown diagonal law kind {self.law!r}")
        a, w = a.copy(), w.copy()
        a.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "widths", w)

    @property
    def beta_matrix(self) -> np.ndarray:
        """beta_{i,j} = (alpha_i - alpha_j)/2 over the block split, shape (k1, k2)."""
        k1 = self.dims.k1
        return (self.alpha[:k1][:, None] - self.alpha[k1:][None, :]) / 2.0

    @property
    def beta(self) -> float:
        return float(np.abs(self.beta_matrix).min())

    @property
    def expanding(self) -> bool:
        """alpha_i - alpha_j > 0 for every i in block 1, j in block 2."""
        return bool((self.beta_matrix > 0).all())

    def expansion_violations(self) -> list[tuple[int, int]]:
        """(i, j) index pairs (1-based, j in k1+1..k0) violating expansion."""
        k1 = self.dims.k1
        bad = np.argwhere(self.beta_matrix <= 0)
        return [(int(i) + 1, int(j) + k1 + 1) for i, j in bad]

    def sample_head(self, rng: np.random.Generator, size=None) -> np.ndarray:
        """Draw the free coordinates t_1..t_{k0-1}; shape (*size, k0-1)."""
        k0 = self.dims.k0
        shape = (k0 - 1,) if size is None else (tuple(np.atleast_1d(size)) + (k0 - 1,))
        a, w = self.alpha[: k0 - 1], self.widths[: k0 - 1]
        if self.law == "uniform_box":
            return a + w * (2.0 * rng.random(shape) - 1.0)
        signs = np.where(rng.random(shape) < 0.5, -1.0, 1.0)
        return a + w * signs

    def sample(self, rng: np.random.Generator) -> DiagonalSample:
        return DiagonalSample.from_head(self.dims, self.sample_head(rng))

    def sample_full(self, rng: np.random.Generator, size) -> np.ndarray:
        """Vectorized samples with the forced last coordinate; shape (*size, k0)."""
        head = self.sample_head(rng, size)
        return np.concatenate([head, -head.sum(axis=-1, keepdims=True)], axis=-1)


# ---------------------------------------------------------------------------
# unipotent law

@dataclass(frozen=True)
class UnipotentLawSpec:
    """Curve-pushforward law on R^k, optionally mixed with an auxiliary law:
    with probability (1 - mixture) draw phi(t), t ~ Uniform[0,1]; otherwise
    draw from the auxiliary law."""

    curve: CurveSpec
    mixture: float = 0.0
    aux_kind: str = "none"       # none | uniform_ball | point_mass
    aux_radius: float = 1.0
    aux_point: tuple = ()

    def __post_init__(self):
        if not 0.0 <= self.mixture < 1.0 and self.mixture != 1.0:
            raise ValueError("mixture weight must lie in [0, 1]")
        if self.aux_kind not in ("none", "uniform_ball", "point_mass"):
            raise ValueError(f"unknown auxiliary law {self.aux_kind!r}")
        if self.mixture > 0 and self.aux_kind == "none":
            raise ValueError("mixture weight > 0 requires an auxiliary law")
        if self.aux_kind == "point_mass":
            pt = np.asarray(self.aux_point, dtype=float)
            if pt.shape != (self.curve.dims.k,):
                raise ValueError(
                    f"point mass must have length {self.curve.dims.k}")
            object.__setattr__(self, "aux_point", tuple(pt.tolist()))

    @property
    def dims(self) -> Dims:
        return self.curve.dims

    def _sample_aux(self, rng: np.random.Generator) -> np.ndarray:
        k = self.dims.k
        if self.aux_kind == "point_mass":
            return np.asarray(self.aux_point)
        # uniform in the euclidean ball
        v = rng.standard_normal(k)
        v /= np.linalg.norm(v)
        return self.aux_radius * rng.random() ** (1.0 / k) * v

    def sample(self, rng: np.random.Generator) -> UnipotentParam:
        # fixed draw layout per call: mixture coin, then curve parameter,
        # so downstream draws never shift with the branch taken
        coin = rng.random()
        t = rng.random()
        if self.mixture > 0 and coin < self.mixture:
            x = self._sample_aux(rng)
        else:
            x = self.curve.value(t)
        return UnipotentParam(self.dims, x)

    def sample_params(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Vectorized draws, shape (size, k)."""
        coins = rng.random(size)
        ts = rng.random(size)
        out = self.curve.value(ts)
        if self.mixture > 0:
            idx = np.nonzero(coins < self.mixture)[0]
            for i in idx:
                out[i] = self._sample_aux(rng)
        return out


# ---------------------------------------------------------------------------
# the determinant F and non-planarity

def F_psi(a_list, x, curve: CurveSpec) -> float:
    """det[a_1 psi'(x_1), ..., a_k psi'(x_k)] where each a_i is a diagonal
    scaling of R^k given by its k coefficients."""
    k = curve.dims.k
    x = np.asarray(x, dtype=float)
    if x.shape != (k,):
        raise ValueError(f"expected {k} evaluation points")
    cols = np.empty((k, k))
    for i in range(k):
        a = np.asarray(a_list[i], dtype=float)
        cols[:, i] = a * curve.deriv(x[i])
    return float(np.linalg.det(cols))


def F_psi_batch(a_list, xs: np.ndarray, curve: CurveSpec) -> np.ndarray:
    """Vectorized F over rows of xs (shape (n, k))."""
    k = curve.dims.k
    scal = np.asarray(a_list, dtype=float)       # (k, k): row i = coeffs of a_i
    derivs = curve.deriv(xs)                     # (n, k, k): [s, i, :] = psi'(x_i)
    cols = scal[None, :, :] * derivs             # scale column i by a_i
    mats = np.swapaxes(cols, 1, 2)               # columns indexed by i
    return np.linalg.det(mats)


@dataclass(frozen=True)
class NonplanarityReport:
    samples: int
    tol: float
    zero_fraction: float
    abs_det_quantiles: dict


def nonplanarity_check(curve: CurveSpec, samples: int, tol: float = 1e-12,
                       rng: np.random.Generator | None = None,
                       scalings=None) -> NonplanarityReport:
    """Monte Carlo test of the null-set property of {det = 0}: fraction of
    uniform tuples x in [0,1]^k with |F(x)| <= tol."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = rng or np.random.default_rng(0)
    k = curve.dims.k
    if scalings is None:
        scalings = np.ones((k, k))
    dets = np.empty(samples)
    chunk = 200_000
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        xs = rng.random((m, k))
        dets[done:done + m] = F_psi_batch(scalings, xs, curve)
        done += m
    absdet = np.abs(dets)
    qs = {q: float(np.quantile(absdet, q)) for q in (0.0, 0.01, 0.5)}
    return NonplanarityReport(samples=samples, tol=tol,
                              zero_fraction=float((absdet <= tol).mean()),
                              abs_det_quantiles=qs)


# ---------------------------------------------------------------------------
# pushforward density reconstruction (k = 1)

@dataclass(frozen=True)
class DensityDiagnostic:
    edges: np.ndarray            # grid cell edges, length cells+1
    hist_mass: np.ndarray        # empirical mass per cell
    analytic_mass: np.ndarray    # cell-integrated analytic density
    density_at_centers: np.ndarray
    escaped_mass: float          # sample mass outside the grid
    flagged_cells: int
    tv_discrepancy: float


def _monotone_pieces(fprime_scalar, fprime_vec, n_probe: int = 4096):
    """Split [0,1] into maximal intervals on which the map is monotone, by
    locating sign changes of its derivative on a fine probe grid."""
    ts = np.linspace(0.0, 1.0, n_probe + 1)
    d = fprime_vec(ts)
    breaks = [0.0]
    for i in range(n_probe):
        if d[i] * d[i + 1] < 0:
            breaks.append(brentq(fprime_scalar, ts[i], ts[i + 1]))
        elif d[i] == 0.0 and ts[i] not in breaks:
            breaks.append(ts[i])
    breaks.append(1.0)
    breaks = sorted(set(breaks))
    return [(breaks[i], breaks[i + 1]) for i in range(len(breaks) - 1)
            if breaks[i + 1] > breaks[i]]


def pushforward_density_check(a_list, curve: CurveSpec, grid, samples: int,
                              rng: np.random.Generator | None = None
                              ) -> DensityDiagnostic:
    """Compare the sampled pushforward of Lebesgue on [0,1]^k under
    x -> sum_i a_i phi(x_i) with the change-of-variables density.

    The analytic comparison enumerates preimages on monotone pieces and is
    implemented for k = 1; sampling alone works for any k but the analytic
    density is not available there.
    """
    k = curve.dims.k
    if k != 1:
        raise NotImplementedError(
            "analytic preimage enumeration is implemented for k = 1 only")
    rng = rng or np.random.default_rng(0)
    a = float(np.asarray(a_list, dtype=float).ravel()[0])
    edges = np.asarray(grid, dtype=float)
    if edges.ndim != 1 or edges.size < 2:
        raise ValueError("grid must be a 1-d array of cell edges")

    def f_scalar(t):
        return float(a * curve.value(np.asarray([t]))[0, 0])

    def fprime(t):
        return a * curve.deriv(np.asarray(t))[..., 0]

    def fprime_scalar(t):
        return float(fprime(np.asarray([t]))[0])

    ts = rng.random(samples)
    ys = a * curve.value(ts)[:, 0]
    hist, _ = np.histogram(ys, bins=edges)
    hist_mass = hist / samples
    escaped = 1.0 - hist_mass.sum()

    pieces = _monotone_pieces(fprime_scalar, fprime)

    def _invert(u, v, y):
        g = lambda t: f_scalar(t) - y
        if g(u) == 0.0:
            return u
        if g(v) == 0.0:
            return v
        return brentq(g, u, v)

    def pullback_measure(y0, y1):
        """lambda{t in [0,1]: f(t) in [y0, y1]} via the monotone pieces."""
        total = 0.0
        for (u, v) in pieces:
            fu, fv = f_scalar(u), f_scalar(v)
            lo, hi = min(fu, fv), max(fu, fv)
            a0, b0 = max(lo, y0), min(hi, y1)
            if b0 <= a0:
                continue
            total += abs(_invert(u, v, b0) - _invert(u, v, a0))
        return total

    cells = edges.size - 1
    analytic = np.zeros(cells)
    density = np.zeros(cells)
    flagged = 0
    for c in range(cells):
        y0, y1 = edges[c], edges[c + 1]
        try:
            analytic[c] = pullback_measure(y0, y1)
            yc = 0.5 * (y0 + y1)
            dens = 0.0
            for (u, v) in pieces:
                fu, fv = f_scalar(u), f_scalar(v)
                lo, hi = min(fu, fv), max(fu, fv)
                if lo < yc < hi:
                    t = _invert(u, v, yc)
                    dp = abs(fprime_scalar(t))
                    dens += 1.0 / dp if dp > 0 else np.inf
            density[c] = dens
        except (ValueError, ZeroDivisionError):
            flagged += 1
            analytic[c] = np.nan
    ok = np.isfinite(analytic)
    tv = 0.5 * float(np.abs(hist_mass[ok] - analytic[ok]).sum())
    return DensityDiagnostic(edges=edges, hist_mass=hist_mass,
                             analytic_mass=analytic,
                             density_at_centers=density,
                             escaped_mass=float(escaped),
                             flagged_cells=flagged, tv_discrepancy=tv)


# ---------------------------------------------------------------------------
# convolution mass-split diagnostic

@dataclass(frozen=True)
class MassSplitReport:
    n_blocks: int
    delta: float
    per_block_mass: list
    product_mass: float


def nu_bar_mass_split(word, curve: CurveSpec, delta: float,
                      samples: int = 100_000,
                      rng: np.random.Generator | None = None) -> MassSplitReport:
    """Numerical stand-in for the singular-mass bound of the convolution
    decomposition: per block of k diagonal steps, estimate the mass of
    parameter tuples lying within distance delta of the zero set of F (distance
    approximated to first order as |F| / ||grad F||), and report the product
    across blocks.

    `word` is a sequence of n blocks, each a list of k DiagonalSamples.
    Diagnostic scale only: n <= 6 and k <= 2.
    """
    k = curve.dims.k
    n = len(word)
    if n < 1 or n > 6 or k > 2:
        raise ValueError("diagnostic supports 1 <= n <= 6 blocks and k <= 2")
    rng = rng or np.random.default_rng(0)
    if delta < 0:
        raise ValueError("delta must be nonnegative")

    per_block = []
    for block in word:
        if len(block) != k:
            raise ValueError(f"each block must contain {k} diagonal samples")
        # scalings theta(a_1..a_k) = (theta_{k-1}, ..., theta_1, identity)
        scalings = []
        for i in range(k - 1, 0, -1):
            scalings.append(theta_i(list(block[:i])))
        scalings.append(np.ones(k))
        scalings = np.asarray(scalings)
        if delta == 0.0:
            per_block.append(0.0)
            continue
        xs = rng.random((samples, k))
        F = F_psi_batch(scalings, xs, curve)
        # numerical gradient of F in x
        h = 1e-6
        grad_sq = np.zeros(samples)
        for i in range(k):
            xp = xs.copy()
            xp[:, i] = np.clip(xp[:, i] + h, 0.0, 1.0)
            xm = xs.copy()
            xm[:, i] = np.clip(xm[:, i] - h, 0.0, 1.0)
            dF = (F_psi_batch(scalings, xp, curve)
                  - F_psi_batch(scalings, xm, curve)) / (xp[:, i] - xm[:, i])
            grad_sq += dF ** 2
        gnorm = np.sqrt(grad_sq)
        dist = np.where(gnorm > 0, np.abs(F) / np.maximum(gnorm, 1e-300), np.inf)
        per_block.append(float((dist <= delta).mean()))
    product = float(np.prod(per_block))
    return MassSplitReport(n_blocks=n, delta=delta,
                           per_block_mass=per_block, product_mass=product)
