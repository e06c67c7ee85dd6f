"""Points of X = SL(k0,R)/SL(k0,Z) as unimodular lattice bases.

A point is stored as a basis matrix whose columns generate the lattice.
Canonicalization is Lovasz-reduction (delta = 0.75) with size reduction;
observables (shortest vector, ball counts, bump functions) are evaluated by
bounded integer enumeration so that their Haar means have exact or
high-precision oracles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import exp, gamma, pi

import numpy as np

from .core import Dims, GroupElement, DET_TOL

LLL_DELTA = 0.75
COND_LIMIT = 1e14
ENUM_BUDGET = 10_000_000


class ReductionError(RuntimeError):
    """Raised when a basis is too ill-conditioned to reduce."""

    def __init__(self, message, basis=None):
        super().__init__(message)
        self.basis = basis


class EnumerationBudgetError(RuntimeError):
    """Raised when lattice-point enumeration would exceed the point budget."""


@dataclass(frozen=True)
class LatticePoint:
    """Unimodular lattice g Z^k0, stored as the basis matrix g (columns)."""

    dims: Dims
    basis: np.ndarray
    reduced: bool = False
    det_tol: float = DET_TOL

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.shape != (self.dims.k0, self.dims.k0):
            raise ValueError(f"expected a {self.dims.k0}x{self.dims.k0} basis")
        b = b.copy()
        b.flags.writeable = False
        object.__setattr__(self, "basis", b)
        d = abs(np.linalg.det(b))
        if abs(d - 1.0) > self.det_tol * max(1.0, d):
            raise ValueError(f"basis is not unimodular: |det| = {d!r}")

    @staticmethod
    def standard(dims: Dims) -> "LatticePoint":
        return LatticePoint(dims, np.eye(dims.k0), reduced=True)

    def gram(self) -> np.ndarray:
        return self.basis.T @ self.basis


def _lll2(b: np.ndarray) -> np.ndarray:
    """Lagrange (greedy) reduction of a 2x2 basis; the output is optimally
    reduced, hence satisfies any Lovasz condition with delta <= 1."""
    b00, b01 = float(b[0, 0]), float(b[0, 1])
    b10, b11 = float(b[1, 0]), float(b[1, 1])
    n0 = b00 * b00 + b10 * b10
    n1 = b01 * b01 + b11 * b11
    if n0 > n1:
        b00, b01, b10, b11, n0, n1 = b01, b00, b11, b10, n1, n0
    for _ in range(10_000):
        if n0 == 0.0:
            raise ReductionError("numerically singular basis", basis=b)
        q = round((b00 * b01 + b10 * b11) / n0)
        if q:
            b01 -= q * b00
            b11 -= q * b10
            n1 = b01 * b01 + b11 * b11
        if n1 >= n0:
            return np.array([[b00, b01], [b10, b11]])
        b00, b01, b10, b11, n0, n1 = b01, b00, b11, b10, n1, n0
    raise ReductionError("reduction failed to terminate", basis=b)


def _lll(b: np.ndarray, delta: float = LLL_DELTA) -> np.ndarray:
    """Column-LLL with size reduction |mu_ij| <= 1/2 and the Lovasz exchange
    condition.  Operates on a writable copy."""
    n = b.shape[1]
    if n == 2:
        return _lll2(b)
    b = b.copy()

    def gso():
        bstar = np.zeros_like(b)
        mu = np.zeros((n, n))
        for i in range(n):
            v = b[:, i].copy()
            for j in range(i):
                mu[i, j] = b[:, i] @ bstar[:, j] / norms[j]
                v -= mu[i, j] * bstar[:, j]
            bstar[:, i] = v
            norms[i] = v @ v
        return bstar, mu

    norms = np.zeros(n)
    bstar, mu = gso()
    i = 1
    guard = 0
    while i < n:
        guard += 1
        if guard > 10_000:
            raise ReductionError("reduction failed to terminate", basis=b)
        # size-reduce column i against j < i
        for j in range(i - 1, -1, -1):
            q = round(mu[i, j])
            if q != 0:
                b[:, i] -= q * b[:, j]
                mu[i, j] -= q
                mu[i, :j] -= q * mu[j, :j]
        if norms[i] >= (delta - mu[i, i - 1] ** 2) * norms[i - 1]:
            i += 1
        else:
            b[:, [i - 1, i]] = b[:, [i, i - 1]]
            bstar, mu = gso()
            i = max(i - 1, 1)
    return b


def reduce(p: LatticePoint) -> LatticePoint:
    """Canonical (reduced) basis of the same lattice."""
    if p.reduced:
        return p
    g = p.gram()
    cond = np.linalg.cond(g)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise ReductionError(
            f"Gram matrix condition number {cond:.3e} exceeds {COND_LIMIT:.0e}",
            basis=p.basis,
        )
    b = _lll(p.basis)
    return LatticePoint(p.dims, b, reduced=True, det_tol=p.det_tol)


def apply(g: GroupElement, p: LatticePoint) -> LatticePoint:
    """Left translation: the lattice g . (p's lattice), reduced."""
    if g.dims != p.dims:
        raise ValueError("dimension mismatch")
    moved = LatticePoint(p.dims, g.entries @ p.basis, reduced=False,
                         det_tol=max(p.det_tol, 1e-6))
    return reduce(moved)


def _enumerate_short(b: np.ndarray, radius: float,
                     budget: int = ENUM_BUDGET) -> np.ndarray:
    """Squared norms of all nonzero lattice vectors of norm <= radius (each
    +/- pair counted twice).  Coefficient bounds come from the rows of the
    basis inverse (Fincke-Pohst style rectangular bound), so the input should
    be a reduced basis to keep the box small."""
    n = b.shape[1]
    try:
        binv = np.linalg.inv(b)
    except np.linalg.LinAlgError:
        raise ReductionError("numerically singular basis", basis=b)
    # c_i = row_i(B^-1) . v, so |c_i| <= ||row_i(B^-1)|| * radius
    bounds = np.floor(radius * np.sqrt((binv * binv).sum(axis=1))
                      + 1e-9).astype(np.int64)
    total = int(np.prod(2 * bounds + 1))
    if total > budget:
        raise EnumerationBudgetError(
            f"enumeration box of {total} points exceeds budget {budget}")
    # broadcast the coordinate sums over the coefficient box directly
    axes = [np.arange(-bd, bd + 1.0).reshape((1,) * i + (-1,) + (1,) * (n - 1 - i))
            for i, bd in enumerate(bounds)]
    sq = 0.0
    for r in range(b.shape[0]):
        comp = sum(b[r, i] * axes[i] for i in range(n))
        sq = sq + comp * comp
    sq = np.broadcast_to(sq, tuple(2 * bd + 1 for bd in bounds)).copy()
    sq[tuple(bounds)] = np.inf                             # exclude the origin
    return sq[sq <= radius * radius * (1 + 1e-12)]


def shortest_vector_len(p: LatticePoint) -> float:
    """Euclidean length of a shortest nonzero lattice vector."""
    p = reduce(p)
    # the first reduced column bounds the shortest vector
    radius = float(np.linalg.norm(p.basis[:, 0]))
    for col in range(1, p.dims.k0):
        radius = min(radius, float(np.linalg.norm(p.basis[:, col])))
    sq = _enumerate_short(p.basis, radius * (1 + 1e-12))
    return float(np.sqrt(sq.min()))


def siegel_count(p: LatticePoint, radius: float) -> int:
    """#{v in Lambda \\ {0} : ||v|| <= radius}; always even by +/- symmetry."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    p = reduce(p)
    return int(_enumerate_short(p.basis, radius).size)


def ball_volume(n: int, radius: float) -> float:
    """Volume of the euclidean ball of the given radius in R^n; by the Siegel
    integral formula this is the Haar mean of siegel_count at that radius."""
    return pi ** (n / 2) / gamma(n / 2 + 1) * radius ** n


def bump_profile(s: float) -> float:
    """C-infinity bump: exp(1 - 1/(1 - s^2)) for |s| < 1, else 0."""
    if abs(s) >= 1.0:
        return 0.0
    return exp(1.0 - 1.0 / (1.0 - s * s))


def shortest_bump(p: LatticePoint, center: float, width: float) -> float:
    """Bump profile in the shortest-vector length, centered at `center` with
    half-width `width`.  Values in [0, 1]."""
    if width <= 0:
        raise ValueError("width must be positive")
    return bump_profile((shortest_vector_len(p) - center) / width)


@dataclass(frozen=True)
class Observable:
    """A lattice functional standing in for a smooth compactly supported test
    function; `haar_mean` is the exact mean where known (ball volume for
    siegel_count), or a high-precision reference value supplied by the user."""

    kind: str                  # siegel_count | shortest_bump | shortest_log
    radius: float = 0.0
    center: float = 0.0
    width: float = 0.0
    haar_mean_ref: float | None = None

    def __post_init__(self):
        if self.kind == "siegel_count" and self.radius <= 0:
            raise ValueError("siegel_count requires radius > 0")
        if self.kind == "shortest_bump" and self.width <= 0:
            raise ValueError("shortest_bump requires width > 0")
        if self.kind not in ("siegel_count", "shortest_bump", "shortest_log"):
            raise ValueError(f"unknown observable kind {self.kind!r}")

    @property
    def name(self) -> str:
        if self.kind == "siegel_count":
            return f"siegel_count[R={self.radius:g}]"
        if self.kind == "shortest_bump":
            return f"shortest_bump[c={self.center:g},w={self.width:g}]"
        return "shortest_log"

    def haar_mean(self, dims: Dims) -> float | None:
        if self.kind == "siegel_count":
            return ball_volume(dims.k0, self.radius)
        return self.haar_mean_ref

    def __call__(self, p: LatticePoint) -> float:
        if self.kind == "siegel_count":
            return float(siegel_count(p, self.radius))
        if self.kind == "shortest_bump":
            return shortest_bump(p, self.center, self.width)
        return float(np.log(shortest_vector_len(p)))
