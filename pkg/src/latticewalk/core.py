"""Linear-algebra kernel for SL(k0, R), its diagonal subgroup, and the
upper-block unipotent subgroup U.

Everything here is a pure function on immutable values.  The parameter space
of U is R^k identified with k1 x k2 matrices in row-major order, so that the
diagonal conjugation coefficients are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DET_TOL = 1e-9
TRACE_TOL = 1e-9


@dataclass(frozen=True)
class Dims:
    """Block shape (k1, k2) with k0 = k1 + k2 and k = k1 * k2."""

    k1: int
    k2: int

    def __post_init__(self):
        if self.k1 < 1 or self.k2 < 1:
            raise ValueError(f"block sizes must be >= 1, got ({self.k1}, {self.k2})")

    @property
    def k0(self) -> int:
        return self.k1 + self.k2

    @property
    def k(self) -> int:
        return self.k1 * self.k2


def _as_matrix(entries, n: int) -> np.ndarray:
    m = np.asarray(entries, dtype=float)
    if m.shape != (n, n):
        raise ValueError(f"expected a {n}x{n} matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True)
class GroupElement:
    """Element of SL(k0, R); determinant is checked, never re-projected."""

    dims: Dims
    entries: np.ndarray
    det_tol: float = DET_TOL

    def __post_init__(self):
        m = _as_matrix(self.entries, self.dims.k0)
        object.__setattr__(self, "entries", m)
        d = np.linalg.det(m)
        if abs(d - 1.0) > self.det_tol * max(1.0, abs(d)):
            raise ValueError(f"matrix is not in SL({self.dims.k0}, R): det = {d!r}")

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        if self.dims != other.dims:
            raise ValueError("dimension mismatch")
        return GroupElement(self.dims, self.entries @ other.entries,
                            det_tol=max(self.det_tol, other.det_tol))

    def inverse(self) -> "GroupElement":
        return GroupElement(self.dims, np.linalg.inv(self.entries), det_tol=self.det_tol)

    @staticmethod
    def identity(dims: Dims) -> "GroupElement":
        return GroupElement(dims, np.eye(dims.k0))


@dataclass(frozen=True)
class DiagonalSample:
    """Point of the diagonal group in log coordinates t, with sum(t) = 0
    exactly: the last coordinate is defined as minus the sum of the others."""

    dims: Dims
    log_entries: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.log_entries, dtype=float)
        if t.shape != (self.dims.k0,):
            raise ValueError(f"expected {self.dims.k0} log-entries, got shape {t.shape}")
        t = t.copy()
        t[-1] = -t[:-1].sum()
        t.flags.writeable = False
        object.__setattr__(self, "log_entries", t)

    @staticmethod
    def from_head(dims: Dims, head) -> "DiagonalSample":
        """Build from the first k0 - 1 coordinates; the last is forced."""
        head = np.asarray(head, dtype=float)
        if head.shape != (dims.k0 - 1,):
            raise ValueError(f"expected {dims.k0 - 1} free coordinates")
        t = np.empty(dims.k0)
        t[:-1] = head
        t[-1] = -head.sum()
        return DiagonalSample(dims, t)

    @staticmethod
    def identity(dims: Dims) -> "DiagonalSample":
        return DiagonalSample(dims, np.zeros(dims.k0))

    def matrix(self) -> GroupElement:
        return GroupElement(self.dims, np.diag(np.exp(self.log_entries)))

    def inverse(self) -> "DiagonalSample":
        return DiagonalSample(self.dims, -self.log_entries)

    def floor(self) -> float:
        """min_i t_i."""
        return float(self.log_entries.min())

    def dblfloor(self) -> float:
        """min over i in the first block, j in the second block of t_i + t_j."""
        k1 = self.dims.k1
        return float(self.log_entries[:k1].min() + self.log_entries[k1:].min())


@dataclass(frozen=True)
class UnipotentParam:
    """Parameter x in R^k of a unipotent element, row-major k1 x k2 matrix."""

    dims: Dims
    x: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.shape != (self.dims.k,):
            raise ValueError(f"expected a vector of length {self.dims.k}, got shape {x.shape}")
        x = x.copy()
        x.flags.writeable = False
        object.__setattr__(self, "x", x)

    def block(self) -> np.ndarray:
        return self.x.reshape(self.dims.k1, self.dims.k2)


@dataclass(frozen=True)
class LieAlgebraElement:
    """Element of sl(k0, R)."""

    dims: Dims
    entries: np.ndarray
    trace_tol: float = TRACE_TOL

    def __post_init__(self):
        m = _as_matrix(self.entries, self.dims.k0)
        object.__setattr__(self, "entries", m)
        tr = np.trace(m)
        if abs(tr) > self.trace_tol:
            raise ValueError(f"matrix is not traceless: trace = {tr!r}")


def embed_u(x: UnipotentParam) -> GroupElement:
    """Embed R^k into the upper-block unipotent subgroup:
    [[I_k1, M], [0, I_k2]] with M the row-major block of x."""
    d = x.dims
    m = np.eye(d.k0)
    m[: d.k1, d.k1:] = x.block()
    return GroupElement(d, m)


def conj_scaling(a: DiagonalSample) -> np.ndarray:
    """Diagonal coefficients of C_a on R^k, where a^-1 u(x) a = u(C_a x).

    In row-major order the coefficient for matrix position (i, j) is
    exp(t_{k1+j} - t_i).  Computed in log space to avoid overflow.
    """
    return np.exp(conj_scaling_log(a))


def conj_scaling_log(a: DiagonalSample) -> np.ndarray:
    """Log of the C_a coefficients: (t_{k1+j} - t_i) in row-major order."""
    d = a.dims
    t = a.log_entries
    return (t[d.k1:][None, :] - t[: d.k1][:, None]).ravel()


def theta_i(a_list: list[DiagonalSample]) -> np.ndarray:
    """Coordinatewise product of the conjugation scalings of a_1, ..., a_i."""
    if not a_list:
        raise ValueError("theta_i requires a nonempty list")
    log_total = sum(conj_scaling_log(a) for a in a_list)
    return np.exp(log_total)


def product_Pi(a_list: list[DiagonalSample]) -> DiagonalSample:
    """Product of diagonal samples: sum of log coordinates."""
    if not a_list:
        raise ValueError("product_Pi requires a nonempty list")
    dims = a_list[0].dims
    for a in a_list:
        if a.dims != dims:
            raise ValueError("dimension mismatch")
    total = np.sum([a.log_entries for a in a_list], axis=0)
    return DiagonalSample(dims, total)


def ad_action(g: GroupElement, v: LieAlgebraElement) -> LieAlgebraElement:
    """Adjoint action Ad(g) v = g v g^-1."""
    if g.dims != v.dims:
        raise ValueError("dimension mismatch")
    w = g.entries @ v.entries @ np.linalg.inv(g.entries)
    return LieAlgebraElement(v.dims, w, trace_tol=max(v.trace_tol, 1e-9))


def ad_unipotent_block(x: UnipotentParam, v: LieAlgebraElement) -> np.ndarray:
    """Ad(u(x)) v via the block formula
    [[A + xC, B - Ax + xD - xCx], [C, D - Cx]]
    with v = [[A, B], [C, D]] split at k1."""
    d = x.dims
    k1 = d.k1
    m = v.entries
    A, B = m[:k1, :k1], m[:k1, k1:]
    C, D = m[k1:, :k1], m[k1:, k1:]
    X = x.block()
    out = np.empty_like(m)
    out[:k1, :k1] = A + X @ C
    out[:k1, k1:] = B - A @ X + X @ D - X @ C @ X
    out[k1:, :k1] = C
    out[k1:, k1:] = D - C @ X
    return out


def q_project(v: LieAlgebraElement) -> UnipotentParam:
    """Euclidean projection of sl(k0, R) onto the Lie algebra of U:
    the upper-right k1 x k2 block, flattened row-major."""
    d = v.dims
    return UnipotentParam(d, v.entries[: d.k1, d.k1:].ravel())
