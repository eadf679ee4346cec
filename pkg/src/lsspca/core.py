"""Domain types and the dense linear-algebra primitives used by every solver.

Everything here works on small dense matrices (p up to a few hundred) held
as float64 numpy arrays. Objects are immutable once built: arrays are copied
on construction and flagged read-only.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyData,
    InvalidIndexSet,
    NotPSD,
    NotSymmetric,
    ZeroVarianceColumn,
)

SYMMETRY_RTOL = 1e-10
PSD_RTOL = 1e-8
PINV_RTOL = 1e-10


class Mode(str, enum.Enum):
    UNCORRELATED = "uncorrelated"
    CORRELATED = "correlated"
    ORTHOGONAL = "orthogonal"

    def __str__(self):
        return self.value


def _frozen(a):
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def _max_asymmetry(M):
    return float(np.max(np.abs(M - M.T))) if M.size else 0.0


@dataclass(frozen=True)
class CovarianceMatrix:
    """A symmetric PSD p x p matrix: covariance, or correlation (unit diagonal).

    ``check_psd=False`` skips the semidefiniteness test. It exists for
    published matrices that are slightly indefinite as printed.
    """

    values: np.ndarray
    kind: str = "covariance"
    names: Optional[tuple] = None
    check_psd: bool = True

    def __post_init__(self):
        S = np.asarray(self.values, dtype=float)
        if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] == 0:
            raise DimensionMismatch(f"covariance matrix must be square and nonempty, got shape {S.shape}")
        if self.kind not in ("covariance", "correlation"):
            raise ValueError(f"unknown matrix kind {self.kind!r}")
        scale = float(np.max(np.abs(S)))
        asym = _max_asymmetry(S)
        if asym > SYMMETRY_RTOL * scale:
            raise NotSymmetric(asym)
        S = 0.5 * (S + S.T)
        if self.check_psd:
            w = np.linalg.eigvalsh(S)
            if w[0] < -PSD_RTOL * max(w[-1], 0.0):
                raise NotPSD(float(w[0]), float(w[-1]))
        if self.kind == "correlation" and np.any(np.abs(np.diag(S) - 1.0) > 1e-10):
            raise ValueError("correlation matrix must have unit diagonal")
        names = self.names
        if names is not None:
            names = tuple(str(n) for n in names)
            if len(names) != S.shape[0]:
                raise DimensionMismatch(f"{len(names)} names for a {S.shape[0]}x{S.shape[0]} matrix")
        object.__setattr__(self, "values", _frozen(S))
        object.__setattr__(self, "names", names)

    @property
    def dim(self):
        return self.values.shape[0]

    @property
    def trace(self):
        return float(np.trace(self.values))

    def variable_names(self):
        if self.names is not None:
            return list(self.names)
        return [f"x{i + 1}" for i in range(self.dim)]

    def correlation(self):
        """Correlation matrix implied by this covariance matrix."""
        d = np.sqrt(np.diag(self.values))
        if np.any(d == 0):
            raise ZeroVarianceColumn(int(np.flatnonzero(d == 0)[0]))
        R = self.values / np.outer(d, d)
        np.fill_diagonal(R, 1.0)
        return CovarianceMatrix(R, "correlation", self.names, self.check_psd)


@dataclass(frozen=True)
class DataMatrix:
    """n observations (rows) on p variables (columns)."""

    values: np.ndarray
    column_names: Optional[tuple] = None

    def __post_init__(self):
        X = np.asarray(self.values, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2:
            raise DimensionMismatch(f"data must be a 2-d array, got {X.ndim} dimensions")
        if self.column_names is not None:
            if len(self.column_names) != X.shape[1]:
                raise DimensionMismatch(f"{len(self.column_names)} names for {X.shape[1]} columns")
            object.__setattr__(self, "column_names", tuple(self.column_names))
        object.__setattr__(self, "values", _frozen(X))

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def p(self):
        return self.values.shape[1]


@dataclass(frozen=True)
class IndexSet:
    """Strictly increasing variable indices forming a component's support."""

    indices: tuple

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if len(set(idx)) != len(idx):
            raise InvalidIndexSet(f"duplicate indices in {list(idx)}")
        object.__setattr__(self, "indices", tuple(sorted(idx)))

    @classmethod
    def of(cls, ind, p=None):
        s = ind if isinstance(ind, IndexSet) else cls(tuple(ind))
        if p is not None:
            s.check(p)
        return s

    def check(self, p):
        if not self.indices:
            raise InvalidIndexSet("empty index set")
        if self.indices[0] < 0 or self.indices[-1] >= p:
            raise InvalidIndexSet(f"indices {list(self.indices)} out of range for p = {p}")
        return self

    @property
    def cardinality(self):
        return len(self.indices)

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, i):
        return i in self.indices

    def as_array(self):
        return np.array(self.indices, dtype=int)

    def without(self, *removed):
        gone = set(removed)
        return IndexSet(tuple(i for i in self.indices if i not in gone))


@dataclass(frozen=True)
class EigenResult:
    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class SparseComponent:
    """One sparse component.

    ``vexp`` is the variance the component adds to the variance explained by
    the previous components of its chain (for a first or uncorrelated
    component this is its own variance explained). ``objective`` is the value
    of the criterion the solver maximized on the support, which differs from
    ``vexp`` only for correlated and orthogonal-loadings components.
    """

    loadings: np.ndarray
    support: IndexSet
    vexp: float
    variance: float
    mode: Mode
    order: int
    objective: float

    def __post_init__(self):
        object.__setattr__(self, "loadings", _frozen(self.loadings))

    @property
    def cardinality(self):
        return len(self.support)

    @property
    def nonzero(self):
        return self.loadings[self.support.as_array()]


@dataclass(frozen=True)
class ComponentSet:
    components: tuple
    source: CovarianceMatrix
    pca_eigenvalues: np.ndarray = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        ev = self.pca_eigenvalues
        if ev is None:
            ev = symmetric_eig(self.source.values).values
        object.__setattr__(self, "pca_eigenvalues", _frozen(ev))

    def __len__(self):
        return len(self.components)

    def __getitem__(self, k):
        return self.components[k]

    def __iter__(self):
        return iter(self.components)

    @property
    def vexp(self):
        return np.array([c.vexp for c in self.components])

    @property
    def cumulative_vexp(self):
        return np.cumsum(self.vexp)

    @property
    def loadings(self):
        """p x d matrix with the components as columns."""
        p = self.source.dim
        if not self.components:
            return np.zeros((p, 0))
        return np.column_stack([c.loadings for c in self.components])


def sign_normalize(v, rtol=1e-12):
    """Flip ``v`` so its largest-magnitude entry is positive.

    Entries within ``rtol`` of the largest magnitude count as ties; the
    lowest such index decides.
    """
    v = np.asarray(v, dtype=float)
    mag = np.abs(v)
    top = mag.max() if mag.size else 0.0
    if top == 0.0:
        return v.copy()
    k = int(np.flatnonzero(mag >= top * (1.0 - rtol))[0])
    return v if v[k] > 0 else -v


def covariance_from_data(data, standardize=False):
    """Center the columns of ``data`` and return S = X'X / n.

    The divisor is n, not n - 1. With ``standardize`` the centered columns
    are scaled to unit variance and the result is a correlation matrix.
    """
    if not isinstance(data, DataMatrix):
        data = DataMatrix(data)
    X = np.array(data.values, dtype=float)
    n = X.shape[0]
    if n < 2:
        raise EmptyData(n)
    X = X - X.mean(axis=0)
    if standardize:
        sd = np.sqrt(np.mean(X**2, axis=0))
        scale = np.maximum(np.max(np.abs(data.values), axis=0), 1.0)
        for i in np.flatnonzero(sd <= 1e-12 * scale):
            raise ZeroVarianceColumn(int(i))
        X = X / sd
    S = X.T @ X / n
    S = 0.5 * (S + S.T)
    if standardize:
        np.fill_diagonal(S, 1.0)
    return CovarianceMatrix(S, "correlation" if standardize else "covariance", data.column_names)


def _check_square_symmetric(M):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    scale = float(np.max(np.abs(M))) if M.size else 0.0
    asym = _max_asymmetry(M)
    if asym > SYMMETRY_RTOL * max(scale, np.finfo(float).tiny):
        raise NotSymmetric(asym)
    return 0.5 * (M + M.T)


def symmetric_eig(M):
    """Full eigendecomposition of a symmetric matrix, eigenvalues descending.

    Each eigenvector is sign-normalized (largest-magnitude entry positive).
    """
    M = _check_square_symmetric(M)
    w, V = np.linalg.eigh(M)
    w = w[::-1]
    V = V[:, ::-1]
    V = np.column_stack([sign_normalize(V[:, k]) for k in range(V.shape[1])]) if V.size else V
    return EigenResult(values=_frozen(w), vectors=_frozen(V))


def pseudo_inverse(M, rtol=PINV_RTOL, return_rank=False):
    """Moore-Penrose inverse of a symmetric PSD matrix.

    Eigenvalues at or below ``rtol`` times the largest are treated as zero.
    With ``return_rank`` the numerical rank is returned as well.
    """
    M = _check_square_symmetric(M)
    if M.size == 0 or np.max(np.linalg.eigvalsh(M), initial=0.0) <= 0.0:
        P, rank = np.zeros_like(M), 0
    else:
        w, V = np.linalg.eigh(M)
        keep = w > rtol * w[-1]
        Vk = V[:, keep]
        P = (Vk / w[keep]) @ Vk.T
        P, rank = 0.5 * (P + P.T), int(keep.sum())
    return (P, rank) if return_rank else P


def symmetric_sqrt(M, rtol=PSD_RTOL, keep=None):
    """Symmetric square root of a PSD matrix.

    Eigenvalues between ``-rtol * lambda_max`` and 0 are clamped to 0; more
    negative ones raise NotPSD. ``keep`` retains only that many of the
    largest eigenvalues (the rest are zeroed), for matrices of known rank.
    """
    M = _check_square_symmetric(M)
    if M.size == 0:
        return M.copy()
    w, V = np.linalg.eigh(M)
    top = max(w[-1], 0.0)
    if w[0] < -rtol * top:
        raise NotPSD(float(w[0]), float(w[-1]))
    w = np.clip(w, 0.0, None)
    if keep is not None:
        w[: len(w) - keep] = 0.0
    R = (V * np.sqrt(w)) @ V.T
    return 0.5 * (R + R.T)


def as_covariance(S):
    if isinstance(S, CovarianceMatrix):
        return S
    return CovarianceMatrix(np.asarray(S, dtype=float))


def gather(M, ind: Sequence[int]):
    """Principal submatrix M[ind, ind]."""
    ix = np.asarray(list(ind), dtype=int)
    return M[np.ix_(ix, ix)]
