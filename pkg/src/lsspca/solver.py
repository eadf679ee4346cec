"""Least-squares sparse components on a fixed support.

Given the support of a component, the loadings that maximize the variance
explained are the top eigenvector of a small generalized eigenproblem built
from S restricted to the support. Every problem here is reduced to a
symmetric one::

    maximize  x' M x / x' D x   subject to  R x = 0

with D = S[ind, ind], M a gathered block of S S (or of the deflated S_j S_j)
and R the gathered constraint rows. With P = C D^-1, the projected inverse
that annihilates R, the loadings are P^(1/2) b where b is the top
eigenvector of P^(1/2) M P^(1/2). The loadings are finally projected onto the
null space of R so the constraints hold to rounding error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    ComponentSet,
    CovarianceMatrix,
    IndexSet,
    Mode,
    SparseComponent,
    as_covariance,
    gather,
    pseudo_inverse,
    sign_normalize,
    symmetric_sqrt,
    symmetric_eig,
)
from .errors import (
    CardinalityTooSmall,
    DegenerateComponent,
    DimensionMismatch,
    InfeasibleConstraints,
    LSSPCAError,
    SingularSupport,
    tag_component,
)

MAX_CONDITION = 1e12
DEGENERATE_RTOL = 1e-12


@dataclass(frozen=True)
class SolveContext:
    """The covariance matrix, mode and frozen components of a chain.

    ``deflated`` is the residual covariance S_j = S Z_j, kept for the
    correlated and orthogonal-loadings modes once a component exists.
    Contexts are never mutated: :meth:`extend` returns a new one.
    """

    S: CovarianceMatrix
    previous: tuple = ()
    mode: Mode = Mode.UNCORRELATED
    deflated: Optional[np.ndarray] = field(default=None, compare=False)
    objective_matrix: np.ndarray = field(default=None, init=False, repr=False, compare=False)
    constraints: Optional[np.ndarray] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        S = as_covariance(self.S)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "previous", tuple(self.previous))
        Sv = S.values
        A = self.previous_loadings
        deflated = None
        if self.previous and self.mode is not Mode.UNCORRELATED:
            deflated = deflate(Sv, A)
        object.__setattr__(self, "deflated", deflated)
        base = Sv if deflated is None else deflated
        M = base @ base
        object.__setattr__(self, "objective_matrix", 0.5 * (M + M.T))
        R = None
        if self.previous:
            R = A.T @ Sv if self.mode is Mode.UNCORRELATED else A.T.copy()
        if self.mode is Mode.CORRELATED:
            R = None
        object.__setattr__(self, "constraints", R)

    @classmethod
    def start(cls, S, mode=Mode.UNCORRELATED):
        return cls(as_covariance(S), (), Mode(mode))

    @property
    def j(self):
        """1-based order of the next component."""
        return len(self.previous) + 1

    @property
    def p(self):
        return self.S.dim

    @property
    def previous_loadings(self):
        if not self.previous:
            return np.zeros((self.S.dim, 0))
        return np.column_stack([c.loadings for c in self.previous])

    @property
    def residual(self):
        """S_j, the covariance of the residuals of X on the previous components."""
        if self.deflated is not None:
            return self.deflated
        if not self.previous:
            return self.S.values
        return deflate(self.S.values, self.previous_loadings)

    def extend(self, component):
        return SolveContext(self.S, self.previous + (component,), self.mode)

    def component_set(self):
        return ComponentSet(self.previous, self.S)


def deflate(S, A):
    """S Z = S - S A (A' S A)^+ A' S, recomputed from scratch."""
    SA = S @ A
    G = pseudo_inverse(0.5 * (A.T @ SA + (A.T @ SA).T))
    Sj = S - SA @ G @ SA.T
    return 0.5 * (Sj + Sj.T)


def _degenerate_floor(S):
    return DEGENERATE_RTOL * max(float(np.trace(S)), np.finfo(float).tiny)


def variance_explained(S, a):
    """Variance of all variables explained by the component with loadings a.

    Computes a'SSa / a'Sa, the regression sum of squares of the variables on
    t = Xa. Invariant to rescaling of ``a``.
    """
    Sv = S.values if isinstance(S, CovarianceMatrix) else np.asarray(S, dtype=float)
    a = np.asarray(a, dtype=float)
    if a.shape != (Sv.shape[0],):
        raise DimensionMismatch(f"loadings of length {a.shape} for a {Sv.shape[0]}x{Sv.shape[0]} matrix")
    norm = np.linalg.norm(a)
    if norm == 0.0:
        raise DegenerateComponent("zero loadings vector")
    a = a / norm
    Sa = Sv @ a
    var = float(a @ Sa)
    if var <= _degenerate_floor(Sv):
        raise DegenerateComponent(f"component variance {var:.3g} is numerically zero")
    return float(Sa @ Sa) / var


def approx_variance_explained(ctx, a):
    """a' S_j S_j a / a' S a: the criterion maximized by correlated components.

    Equals :func:`variance_explained` when the chain is empty.
    """
    Sv = ctx.S.values
    a = np.asarray(a, dtype=float)
    a = a / np.linalg.norm(a)
    var = float(a @ Sv @ a)
    if var <= _degenerate_floor(Sv):
        raise DegenerateComponent(f"component variance {var:.3g} is numerically zero")
    r = ctx.residual @ a
    return float(r @ r) / var


def incremental_variance_explained(ctx, a):
    """Variance explained by a on top of the previous components of ``ctx``.

    This is the variance explained by the part of t = Xa orthogonal to the
    earlier components: a' S_j S_j a / a' S_j a. Zero when t lies in their
    span.
    """
    a = np.asarray(a, dtype=float)
    a = a / np.linalg.norm(a)
    Sj = ctx.residual
    r = Sj @ a
    var = float(a @ r)
    if var <= _degenerate_floor(ctx.S.values):
        return 0.0
    return float(r @ r) / var


def joint_variance_explained(S, A):
    """Total variance explained by the components X A jointly: tr(S A (A'SA)^+ A'S)."""
    Sv = S.values if isinstance(S, CovarianceMatrix) else np.asarray(S, dtype=float)
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    SA = Sv @ A
    G = pseudo_inverse(0.5 * (A.T @ SA + (A.T @ SA).T))
    return float(np.trace(SA @ G @ SA.T))


@dataclass(frozen=True)
class _Reduced:
    """The pieces of a solved support, kept for certificates."""

    phi: float
    sub: np.ndarray
    P: np.ndarray
    M: np.ndarray


def _solve_support(S, M_full, R_full, ind):
    I = ind.as_array()
    D = gather(S, I)
    w, V = np.linalg.eigh(D)
    if w[0] <= 0.0 or w[-1] > MAX_CONDITION * w[0]:
        cond = np.inf if w[0] <= 0.0 else w[-1] / w[0]
        raise SingularSupport(ind.indices, cond)
    Dinv = (V / w) @ V.T
    M = gather(M_full, I)
    Q = None
    if R_full is None or R_full.shape[0] == 0:
        P = 0.5 * (Dinv + Dinv.T)
        Ph = (V / np.sqrt(w)) @ V.T
    else:
        R = R_full[:, I]
        RD = R @ Dinv
        G, rank = pseudo_inverse(0.5 * (RD @ R.T + (RD @ R.T).T), return_rank=True)
        free = len(I) - rank
        if free <= 0:
            raise InfeasibleConstraints(
                f"no direction on support {list(ind)} satisfies the {R.shape[0]} constraints"
            )
        P = Dinv - RD.T @ G @ RD
        P = 0.5 * (P + P.T)
        Ph = symmetric_sqrt(P, rtol=1e-6, keep=free)
        Q = np.linalg.svd(R, full_matrices=False)[2][:rank]
    H = Ph @ M @ Ph
    H = 0.5 * (H + H.T)
    ev, U = np.linalg.eigh(H)
    phi = float(ev[-1])
    if phi <= DEGENERATE_RTOL * max(float(np.trace(M)), np.finfo(float).tiny):
        raise DegenerateComponent(f"objective vanishes on support {list(ind)}")
    sub = Ph @ U[:, -1]
    if Q is not None:
        # remove the rounding-level component along the constraint rows
        sub = sub - Q.T @ (Q @ sub)
    return _Reduced(phi, sub, P, M)


def _embed(p, ind, sub):
    a = np.zeros(p)
    a[ind.as_array()] = sub
    a /= np.linalg.norm(a)
    return sign_normalize(a)


def _component(ctx, ind, red, mode):
    S = ctx.S.values
    a = _embed(ctx.p, ind, red.sub)
    variance = float(a @ S @ a)
    if mode is Mode.UNCORRELATED or not ctx.previous:
        vexp = red.phi
    else:
        vexp = incremental_variance_explained(ctx, a)
    return SparseComponent(a, ind, vexp, variance, mode, ctx.j, red.phi)


def _check_ind(ctx, ind):
    return IndexSet.of(ind, ctx.p)


def first_component(S, ind):
    """Loadings on ``ind`` maximizing the variance explained, no constraints."""
    ctx = SolveContext.start(S)
    ind = _check_ind(ctx, ind)
    red = _solve_support(ctx.S.values, ctx.objective_matrix, None, ind)
    return _component(ctx, ind, red, Mode.UNCORRELATED)


def uncorrelated_component(ctx, ind):
    """Best component on ``ind`` uncorrelated with every previous component."""
    ind = _check_ind(ctx, ind)
    if len(ind) < ctx.j:
        raise CardinalityTooSmall(len(ind), ctx.j)
    R = None
    if ctx.previous:
        R = ctx.previous_loadings.T @ ctx.S.values
    red = _solve_support(ctx.S.values, ctx.S.values @ ctx.S.values, R, ind)
    return _component(ctx, ind, red, Mode.UNCORRELATED)


def correlated_component(ctx, ind):
    """Best component on ``ind`` for the residuals of the previous components.

    Maximizes a'S_jS_ja / a'Sa; the reported ``vexp`` is the true increment
    in variance explained, ``objective`` the maximized surrogate.
    """
    ind = _check_ind(ctx, ind)
    Sj = ctx.residual
    red = _solve_support(ctx.S.values, Sj @ Sj, None, ind)
    return _component(ctx, ind, red, Mode.CORRELATED)


def orthogonal_loadings_component(ctx, ind):
    """Correlated component whose loadings are orthogonal to the previous ones."""
    ind = _check_ind(ctx, ind)
    Sj = ctx.residual
    R = ctx.previous_loadings.T if ctx.previous else None
    red = _solve_support(ctx.S.values, Sj @ Sj, R, ind)
    return _component(ctx, ind, red, Mode.ORTHOGONAL)


def solve_component(ctx, ind):
    """Dispatch on ``ctx.mode``."""
    ind = _check_ind(ctx, ind)
    if ctx.mode is Mode.UNCORRELATED and len(ind) < ctx.j:
        raise CardinalityTooSmall(len(ind), ctx.j)
    red = _solve_support(ctx.S.values, ctx.objective_matrix, ctx.constraints, ind)
    return _component(ctx, ind, red, ctx.mode)


def eigen_residual(ctx, component):
    """Relative residual of the eigenproblem the component solves.

    Returns ||C D^-1 M a~ - phi a~|| / (||M|| ||a~||) for the gathered
    nonzero loadings a~.
    """
    ind = component.support
    red = _solve_support(ctx.S.values, ctx.objective_matrix, ctx.constraints, ind)
    sub = component.nonzero
    lhs = red.P @ (red.M @ sub)
    res = np.linalg.norm(lhs - component.objective * sub)
    return float(res / (np.linalg.norm(red.M, 2) * np.linalg.norm(sub)))


def fit_supports(S, supports, mode=Mode.UNCORRELATED):
    """Solve a chain of components on given supports."""
    ctx = SolveContext.start(S, mode)
    for j, ind in enumerate(supports, start=1):
        try:
            comp = solve_component(ctx, ind)
        except LSSPCAError as exc:
            raise tag_component(exc, j)
        ctx = ctx.extend(comp)
    return ctx.component_set()


def increment_bound(ctx, ind):
    """Largest increment in variance explained by any component on ``ind``.

    max a'S_jS_ja / a'S_ja over loadings supported on ``ind``; this bounds the
    increment of every component whose support is a subset of ``ind``.
    """
    ind = _check_ind(ctx, ind)
    I = ind.as_array()
    Sj = ctx.residual
    Dj = gather(Sj, I)
    w, V = np.linalg.eigh(0.5 * (Dj + Dj.T))
    keep = w > 1e-10 * max(w[-1], _degenerate_floor(ctx.S.values))
    if not keep.any():
        return 0.0
    Wh = V[:, keep] / np.sqrt(w[keep])
    H = Wh.T @ gather(Sj @ Sj, I) @ Wh
    return float(np.linalg.eigvalsh(0.5 * (H + H.T))[-1])


def full_pca(S, d):
    """First ``d`` principal components; each explains its eigenvalue."""
    S = as_covariance(S)
    if not 1 <= d <= S.dim:
        raise ValueError(f"d must be in [1, {S.dim}], got {d}")
    eig = symmetric_eig(S.values)
    comps = []
    for k in range(d):
        v = eig.vectors[:, k]
        lam = float(eig.values[k])
        support = IndexSet(tuple(np.flatnonzero(v != 0.0)))
        comps.append(SparseComponent(v, support, lam, lam, Mode.UNCORRELATED, k + 1, lam))
    return ComponentSet(comps, S, eig.values)


def submatrix_pc(S, ind):
    """Top eigenvector of the principal submatrix S[ind, ind], embedded in R^p.

    This is the component maximizing the variance a'Sa on the support, the
    criterion of variance-based sparse PCA.
    """
    S = as_covariance(S)
    ind = IndexSet.of(ind, S.dim)
    eig = symmetric_eig(gather(S.values, ind.indices))
    a = _embed(S.dim, ind, eig.vectors[:, 0])
    vexp = variance_explained(S, a)
    lam = float(eig.values[0])
    return SparseComponent(a, ind, vexp, lam, Mode.UNCORRELATED, 1, lam)
