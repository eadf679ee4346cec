"""Randomized properties of the primitives, the solver and the searches."""

import itertools

import numpy as np
import scipy.linalg as sla
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from lsspca import CovarianceMatrix, SearchConfig, SolveContext, branch_and_bound, exhaustive_search, sequential_fit
from lsspca.core import pseudo_inverse, symmetric_eig, symmetric_sqrt
from lsspca.solver import (
    deflate,
    fit_supports,
    increment_bound,
    joint_variance_explained,
    solve_component,
    submatrix_pc,
    variance_explained,
)

from conftest import random_psd

seeds = st.integers(0, 2**31 - 1)


def psd_with_rank(p, rank, seed):
    """Random PSD matrix of exact rank, nonzero eigenvalues spanning at most 1e3."""
    rng = np.random.default_rng(seed)
    Q = np.linalg.qr(rng.standard_normal((p, p)))[0]
    w = np.zeros(p)
    w[:rank] = 10.0 ** rng.uniform(-3, 0, rank) * 10.0 ** rng.uniform(-3, 3)
    M = (Q * w) @ Q.T
    return 0.5 * (M + M.T)


@given(p=st.integers(1, 20), seed=seeds, data=st.data())
def test_moore_penrose_identities(p, seed, data):
    rank = data.draw(st.integers(1, p))
    M = psd_with_rank(p, rank, seed)
    P = pseudo_inverse(M)
    nM, nP = np.linalg.norm(M, 2), np.linalg.norm(P, 2)
    assert np.linalg.norm(M @ P @ M - M) <= 1e-8 * nM
    assert np.linalg.norm(P @ M @ P - P) <= 1e-8 * nP
    assert np.linalg.norm(M @ P - (M @ P).T) <= 1e-8
    assert np.linalg.norm(P @ M - (P @ M).T) <= 1e-8


@given(p=st.integers(1, 20), seed=seeds, data=st.data())
def test_sqrt_squares_back(p, seed, data):
    M = psd_with_rank(p, data.draw(st.integers(1, p)), seed)
    R = symmetric_sqrt(M)
    assert np.linalg.norm(R @ R - M) <= 1e-8 * np.linalg.norm(M)
    np.testing.assert_array_equal(R, R.T)


@given(p=st.integers(1, 15), seed=seeds)
def test_eigenvalues_sum_to_trace(p, seed):
    S = random_psd(p, seed)
    r = symmetric_eig(S.values)
    assert abs(r.values.sum() - S.trace) <= 1e-8 * S.trace


@given(seed=seeds, a=arrays(np.float64, 8, elements=st.floats(-10, 10)))
def test_cauchy_schwarz(seed, a):
    S = random_psd(8, seed)
    if np.linalg.norm(a) < 1e-3:
        return
    u = a / np.linalg.norm(a)
    assert variance_explained(S, a) >= u @ S.values @ u - 1e-10 * S.trace


@given(seed=seeds, j=st.integers(1, 4))
def test_extra_sum_of_squares(seed, j):
    rng = np.random.default_rng(seed)
    S = random_psd(8, seed).values
    A = rng.standard_normal((8, j))
    a = rng.standard_normal(8)
    gain = joint_variance_explained(S, np.column_stack([A, a])) - joint_variance_explained(S, A)
    Sj = deflate(S, A)
    resid = (a @ Sj @ Sj @ a) / (a @ Sj @ a)
    assert abs(gain - resid) <= 1e-8 * np.trace(S)


@given(seed=seeds, p=st.integers(5, 9))
def test_full_cardinality_recovers_pca(seed, p):
    S = random_psd(p, seed)
    w = np.linalg.eigvalsh(S.values)[::-1]
    for mode in ("uncorrelated", "correlated"):
        comps = fit_supports(S, [tuple(range(p))] * 5, mode=mode)
        assert np.abs(comps.vexp - w[:5]).max() <= 1e-8 * w[0]


@given(seed=seeds)
@settings(max_examples=20)
def test_uncorrelated_chains(seed):
    S = random_psd(9, seed)
    comps = sequential_fit(S, SearchConfig((3, 3, 4), "uncorrelated"))
    C = comps.loadings.T @ S.values @ comps.loadings
    off = C - np.diag(np.diag(C))
    assert np.abs(off).max() <= 1e-8 * S.trace / S.dim
    assert np.all(np.diff(comps.cumulative_vexp) >= 0)


def orthogonal_oracle(S, A, ind):
    """Dense maximization over the orthogonal complement of the previous loadings."""
    I = np.asarray(ind)
    Sj = deflate(S, A) if A.shape[1] else S
    N = sla.null_space(A[I].T) if A.shape[1] else np.eye(len(I))
    w, V = sla.eigh(N.T @ (Sj @ Sj)[np.ix_(I, I)] @ N, N.T @ S[np.ix_(I, I)] @ N)
    return w[-1]


@given(seed=seeds, p=st.integers(4, 8), data=st.data())
@settings(max_examples=30)
def test_orthogonal_loadings(seed, p, data):
    S = random_psd(p, seed)
    ctx = SolveContext.start(S, "orthogonal")
    for j in range(1, 4):
        c = data.draw(st.integers(j, p))
        ind = tuple(sorted(data.draw(st.permutations(range(p)))[:c]))
        comp = solve_component(ctx, ind)
        A = ctx.previous_loadings
        assert np.abs(A.T @ comp.loadings).max(initial=0.0) <= 1e-9
        ref = orthogonal_oracle(S.values, A, ind)
        assert abs(comp.objective - ref) <= 1e-9 * max(1.0, ref)
        ctx = ctx.extend(comp)


@given(seed=seeds, p=st.integers(3, 8))
def test_removing_a_variable_never_helps(seed, p):
    S = random_psd(p, seed)
    for mode in ("uncorrelated", "correlated"):
        ctx = SolveContext.start(S, mode)
        ctx = ctx.extend(solve_component(ctx, tuple(range(p // 2 + 1))))
        full = tuple(range(p))
        top = solve_component(ctx, full)
        bound = increment_bound(ctx, full)
        for i in range(p):
            sub = tuple(k for k in full if k != i)
            if mode == "uncorrelated" and len(sub) < 2:
                continue
            assert solve_component(ctx, sub).objective <= top.objective + 1e-10 * S.trace
            assert increment_bound(ctx, sub) <= bound + 1e-10 * S.trace


@given(seed=seeds, p=st.integers(3, 8))
def test_ls_dominates_submatrix_pc(seed, p):
    S = random_psd(p, seed)
    ctx = SolveContext.start(S)
    for c in range(1, p + 1):
        for ind in itertools.islice(itertools.combinations(range(p), c), 10):
            assert solve_component(ctx, ind).vexp >= submatrix_pc(S, ind).vexp - 1e-10 * S.trace


@given(seed=seeds, mode=st.sampled_from(["uncorrelated", "correlated", "orthogonal"]))
@settings(max_examples=15)
def test_bb_equals_exhaustive(seed, mode):
    S = random_psd(8, seed, corr=True)
    ctx = SolveContext.start(S, mode)
    ctx = ctx.extend(branch_and_bound(ctx, 3).component)
    for c in range(2, 8):
        bb = branch_and_bound(ctx, c)
        ex = exhaustive_search(ctx, c)
        assert bb.component.support == ex.component.support
        assert abs(bb.value - ex.value) <= 1e-10
