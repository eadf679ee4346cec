import numpy as np
import pytest

from lsspca import CovarianceMatrix, DataMatrix, IndexSet, covariance_from_data
from lsspca.core import pseudo_inverse, sign_normalize, symmetric_eig, symmetric_sqrt
from lsspca.errors import (
    DimensionMismatch,
    EmptyData,
    InvalidIndexSet,
    NotPSD,
    NotSymmetric,
    ZeroVarianceColumn,
)

from conftest import random_psd


def test_covariance_of_two_points():
    S = covariance_from_data(np.array([[-1.0], [1.0]]), standardize=False)
    assert S.kind == "covariance"
    np.testing.assert_array_equal(S.values, [[1.0]])


def test_duplicated_columns_are_perfectly_correlated():
    x = np.array([0.3, 1.2, -0.7, 2.0, 0.1])
    S = covariance_from_data(np.column_stack([x, x, x**2]), standardize=True)
    assert S.values[0, 1] == pytest.approx(1.0, abs=1e-12)


def test_proportional_columns():
    X = np.array([[1, 2], [2, 4], [3, 6], [4, 8]], dtype=float)
    S = covariance_from_data(X, standardize=True)
    assert S.kind == "correlation"
    np.testing.assert_allclose(S.values, np.ones((2, 2)), atol=1e-12)


def test_divisor_is_n():
    X = np.array([[0.0], [2.0], [4.0]])
    S = covariance_from_data(X)
    assert S.values[0, 0] == pytest.approx(8.0 / 3.0)


def test_data_errors():
    with pytest.raises(EmptyData):
        covariance_from_data(np.array([[1.0, 2.0]]))
    with pytest.raises(ZeroVarianceColumn) as info:
        covariance_from_data(np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]]), standardize=True)
    assert info.value.index == 1
    # a constant column is fine without standardizing
    covariance_from_data(np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]]))


def test_centering():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((50, 4)) * [1, 10, 100, 1000] + 7
    S = covariance_from_data(X)
    Xc = X - X.mean(axis=0)
    assert np.all(np.abs(Xc.mean(axis=0)) <= 1e-10 * np.abs(X).max(axis=0))
    np.testing.assert_allclose(S.values, Xc.T @ Xc / 50, rtol=1e-12)


def test_covariance_matrix_checks():
    with pytest.raises(NotSymmetric):
        CovarianceMatrix(np.array([[1.0, 0.5], [0.4, 1.0]]))
    with pytest.raises(NotPSD):
        CovarianceMatrix(np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(DimensionMismatch):
        CovarianceMatrix(np.ones((2, 3)))
    with pytest.raises(ValueError):
        CovarianceMatrix(np.diag([1.0, 2.0]), "correlation")
    S = CovarianceMatrix(np.array([[1.0, 2.0], [2.0, 1.0]]), check_psd=False)
    assert S.dim == 2


def test_covariance_matrix_is_immutable():
    M = np.eye(3)
    S = CovarianceMatrix(M)
    M[0, 0] = 5.0
    assert S.values[0, 0] == 1.0
    with pytest.raises(ValueError):
        S.values[0, 0] = 2.0


def test_correlation_view():
    S = CovarianceMatrix(np.array([[4.0, 2.0], [2.0, 9.0]]))
    R = S.correlation()
    assert R.kind == "correlation"
    assert R.values[0, 1] == pytest.approx(2.0 / 6.0)


def test_index_set():
    s = IndexSet((3, 1, 2))
    assert s.indices == (1, 2, 3)
    assert s.cardinality == 3
    assert s.without(2).indices == (1, 3)
    with pytest.raises(InvalidIndexSet):
        IndexSet((1, 1))
    with pytest.raises(InvalidIndexSet):
        IndexSet.of((0, 5), p=5)
    with pytest.raises(InvalidIndexSet):
        IndexSet(()).check(3)


def test_data_matrix_shape():
    D = DataMatrix(np.zeros((5, 2)), ("a", "b"))
    assert (D.n, D.p) == (5, 2)
    with pytest.raises(DimensionMismatch):
        DataMatrix(np.zeros((5, 2)), ("a",))


def test_eig_identity():
    r = symmetric_eig(np.eye(3))
    np.testing.assert_allclose(r.values, [1, 1, 1])


def test_eig_diagonal():
    r = symmetric_eig(np.diag([1.0, 3.0]))
    np.testing.assert_allclose(r.values, [3, 1])
    np.testing.assert_allclose(r.vectors, [[0, 1], [1, 0]], atol=1e-15)


def test_eig_two_by_two():
    r = symmetric_eig(np.array([[2.0, 1.0], [1.0, 2.0]]))
    np.testing.assert_allclose(r.values, [3, 1], atol=1e-14)
    np.testing.assert_allclose(r.vectors[:, 0], np.ones(2) / np.sqrt(2), atol=1e-14)


def test_eig_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        symmetric_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_eig_residual_and_sign():
    S = random_psd(9, 3).values
    r = symmetric_eig(S)
    for k in range(9):
        v = r.vectors[:, k]
        assert np.linalg.norm(S @ v - r.values[k] * v) <= 1e-9 * np.linalg.norm(S, 2)
        assert v[np.argmax(np.abs(v))] > 0
    np.testing.assert_allclose(r.vectors.T @ r.vectors, np.eye(9), atol=1e-9)
    assert np.all(np.diff(r.values) <= 0)


def test_sign_normalize_tie_goes_to_lowest_index():
    np.testing.assert_array_equal(sign_normalize(np.array([-0.5, 0.5])), [0.5, -0.5])
    np.testing.assert_array_equal(sign_normalize(np.array([0.1, -0.9])), [-0.1, 0.9])


def test_pinv_examples():
    np.testing.assert_allclose(pseudo_inverse(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))
    M = random_psd(5, 0).values
    assert np.linalg.norm(M @ pseudo_inverse(M) - np.eye(5)) <= 1e-9
    v = np.array([1.0, 2.0, 2.0]) / 3.0
    np.testing.assert_allclose(pseudo_inverse(np.outer(v, v)), np.outer(v, v), atol=1e-12)
    np.testing.assert_array_equal(pseudo_inverse(np.zeros((3, 3))), np.zeros((3, 3)))
    P, rank = pseudo_inverse(np.diag([1.0, 1e-12, 0.0]), return_rank=True)
    assert rank == 1 and P[1, 1] == 0.0


def test_sqrt_examples():
    np.testing.assert_allclose(symmetric_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
    np.testing.assert_allclose(symmetric_sqrt(np.eye(3)), np.eye(3))
    M = np.array([[2.0, 1.0], [1.0, 2.0]])
    R = symmetric_sqrt(M)
    np.testing.assert_allclose(R @ R, M, atol=1e-14)
    with pytest.raises(NotPSD):
        symmetric_sqrt(np.diag([1.0, -0.1]))
    # tiny negative eigenvalues are clamped
    R = symmetric_sqrt(np.diag([1.0, -1e-12]))
    assert R[1, 1] == 0.0
