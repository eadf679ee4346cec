"""Bundled benchmark matrices and CSV readers."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .core import CovarianceMatrix, DataMatrix, covariance_from_data
from .errors import AsymmetricMatrix, DimensionMismatch, NotSymmetric, ParseError


@dataclass(frozen=True)
class Fixture:
    name: str
    matrix: CovarianceMatrix
    variable_names: tuple
    provenance: str


ZOU_NAMES = tuple(f"x{i}" for i in range(1, 11))
ZOU_BLOCKS = (0, 0, 0, 0, 1, 1, 1, 1, 2, 2)


def zou_table1():
    """Zou's synthetic 10 x 10 correlation matrix, entries exactly as printed.

    As printed the matrix is slightly indefinite (smallest eigenvalue about
    -0.028): corr(x9, x10) = 0.948 is inconsistent with the other entries.
    The fixture therefore skips the semidefiniteness check.
    """
    within = (0.996, 0.997, 0.948)
    between = {(0, 1): 0.0, (0, 2): -0.3, (1, 2): 0.95}
    R = np.eye(10)
    for i in range(10):
        for k in range(10):
            if i == k:
                continue
            bi, bk = ZOU_BLOCKS[i], ZOU_BLOCKS[k]
            R[i, k] = within[bi] if bi == bk else between[tuple(sorted((bi, bk)))]
    S = CovarianceMatrix(R, "correlation", ZOU_NAMES, check_psd=False)
    return Fixture("zou", S, ZOU_NAMES, "Zou, Hastie and Tibshirani (2006), correlation table as printed")


def zou_analytic():
    """Population covariance of Zou's three-factor generating model.

    V1 ~ N(0, 290), V2 ~ N(0, 300), V3 = -0.3 V1 + 0.925 V2 + e, and
    X_i = V_block(i) + e_i with independent standard normal noise.
    """
    v3 = 0.3**2 * 290 + 0.925**2 * 300 + 1
    cov12 = 0.0
    cov13 = -0.3 * 290
    cov23 = 0.925 * 300
    V = np.array([[290.0, cov12, cov13], [cov12, 300.0, cov23], [cov13, cov23, v3]])
    B = np.zeros((10, 3))
    B[np.arange(10), ZOU_BLOCKS] = 1.0
    C = B @ V @ B.T + np.eye(10)
    S = CovarianceMatrix(C, "covariance", ZOU_NAMES)
    return Fixture("zou-analytic", S, ZOU_NAMES, "Zou, Hastie and Tibshirani (2006), generating model")


PITPROPS_NAMES = (
    "topdiam", "length", "moist", "testsg", "ovensg", "ringtop", "ringbut",
    "bowmax", "bowdist", "whorls", "clear", "knots", "diaknot",
)

# lower triangle, row by row
_PITPROPS_LOWER = """
1
0.954 1
0.364 0.297 1
0.342 0.284 0.882 1
-0.129 -0.118 -0.148 0.220 1
0.313 0.291 0.153 0.381 0.364 1
0.496 0.503 -0.029 0.174 0.296 0.813 1
0.424 0.419 -0.054 -0.059 0.004 0.090 0.372 1
0.592 0.648 0.125 0.137 -0.039 0.211 0.465 0.482 1
0.545 0.569 -0.081 -0.014 0.037 0.274 0.679 0.557 0.526 1
0.084 0.076 0.162 0.097 -0.091 -0.036 -0.113 0.061 0.085 -0.319 1
-0.019 -0.036 0.220 0.169 -0.145 0.024 -0.232 -0.357 -0.127 -0.368 0.029 1
0.134 0.144 0.126 0.015 -0.208 -0.329 -0.424 -0.202 -0.076 -0.291 0.007 0.184 1
"""


def pitprops():
    """Jeffers' (1967) correlation matrix of 13 physical measures on 180 pitprops."""
    rows = [list(map(float, line.split())) for line in _PITPROPS_LOWER.strip().splitlines()]
    R = np.zeros((13, 13))
    for i, row in enumerate(rows):
        R[i, : i + 1] = row
    R = R + np.tril(R, -1).T
    S = CovarianceMatrix(R, "correlation", PITPROPS_NAMES)
    return Fixture("pitprops", S, PITPROPS_NAMES, "Jeffers (1967), Applied Statistics 16:225-236")


FIXTURES = {
    "zou": zou_table1,
    "zou-analytic": zou_analytic,
    "pitprops": pitprops,
}


def random_correlation(p, seed=0, n=None):
    """Correlation matrix of ``n`` seeded Gaussian samples on ``p`` factor-structured variables."""
    rng = np.random.default_rng(seed)
    n = n or 4 * p
    k = max(1, p // 10)
    F = rng.standard_normal((n, k))
    X = F @ rng.standard_normal((k, p)) + rng.standard_normal((n, p))
    S = covariance_from_data(DataMatrix(X), standardize=True)
    names = tuple(f"v{i + 1}" for i in range(p))
    return Fixture(f"random:{p}:{seed}", CovarianceMatrix(S.values, "correlation", names), names, "synthetic")


def load_fixture(name):
    """Bundled fixture by key, or ``random:P[:SEED]`` for a synthetic matrix."""
    if name.startswith("random:"):
        parts = name.split(":")[1:]
        try:
            p = int(parts[0])
            seed = int(parts[1]) if len(parts) > 1 else 0
        except (ValueError, IndexError):
            raise KeyError(f"malformed synthetic fixture {name!r}; use random:P[:SEED]") from None
        if p < 2 or len(parts) > 2:
            raise KeyError(f"malformed synthetic fixture {name!r}; use random:P[:SEED]")
        return random_correlation(p, seed)
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None


def _parse_float(text, line, column):
    try:
        return float(text)
    except ValueError:
        raise ParseError(line, column, f"not a number: {text!r}") from None


def _is_numeric(cells):
    try:
        [float(c) for c in cells]
    except ValueError:
        return False
    return True


def _read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    rows = [[c.strip() for c in row] for row in rows]
    header = None
    first_line = 1
    if rows and not _is_numeric(rows[0]):
        header = tuple(rows[0])
        rows = rows[1:]
        first_line = 2
    width = len(rows[0]) if rows else 0
    values = []
    for r, row in enumerate(rows):
        line = first_line + r
        if len(row) != width:
            raise ParseError(line, len(row) + 1, f"expected {width} fields, found {len(row)}")
        values.append([_parse_float(c, line, k + 1) for k, c in enumerate(row)])
    return header, np.array(values, dtype=float).reshape(len(values), width)


def read_matrix_csv(path, kind="correlation", check_psd=True):
    """Read a square covariance or correlation matrix from CSV.

    A non-numeric first row is taken as variable names. ``check_psd=False``
    accepts a slightly indefinite matrix (as for :func:`zou_table1`).
    """
    header, M = _read_rows(path)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    try:
        return CovarianceMatrix(M, kind, header, check_psd=check_psd)
    except NotSymmetric as exc:
        raise AsymmetricMatrix(exc.max_asym) from None


def read_data_csv(path, standardize=True):
    """Read an n x p data table from CSV and return its covariance matrix."""
    header, X = _read_rows(path)
    return covariance_from_data(DataMatrix(X, header), standardize=standardize)


def write_matrix_csv(path, S, names=None):
    """Write a matrix with 17 significant digits so it reads back bit-exact."""
    M = S.values if isinstance(S, CovarianceMatrix) else np.asarray(S)
    if names is None and isinstance(S, CovarianceMatrix):
        names = S.names
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if names is not None:
            w.writerow(names)
        for row in M:
            w.writerow([repr(float(v)) for v in row])
