import os

import numpy as np
import pytest
from hypothesis import settings

from lsspca import CovarianceMatrix, pitprops, zou_analytic

settings.register_profile("default", max_examples=40, deadline=None)
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def random_psd(p, seed, rank=None, corr=False):
    """Well-conditioned random covariance (or correlation) matrix."""
    rng = np.random.default_rng(seed)
    n = max(3 * p, 10) if rank is None else rank
    X = rng.standard_normal((n, p)) @ rng.standard_normal((p, p))
    X -= X.mean(axis=0)
    S = X.T @ X / n
    if corr:
        d = np.sqrt(np.diag(S))
        S = S / np.outer(d, d)
        np.fill_diagonal(S, 1.0)
    return CovarianceMatrix(0.5 * (S + S.T), "correlation" if corr else "covariance")


@pytest.fixture(scope="session")
def pit():
    return pitprops().matrix


@pytest.fixture(scope="session")
def zou():
    return zou_analytic().matrix


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
