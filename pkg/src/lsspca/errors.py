"""Exception hierarchy shared by every lsspca module."""

from __future__ import annotations


class LSSPCAError(Exception):
    """Base class for all errors raised by lsspca."""


class InputError(LSSPCAError):
    """Malformed or inconsistent user input."""


class NumericalError(LSSPCAError):
    """A well-formed problem that cannot be solved numerically."""


class EmptyData(InputError):
    def __init__(self, n):
        super().__init__(f"need at least 2 observations, got {n}")
        self.n = n


class ZeroVarianceColumn(InputError):
    def __init__(self, index):
        super().__init__(f"column {index} has zero variance")
        self.index = index


class NotSymmetric(InputError):
    def __init__(self, max_asym):
        super().__init__(f"matrix is not symmetric (max |S - S'| = {max_asym:.3g})")
        self.max_asym = max_asym


class AsymmetricMatrix(NotSymmetric):
    pass


class NotPSD(InputError):
    def __init__(self, min_eig, max_eig):
        super().__init__(
            f"matrix is not positive semidefinite (eigenvalues span {min_eig:.3g} .. {max_eig:.3g})"
        )
        self.min_eig = min_eig
        self.max_eig = max_eig


class ParseError(InputError):
    def __init__(self, line, column, message="could not parse value"):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DimensionMismatch(InputError):
    pass


class InvalidIndexSet(InputError):
    pass


class CardinalityTooSmall(InputError):
    """Uncorrelated component j needs at least j nonzero loadings."""

    def __init__(self, c, j):
        super().__init__(
            f"cardinality {c} is too small for uncorrelated component {j} (need >= {j})"
        )
        self.c = c
        self.j = j


class StartSetInfeasible(InputError):
    pass


class SingularSupport(NumericalError):
    """The covariance submatrix of a support is singular or ill-conditioned."""

    def __init__(self, ind, cond=None):
        detail = "" if cond is None else f" (condition number {cond:.3g})"
        super().__init__(f"support {list(ind)} is multicollinear{detail}")
        self.ind = tuple(ind)
        self.cond = cond


class InfeasibleConstraints(NumericalError):
    pass


class DegenerateComponent(NumericalError):
    pass


class BudgetExceeded(LSSPCAError):
    def __init__(self, n_subsets, budget):
        super().__init__(f"{n_subsets} subsets exceed the enumeration budget of {budget}")
        self.n_subsets = n_subsets
        self.budget = budget


def tag_component(exc, j):
    """Record on ``exc`` the 1-based index of the component that failed."""
    exc.component = j
    if hasattr(exc, "add_note"):
        exc.add_note(f"while computing component {j}")
    return exc
