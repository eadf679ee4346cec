"""Least-squares sparse principal component analysis.

Sparse components are chosen to minimize the squared error of reconstructing
all variables from the components, so they maximize the variance they
explain rather than their own variance.
"""

from .core import (
    ComponentSet,
    CovarianceMatrix,
    DataMatrix,
    EigenResult,
    IndexSet,
    Mode,
    SparseComponent,
    covariance_from_data,
    pseudo_inverse,
    symmetric_eig,
    symmetric_sqrt,
)
from .datasets import (
    load_fixture,
    pitprops,
    random_correlation,
    read_data_csv,
    read_matrix_csv,
    write_matrix_csv,
    zou_analytic,
    zou_table1,
)
from .errors import (
    BudgetExceeded,
    CardinalityTooSmall,
    InputError,
    LSSPCAError,
    NumericalError,
    SingularSupport,
)
from .metrics import SummaryTable, compare, summarize
from .search import SearchConfig, SearchResult, branch_and_bound, exhaustive_search, sequential_fit
from .solver import (
    SolveContext,
    first_component,
    fit_supports,
    full_pca,
    solve_component,
    submatrix_pc,
    variance_explained,
)
from .trim import TrimConfig, TrimTrace, backward_eliminate, trim_component

__version__ = "0.1.0"
