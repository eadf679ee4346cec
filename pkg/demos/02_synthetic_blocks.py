"""
Three hidden factors
====================

Ten variables driven by three latent factors: x1-x4 by the first, x5-x8
by the second and x9-x10 by a third that mixes the other two. Its
population covariance is small enough to search every support, and the
best sparse components turn out not to be the block indicators one might
expect.
"""

import numpy as np

from lsspca import SearchConfig, compare, fit_supports, full_pca, load_fixture, sequential_fit, summarize
from lsspca.metrics import loadings_text

S = load_fixture("zou-analytic").matrix
pca = full_pca(S, 3)
print("PCA")
print(summarize(pca).to_text())

# Two uncorrelated components with four loadings each.
ls = sequential_fit(S, SearchConfig((4, 4), "uncorrelated"))
print("best uncorrelated components of cardinality 4")
print(summarize(ls).to_text())
print(loadings_text(ls))

# The block indicators: the supports a variance-maximizing method picks.
blocks = fit_supports(S, [(4, 5, 6, 7), (0, 1, 2, 3)])
print(compare([summarize(ls), summarize(blocks)], ["searched", "blocks"]).to_text())

# Correlated components may reuse information; one variable each is enough.
one = sequential_fit(S, SearchConfig((1, 1), "correlated"))
print("correlated components with a single loading")
print(summarize(one).to_text())
print("supports:", [S.variable_names()[c.support.indices[0]] for c in one])

# The printed correlation table of this example is not a valid correlation
# matrix: corr(x9, x10) = 0.948 contradicts the rest.
T = load_fixture("zou").matrix.values
print(f"\nsmallest eigenvalue of the printed table: {np.linalg.eigvalsh(T)[0]:.4f}")
