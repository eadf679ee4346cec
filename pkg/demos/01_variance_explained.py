"""
Variance explained versus variance
==================================

A component t = Xa has a variance, a'Sa, and it explains some of the
variance of all the variables, a'SSa / a'Sa. Ordinary PCA maximizes both at
once. Once the loadings are forced to be sparse the two criteria part ways,
and the least-squares components maximize the second.
"""

import numpy as np

from lsspca import SolveContext, load_fixture, solve_component, submatrix_pc, variance_explained

S = load_fixture("pitprops").matrix
names = S.variable_names()
print(f"{S.dim} variables, total variance {S.trace:.1f}")

# The first principal component explains its eigenvalue; nothing explains more.
w, V = np.linalg.eigh(S.values)
print(f"first PC explains {variance_explained(S, V[:, -1]):.3f} = largest eigenvalue {w[-1]:.3f}")

# Any loadings vector explains at least its own variance (for unit norm).
rng = np.random.default_rng(0)
a = rng.standard_normal(S.dim)
a /= np.linalg.norm(a)
print(f"random loadings: variance {a @ S.values @ a:.3f}, explains {variance_explained(S, a):.3f}")

# Fix a support and compare the two ways of filling it in.
support = (0, 1, 6, 8)
ls = solve_component(SolveContext.start(S), support)
pc = submatrix_pc(S, support)
print(f"\nsupport {[names[i] for i in support]}")
print(f"  least-squares loadings {np.round(ls.nonzero, 3)}: explains {ls.vexp:.3f}, variance {ls.variance:.3f}")
print(f"  submatrix PC loadings  {np.round(pc.nonzero, 3)}: explains {pc.vexp:.3f}, variance {pc.variance:.3f}")
# The submatrix PC has the larger variance, the least-squares one explains more.
