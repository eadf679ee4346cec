"""
Every subset, both criteria
===========================

For each support of a given size, compare the variance explained by the
least-squares loadings with that of the first PC of the covariance
submatrix. The former always wins subset by subset, yet the best subsets
of the two criteria explain nearly the same amount.
"""

import itertools

import numpy as np

from lsspca import SolveContext, load_fixture, solve_component, submatrix_pc

S = load_fixture("pitprops").matrix
ctx = SolveContext.start(S)

print(f"{'card':>4} {'subsets':>7} {'ls median':>9} {'pc median':>9} {'ls max':>7} {'pc max':>7} {'ls wins':>7}")
for c in range(4, 8):
    ls, pc = [], []
    for ind in itertools.combinations(range(S.dim), c):
        ls.append(solve_component(ctx, ind).vexp)
        pc.append(submatrix_pc(S, ind).vexp)
    ls = 100 * np.array(ls) / S.trace
    pc = 100 * np.array(pc) / S.trace
    print(f"{c:>4} {len(ls):>7} {np.median(ls):>9.2f} {np.median(pc):>9.2f} {ls.max():>7.2f} {pc.max():>7.2f} "
          f"{np.mean(ls >= pc - 1e-10):>7.0%}")

# The same numbers, one row per subset, from the command line:
#   lsspca sweep --input pitprops --cards 4..7 --out sweep.csv
