"""
Searching for the best support
==============================

Branch and bound removes one variable at a time from the candidate set.
Removing a variable can never increase the variance explained, so a node
whose value already falls below the best complete support found so far
is dropped together with everything beneath it.
"""

import math
import time

from lsspca import SearchConfig, SolveContext, branch_and_bound, exhaustive_search, load_fixture

S = load_fixture("pitprops").matrix
ctx = SolveContext.start(S, "correlated")

print(f"{'card':>4} {'subsets':>8} {'bb nodes':>9} {'unordered':>10} {'same':>5}")
for c in range(2, 9):
    bb = branch_and_bound(ctx, c)
    plain = branch_and_bound(ctx, c, SearchConfig(mode="correlated", order_variables=False))
    ex = exhaustive_search(ctx, c)
    same = bb.component.support == ex.component.support
    print(f"{c:>4} {math.comb(13, c):>8} {bb.nodes_visited:>9} {plain.nodes_visited:>10} {str(same):>5}")

# Later components are searched with the earlier ones fixed.
for cards in [(5, 2, 2), (7, 2, 3), (6, 6, 7, 8)]:
    t0 = time.perf_counter()
    ctx = SolveContext.start(S, "correlated")
    cum = 0.0
    parts = []
    for c in cards:
        res = branch_and_bound(ctx, c)
        ctx = ctx.extend(res.component)
        cum += 100 * res.component.vexp / S.trace
        parts.append(f"{cum:.1f}")
    print(f"cards {cards}: cumulative % {', '.join(parts)}  ({time.perf_counter() - t0:.2f}s)")

# Uncorrelated components need at least j loadings for component j.
try:
    from lsspca import sequential_fit
    sequential_fit(S, SearchConfig((6, 2, 2), "uncorrelated"))
except Exception as exc:
    print(f"\n(6, 2, 2) uncorrelated: {type(exc).__name__}: {exc}")
