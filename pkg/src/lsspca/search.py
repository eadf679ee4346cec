"""Support selection: exhaustive enumeration and branch-and-bound.

Both searches rank candidate supports by the same criterion and the same
total order, so they agree exactly:

* uncorrelated mode: the variance explained by the solution;
* correlated and orthogonal-loadings modes: by default the true increment
  in variance explained (``criterion="increment"``); with
  ``criterion="surrogate"`` the residual criterion a'S_jS_ja / a'Sa that the
  solver maximizes.

Equal values are resolved in favour of the lexicographically largest
support, i.e. the one whose discarded variables come first.

The branch-and-bound tree removes one variable per level, in increasing
position order, so every subset is reached once. Children are visited in
decreasing order of their bounds. A node is discarded when
an upper bound on all supports below it cannot beat the incumbent. The
bound is the node's own criterion value (it can only drop as variables are
removed), except for the increment criterion, whose bound is the largest
increment attainable by any loadings on the node's support.
"""

from __future__ import annotations

import itertools
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .core import IndexSet, Mode, as_covariance
from .errors import (
    BudgetExceeded,
    CardinalityTooSmall,
    DegenerateComponent,
    InfeasibleConstraints,
    InvalidIndexSet,
    LSSPCAError,
    SingularSupport,
    tag_component,
)
from .solver import SolveContext, increment_bound, solve_component

DEFAULT_BUDGET = 10**6
PRUNE_RTOL = 1e-10

SURROGATE = "surrogate"
INCREMENT = "increment"


@dataclass(frozen=True)
class SearchConfig:
    """Options for :func:`branch_and_bound` and :func:`sequential_fit`.

    ``start_sets`` holds one optional start support per component (None
    means all variables). ``best_so_far`` seeds the incumbent value of every
    search.
    """

    cardinalities: tuple = ()
    mode: Mode = Mode.UNCORRELATED
    start_sets: tuple = ()
    order_variables: bool = True
    best_so_far: Optional[float] = None
    criterion: Optional[str] = None
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "cardinalities", tuple(int(c) for c in self.cardinalities))
        object.__setattr__(self, "start_sets", tuple(self.start_sets))
        if self.criterion not in (None, SURROGATE, INCREMENT):
            raise ValueError(f"unknown criterion {self.criterion!r}")
        for j, c in enumerate(self.cardinalities, start=1):
            if c < 1:
                raise InvalidIndexSet(f"cardinality of component {j} must be >= 1, got {c}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def start_set(self, j):
        if j - 1 < len(self.start_sets):
            return self.start_sets[j - 1]
        return None


@dataclass(frozen=True)
class SearchResult:
    component: object
    value: float
    nodes_visited: int
    optimal: bool = True


def _criterion(ctx, criterion):
    if ctx.mode is Mode.UNCORRELATED or not ctx.previous:
        return SURROGATE
    return criterion or INCREMENT


def _leaf_value(comp, criterion):
    return comp.vexp if criterion == INCREMENT else comp.objective


def _better(v1, s1, v2, s2):
    """Total order on (value, support) pairs; None is worst."""
    if s2 is None:
        return True
    if v1 != v2:
        return v1 > v2
    return s1 > s2


class _Incumbent:
    def __init__(self, floor):
        self.value = -math.inf if floor is None else floor
        self.seeded = floor is not None
        self.support = None
        self.component = None
        self.lock = threading.Lock()

    def offer(self, value, comp):
        key = comp.support.indices
        with self.lock:
            if self.support is None:
                if self.seeded and self.prunes(value):
                    return
                self.value, self.support, self.component = value, key, comp
            elif _better(value, key, self.value, self.support):
                self.value, self.support, self.component = value, key, comp

    def prunes(self, bound):
        v = self.value
        if v == -math.inf:
            return False
        return bound < v - PRUNE_RTOL * abs(v)


def _start(ctx, start_set):
    if start_set is None:
        return IndexSet(tuple(range(ctx.p)))
    return IndexSet.of(start_set, ctx.p)


def _check_cardinality(ctx, c, start):
    if c < 1:
        raise InvalidIndexSet(f"cardinality must be >= 1, got {c}")
    if ctx.mode is Mode.UNCORRELATED and c < ctx.j:
        raise CardinalityTooSmall(c, ctx.j)
    if c > len(start):
        raise InvalidIndexSet(f"cardinality {c} exceeds the {len(start)} candidate variables")


def _try_solve(ctx, ind):
    try:
        return solve_component(ctx, ind)
    except (SingularSupport, InfeasibleConstraints, DegenerateComponent):
        return None


def exhaustive_search(ctx, c, budget=DEFAULT_BUDGET, start_set=None, criterion=None):
    """Solve every support of size ``c`` and return the best component."""
    start = _start(ctx, start_set)
    _check_cardinality(ctx, c, start)
    n = math.comb(len(start), c)
    if n > budget:
        raise BudgetExceeded(n, budget)
    crit = _criterion(ctx, criterion)
    best_v, best = -math.inf, None
    for ind in itertools.combinations(start.indices, c):
        comp = _try_solve(ctx, IndexSet(ind))
        if comp is None:
            continue
        v = _leaf_value(comp, crit)
        if best is None or _better(v, comp.support.indices, best_v, best.support.indices):
            best_v, best = v, comp
    if best is None:
        raise SingularSupport(start.indices)
    return SearchResult(best, best_v, n, True)


def residual_ordering(ctx, start):
    """Start variables sorted by the residual variance each explains alone, strongest first.

    Strong variables then sit early in the removal order, where they are
    dropped only in small subtrees, so good incumbents are found quickly.
    """
    Sj = ctx.residual
    S = ctx.S.values
    idx = start.as_array()
    diag = np.diag(S)[idx]
    own = np.einsum("ij,ij->j", Sj[:, idx], Sj[:, idx])
    score = np.where(diag > 0, own / np.where(diag > 0, diag, 1.0), 0.0)
    order = np.argsort(-score, kind="stable")
    return [int(i) for i in idx[order]]


class _Search:
    def __init__(self, ctx, c, variables, crit, incumbent):
        self.ctx = ctx
        self.c = c
        self.vars = variables
        self.m = len(variables)
        self.crit = crit
        self.inc = incumbent
        self.nodes = 0
        self.lock = threading.Lock()

    def _count(self):
        with self.lock:
            self.nodes += 1

    def bound(self, keep):
        """Upper bound for every support below the node, or inf if unknown."""
        ind = IndexSet(tuple(self.vars[k] for k in keep))
        self._count()
        if self.crit == INCREMENT:
            return increment_bound(self.ctx, ind)
        try:
            return solve_component(self.ctx, ind).objective
        except SingularSupport:
            return math.inf
        except (InfeasibleConstraints, DegenerateComponent):
            return -math.inf

    def leaf(self, keep):
        ind = IndexSet(tuple(self.vars[k] for k in keep))
        self._count()
        comp = _try_solve(self.ctx, ind)
        if comp is not None:
            self.inc.offer(_leaf_value(comp, self.crit), comp)

    def children(self, removed):
        """Removal sequences one level below ``removed``."""
        left = self.m - len(removed) - self.c
        first = removed[-1] + 1 if removed else 0
        last = self.m - left
        return [removed + (t,) for t in range(first, last + 1)]

    def keep(self, removed):
        gone = set(removed)
        return [k for k in range(self.m) if k not in gone]

    def node_bound(self, node):
        keep = self.keep(node)
        if len(keep) == self.c:
            self.leaf(keep)
            return None
        return self.bound(keep)

    def explore(self, removed, bound=math.inf):
        """Depth-first, visiting the child with the highest bound first."""
        stack = [(removed, bound)]
        while stack:
            node, b = stack.pop()
            if self.inc.prunes(b):
                continue
            scored = []
            for child in self.children(node):
                cb = self.node_bound(child)
                if cb is not None and not self.inc.prunes(cb):
                    scored.append((cb, child))
            # stable sort: among equal bounds the canonical order is kept
            scored.sort(key=lambda t: t[0])
            stack.extend((child, cb) for cb, child in scored)


def branch_and_bound(ctx, c, cfg=None):
    """Best support of size ``c`` for the next component of ``ctx``.

    Returns the same component as :func:`exhaustive_search` while solving
    far fewer supports. ``cfg`` supplies the start set (for component
    ``ctx.j``), variable ordering, incumbent seed, criterion and threads.
    """
    cfg = cfg or SearchConfig(mode=ctx.mode)
    start = _start(ctx, cfg.start_set(ctx.j))
    _check_cardinality(ctx, c, start)
    crit = _criterion(ctx, cfg.criterion)
    variables = residual_ordering(ctx, start) if cfg.order_variables else list(start.indices)
    inc = _Incumbent(cfg.best_so_far)
    search = _Search(ctx, c, variables, crit, inc)
    if c == len(variables):
        search.leaf(list(range(c)))
    elif search.inc.prunes(root := search.bound(list(range(search.m)))):
        pass
    elif cfg.threads == 1:
        search.explore((), root)
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            futs = [pool.submit(search.explore, child, search.node_bound(child) or math.inf)
                    for child in search.children(())]
            for fut in futs:
                fut.result()
    if inc.component is None:
        if cfg.best_so_far is not None:
            # the seed was above every support; nothing beat it
            return branch_and_bound(ctx, c, replace(cfg, best_so_far=None))
        raise SingularSupport(start.indices)
    return SearchResult(inc.component, inc.value, search.nodes, True)


def sequential_fit(S, cfg, return_results=False):
    """Greedy chain: each component's support is chosen by branch-and-bound
    with the earlier components frozen."""
    S = as_covariance(S)
    if not cfg.cardinalities:
        raise InvalidIndexSet("no cardinalities given")
    ctx = SolveContext.start(S, cfg.mode)
    results = []
    for j, c in enumerate(cfg.cardinalities, start=1):
        try:
            res = branch_and_bound(ctx, c, cfg)
        except LSSPCAError as exc:
            raise tag_component(exc, j)
        results.append(res)
        ctx = ctx.extend(res.component)
    comps = ctx.component_set()
    return (comps, results) if return_results else comps
