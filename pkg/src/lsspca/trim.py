"""Backward elimination: greedy trimming of the smallest loadings.

Each component starts from its start set (all variables by default). The
smallest normalized loading is removed and the component re-solved on the
remaining support, until every loading exceeds the threshold, the minimum
cardinality is reached, or the loss of variance explained since the
untrimmed solution grows too large (the last removal is then undone).
Components are added until ``d`` are computed or their cumulative variance
explained reaches ``mv``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import IndexSet, Mode, as_covariance
from .errors import (
    DegenerateComponent,
    InfeasibleConstraints,
    InvalidIndexSet,
    LSSPCAError,
    SingularSupport,
    StartSetInfeasible,
    tag_component,
)
from .solver import SolveContext, solve_component

L1 = "l1"
L2 = "l2"

THRESHOLD_MET = "threshold_met"
MIN_CARDINALITY = "min_cardinality"
VARIANCE_LOSS = "variance_loss"
TOTAL_VARIANCE = "total_variance"
EXHAUSTED = "exhausted"


def _per_component(value, j, default):
    """Scalar options apply to every component; sequences are indexed by j."""
    if value is None:
        return default
    if np.isscalar(value):
        return value
    value = tuple(value)
    if j - 1 < len(value) and value[j - 1] is not None:
        return value[j - 1]
    return default


@dataclass(frozen=True)
class TrimConfig:
    """Stopping rules for :func:`backward_eliminate`.

    ``tau``, ``min_card``, ``max_loss`` and ``start_sets`` take either one
    value for all components or one value per component. ``mv`` and
    ``max_loss`` are fractions in [0, 1]; ``mv`` is relative to tr(S).
    """

    d: int = 1
    mv: Optional[float] = None
    start_sets: tuple = ()
    tau: object = 0.0
    min_card: object = 1
    max_loss: object = None
    norm: str = L1
    batch: int = 1
    mode: Mode = Mode.CORRELATED

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "start_sets", tuple(self.start_sets))
        if self.d < 1:
            raise InvalidIndexSet(f"d must be >= 1, got {self.d}")
        if self.norm not in (L1, L2):
            raise ValueError(f"norm must be {L1!r} or {L2!r}, got {self.norm!r}")
        if self.batch < 1:
            raise ValueError(f"batch must be >= 1, got {self.batch}")
        if self.mv is not None and not 0.0 <= self.mv <= 1.0:
            raise ValueError(f"mv must lie in [0, 1], got {self.mv}")
        for j in range(1, self.d + 1):
            t, k, m = self.tau_of(j), self.min_card_of(j), self.max_loss_of(j)
            if not 0.0 <= t <= 1.0:
                raise ValueError(f"tau for component {j} must lie in [0, 1], got {t}")
            if int(k) != k or k < 1:
                raise ValueError(f"min_card for component {j} must be an integer >= 1, got {k}")
            if m is not None and not 0.0 <= m <= 1.0:
                raise ValueError(f"max_loss for component {j} must lie in [0, 1], got {m}")

    def tau_of(self, j):
        return float(_per_component(self.tau, j, 0.0))

    def min_card_of(self, j):
        k = int(_per_component(self.min_card, j, 1))
        return max(k, j) if self.mode is Mode.UNCORRELATED else k

    def max_loss_of(self, j):
        m = _per_component(self.max_loss, j, None)
        return None if m is None else float(m)

    def start_set_of(self, j):
        if j - 1 < len(self.start_sets):
            return self.start_sets[j - 1]
        return None


@dataclass(frozen=True)
class TrimStep:
    removed: tuple
    magnitudes: tuple
    vexp: float
    cardinality: int
    rolled_back: bool = False


@dataclass
class TrimTrace:
    """What happened while trimming one component."""

    order: int
    start: IndexSet
    initial_vexp: float
    steps: list = field(default_factory=list)
    stop_reason: Optional[str] = None
    run_stop: Optional[str] = None

    @property
    def accepted(self):
        return [s for s in self.steps if not s.rolled_back]

    def rows(self):
        """Flat records for CSV output."""
        out = []
        for k, s in enumerate(self.steps, start=1):
            out.append({
                "component": self.order,
                "step": k,
                "removed": " ".join(str(i) for i in s.removed),
                "magnitudes": " ".join(repr(m) for m in s.magnitudes),
                "vexp": s.vexp,
                "cardinality": s.cardinality,
                "rolled_back": int(s.rolled_back),
                "stop_reason": self.stop_reason if k == len(self.steps) else "",
            })
        if not self.steps:
            out.append({
                "component": self.order, "step": 0, "removed": "", "magnitudes": "",
                "vexp": self.initial_vexp, "cardinality": len(self.start),
                "rolled_back": 0, "stop_reason": self.stop_reason,
            })
        return out


def normalized_loadings(loadings, norm=L1):
    """|a_i| / L(a) over the given nonzero loadings."""
    mag = np.abs(np.asarray(loadings, dtype=float))
    scale = mag.sum() if norm == L1 else np.sqrt(np.sum(mag**2))
    return mag / scale


def _removal(support, comp, norm, count):
    """The ``count`` support indices with the smallest normalized loadings."""
    mag = normalized_loadings(comp.nonzero, norm)
    order = np.lexsort((np.asarray(support.indices), mag))[:count]
    return tuple(support.indices[k] for k in order), tuple(float(mag[k]) for k in order)


def trim_component(ctx, cfg, j=None):
    """Trim component ``j`` (the next one of ``ctx`` by default).

    Returns the trimmed component and its :class:`TrimTrace`.
    """
    j = ctx.j if j is None else j
    if j != ctx.j:
        raise InvalidIndexSet(f"context holds {ctx.j - 1} components, cannot trim component {j}")
    start = cfg.start_set_of(j)
    support = IndexSet(tuple(range(ctx.p))) if start is None else IndexSet.of(start, ctx.p)
    if ctx.mode is Mode.UNCORRELATED and len(support) < j:
        raise StartSetInfeasible(
            f"start set of {len(support)} variables cannot give uncorrelated component {j}"
        )
    tau, k, max_loss = cfg.tau_of(j), cfg.min_card_of(j), cfg.max_loss_of(j)

    comp = solve_component(ctx, support)
    full = comp.vexp
    trace = TrimTrace(j, support, full)
    while True:
        card = len(support)
        if card <= k:
            trace.stop_reason = MIN_CARDINALITY
            break
        mag = normalized_loadings(comp.nonzero, cfg.norm)
        trimmable = int(np.sum(mag <= tau))
        if trimmable == 0:
            trace.stop_reason = THRESHOLD_MET
            break
        n = cfg.batch if (card - cfg.batch >= k and trimmable >= cfg.batch) else 1
        removed, mags = _removal(support, comp, cfg.norm, n)
        candidate = support.without(*removed)
        try:
            new = solve_component(ctx, candidate)
        except (SingularSupport, InfeasibleConstraints, DegenerateComponent):
            trace.stop_reason = EXHAUSTED
            break
        if max_loss is not None and full > 0 and 1.0 - new.vexp / full > max_loss:
            trace.steps.append(TrimStep(removed, mags, new.vexp, len(candidate), rolled_back=True))
            trace.stop_reason = VARIANCE_LOSS
            break
        trace.steps.append(TrimStep(removed, mags, new.vexp, len(candidate)))
        support, comp = candidate, new
    return comp, trace


def backward_eliminate(S, cfg):
    """Compute up to ``cfg.d`` trimmed components.

    Returns the component set and one :class:`TrimTrace` per component.
    The cumulative-variance rule is checked after each component, so at
    least one component is always returned.
    """
    S = as_covariance(S)
    ctx = SolveContext.start(S, cfg.mode)
    traces = []
    for j in range(1, cfg.d + 1):
        try:
            comp, trace = trim_component(ctx, cfg, j)
        except LSSPCAError as exc:
            raise tag_component(exc, j)
        ctx = ctx.extend(comp)
        traces.append(trace)
        if cfg.mv is not None and sum(c.vexp for c in ctx.previous) >= cfg.mv * S.trace:
            trace.run_stop = TOTAL_VARIANCE
            break
    return ctx.component_set(), traces
