"""Independent check of a backward-elimination run against its trace."""

import numpy as np

from lsspca import IndexSet, SolveContext
from lsspca.solver import solve_component
from lsspca.trim import (
    EXHAUSTED,
    MIN_CARDINALITY,
    THRESHOLD_MET,
    VARIANCE_LOSS,
    normalized_loadings,
)


def audit(S, cfg, comps, traces):
    """Replay every trace step; return a list of violated conditions."""
    problems = []
    ctx = SolveContext.start(S, cfg.mode)
    for j, (comp, trace) in enumerate(zip(comps, traces), start=1):
        tau, k, loss = cfg.tau_of(j), cfg.min_card_of(j), cfg.max_loss_of(j)
        support = trace.start
        cur = solve_component(ctx, support)
        full = cur.vexp
        if abs(full - trace.initial_vexp) > 1e-12 * max(1.0, full):
            problems.append(f"C{j}: initial vexp differs")
        for step in trace.steps:
            mag = normalized_loadings(cur.nonzero, cfg.norm)
            order = sorted(zip(mag, support.indices))
            expect = tuple(i for _, i in order[: len(step.removed)])
            if tuple(step.removed) != expect:
                problems.append(f"C{j}: removed {step.removed}, smallest were {expect}")
            if max(m for m, i in order[: len(step.removed)]) > tau:
                problems.append(f"C{j}: removed a loading above the threshold")
            nxt = support.without(*step.removed)
            new = solve_component(ctx, nxt)
            if abs(new.vexp - step.vexp) > 1e-10 * max(1.0, full):
                problems.append(f"C{j}: recorded vexp differs")
            if step.rolled_back:
                if not (loss is not None and 1 - new.vexp / full > loss):
                    problems.append(f"C{j}: rollback without excess loss")
                break
            if len(nxt) < k:
                problems.append(f"C{j}: trimmed below the minimum cardinality")
            if len(step.removed) > 1 and len(step.removed) != cfg.batch:
                problems.append(f"C{j}: batch of {len(step.removed)}")
            support, cur = nxt, new
        if support != comp.support or not np.allclose(cur.loadings, comp.loadings, atol=1e-12):
            problems.append(f"C{j}: returned component is not the last accepted one")
        mag = normalized_loadings(comp.nonzero, cfg.norm)
        reason = trace.stop_reason
        if reason == THRESHOLD_MET and not (np.all(mag > tau) and len(support) > k - 1):
            problems.append(f"C{j}: threshold_met with a trimmable loading")
        if reason == MIN_CARDINALITY and len(support) > k:
            problems.append(f"C{j}: min_cardinality above k")
        if reason == VARIANCE_LOSS:
            if loss is None or 1 - comp.vexp / full > loss + 1e-12:
                problems.append(f"C{j}: accepted component exceeds the loss bound")
        if reason not in (THRESHOLD_MET, MIN_CARDINALITY, VARIANCE_LOSS, EXHAUSTED):
            problems.append(f"C{j}: unknown stop reason {reason}")
        if reason in (THRESHOLD_MET, VARIANCE_LOSS, EXHAUSTED) and len(support) < k:
            problems.append(f"C{j}: below minimum cardinality")
        ctx = ctx.extend(comp)
    return problems
