import numpy as np
import pytest

from lsspca import IndexSet, SolveContext, TrimConfig, backward_eliminate, trim_component
from lsspca.errors import CardinalityTooSmall, StartSetInfeasible
from lsspca.solver import solve_component
from lsspca.trim import (
    MIN_CARDINALITY,
    THRESHOLD_MET,
    TOTAL_VARIANCE,
    VARIANCE_LOSS,
    normalized_loadings,
)

from conftest import random_psd
from trim_audit import audit


def test_tau_zero_keeps_start_solution(pit):
    ctx = SolveContext.start(pit, "correlated")
    comp, trace = trim_component(ctx, TrimConfig(tau=0.0))
    full = solve_component(ctx, tuple(range(13)))
    np.testing.assert_array_equal(comp.loadings, full.loadings)
    assert trace.steps == [] and trace.stop_reason == THRESHOLD_MET


def test_start_at_min_cardinality(pit):
    ctx = SolveContext.start(pit)
    comp, trace = trim_component(ctx, TrimConfig(tau=1.0, min_card=3, start_sets=((1, 4, 7),)))
    assert comp.support.indices == (1, 4, 7)
    assert trace.stop_reason == MIN_CARDINALITY and trace.steps == []


def hand_trim(S, tau):
    """Re-solve and drop the smallest contribution until all exceed tau."""
    ctx = SolveContext.start(S)
    ind = list(range(S.dim))
    path = []
    while True:
        a = solve_component(ctx, ind).nonzero
        share = np.abs(a) / np.abs(a).sum()
        k = int(np.argmin(share))
        if share[k] > tau or len(ind) == 1:
            return ind, path
        path.append(ind.pop(k))


def test_zou_trim_replay(zou):
    ctx = SolveContext.start(zou)
    comp, trace = trim_component(ctx, TrimConfig(tau=0.35, mode="uncorrelated"))
    ind, path = hand_trim(zou, 0.35)
    assert comp.support.indices == tuple(ind)
    assert [s.removed[0] for s in trace.steps] == path
    assert trace.stop_reason == THRESHOLD_MET
    assert np.all(normalized_loadings(comp.nonzero) > 0.35)
    assert comp.cardinality <= 2


def test_variance_loss_rollback(pit):
    cfg = TrimConfig(tau=1.0, max_loss=0.05, mode="correlated")
    ctx = SolveContext.start(pit, "correlated")
    comp, trace = trim_component(ctx, cfg)
    assert trace.stop_reason == VARIANCE_LOSS
    last = trace.steps[-1]
    assert last.rolled_back
    assert 1 - comp.vexp / trace.initial_vexp <= 0.05
    assert 1 - last.vexp / trace.initial_vexp > 0.05
    assert audit(pit, cfg, [comp], [trace]) == []


def test_mv_zero_returns_one_component(pit):
    comps, traces = backward_eliminate(pit, TrimConfig(d=4, mv=0.0, tau=0.2))
    assert len(comps) == 1
    assert traces[0].run_stop == TOTAL_VARIANCE


def test_total_variance_rule(pit):
    comps, traces = backward_eliminate(pit, TrimConfig(d=6, mv=0.5, tau=0.15, mode="uncorrelated"))
    cum = np.cumsum(comps.vexp) / pit.trace
    assert cum[-1] >= 0.5
    assert np.all(cum[:-1] < 0.5)


@pytest.mark.parametrize("norm,c", [("l1", 13), ("l2", 13)])
def test_threshold_guarantees_lower_cardinality(pit, norm, c):
    tau = (1 / c if norm == "l1" else 1 / np.sqrt(c)) + 1e-6
    comps, _ = backward_eliminate(pit, TrimConfig(d=1, tau=tau, norm=norm))
    assert comps[0].cardinality < c


def test_uncorrelated_never_below_order(pit):
    cfg = TrimConfig(d=4, tau=1.0, min_card=1, mode="uncorrelated")
    comps, traces = backward_eliminate(pit, cfg)
    assert [c.cardinality for c in comps] == [1, 2, 3, 4]
    A = comps.loadings
    C = A.T @ pit.values @ A
    assert np.all(np.abs(C - np.diag(np.diag(C))) <= 1e-8 * pit.trace / pit.dim)
    assert audit(pit, cfg, comps, traces) == []


def test_uncorrelated_start_set_too_small(pit):
    cfg = TrimConfig(d=2, tau=0.5, mode="uncorrelated", start_sets=(None, (3,)))
    with pytest.raises(StartSetInfeasible) as info:
        backward_eliminate(pit, cfg)
    assert info.value.component == 2


def test_ties_remove_lowest_index():
    S = np.eye(4)
    ctx = SolveContext.start(S)
    comp, trace = trim_component(ctx, TrimConfig(tau=1.0, min_card=1, start_sets=((0, 1, 2, 3),)), 1)
    assert [s.removed for s in trace.steps][0] == (0,)


@pytest.mark.parametrize("batch", [1, 5])
def test_batch_runs_pass_audit(batch):
    S = random_psd(30, 11, corr=True)
    cfg = TrimConfig(d=3, tau=(0.1, 0.15, 0.2), min_card=(4, 3, 3), batch=batch, mode="correlated")
    comps, traces = backward_eliminate(S, cfg)
    assert audit(S, cfg, comps, traces) == []
    for t in traces:
        cards = [len(t.start)] + [s.cardinality for s in t.accepted]
        assert all(b < a for a, b in zip(cards, cards[1:]))
        if batch > 1:
            sizes = [len(s.removed) for s in t.steps]
            # batches first, then single removals
            assert sizes == sorted(sizes, reverse=True)
            assert set(sizes) <= {1, batch}


def test_batch_finishes_individually(pit):
    cfg = TrimConfig(d=1, tau=1.0, min_card=5, batch=3, mode="correlated")
    comps, traces = backward_eliminate(pit, cfg)
    assert comps[0].cardinality == 5
    assert [len(s.removed) for s in traces[0].steps] == [3, 3, 1, 1]


def test_config_validation():
    with pytest.raises(ValueError):
        TrimConfig(tau=1.5)
    with pytest.raises(ValueError):
        TrimConfig(max_loss=-0.1)
    with pytest.raises(ValueError):
        TrimConfig(batch=0)
    with pytest.raises(ValueError):
        TrimConfig(norm="l3")
    cfg = TrimConfig(d=3, tau=(0.3, 0.2), min_card=2, mode="uncorrelated")
    assert cfg.tau_of(2) == 0.2 and cfg.tau_of(3) == 0.0
    assert cfg.min_card_of(3) == 3


def test_trace_rows(pit):
    comps, traces = backward_eliminate(pit, TrimConfig(d=2, tau=1.0, min_card=(5, 2)))
    rows = traces[0].rows()
    assert rows[-1]["stop_reason"] == MIN_CARDINALITY
    assert rows[-1]["cardinality"] == 5
