"""
Trimming small loadings
=======================

Instead of fixing cardinalities in advance, start from all variables and
repeatedly drop the smallest loading, re-solving each time. Stop when
every loading carries more than a given share of the total, or when too
much variance explained has been lost.
"""

from lsspca import TrimConfig, backward_eliminate, load_fixture, summarize
from lsspca.metrics import loadings_text

S = load_fixture("pitprops").matrix

# Keep only loadings contributing more than 15% of the absolute total.
comps, traces = backward_eliminate(S, TrimConfig(d=3, tau=0.15, mode="correlated"))
print(summarize(comps).to_text())
print(loadings_text(comps))
for t in traces:
    removed = [S.variable_names()[s.removed[0]] for s in t.accepted]
    print(f"C{t.order}: removed {', '.join(removed)}; stopped: {t.stop_reason}")

# Trim all the way down to fixed cardinalities.
comps, _ = backward_eliminate(S, TrimConfig(d=3, tau=1.0, min_card=(5, 2, 2)))
print("\nforced to cardinalities (5, 2, 2)")
print(summarize(comps).to_text())

# Allow at most 5% loss of variance explained per component; the removal
# that would exceed it is undone.
comps, traces = backward_eliminate(S, TrimConfig(d=4, tau=1.0, max_loss=0.05, mv=0.6))
print("at most 5% loss, stop at 60% of the total")
print(summarize(comps).to_text())
print("stop reasons:", [t.stop_reason for t in traces], "| run:", traces[-1].run_stop)

# Removing several loadings per iteration is faster on wide matrices; the
# last few are still removed one at a time.
wide = load_fixture("random:60:1").matrix
cfg = TrimConfig(d=2, tau=1.0, min_card=6, batch=10)
comps, traces = backward_eliminate(wide, cfg)
print("\nbatch sizes on 60 variables:", [len(s.removed) for s in traces[0].steps])
