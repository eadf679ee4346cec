"""Summary statistics of a component set and side-by-side comparison tables.

Percentages are stored at full precision; rounding happens only when a table
is rendered as text.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch

COLUMNS = ("component", "pve", "pcve", "prcve", "card", "min_load", "min_pcont", "variance")
# columns shown per method when several tables share one text view
BRIEF = ("pve", "pcve", "prcve", "card")
DISPLAY_CUTOFF = 1e-3


@dataclass(frozen=True)
class SummaryRow:
    component: int
    pve: float
    pcve: float
    prcve: float
    card: int
    min_load: float
    min_pcont: float
    variance: float

    def as_tuple(self):
        return tuple(getattr(self, c) for c in COLUMNS)


@dataclass(frozen=True)
class SummaryTable:
    rows: tuple
    trace: float
    source_id: int = 0

    def __len__(self):
        return len(self.rows)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows])

    @property
    def pve(self):
        return self.column("pve")

    @property
    def pcve(self):
        return self.column("pcve")

    @property
    def prcve(self):
        return self.column("prcve")

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in r.as_tuple()])
        return buf.getvalue()

    def to_text(self):
        return compare([self], [""]).to_text()


def _matrix_id(S):
    # identifies the source matrix by content, so equal matrices compare equal
    return hash((S.values.shape, S.values.tobytes()))


def summarize(components):
    """Per-component PVE, PCVE, PRCVE, Card, MinLoad, Min PCont and variance.

    PVE uses each component's ``vexp``: the increment over the earlier
    components, so PCVE is the joint variance explained by the set.
    """
    S = components.source
    tr = S.trace
    lam = np.asarray(components.pca_eigenvalues)
    pca_cum = 100.0 * np.cumsum(lam) / tr
    rows = []
    cum = 0.0
    for k, comp in enumerate(components, start=1):
        pve = 100.0 * comp.vexp / tr
        cum += pve
        nz = np.abs(comp.nonzero)
        base = pca_cum[min(k, len(pca_cum)) - 1]
        rows.append(
            SummaryRow(
                component=k,
                pve=float(pve),
                pcve=float(cum),
                prcve=float(100.0 * cum / base) if base > 0 else float("nan"),
                card=comp.cardinality,
                min_load=float(nz.min()) if nz.size else 0.0,
                min_pcont=float(100.0 * nz.min() / nz.sum()) if nz.size and nz.sum() > 0 else 0.0,
                variance=float(comp.variance),
            )
        )
    return SummaryTable(tuple(rows), tr, _matrix_id(S))


def _fmt(name, v):
    if v is None:
        return ""
    if name in ("component", "card"):
        return str(v)
    if name in ("min_load", "variance"):
        return f"{v:.3f}"
    return f"{v:.1f}"


@dataclass(frozen=True)
class ComparisonReport:
    """Tables aligned on component number, one block of columns per method."""

    labels: tuple
    tables: tuple

    @property
    def n_rows(self):
        return max((len(t) for t in self.tables), default=0)

    def cell(self, k, name, method):
        rows = self.tables[method].rows
        return getattr(rows[k], name) if k < len(rows) else None

    def fields(self, brief=False):
        if brief and len(self.tables) > 1:
            return BRIEF
        return COLUMNS[1:]

    def header(self, brief=False):
        fields = self.fields(brief)
        if len(self.tables) == 1 and not self.labels[0]:
            return ["component", *fields]
        return ["component"] + [f"{lab}:{f}" for lab in self.labels for f in fields]

    def records(self, brief=False):
        fields = self.fields(brief)
        out = []
        for k in range(self.n_rows):
            rec = [k + 1]
            for m in range(len(self.tables)):
                rec.extend(self.cell(k, f, m) for f in fields)
            out.append(rec)
        return out

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header())
        for rec in self.records():
            w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in rec])
        return buf.getvalue()

    def to_text(self):
        """Plain-text table; with several methods only the main columns are shown."""
        head = self.header(brief=True)
        names = ["component"] + list(self.fields(brief=True)) * len(self.tables)
        body = [[_fmt(n, v) for n, v in zip(names, rec)] for rec in self.records(brief=True)]
        widths = [max(len(h), *(len(r[i]) for r in body)) if body else len(h) for i, h in enumerate(head)]
        lines = ["  ".join(h.rjust(w) for h, w in zip(head, widths))]
        lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in body]
        return "\n".join(lines) + "\n"


def compare(tables, labels=None):
    """Align summary tables of several methods computed on the same matrix."""
    tables = tuple(tables)
    if not tables:
        raise ValueError("nothing to compare")
    labels = tuple(labels) if labels is not None else tuple(f"m{i + 1}" for i in range(len(tables)))
    if len(labels) != len(tables):
        raise DimensionMismatch(f"{len(labels)} labels for {len(tables)} tables")
    src = {t.source_id for t in tables}
    if len(src) > 1:
        raise DimensionMismatch("tables were computed from different matrices")
    return ComparisonReport(labels, tables)


def loadings_text(components, names=None, cutoff=DISPLAY_CUTOFF):
    """Loadings as a 3-decimal table; entries below ``cutoff`` in magnitude are left blank."""
    A = components.loadings
    names = list(names) if names is not None else components.source.variable_names()
    head = ["variable"] + [f"C{k + 1}" for k in range(A.shape[1])]
    body = [[names[i]] + ["" if abs(v) < cutoff else f"{v:.3f}" for v in A[i]] for i in range(A.shape[0])]
    widths = [max(len(head[c]), *(len(r[c]) for r in body)) for c in range(len(head))]
    lines = ["  ".join(h.ljust(widths[0]) if c == 0 else h.rjust(widths[c]) for c, h in enumerate(head))]
    for r in body:
        lines.append("  ".join(x.ljust(widths[0]) if c == 0 else x.rjust(widths[c]) for c, x in enumerate(r)))
    return "\n".join(lines) + "\n"


def loadings_csv(components, names=None):
    """Full-precision loadings, one row per variable, components as columns."""
    A = components.loadings
    names = list(names) if names is not None else components.source.variable_names()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["variable"] + [f"C{k + 1}" for k in range(A.shape[1])])
    for i in range(A.shape[0]):
        w.writerow([names[i]] + [repr(float(v)) for v in A[i]])
    return buf.getvalue()
