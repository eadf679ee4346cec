"""Command-line front end.

Exit status: 0 on success, 2 for bad input, 3 for a numerical failure,
4 when an exhaustive enumeration exceeds its budget.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import math
import os
import sys
import time

import numpy as np

from .core import PSD_RTOL, Mode
from .datasets import FIXTURES, load_fixture, read_data_csv, read_matrix_csv
from .errors import BudgetExceeded, CardinalityTooSmall, InputError, LSSPCAError, NumericalError
from .metrics import compare, loadings_csv, loadings_text, summarize
from .search import (
    DEFAULT_BUDGET,
    INCREMENT,
    SURROGATE,
    SearchConfig,
    branch_and_bound,
    exhaustive_search,
)
from .solver import SolveContext, full_pca, solve_component, submatrix_pc
from .trim import L1, L2, TrimConfig, backward_eliminate

EXIT_INPUT = 2
EXIT_NUMERICAL = 3
EXIT_BUDGET = 4

MODES = [m.value for m in Mode]


class CLIInputError(InputError):
    pass


# ---- argument parsing helpers

def _int_list(text):
    try:
        out = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _float_list(text):
    try:
        out = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _card_range(text):
    """'4..7' or '4' or '4,5'."""
    if ".." in text:
        lo, _, hi = text.partition("..")
        try:
            lo, hi = int(lo), int(hi)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad range {text!r}") from None
        if lo > hi:
            raise argparse.ArgumentTypeError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    return _int_list(text)


def _fraction(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not a fraction in [0, 1]")
    return v


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _one_per_component(values, d, name):
    """A one-element list applies to every component."""
    if values is None:
        return None
    if len(values) == 1:
        return values[0]
    if len(values) < d:
        raise CLIInputError(f"--{name} lists {len(values)} values for {d} components")
    return tuple(values)


def _add_input(p):
    g = p.add_argument_group("input")
    g.add_argument("--input", required=True,
                   help=f"fixture key ({', '.join(sorted(FIXTURES))}, random:P[:SEED]) or a CSV path")
    g.add_argument("--kind", choices=["correlation", "covariance", "data"], default="correlation",
                   help="how to read a CSV: a square matrix of either kind, or an n x p data table")
    g.add_argument("--no-standardize", action="store_true",
                   help="with --kind data, use the covariance rather than the correlation matrix")


def _add_outputs(p):
    g = p.add_argument_group("output")
    g.add_argument("--summary-csv", help="write the summary table here")
    g.add_argument("--loadings-csv", help="write the loadings (components as columns) here")


def _add_search(p, mode_default="uncorrelated"):
    p.add_argument("--mode", choices=MODES, default=mode_default)
    p.add_argument("--cards", type=_int_list, required=True, help="cardinality of each component, e.g. 5,2,2")
    p.add_argument("--start-set", action="append", type=_int_list, metavar="I,J,...",
                   help="0-based candidate variables for one component; repeat once per component")


def build_parser():
    parser = argparse.ArgumentParser(prog="lsspca", description="Least-squares sparse principal components.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("pca", help="full PCA baseline")
    _add_input(p)
    p.add_argument("--d", type=_positive, default=None, help="number of components (default: all)")
    _add_outputs(p)

    p = sub.add_parser("bb", help="branch-and-bound support selection")
    _add_input(p)
    _add_search(p)
    p.add_argument("--no-order", action="store_true", help="do not presort the variables")
    p.add_argument("--best-so-far", type=float, default=None, help="initial incumbent value")
    p.add_argument("--criterion", choices=[INCREMENT, SURROGATE], default=None,
                   help="ranking of correlated supports (default: increment)")
    p.add_argument("--threads", type=_positive, default=1)
    _add_outputs(p)

    p = sub.add_parser("exhaustive", help="enumerate every support of each cardinality")
    _add_input(p)
    _add_search(p)
    p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET, help="maximum subsets per component")
    _add_outputs(p)

    p = sub.add_parser("be", help="backward elimination of small loadings")
    _add_input(p)
    p.add_argument("--mode", choices=MODES, default="correlated")
    p.add_argument("--d", type=_positive, default=1, help="maximum number of components")
    p.add_argument("--tau", type=_float_list, default=None,
                   help="loading thresholds in [0, 1], one or one per component")
    p.add_argument("--min-card", type=_int_list, default=None, help="minimum cardinalities")
    p.add_argument("--max-loss", type=_float_list, default=None,
                   help="maximum relative loss of variance explained, fractions in [0, 1]")
    p.add_argument("--min-total-vexp", type=_fraction, default=None,
                   help="stop adding components once this fraction of tr(S) is explained")
    p.add_argument("--batch", type=_positive, default=1, help="loadings trimmed per iteration")
    p.add_argument("--norm", choices=[L1, L2], default=L1, help="normalization for the threshold test")
    p.add_argument("--start-set", action="append", type=_int_list, metavar="I,J,...",
                   help="0-based start variables for one component; repeat once per component")
    p.add_argument("--trace-csv", help="write the elimination trace here")
    _add_outputs(p)

    p = sub.add_parser("sweep", help="LS-SPCA vs submatrix PC on every subset of given sizes")
    _add_input(p)
    p.add_argument("--cards", type=_card_range, required=True, help="cardinalities, e.g. 4..7")
    p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET, help="maximum subsets in total")
    p.add_argument("--out", help="write the per-subset CSV here (default: standard output)")

    p = sub.add_parser("compare", help="side-by-side summary of several methods")
    _add_input(p)
    p.add_argument("--cards", type=_int_list, required=True, help="cardinality of each component")
    p.add_argument("--methods", default="bb:uncorrelated,bb:correlated",
                   help="comma-separated list from pca, bb:MODE, be:MODE")
    p.add_argument("--tau", type=float, default=1.0, help="threshold for be methods")
    p.add_argument("--summary-csv", help="write the comparison table here")

    p = sub.add_parser("bench", help="time repeated runs of another command")
    p.add_argument("--reps", type=_positive, default=3)
    p.add_argument("--csv", help="write the timings here")
    p.add_argument("args", nargs=argparse.REMAINDER, help="the command to time, with its flags")
    return parser


# ---- commands

def load_input(args):
    src = args.input
    if os.path.exists(src):
        if args.kind == "data":
            return read_data_csv(src, standardize=not args.no_standardize)
        return read_matrix_csv(src, kind=args.kind)
    try:
        return load_fixture(src).matrix
    except KeyError as exc:
        raise CLIInputError(f"{src!r} is neither a file nor a fixture ({exc.args[0]})") from None


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _report(out, comps, args, title=None):
    names = comps.source.variable_names()
    if title:
        out.write(title + "\n")
    table = summarize(comps)
    out.write(table.to_text())
    out.write("\n")
    for k, c in enumerate(comps, start=1):
        out.write(f"C{k} support: {', '.join(names[i] for i in c.support)}\n")
    out.write("\n")
    out.write(loadings_text(comps))
    if getattr(args, "summary_csv", None):
        _write(args.summary_csv, table.to_csv())
    if getattr(args, "loadings_csv", None):
        _write(args.loadings_csv, loadings_csv(comps))


def cmd_pca(args, S, out):
    d = args.d or S.dim
    if d > S.dim:
        raise CLIInputError(f"--d {d} exceeds the {S.dim} variables")
    comps = full_pca(S, d)
    lam = np.asarray(comps.pca_eigenvalues)
    out.write(f"{'pc':>4}  {'eigenvalue':>10}  {'pve':>6}  {'pcve':>6}\n")
    cum = 0.0
    for k in range(d):
        pve = 100.0 * lam[k] / S.trace
        cum += pve
        out.write(f"{k + 1:>4}  {lam[k]:>10.3f}  {pve:>6.1f}  {cum:>6.1f}\n")
    out.write("\n")
    if args.summary_csv:
        _write(args.summary_csv, summarize(comps).to_csv())
    if args.loadings_csv:
        _write(args.loadings_csv, loadings_csv(comps))


def _search_config(args):
    return SearchConfig(
        cardinalities=args.cards,
        mode=args.mode,
        start_sets=tuple(args.start_set or ()),
        order_variables=not getattr(args, "no_order", False),
        best_so_far=getattr(args, "best_so_far", None),
        criterion=getattr(args, "criterion", None),
        threads=getattr(args, "threads", 1),
    )


def _chain(S, cfg, search, partial=False):
    """Fit components one by one; with ``partial`` stop quietly at a too-small cardinality."""
    ctx = SolveContext.start(S, cfg.mode)
    results = []
    for j, c in enumerate(cfg.cardinalities, start=1):
        try:
            res = search(ctx, c, j)
        except CardinalityTooSmall:
            if partial:
                break
            raise
        except LSSPCAError as exc:
            exc.component = j
            raise
        results.append(res)
        ctx = ctx.extend(res.component)
    return ctx.component_set(), results


def _bb(S, cfg, partial=False):
    return _chain(S, cfg, lambda ctx, c, j: branch_and_bound(ctx, c, cfg), partial)


def cmd_bb(args, S, out):
    cfg = _search_config(args)
    comps, results = _bb(S, cfg)
    nodes = ", ".join(str(r.nodes_visited) for r in results)
    _report(out, comps, args, f"branch and bound, {cfg.mode} components, nodes visited: {nodes}\n")


def cmd_exhaustive(args, S, out):
    cfg = _search_config(args)

    def search(ctx, c, j):
        return exhaustive_search(ctx, c, args.budget, cfg.start_set(j))

    comps, results = _chain(S, cfg, search)
    subsets = ", ".join(str(r.nodes_visited) for r in results)
    _report(out, comps, args, f"exhaustive search, {cfg.mode} components, subsets solved: {subsets}\n")


def _trim_config(args, S):
    d = args.d
    return TrimConfig(
        d=d,
        mv=args.min_total_vexp,
        start_sets=tuple(args.start_set or ()),
        tau=_one_per_component(args.tau, d, "tau") if args.tau else 0.0,
        min_card=_one_per_component(args.min_card, d, "min-card") if args.min_card else 1,
        max_loss=_one_per_component(args.max_loss, d, "max-loss"),
        norm=args.norm,
        batch=args.batch,
        mode=args.mode,
    )


TRACE_COLUMNS = ("component", "step", "removed", "magnitudes", "vexp", "cardinality", "rolled_back", "stop_reason")


def trace_csv(traces):
    buf = io.StringIO()
    w = csv.DictWriter(buf, TRACE_COLUMNS, lineterminator="\n")
    w.writeheader()
    for t in traces:
        for row in t.rows():
            row = dict(row, vexp=repr(float(row["vexp"])))
            w.writerow(row)
    return buf.getvalue()


def cmd_be(args, S, out):
    try:
        cfg = _trim_config(args, S)
    except ValueError as exc:
        raise CLIInputError(str(exc)) from None
    comps, traces = backward_eliminate(S, cfg)
    reasons = ", ".join(t.stop_reason for t in traces)
    _report(out, comps, args, f"backward elimination, {cfg.mode} components, stop reasons: {reasons}\n")
    if traces[-1].run_stop:
        out.write(f"\nstopped after component {len(traces)}: minimum total variance reached\n")
    if args.trace_csv:
        _write(args.trace_csv, trace_csv(traces))


SWEEP_COLUMNS = ("cardinality", "support", "lsspca_vexp", "submatrix_vexp", "lsspca_pve", "submatrix_pve")


def sweep_rows(S, cards, budget=DEFAULT_BUDGET):
    """First-component Vexp of LS-SPCA and of the submatrix PC on every subset."""
    total = sum(math.comb(S.dim, c) for c in cards)
    if total > budget:
        raise BudgetExceeded(total, budget)
    if any(not 1 <= c <= S.dim for c in cards):
        raise CLIInputError(f"cardinalities must lie in [1, {S.dim}]")
    ctx = SolveContext.start(S)
    tr = S.trace
    for c in cards:
        for ind in itertools.combinations(range(S.dim), c):
            ls = solve_component(ctx, ind).vexp
            sm = submatrix_pc(S, ind).vexp
            yield c, ind, ls, sm, 100.0 * ls / tr, 100.0 * sm / tr


def cmd_sweep(args, S, out):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    best = {}
    n = 0
    for c, ind, ls, sm, lp, sp in sweep_rows(S, args.cards, args.budget):
        w.writerow([c, " ".join(map(str, ind)), repr(ls), repr(sm), repr(lp), repr(sp)])
        b = best.setdefault(c, [-math.inf, -math.inf, 0])
        b[0], b[1], b[2] = max(b[0], lp), max(b[1], sp), b[2] + 1
        n += 1
    if args.out:
        _write(args.out, buf.getvalue())
        out.write(f"{n} subsets written to {args.out}\n")
        out.write(f"{'card':>4}  {'subsets':>7}  {'max lsspca pve':>14}  {'max submatrix pve':>17}\n")
        for c, (lp, sp, k) in sorted(best.items()):
            out.write(f"{c:>4}  {k:>7}  {lp:>14.2f}  {sp:>17.2f}\n")
    else:
        out.write(buf.getvalue())


def _method(S, name, cards, tau):
    kind, _, mode = name.partition(":")
    if kind == "pca":
        return full_pca(S, len(cards))
    mode = mode or "uncorrelated"
    if mode not in MODES:
        raise CLIInputError(f"unknown mode in method {name!r}")
    if kind == "bb":
        return _bb(S, SearchConfig(cardinalities=cards, mode=mode), partial=True)[0]
    if kind == "be":
        cfg = TrimConfig(d=len(cards), tau=tau, min_card=tuple(cards), mode=mode)
        return backward_eliminate(S, cfg)[0]
    raise CLIInputError(f"unknown method {name!r}; use pca, bb:MODE or be:MODE")


def cmd_compare(args, S, out):
    names = [m.strip() for m in args.methods.split(",") if m.strip()]
    if not names:
        raise CLIInputError("no methods given")
    tables = [summarize(_method(S, m, args.cards, args.tau)) for m in names]
    report = compare(tables, names)
    out.write(report.to_text())
    if args.summary_csv:
        _write(args.summary_csv, report.to_csv())


def cmd_bench(args, S_unused, out):
    if not args.args:
        raise CLIInputError("bench needs a command to time, e.g. bench --reps 3 pca --input pitprops")
    inner = build_parser().parse_args(args.args)
    if inner.command == "bench":
        raise CLIInputError("cannot bench the bench command")
    S = load_input(inner)
    times = []
    for _ in range(args.reps):
        sink = io.StringIO()
        t0 = time.perf_counter()
        COMMANDS[inner.command](inner, S, sink)
        times.append(time.perf_counter() - t0)
    mean = float(np.mean(times))
    out.write(f"{'rep':>4}  {'seconds':>10}\n")
    for k, t in enumerate(times, start=1):
        out.write(f"{k:>4}  {t:>10.4f}\n")
    out.write(f"mean {mean:.4f} s over {len(times)} reps, {mean / S.dim:.6f} s per variable (p = {S.dim})\n")
    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rep", "seconds", "p", "seconds_per_variable"])
        for k, t in enumerate(times, start=1):
            w.writerow([k, repr(t), S.dim, repr(t / S.dim)])
        _write(args.csv, buf.getvalue())
    return times


COMMANDS = {
    "pca": cmd_pca,
    "bb": cmd_bb,
    "exhaustive": cmd_exhaustive,
    "be": cmd_be,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
    "bench": cmd_bench,
}


def _warn_indefinite(S, err):
    if S is None or S.check_psd:
        return
    w = np.linalg.eigvalsh(S.values)
    if w[0] < -PSD_RTOL * w[-1]:
        err.write(f"lsspca: warning: input matrix is indefinite (smallest eigenvalue {w[0]:.4g}); "
                  "variance explained may exceed the total\n")


def exit_code(exc):
    if isinstance(exc, BudgetExceeded):
        return EXIT_BUDGET
    if isinstance(exc, NumericalError):
        return EXIT_NUMERICAL
    return EXIT_INPUT


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        S = None if args.command == "bench" else load_input(args)
        _warn_indefinite(S, err)
        COMMANDS[args.command](args, S, out)
    except SystemExit as exc:
        # argument errors inside bench
        return exc.code
    except LSSPCAError as exc:
        where = getattr(exc, "component", None)
        prefix = f"component {where}: " if where else ""
        err.write(f"lsspca: error: {prefix}{type(exc).__name__}: {exc}\n")
        return exit_code(exc)
    except (OSError, ValueError) as exc:
        err.write(f"lsspca: error: {type(exc).__name__}: {exc}\n")
        return EXIT_INPUT
    return 0


if __name__ == "__main__":
    sys.exit(main())
