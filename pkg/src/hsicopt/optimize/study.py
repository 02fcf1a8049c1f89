"""Multistart study harness comparing original and reduced problems.

Each version runs ``n_reps`` repetitions of ``n_starts`` optimizations from
a fresh maximin LHS in that version's box.  Records are reported in
full-dimensional coordinates so versions are directly comparable.
"""
import math
import zlib
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from ..errors import ArgumentError
from ..io import write_csv
from ..problem import EvaluatedDesign, ProblemSpec
from ..sampling import Seed, lhs_maximin
from .dfo import StudyRecord, dfo_minimize
from .screening import Screening, freeze_values, reduce

ORIGINAL, GREEDY, RANDOM = "original", "greedy", "random"
HIST_BINS = 20


def _version_key(label):
    # stable across runs and independent of the order versions are listed in
    return zlib.crc32(label.encode())


def _run_task(task):
    label, rep, run, problem, screening, y0, opts = task
    rec = dfo_minimize(reduce(problem, screening) if screening else problem, y0, **opts)
    if screening is not None and screening.frozen:
        rec = replace(rec, start=screening.expand(rec.start), final=screening.expand(rec.final))
    return replace(rec, version=label, rep=rep, run=run)


def run_study(problem: ProblemSpec, versions=(ORIGINAL,), n_starts: int = 100, n_reps: int = 10,
              budget: int = 500, seed: Seed = Seed(), screening: Screening = None,
              greedy_design: EvaluatedDesign = None, fixed: dict = None, workers: int = 1,
              rho_begin=None, rho_end=None, lhs_iters: int = 1000) -> list:
    """Run every version and return all :class:`StudyRecord` objects.

    ``greedy`` and ``random`` need a classified ``screening``; ``greedy``
    also needs ``greedy_design``.  ``fixed`` maps extra version labels to
    screenings whose values are already set.  ``rho_begin``/``rho_end``
    scale with each version's own box when left unset.
    """
    if n_starts < 1 or n_reps < 1:
        raise ArgumentError("n_starts and n_reps must be >= 1")
    fixed = dict(fixed or {})
    opts = {"budget": budget, "rho_begin": rho_begin, "rho_end": rho_end}

    base = {}
    for label in versions:
        if label == ORIGINAL:
            base[label] = None
        elif label in (GREEDY, RANDOM):
            if screening is None:
                raise ArgumentError(f"version {label!r} needs a screening")
            if label == GREEDY:
                base[label] = freeze_values(GREEDY, screening, problem.domain, greedy_design)
            else:
                base[label] = screening
        elif label in fixed:
            base[label] = fixed[label]
        else:
            raise ArgumentError(f"unknown version {label!r}")

    tasks = []
    for label in versions:
        vseed = seed.spawn(_version_key(label))
        for rep in range(n_reps):
            scr = base[label]
            if label == RANDOM:
                scr = freeze_values(RANDOM, scr, problem.domain, seed=vseed.spawn(rep, 1))
            box = problem.domain if scr is None else problem.domain.restrict(scr.active)
            starts = lhs_maximin(box, n_starts, vseed.spawn(rep, 0), opt_iters=lhs_iters)
            tasks += [(label, rep, k, problem, scr, starts[k], opts) for k in range(n_starts)]

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (8 * workers))))
    return [_run_task(t) for t in tasks]


RECORD_TAIL = ["f_final", "feasible", "n_calls", "status", "max_violation"]


def write_records_csv(path, records):
    d = records[0].final.size
    header = (["version", "rep", "run"] + [f"start_x{i + 1}" for i in range(d)]
              + [f"final_x{i + 1}" for i in range(d)] + RECORD_TAIL)
    rows = [[r.version, r.rep, r.run, *r.start, *r.final, r.f_final, r.feasible,
             r.n_calls, r.status, r.max_violation] for r in records]
    return write_csv(path, header, rows)


def _mode(values):
    counts = Counter(values)
    top = max(counts.values())
    return min(v for v, c in counts.items() if c == top)


def _round_sig(x, digits=3):
    return float(f"{x:.{digits}g}")


def _histogram(values, bins, value_range=None):
    if len(values) == 0:
        return {"edges": [], "counts": []}
    counts, edges = np.histogram(values, bins=bins, range=value_range)
    return {"edges": edges.tolist(), "counts": counts.tolist()}


def summarize(records, budget: int = None, bins: int = HIST_BINS) -> dict:
    """Per-version statistics and binned histograms of ``f_final`` and ``n_calls``.

    ``f`` statistics use feasible runs only.  ``modal_f_final`` is the most
    frequent value after rounding to three significant digits.
    """
    out = {}
    for label in dict.fromkeys(r.version for r in records):
        recs = [r for r in records if r.version == label]
        calls = np.array([r.n_calls for r in recs])
        f_ok = np.array([r.f_final for r in recs if r.feasible])
        top = budget if budget is not None else int(calls.max())
        out[label] = {
            "runs": len(recs),
            "feasible_fraction": float(f_ok.size / len(recs)),
            "best_f": float(f_ok.min()) if f_ok.size else None,
            "median_f": float(np.median(f_ok)) if f_ok.size else None,
            "modal_f_final": _mode([_round_sig(v) for v in f_ok]) if f_ok.size else None,
            "mean_n_calls": float(calls.mean()),
            "median_n_calls": float(np.median(calls)),
            "modal_n_calls": int(_mode(calls.tolist())),
            "status": dict(Counter(r.status for r in recs)),
            "hist_f_final": _histogram(f_ok, bins),
            "hist_n_calls": _histogram(calls, bins, (0, top)),
        }
    return out


def basin_frequency(records, coord: int, target: float, tol: float = 0.01) -> float:
    """Fraction of records whose final coordinate ``coord`` is within ``tol`` of ``target``."""
    if not records:
        return math.nan
    hits = sum(abs(r.final[coord] - target) <= tol for r in records)
    return hits / len(records)


__all__ = ["run_study", "summarize", "basin_frequency", "write_records_csv", "StudyRecord",
           "ORIGINAL", "GREEDY", "RANDOM"]
