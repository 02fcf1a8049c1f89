"""Command-line front end: sample, sensitivity, sobol, study.

Settings come from built-in defaults, then an optional flat ``key = value``
file (``--config``), then command-line flags; later sources win.  Keys in
the file use the flag names without the leading dashes, e.g.
``gram-subsample = 1000``.

Exit codes: 0 success, 2 configuration error, 3 degenerate data,
4 numeric failure.
"""
import argparse
import os
import sys
import warnings
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import benchmarks
from .errors import ArgumentError, DegenerateError, DegenerateOutputWarning, EvaluationError
from .hsic import replicate_indices
from .io import write_json
from .optimize.screening import Screening, classify
from .optimize.study import run_study, summarize, write_records_csv
from .problem import evaluate, read_design_csv, write_design_csv
from .sampling import Seed, lhs_maximin, uniform_sample
from .sobol import (conditional_first_order, pick_freeze_thresholded, write_sweep_csv)
from .thresholding import ThresholdSpec

EXIT_OK, EXIT_CONFIG, EXIT_DEGENERATE, EXIT_NUMERIC = 0, 2, 3, 4

# one random stream per command so `study` replays `sensitivity` exactly
STREAM_SENSITIVITY, STREAM_STUDY, STREAM_SOBOL, STREAM_SAMPLE = 1, 2, 3, 4


@dataclass
class RunConfig:
    benchmark: str = None
    design: str = None
    n: int = 50000
    gram_subsample: int = 2000
    reps: int = 20
    alphas: tuple = (0.10, 0.40, 0.70, 1.00)
    min_feasible: int = 100
    normalization: str = "sum"
    factor: float = 0.1
    alpha_sel: float = 0.1
    rho_begin: float = None
    rho_end: float = None
    budget: int = 500
    starts: int = 100
    study_reps: int = 10
    versions: tuple = ("original", "greedy", "random")
    freeze: tuple = ()
    thresholding: str = "zero"
    bins: int = 20
    method: str = "lhs"
    seed: int = 0
    out: str = "results"
    workers: int = None

    def validate(self):
        for name in ("n", "gram_subsample", "reps", "min_feasible", "budget", "starts",
                     "study_reps", "bins"):
            if getattr(self, name) < 1:
                raise ArgumentError(f"{name.replace('_', '-')} must be positive")
        if self.workers is not None and self.workers < 1:
            raise ArgumentError("workers must be positive")
        if self.seed < 0:
            raise ArgumentError("seed must be nonnegative")
        if not self.alphas:
            raise ArgumentError("alphas must not be empty")
        for a in self.alphas:
            if not 0.0 < a <= 1.0:
                raise ArgumentError(f"alpha {a} outside (0, 1]")
        if not any(abs(a - self.alpha_sel) < 1e-12 for a in self.alphas):
            raise ArgumentError(f"alpha-sel {self.alpha_sel} must be one of alphas {self.alphas}")
        if not 0.0 < self.factor < 1.0:
            raise ArgumentError("factor must lie in (0, 1)")
        if self.benchmark is not None and self.design is not None:
            raise ArgumentError("pass either --benchmark or --design, not both")
        if self.benchmark is not None and self.benchmark not in benchmarks.CATALOG:
            raise ArgumentError(f"unknown benchmark {self.benchmark!r}; "
                                f"choose from {', '.join(benchmarks.CATALOG)}")
        if self.normalization not in ("sum", "cross"):
            raise ArgumentError("normalization must be 'sum' or 'cross'")
        if self.thresholding not in ("zero", "conditional"):
            raise ArgumentError("thresholding must be 'zero' or 'conditional'")
        if self.method not in ("uniform", "lhs"):
            raise ArgumentError("method must be 'uniform' or 'lhs'")
        return self


def _floats(text):
    return tuple(float(v) for v in str(text).split(",") if v.strip())


def _names(text):
    return tuple(v.strip() for v in str(text).split(",") if v.strip())


_CONVERT = {
    "n": int, "gram_subsample": int, "reps": int, "min_feasible": int, "budget": int,
    "starts": int, "study_reps": int, "bins": int, "seed": int, "workers": int,
    "factor": float, "alpha_sel": float, "rho_begin": float, "rho_end": float,
    "alphas": _floats, "versions": _names,
}


def _convert(key, value):
    if isinstance(value, (list, tuple)) and key == "freeze":
        return tuple(value)
    try:
        return _CONVERT.get(key, str)(value)
    except ValueError as exc:
        raise ArgumentError(f"bad value for {key.replace('_', '-')}: {value!r}") from exc


def read_config_file(path):
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    known = {f.name for f in fields(RunConfig)}
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ArgumentError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ArgumentError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise ArgumentError(f"{path}:{lineno}: unknown key {key!r}")
        if key == "freeze":
            out.setdefault("freeze", ())
            out["freeze"] += (value,)
        else:
            out[key] = _convert(key, value)
    return out


def build_config(args) -> RunConfig:
    values = {}
    if args.config:
        values.update(read_config_file(args.config))
    known = {f.name for f in fields(RunConfig)}
    for key, value in vars(args).items():
        if key in known and value is not None:
            values[key] = _convert(key, value)
    return RunConfig(**values).validate()


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    # defaults stay None so the config file can fill unset flags
    common.add_argument("--config", help="flat key = value settings file")
    common.add_argument("--benchmark", help=f"one of: {', '.join(benchmarks.CATALOG)}")
    common.add_argument("--design", help="CSV with columns x1..xd, f, g1..gm (given-data mode)")
    common.add_argument("--n", help="design size N (default 50000)")
    common.add_argument("--gram-subsample", dest="gram_subsample",
                        help="rows M used for the Gram matrices (default 2000)")
    common.add_argument("--reps", help="sensitivity repetitions (default 20)")
    common.add_argument("--alphas", help="comma-separated quantile levels (default 0.1,0.4,0.7,1)")
    common.add_argument("--min-feasible", dest="min_feasible",
                        help="feasible rows required before relaxing T (default 100)")
    common.add_argument("--normalization", help="sum or cross (default sum)")
    common.add_argument("--factor", help="screening threshold factor (default 0.1)")
    common.add_argument("--alpha-sel", dest="alpha_sel",
                        help="alpha used for screening (default 0.1)")
    common.add_argument("--rho-begin", dest="rho_begin", help="initial trust radius")
    common.add_argument("--rho-end", dest="rho_end", help="final trust radius")
    common.add_argument("--budget", help="objective calls per optimization (default 500)")
    common.add_argument("--starts", help="LHS start points per repetition (default 100)")
    common.add_argument("--study-reps", dest="study_reps", help="study repetitions (default 10)")
    common.add_argument("--versions", help="comma-separated: original,greedy,random")
    common.add_argument("--freeze", action="append",
                        help="extra study version with fixed inputs, e.g. x2=-1 or x2=1,x3=4; "
                             "repeatable")
    common.add_argument("--thresholding", help="sobol: zero or conditional (default zero)")
    common.add_argument("--bins", help="sobol conditional: equal-count bins (default 20)")
    common.add_argument("--method", help="sample: uniform or lhs (default lhs)")
    common.add_argument("--seed", help="master seed (default 0)")
    common.add_argument("--out", help="output directory (default results)")
    common.add_argument("--workers", help="worker processes (default: CPU count)")

    parser = argparse.ArgumentParser(prog="hsicopt", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sample", parents=[common], help="draw and evaluate a design")
    sub.add_parser("sensitivity", parents=[common], help="HSIC-IT indices over an alpha grid")
    sub.add_parser("sobol", parents=[common], help="Sobol indices of thresholded outputs")
    sub.add_parser("study", parents=[common], help="screening plus multistart optimization study")
    return parser


def _problem(cfg):
    if cfg.benchmark is None:
        raise ArgumentError("this command needs --benchmark")
    return benchmarks.get(cfg.benchmark)


def _sensitivity(cfg):
    seed = Seed(cfg.seed, STREAM_SENSITIVITY)
    if cfg.design is not None:
        design = read_design_csv(cfg.design)
        return replicate_indices(design=design, alphas=cfg.alphas, M=cfg.gram_subsample,
                                 reps=cfg.reps, seed=seed, min_feasible=cfg.min_feasible,
                                 normalization=cfg.normalization)
    if cfg.benchmark is None:
        raise ArgumentError("pass --benchmark or --design")
    return replicate_indices(_problem(cfg), alphas=cfg.alphas, N=cfg.n, M=cfg.gram_subsample,
                             reps=cfg.reps, seed=seed, min_feasible=cfg.min_feasible,
                             normalization=cfg.normalization)


def _meta(cfg, **extra):
    return {"config": asdict(cfg), "seed": cfg.seed, **extra}


def cmd_sample(cfg):
    problem = _problem(cfg)
    seed = Seed(cfg.seed, STREAM_SAMPLE)
    if cfg.method == "lhs":
        X = lhs_maximin(problem.domain, cfg.n, seed)
    else:
        X = uniform_sample(problem.domain, cfg.n, seed)
    path = write_design_csv(Path(cfg.out) / "design.csv", evaluate(problem, X))
    print(f"wrote {path}")


def cmd_sensitivity(cfg):
    table = _sensitivity(cfg)
    out = Path(cfg.out)
    table.to_csv(out / "indices.csv")
    meta = table.metadata()
    meta["best_feasible"] = None if table.best_rows is None else table.best_rows.X
    write_json(out / "sensitivity_meta.json", _meta(cfg, sensitivity=meta))
    _print_table(table)
    print(f"wrote {out / 'indices.csv'} and {out / 'sensitivity_meta.json'}")


def _print_table(table):
    print("alpha  " + "  ".join(f"{f'x{i + 1}':>15}" for i in range(table.dim)))
    for k, a in enumerate(table.alphas):
        cells = "  ".join(f"{table.mean[k, i]:7.3f}+-{table.std[k, i]:5.3f}"
                          for i in range(table.dim))
        print(f"{a:5.2f}  {cells}")


def cmd_sobol(cfg):
    problem = _problem(cfg)
    seed = Seed(cfg.seed, STREAM_SOBOL)
    entries = []
    for k, a in enumerate(cfg.alphas):
        spec = ThresholdSpec(a)
        if cfg.thresholding == "zero":
            table = pick_freeze_thresholded(problem, spec, cfg.n, seed.spawn(k))
        else:
            table = conditional_first_order(problem, spec, cfg.n, seed.spawn(k), cfg.bins)
        entries.append((a, cfg.thresholding, table))
        total = "" if table.total is None else f"  total={np.round(table.total, 3).tolist()}"
        print(f"alpha={a:.2f}  first={np.round(table.first, 3).tolist()}{total}")
    path = write_sweep_csv(Path(cfg.out) / "sobol.csv", entries)
    print(f"wrote {path}")


def parse_freeze(text, dim):
    """``"x2=-1,x3=4"`` -> ``{1: -1.0, 2: 4.0}``."""
    values = {}
    for item in text.split(","):
        if "=" not in item:
            raise ArgumentError(f"bad --freeze entry {item!r}; expected xI=value")
        name, value = (p.strip() for p in item.split("=", 1))
        try:
            i = int(name.lstrip("xX")) - 1
            values[i] = float(value)
        except ValueError as exc:
            raise ArgumentError(f"bad --freeze entry {item!r}") from exc
        if not 0 <= i < dim:
            raise ArgumentError(f"--freeze input {name} outside 1..{dim}")
    return values


def _frozen_values(records, versions, screening, fixed):
    """Frozen coordinates actually used, per version and repetition."""
    out = {}
    for label in versions:
        scr = fixed.get(label, None if label == "original" else screening)
        if scr is None or not scr.frozen:
            continue
        per_rep = {}
        for rec in records:
            if rec.version == label and rec.rep not in per_rep:
                per_rep[rec.rep] = {f"x{i + 1}": float(rec.final[i]) for i in scr.frozen}
        out[label] = {f"rep{r}": v for r, v in per_rep.items()}
    return out


def cmd_study(cfg):
    problem = _problem(cfg)
    out = Path(cfg.out)
    meta = {}
    screening = table = None
    if any(v in ("greedy", "random") for v in cfg.versions):
        table = _sensitivity(cfg)
        table.to_csv(out / "indices.csv")
        screening = classify(table, cfg.alpha_sel, cfg.factor)
        meta["sensitivity"] = table.metadata()
        meta["screening"] = screening.as_dict()
        print(f"screening at alpha={cfg.alpha_sel}: frozen "
              f"{[f'x{i + 1}' for i in screening.frozen] or 'none'}, tau={screening.tau:.4g}")
    fixed = {}
    for text in cfg.freeze:
        vals = parse_freeze(text, problem.dim)
        fixed[text.replace(" ", "")] = Screening.fixed(problem.dim, vals)
    versions = tuple(cfg.versions) + tuple(fixed)
    if not versions:
        raise ArgumentError("no study version requested")
    workers = cfg.workers or os.cpu_count() or 1
    records = run_study(problem, versions, n_starts=cfg.starts, n_reps=cfg.study_reps,
                        budget=cfg.budget, seed=Seed(cfg.seed, STREAM_STUDY),
                        screening=screening,
                        greedy_design=None if table is None else table.best_rows,
                        fixed=fixed, workers=workers,
                        rho_begin=cfg.rho_begin, rho_end=cfg.rho_end)
    summary = summarize(records, cfg.budget)
    meta["frozen_values"] = _frozen_values(records, versions, screening, fixed)
    write_records_csv(out / "study_records.csv", records)
    write_json(out / "study_summary.json",
               _meta(cfg, versions=summary, **meta))
    for label, s in summary.items():
        print(f"{label:>12}: best f={s['best_f']}, modal f={s['modal_f_final']}, "
              f"mean calls={s['mean_n_calls']:.1f}, modal calls={s['modal_n_calls']}, "
              f"feasible={s['feasible_fraction']:.3f}")
    print(f"wrote {out / 'study_records.csv'} and {out / 'study_summary.json'}")


COMMANDS = {"sample": cmd_sample, "sensitivity": cmd_sensitivity, "sobol": cmd_sobol,
            "study": cmd_study}


def _show_warning(message, category, *args, **kwargs):
    print(f"hsicopt: warning: {message}", file=sys.stderr)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        with warnings.catch_warnings():
            warnings.simplefilter("always", DegenerateOutputWarning)
            warnings.showwarning = _show_warning
            COMMANDS[args.command](cfg)
    except ArgumentError as exc:
        print(f"hsicopt: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateError as exc:
        print(f"hsicopt: degenerate data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (EvaluationError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"hsicopt: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
