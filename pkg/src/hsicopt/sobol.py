"""First-order and total Sobol indices.

Pick-freeze: with independent uniform designs ``A`` and ``B`` and
``AB_i`` = ``B`` with column ``i`` copied from ``A``,

    first_i = mean(fA * (f(AB_i) - fB)) / V
    total_i = mean((fB - f(AB_i))**2) / (2 V)

on outputs centered by their pooled mean.  Cost is ``N (d + 2)`` calls.

The given-data estimator bins each input into equal-count bins and takes
the variance of the bin means of ``y``; it works on any sample, including
the filtered rows of a conditional subset.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DegenerateSetError, DegenerateVarianceError, EvaluationError
from .io import write_csv
from .problem import BoxDomain, ProblemSpec, evaluate, feasible_mask
from .sampling import Seed, empirical_quantile, uniform_sample
from .thresholding import ThresholdSpec, conditional_subset

MIN_SAMPLES = 100
DEFAULT_BINS = 20


@dataclass(frozen=True)
class SobolTable:
    first: np.ndarray
    total: np.ndarray
    n_samples: int
    estimator: str

    def rows(self):
        total = self.total if self.total is not None else np.full(len(self.first), math.nan)
        return [(f"x{i + 1}", float(self.first[i]), float(total[i]))
                for i in range(len(self.first))]

    def to_csv(self, path):
        return write_csv(path, ["input", "first", "total", "estimator", "N"],
                         [[name, s, st, self.estimator, self.n_samples]
                          for name, s, st in self.rows()])


SWEEP_HEADER = ["input", "alpha", "thresholding", "first", "total", "estimator", "N"]


def write_sweep_csv(path, entries):
    """``entries`` is a sequence of ``(alpha, thresholding, SobolTable)``."""
    rows = []
    for alpha, mode, table in entries:
        for name, s, st in table.rows():
            rows.append([name, float(alpha), mode, s, st, table.estimator, table.n_samples])
    return write_csv(path, SWEEP_HEADER, rows)


def pick_freeze_indices(fn, domain: BoxDomain, N: int, seed: Seed) -> SobolTable:
    if N < MIN_SAMPLES:
        raise ArgumentError(f"pick-freeze needs N >= {MIN_SAMPLES}, got {N}")
    A = uniform_sample(domain, N, seed.spawn(0))
    B = uniform_sample(domain, N, seed.spawn(1))
    d = domain.dim
    blocks = [A, B]
    for i in range(d):
        AB = B.copy()
        AB[:, i] = A[:, i]
        blocks.append(AB)
    out = np.asarray(fn(np.vstack(blocks)), dtype=float).reshape(d + 2, N)
    if not np.all(np.isfinite(out)):
        raise EvaluationError("objective returned non-finite values")
    out = out - out[:2].mean()
    fA, fB, fAB = out[0], out[1], out[2:]
    V = np.concatenate([fA, fB]).var()
    if not V > 0:
        raise DegenerateVarianceError("output variance is zero; Sobol indices undefined")
    first = np.mean(fA * (fAB - fB), axis=1) / V
    total = np.mean((fB - fAB) ** 2, axis=1) / (2.0 * V)
    return SobolTable(first=first, total=total, n_samples=N, estimator="pick-freeze")


class ZeroThresholded:
    """``f`` inside the frozen sublevel set, ``fill`` outside; picklable."""

    def __init__(self, problem: ProblemSpec, q: float, T, fill: float):
        self.problem, self.q, self.T, self.fill = problem, q, T, fill

    def __call__(self, X):
        data = evaluate(self.problem, X)
        inside = feasible_mask(data, self.T) & (data.f <= self.q)
        return np.where(inside, data.f, self.fill)


def calibrate_q(problem: ProblemSpec, spec: ThresholdSpec, N: int, seed: Seed) -> float:
    """Alpha-quantile of ``f`` over the T-feasible rows of an N-point design.

    ``alpha = 1`` keeps the whole feasible set, so ``q`` is unbounded.
    """
    T = spec.relaxation(problem.n_constraints)
    data = evaluate(problem, uniform_sample(problem.domain, N, seed))
    feas = feasible_mask(data, T)
    if not feas.any():
        raise DegenerateSetError("no calibration point satisfies the constraints under T")
    if spec.alpha >= 1.0:
        return math.inf
    return empirical_quantile(data.f[feas], spec.alpha)


def pick_freeze_thresholded(problem: ProblemSpec, spec: ThresholdSpec, N: int,
                            seed: Seed) -> SobolTable:
    """Pick-freeze indices of the zero-thresholded output."""
    q = calibrate_q(problem, spec, N, seed.spawn(0))
    fn = ZeroThresholded(problem, q, spec.relaxation(problem.n_constraints), spec.zero_fill)
    return pick_freeze_indices(fn, problem.domain, N, seed.spawn(1))


def given_data_first_order(X, y, n_bins: int = DEFAULT_BINS) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).reshape(-1)
    n, d = X.shape
    if y.size != n:
        raise ArgumentError(f"y has {y.size} entries, X has {n} rows")
    if n_bins < 2 or n < 10 * n_bins:
        raise ArgumentError(f"need n >= 10 * n_bins, got n={n}, n_bins={n_bins}")
    V = y.var()
    if not V > 0:
        raise DegenerateVarianceError("output variance is zero; Sobol indices undefined")
    out = np.empty(d)
    for i in range(d):
        order = np.argsort(X[:, i], kind="stable")
        bins = np.array_split(y[order], n_bins)
        counts = np.array([b.size for b in bins])
        means = np.array([b.mean() for b in bins])
        out[i] = np.sum(counts * (means - y.mean()) ** 2) / n / V
    return out


def conditional_first_order(problem: ProblemSpec, spec: ThresholdSpec, N: int, seed: Seed,
                            n_bins: int = DEFAULT_BINS) -> SobolTable:
    """Given-data first-order indices of ``f`` restricted to the sublevel set."""
    data = evaluate(problem, uniform_sample(problem.domain, N, seed))
    Xd, fd = conditional_subset(data, spec)
    first = given_data_first_order(Xd, fd, n_bins)
    return SobolTable(first=first, total=None, n_samples=len(fd), estimator="given-data")
