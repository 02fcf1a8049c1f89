"""Constrained minimization problems and batched evaluation.

A problem is ``min f(x)`` subject to ``g_l(x) <= 0`` over a box, with the
inputs uniformly distributed over that box for sensitivity purposes.
Objective and constraint callables are *batched*: they receive an
``(n, d)`` array and return an ``(n,)`` array.
"""
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ArgumentError, DomainError, EvaluationError, ShapeError
from .io import read_csv, write_csv

BatchFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class BoxDomain:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.ndim != 1 or lower.shape != upper.shape or lower.size < 1:
            raise ShapeError("lower and upper must be 1-D vectors of equal length >= 1")
        if not np.all(lower < upper):
            raise ArgumentError(f"empty box: lower={lower}, upper={upper}")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, X) -> np.ndarray:
        X = np.atleast_2d(X)
        return np.all((X >= self.lower) & (X <= self.upper), axis=1)

    def restrict(self, dims) -> "BoxDomain":
        dims = list(dims)
        return BoxDomain(self.lower[dims], self.upper[dims])


@dataclass(frozen=True)
class ProblemSpec:
    """Objective, constraints (feasible when <= 0) and box domain."""

    objective: BatchFn
    constraints: Sequence[BatchFn]
    domain: BoxDomain
    name: str = "problem"
    input_law: str = field(default="uniform", repr=False)

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    def evaluate_point(self, x):
        """Return ``(f, g)`` for a single point, without the domain check."""
        X = np.asarray(x, dtype=float).reshape(1, -1)
        f = float(self.objective(X)[0])
        g = np.array([float(c(X)[0]) for c in self.constraints])
        if not np.isfinite(f) or not np.all(np.isfinite(g)):
            raise EvaluationError(f"non-finite output at x={X[0].tolist()}")
        return f, g


@dataclass(frozen=True)
class EvaluatedDesign:
    X: np.ndarray
    f: np.ndarray
    G: np.ndarray

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        f = np.asarray(self.f, dtype=float).reshape(-1)
        G = np.asarray(self.G, dtype=float)
        if G.ndim == 1:
            G = G.reshape(-1, 1) if G.size else np.zeros((X.shape[0], 0))
        if not (X.shape[0] == f.size == G.shape[0]) or X.shape[0] < 1:
            raise ShapeError(
                f"row counts differ or empty: X {X.shape}, f {f.shape}, G {G.shape}")
        for arr in (X, f, G):
            arr.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "G", G)

    def __len__(self):
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    @property
    def n_constraints(self) -> int:
        return self.G.shape[1]

    def take(self, rows) -> "EvaluatedDesign":
        return EvaluatedDesign(self.X[rows], self.f[rows], self.G[rows])


def evaluate(problem: ProblemSpec, X) -> EvaluatedDesign:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != problem.dim:
        raise ShapeError(f"X has {X.shape[1]} columns, problem has d={problem.dim}")
    dom = problem.domain
    outside = (X < dom.lower) | (X > dom.upper)
    if outside.any():
        row, dim = np.argwhere(outside)[0]
        raise DomainError(
            f"row {row} outside the box in dimension {dim + 1}: "
            f"{X[row, dim]!r} not in [{dom.lower[dim]!r}, {dom.upper[dim]!r}]")
    f = np.asarray(problem.objective(X), dtype=float).reshape(-1)
    if problem.constraints:
        G = np.column_stack([np.asarray(c(X), dtype=float).reshape(-1)
                             for c in problem.constraints])
    else:
        G = np.zeros((X.shape[0], 0))
    bad = ~np.isfinite(f) | ~np.all(np.isfinite(G), axis=1)
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        raise EvaluationError(f"non-finite output at row {row}: x={X[row].tolist()}")
    return EvaluatedDesign(X, f, G)


def feasible_mask(design: EvaluatedDesign, T=None) -> np.ndarray:
    """Rows whose constraints all satisfy ``G[i, l] <= T[l]``."""
    m = design.n_constraints
    T = np.zeros(m) if T is None else np.atleast_1d(np.asarray(T, dtype=float))
    if T.shape != (m,):
        raise ShapeError(f"T has length {T.size}, design has m={m} constraints")
    if np.any(T < 0):
        raise ArgumentError("relaxation T must be nonnegative")
    if m == 0:
        return np.ones(len(design), dtype=bool)
    return np.all(design.G <= T, axis=1)


def design_header(d, m):
    return [f"x{i + 1}" for i in range(d)] + ["f"] + [f"g{l + 1}" for l in range(m)]


def write_design_csv(path, design: EvaluatedDesign, extra=None):
    """Write ``x1..xd, f, g1..gm`` (plus optional named extra columns)."""
    extra = extra or {}
    header = design_header(design.dim, design.n_constraints) + list(extra)
    table = np.hstack([design.X, design.f[:, None], design.G])
    extra_cols = [np.asarray(v).reshape(-1) for v in extra.values()]
    rows = ([float(v) for v in table[i]] + [col[i] for col in extra_cols]
            for i in range(len(design)))
    return write_csv(path, header, rows)


def write_inputs_csv(path, X):
    X = np.atleast_2d(X)
    return write_csv(path, [f"x{i + 1}" for i in range(X.shape[1])],
                     (list(map(float, r)) for r in X))


def read_design_csv(path) -> EvaluatedDesign:
    header, rows = read_csv(path)
    if "f" not in header:
        raise ShapeError(f"{path}: design CSV needs an 'f' column")
    data = np.array([[float(v) for v in r] for r in rows], dtype=float)
    if data.size == 0:
        raise ShapeError(f"{path}: no data rows")
    xcols = [j for j, h in enumerate(header) if h.startswith("x")]
    gcols = [j for j, h in enumerate(header) if h.startswith("g")]
    fcol = header.index("f")
    return EvaluatedDesign(data[:, xcols], data[:, fcol], data[:, gcols])
