"""Screening of negligible inputs, freezing strategies and problem reduction."""
from dataclasses import dataclass, replace

import numpy as np

from ..errors import ArgumentError, InfeasibleError
from ..problem import BoxDomain, EvaluatedDesign, ProblemSpec, feasible_mask
from ..sampling import Seed

DEFAULT_FACTOR = 0.1
DEFAULT_ALPHA_SEL = 0.1


@dataclass(frozen=True)
class Screening:
    """Partition of the inputs into active and frozen indices (0-based).

    ``values`` holds one value per frozen index once a freezing strategy
    has been applied.
    """

    dim: int
    active: tuple
    frozen: tuple
    tau: float = 0.0
    alpha_sel: float = None
    values: tuple = None
    indices: tuple = None

    def __post_init__(self):
        if sorted(self.active + self.frozen) != list(range(self.dim)):
            raise ArgumentError("active and frozen indices must partition the inputs")
        if self.values is not None and len(self.values) != len(self.frozen):
            raise ArgumentError("need exactly one value per frozen input")

    @classmethod
    def fixed(cls, dim, values: dict):
        """Freeze the given ``{index: value}`` pairs, everything else active."""
        frozen = tuple(sorted(values))
        active = tuple(i for i in range(dim) if i not in values)
        return cls(dim, active, frozen, values=tuple(float(values[i]) for i in frozen))

    def with_values(self, values):
        return replace(self, values=tuple(float(v) for v in values))

    def expand(self, Y):
        """Merge reduced coordinates ``Y`` with the frozen values."""
        if self.values is None:
            raise ArgumentError("frozen values are not set")
        Y = np.asarray(Y, dtype=float)
        single = Y.ndim == 1
        Y = np.atleast_2d(Y)
        X = np.empty((Y.shape[0], self.dim))
        X[:, list(self.active)] = Y
        if self.frozen:
            X[:, list(self.frozen)] = self.values
        return X[0] if single else X

    def as_dict(self):
        return {
            "active": [i + 1 for i in self.active],
            "frozen": {f"x{i + 1}": (None if self.values is None else self.values[k])
                       for k, i in enumerate(self.frozen)},
            "tau": self.tau,
            "alpha_sel": self.alpha_sel,
            "indices": None if self.indices is None else list(self.indices),
        }


def classify_indices(values, factor: float = DEFAULT_FACTOR, alpha_sel=None) -> Screening:
    """Freeze inputs whose index is below ``factor * max``."""
    if not (0.0 < factor < 1.0):
        raise ArgumentError(f"factor must lie in (0, 1), got {factor}")
    values = np.asarray(values, dtype=float)
    top = int(np.argmax(values))
    tau = factor * float(values[top])
    frozen = tuple(i for i in range(values.size) if values[i] < tau and i != top)
    active = tuple(i for i in range(values.size) if i not in frozen)
    return Screening(values.size, active, frozen, tau=tau, alpha_sel=alpha_sel,
                     indices=tuple(float(v) for v in values))


def classify(table, alpha_sel: float = DEFAULT_ALPHA_SEL,
             factor: float = DEFAULT_FACTOR) -> Screening:
    return classify_indices(table.mean_at(alpha_sel), factor, alpha_sel)


def freeze_values(strategy: str, screening: Screening, domain: BoxDomain,
                  design: EvaluatedDesign = None, seed: Seed = Seed()) -> Screening:
    """Set the frozen values.

    ``random`` draws each frozen coordinate uniformly in its interval;
    ``greedy`` copies them from the best T=0-feasible design row, ties
    going to the lowest row index.
    """
    idx = list(screening.frozen)
    if strategy == "random":
        u = seed.rng().random(len(idx))
        return screening.with_values(domain.lower[idx] + u * domain.width[idx])
    if strategy == "greedy":
        feas = None if design is None else feasible_mask(design)
        if feas is None or not feas.any():
            raise InfeasibleError("greedy freezing needs a feasible design point; "
                                  "rerun the sensitivity step with a larger N")
        rows = np.flatnonzero(feas)
        best = rows[np.argmin(design.f[rows])]
        return screening.with_values(design.X[best, idx])
    raise ArgumentError(f"unknown freezing strategy {strategy!r}")


class _Injected:
    """Evaluate a full-space callable on reduced rows; picklable."""

    def __init__(self, fn, screening: Screening):
        self.fn, self.screening = fn, screening

    def __call__(self, Y):
        return self.fn(self.screening.expand(Y))


def reduce(problem: ProblemSpec, screening: Screening) -> ProblemSpec:
    if screening.values is None:
        raise ArgumentError("set frozen values before reducing")
    if screening.dim != problem.dim:
        raise ArgumentError("screening dimension does not match the problem")
    if not screening.active:
        raise ArgumentError("no active input left to optimize")
    if not screening.frozen:
        return problem
    return ProblemSpec(_Injected(problem.objective, screening),
                       tuple(_Injected(g, screening) for g in problem.constraints),
                       problem.domain.restrict(screening.active),
                       name=f"{problem.name}-reduced", input_law=problem.input_law)
