"""Sublevel sets of an evaluated design and the three output transforms.

The set ``D = {g(x) <= T and f(x) <= q}`` uses ``q`` = the alpha-quantile
of ``f`` over the T-feasible rows.  From it derive

* zero-thresholding: ``f`` inside ``D``, a constant ``C`` outside,
* conditional-thresholding: the rows inside ``D`` only,
* indicator-thresholding: the 0/1 membership vector.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DegenerateSetError
from .problem import EvaluatedDesign, feasible_mask
from .sampling import empirical_quantile


@dataclass(frozen=True)
class ThresholdSpec:
    alpha: float
    T: np.ndarray = None
    zero_fill: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ArgumentError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if self.T is not None:
            T = np.atleast_1d(np.asarray(self.T, dtype=float))
            if np.any(T < 0):
                raise ArgumentError("T must be nonnegative")
            object.__setattr__(self, "T", T)

    def relaxation(self, m):
        return np.zeros(m) if self.T is None else self.T


@dataclass(frozen=True)
class SublevelResult:
    z: np.ndarray
    q_value: float
    n_feasible: int
    n_in_D: int


def auto_relax(design: EvaluatedDesign, min_feasible: int) -> np.ndarray:
    """Smallest common relaxation ``t`` admitting ``min_feasible`` rows."""
    N, m = len(design), design.n_constraints
    if min_feasible > N:
        raise ArgumentError(f"min_feasible={min_feasible} exceeds N={N}")
    if m == 0 or min_feasible <= 0:
        return np.zeros(m)
    worst = np.maximum(design.G.max(axis=1), 0.0)
    t = float(np.partition(worst, min_feasible - 1)[min_feasible - 1])
    return np.full(m, t)


def sublevel_indicator(design: EvaluatedDesign, spec: ThresholdSpec) -> SublevelResult:
    feas = feasible_mask(design, spec.relaxation(design.n_constraints))
    n_feas = int(feas.sum())
    if n_feas == 0:
        raise DegenerateSetError(
            "no point satisfies the constraints under T; raise T (e.g. auto_relax)")
    q = empirical_quantile(design.f[feas], spec.alpha)
    z = feas & (design.f <= q)
    return SublevelResult(z=z, q_value=q, n_feasible=n_feas, n_in_D=int(z.sum()))


def zero_threshold(design: EvaluatedDesign, spec: ThresholdSpec) -> np.ndarray:
    z = sublevel_indicator(design, spec).z
    return np.where(z, design.f, spec.zero_fill)


def conditional_subset(design: EvaluatedDesign, spec: ThresholdSpec):
    z = sublevel_indicator(design, spec).z
    if not z.any():
        raise DegenerateSetError("empty sublevel set")
    return design.X[z], design.f[z]
