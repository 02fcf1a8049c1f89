"""Random and space-filling designs, empirical quantiles, seeding.

Every stochastic routine takes a :class:`Seed`.  A seed maps to a numpy
``PCG64`` generator through ``SeedSequence(master, spawn_key=(stream, *path))``,
so a ``(master, stream)`` pair, optionally extended by a ``path`` of task
indices, names one reproducible sequence and nothing is drawn from global
state.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import ArgumentError
from .problem import BoxDomain

RNG_NAME = "numpy.PCG64 via SeedSequence(master, spawn_key=(stream, *path))"


@dataclass(frozen=True)
class Seed:
    master: int = 0
    stream: int = 0
    path: tuple = ()

    def __post_init__(self):
        if not (0 <= self.master < 2**64):
            raise ArgumentError("master seed must be a 64-bit unsigned integer")
        if not (0 <= self.stream < 2**32):
            raise ArgumentError("stream must be a 32-bit unsigned integer")
        object.__setattr__(self, "path", tuple(int(p) for p in self.path))

    def spawn(self, *keys) -> "Seed":
        """Child seed for an independent sub-task (repetition, start, ...)."""
        return Seed(self.master, self.stream, self.path + tuple(keys))

    def rng(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master, spawn_key=(self.stream,) + self.path)
        return np.random.Generator(np.random.PCG64(seq))

    def as_dict(self):
        return {"master": self.master, "stream": self.stream, "path": list(self.path),
                "generator": RNG_NAME}


def uniform_sample(domain: BoxDomain, N: int, seed: Seed) -> np.ndarray:
    if N < 1:
        raise ArgumentError("N must be >= 1")
    rng = seed.rng()
    U = rng.random((N, domain.dim))
    return domain.lower + U * domain.width


def lhs_maximin(domain: BoxDomain, N: int, seed: Seed, opt_iters: int = 1000) -> np.ndarray:
    """Latin hypercube improved by maximin coordinate swaps.

    Each iteration swaps one column's values between a point of the current
    closest pair and a random other point; the swap is kept only if the
    minimum pairwise distance (in unit-cube coordinates) strictly grows.
    Swaps within a column keep every marginal a Latin hypercube.
    """
    if N < 2:
        raise ArgumentError("lhs_maximin needs N >= 2")
    rng = seed.rng()
    d = domain.dim
    strata = np.column_stack([rng.permutation(N) for _ in range(d)])
    U = (strata + rng.random((N, d))) / N
    if opt_iters > 0:
        D = squareform(pdist(U))
        np.fill_diagonal(D, np.inf)
        best = D.min()
        for _ in range(opt_iters):
            i, j = np.unravel_index(np.argmin(D), D.shape)
            a = i if rng.random() < 0.5 else j
            b = int(rng.integers(N - 1))
            b += b >= a
            col = int(rng.integers(d))
            U[[a, b], col] = U[[b, a], col]
            rows_a = np.sqrt(((U - U[a]) ** 2).sum(axis=1))
            rows_b = np.sqrt(((U - U[b]) ** 2).sum(axis=1))
            rows_a[a] = np.inf
            rows_b[b] = np.inf
            old_a, old_b = D[a].copy(), D[b].copy()
            D[a], D[:, a] = rows_a, rows_a
            D[b], D[:, b] = rows_b, rows_b
            new = D.min()
            if new > best:
                best = new
            else:
                U[[a, b], col] = U[[b, a], col]
                D[a], D[:, a] = old_a, old_a
                D[b], D[:, b] = old_b, old_b
    return domain.lower + U * domain.width


def empirical_quantile(values, alpha: float) -> float:
    """The ceil(alpha*n)-th order statistic (no interpolation)."""
    values = np.asarray(values, dtype=float).reshape(-1)
    n = values.size
    if n < 1:
        raise ArgumentError("empirical_quantile of an empty vector")
    if not (0.0 < alpha <= 1.0):
        raise ArgumentError(f"alpha must lie in (0, 1], got {alpha!r}")
    # alpha*n can land a few ulps above an integer (0.7*10 = 7.000000000000001)
    k = min(n, max(1, math.ceil(alpha * n - 1e-9)))
    return float(np.partition(values, k - 1)[k - 1])
