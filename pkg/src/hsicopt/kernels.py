"""Kernels, Gram matrices, double centering and the median heuristic."""
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .errors import ArgumentError, DegenerateScaleError, ShapeError
from .sampling import Seed

MEDIAN_MAX_POINTS = 2000


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "rbf"
    sigma: float = 1.0
    degree: int = 2

    def __post_init__(self):
        if self.kind not in ("rbf", "linear", "polynomial"):
            raise ArgumentError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "rbf" and not self.sigma > 0:
            raise ArgumentError(f"RBF bandwidth must be positive, got {self.sigma!r}")
        if self.kind == "polynomial" and self.degree < 1:
            raise ArgumentError("polynomial degree must be >= 1")

    @classmethod
    def rbf(cls, sigma):
        return cls("rbf", sigma=float(sigma))

    @classmethod
    def linear(cls):
        return cls("linear")

    @classmethod
    def polynomial(cls, degree):
        return cls("polynomial", degree=int(degree))


def _as_samples(a):
    a = np.asarray(a, dtype=float)
    return a.reshape(-1, 1) if a.ndim <= 1 else a


def gram(kernel: KernelSpec, a, b=None) -> np.ndarray:
    """Matrix of ``k(a_i, b_j)``; ``b`` defaults to ``a``."""
    A = _as_samples(a)
    B = A if b is None else _as_samples(b)
    if A.shape[1] != B.shape[1]:
        raise ShapeError(f"sample dimensions differ: {A.shape[1]} vs {B.shape[1]}")
    if kernel.kind == "rbf":
        return np.exp(-cdist(A, B, "sqeuclidean") / (2.0 * kernel.sigma ** 2))
    inner = A @ B.T
    if kernel.kind == "linear":
        return inner
    return (1.0 + inner) ** kernel.degree


def median_bandwidth(samples, max_points: int = MEDIAN_MAX_POINTS,
                     seed: Seed = Seed(0)) -> float:
    """Median Euclidean distance over distinct pairs of samples.

    Above ``max_points`` samples a seeded subsample without replacement is
    used.  The median is the lower middle order statistic, and zero
    distances between repeated values stay in the multiset.
    """
    X = _as_samples(samples)
    if X.shape[0] > max_points:
        rows = seed.rng().choice(X.shape[0], size=max_points, replace=False)
        X = X[rows]
    if X.shape[0] < 2 or np.all(X == X[0]):
        raise DegenerateScaleError("median heuristic needs two distinct samples")
    dist = pdist(X)
    k = (dist.size - 1) // 2
    med = float(np.partition(dist, k)[k])
    if med == 0.0:
        # more than half of the pairs are ties; fall back to the nonzero ones
        pos = dist[dist > 0]
        med = float(np.partition(pos, (pos.size - 1) // 2)[(pos.size - 1) // 2])
    return med


def center(G) -> np.ndarray:
    """Return ``H G H`` with ``H = I - 11^T / n``."""
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise ShapeError(f"center needs a square matrix, got shape {G.shape}")
    row = G.mean(axis=1, keepdims=True)
    col = G.mean(axis=0, keepdims=True)
    return G - row - col + G.mean()
