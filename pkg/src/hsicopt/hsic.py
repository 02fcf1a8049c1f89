"""Kernel dependence measures and the indicator-thresholded HSIC index.

``hsic_it`` scores input ``X_i`` by HSIC between ``X_i`` (Gaussian kernel,
median-heuristic bandwidth) and the 0/1 membership ``z`` of the sublevel
set (linear kernel).  Because ``z`` only depends on ranks of ``f``, the
index is unchanged by any strictly increasing transform of the objective.
"""
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, DegenerateError, DegenerateOutputWarning, ShapeError
from .io import write_csv
from .kernels import KernelSpec, center, gram, median_bandwidth
from .problem import EvaluatedDesign, ProblemSpec, evaluate, feasible_mask
from .sampling import Seed, uniform_sample
from .thresholding import ThresholdSpec, auto_relax, sublevel_indicator

DEFAULT_ALPHAS = (0.10, 0.40, 0.70, 1.00)
DEFAULT_MIN_FEASIBLE = 100
DEFAULT_GRAM_POINTS = 2000


def hsic_biased(K, L) -> float:
    """V-statistic ``tr(K H L H) / n^2``."""
    K = np.asarray(K, dtype=float)
    L = np.asarray(L, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape != L.shape:
        raise ShapeError(f"need two square Grams of equal size, got {K.shape} and {L.shape}")
    n = K.shape[0]
    return float(np.sum(center(K) * L.T) / n ** 2)


def mmd2_biased(p_samples, q_samples, kernel: KernelSpec) -> float:
    """Squared MMD V-statistic (diagonal terms included)."""
    P = np.asarray(p_samples, dtype=float)
    Q = np.asarray(q_samples, dtype=float)
    if P.shape[0] == 0 or Q.shape[0] == 0:
        raise ArgumentError("mmd2_biased needs two nonempty sample sets")
    return float(gram(kernel, P).mean() + gram(kernel, Q).mean()
                 - 2.0 * gram(kernel, P, Q).mean())


def _rbf_kernels(X):
    return [KernelSpec.rbf(median_bandwidth(X[:, i])) for i in range(X.shape[1])]


def hsic_it(X, z, kernel_x=None) -> np.ndarray:
    """HSIC between each column of ``X`` and the indicator ``z``.

    ``kernel_x`` holds one :class:`KernelSpec` per column; by default an
    RBF kernel whose bandwidth is the column's median pairwise distance.
    A constant ``z`` carries no information: a
    :class:`DegenerateOutputWarning` is emitted and zeros are returned.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    z = np.asarray(z, dtype=float).reshape(-1)
    n, d = X.shape
    if z.size != n:
        raise ShapeError(f"z has {z.size} entries, X has {n} rows")
    if np.all(z == z[0]):
        warnings.warn("indicator output is constant; HSIC-IT set to zero",
                      DegenerateOutputWarning, stacklevel=2)
        return np.zeros(d)
    if kernel_x is None:
        kernel_x = _rbf_kernels(X)
    L = gram(KernelSpec.linear(), z)
    return np.array([hsic_biased(gram(kernel_x[i], X[:, i]), L) for i in range(d)])


def normalize(raw, mode="sum", aux=None) -> np.ndarray:
    """Scale raw indices.

    ``mode="sum"`` divides by the total over inputs.  ``mode="cross"``
    divides index ``i`` by ``sqrt(HSIC(X_i, X_i) * HSIC(Z, Z))``; ``aux``
    must then be ``(hsic_xx, hsic_zz)``.
    """
    raw = np.asarray(raw, dtype=float)
    if np.any(raw < -1e-12):
        raise ArgumentError("raw HSIC values must be nonnegative")
    if mode == "sum":
        total = raw.sum()
        if not total > 0:
            raise DegenerateError("all raw indices are zero; sum normalization undefined")
        return raw / total
    if mode == "cross":
        if aux is None:
            raise ArgumentError("cross normalization needs (hsic_xx, hsic_zz)")
        hsic_xx, hsic_zz = aux
        return raw / np.sqrt(np.asarray(hsic_xx, dtype=float) * float(hsic_zz))
    raise ArgumentError(f"unknown normalization {mode!r}")


@dataclass
class IndexTable:
    """Normalized HSIC-IT indices over repetitions.

    ``mean`` and ``std`` have shape ``(n_alphas, d)``.  The per-repetition
    arrays keep everything needed to replay or audit a run.
    """

    alphas: tuple
    mean: np.ndarray
    std: np.ndarray
    reps: int
    N: int
    M: int
    normalization: str
    mode: str
    normalized: np.ndarray
    raw: np.ndarray
    T: np.ndarray
    q_values: np.ndarray
    n_feasible: np.ndarray
    n_in_D: np.ndarray
    degenerate: list = field(default_factory=list)
    best_rows: EvaluatedDesign = None

    @property
    def dim(self):
        return self.mean.shape[1]

    def alpha_index(self, alpha):
        for k, a in enumerate(self.alphas):
            if abs(a - alpha) < 1e-12:
                return k
        raise ArgumentError(f"alpha={alpha} not in table alphas {list(self.alphas)}")

    def mean_at(self, alpha):
        return self.mean[self.alpha_index(alpha)]

    def to_csv(self, path):
        rows = []
        for i in range(self.dim):
            for k, a in enumerate(self.alphas):
                rows.append([f"x{i + 1}", float(a), self.mean[k, i], self.std[k, i],
                             self.reps, self.N, self.M, self.normalization])
        return write_csv(path, ["input", "alpha", "mean", "std", "reps", "N", "M",
                                "normalization"], rows)

    def metadata(self):
        return {
            "alphas": list(self.alphas),
            "reps": self.reps, "N": self.N, "M": self.M,
            "normalization": self.normalization, "mode": self.mode,
            "T": self.T, "q_values": self.q_values,
            "n_feasible": self.n_feasible, "n_in_D": self.n_in_D,
            "degenerate": [{"rep": r, "alpha": a} for r, a in self.degenerate],
        }


def _best_feasible_row(design):
    feas = feasible_mask(design)
    if not feas.any():
        return None
    rows = np.flatnonzero(feas)
    return int(rows[np.argmin(design.f[rows])])


def replicate_indices(problem: ProblemSpec = None, alphas=DEFAULT_ALPHAS, N: int = 50000,
                      M: int = DEFAULT_GRAM_POINTS, reps: int = 20, seed: Seed = Seed(),
                      min_feasible: int = DEFAULT_MIN_FEASIBLE, design: EvaluatedDesign = None,
                      normalization: str = "sum") -> IndexTable:
    """Repeat the HSIC-IT estimation and summarize mean and std per (alpha, input).

    With a ``problem`` each repetition draws a fresh uniform design of ``N``
    points; with a ``design`` (given-data mode) each repetition bootstraps
    its rows.  Per repetition: relax ``T`` until ``min_feasible`` rows are
    feasible, compute the indicator for every alpha on the full design,
    then estimate the indices on ``M`` rows drawn without replacement.
    """
    if reps < 2:
        raise ArgumentError("reps must be >= 2")
    if (problem is None) == (design is None):
        raise ArgumentError("pass exactly one of problem or design")
    if design is not None:
        N = len(design)
    if M > N or M < 2:
        raise ArgumentError(f"need 2 <= M <= N, got M={M}, N={N}")
    alphas = tuple(float(a) for a in alphas)
    for a in alphas:
        ThresholdSpec(a)
    mode = "fresh" if design is None else "bootstrap"

    d = problem.dim if design is None else design.dim
    A = len(alphas)
    raw = np.zeros((reps, A, d))
    normed = np.zeros((reps, A, d))
    q_values = np.zeros((reps, A))
    n_feas = np.zeros((reps, A), dtype=int)
    n_in = np.zeros((reps, A), dtype=int)
    Ts = []
    degenerate = []
    best = []

    for r in range(reps):
        rseed = seed.spawn(r)
        if design is None:
            X = uniform_sample(problem.domain, N, rseed.spawn(0))
            data = evaluate(problem, X)
        else:
            data = design.take(rseed.spawn(0).rng().integers(N, size=N))
        T = auto_relax(data, min(min_feasible, N))
        Ts.append(T)
        b = _best_feasible_row(data)
        if b is not None:
            best.append(data.take([b]))
        sub = np.sort(rseed.spawn(1).rng().choice(N, size=M, replace=False))
        Xs = data.X[sub]
        Kc = [center(gram(k, Xs[:, i])) for i, k in enumerate(_rbf_kernels(Xs))]
        hsic_xx = np.array([np.sum(K * K) / M ** 2 for K in Kc])

        for k, a in enumerate(alphas):
            res = sublevel_indicator(data, ThresholdSpec(a, T))
            q_values[r, k], n_feas[r, k], n_in[r, k] = res.q_value, res.n_feasible, res.n_in_D
            z = res.z[sub].astype(float)
            if np.all(z == z[0]):
                warnings.warn(f"alpha={a}, rep={r}: indicator constant on the subsample; "
                              "indices set to zero", DegenerateOutputWarning, stacklevel=2)
                degenerate.append((r, a))
                continue
            # z^T (H K H) z / M^2 equals tr(K H L H) / M^2 with L = z z^T
            raw[r, k] = [z @ K @ z / M ** 2 for K in Kc]
            if normalization == "sum":
                normed[r, k] = normalize(raw[r, k], "sum")
            else:
                zc = z - z.mean()
                hsic_zz = (zc @ zc) ** 2 / M ** 2
                normed[r, k] = normalize(raw[r, k], "cross", (hsic_xx, hsic_zz))

    best_rows = None
    if best:
        best_rows = EvaluatedDesign(np.vstack([b.X for b in best]),
                                    np.concatenate([b.f for b in best]),
                                    np.vstack([b.G for b in best]))
    return IndexTable(alphas=alphas, mean=normed.mean(axis=0), std=normed.std(axis=0, ddof=1),
                      reps=reps, N=N, M=M, normalization=normalization, mode=mode,
                      normalized=normed, raw=raw, T=np.array(Ts), q_values=q_values,
                      n_feasible=n_feas, n_in_D=n_in, degenerate=degenerate,
                      best_rows=best_rows)
