"""Closed-form test problems: Dixon-Price, linear, level, twisted strip, GTCD, WB4.

All functions are batched over rows of an ``(n, d)`` array and written
with module-level callables so problems pickle for worker processes.
"""
from dataclasses import dataclass
from functools import partial

import numpy as np

from .errors import ArgumentError
from .problem import BoxDomain, ProblemSpec


@dataclass(frozen=True)
class BenchmarkInfo:
    d: int
    m: int
    best_f: float
    best_x: tuple
    feasible_pct: float = 100.0
    note: str = ""


# ---------------------------------------------------------------- 2-D toys

def dixon_price_f(X):
    x1, x2 = X[:, 0], X[:, 1]
    return (x1 - 1.0) ** 2 + 2.0 * (2.0 * x2 ** 2 - x1) ** 2


def linear2d_f(X):
    return X[:, 0] + 2.0 * X[:, 1]


def level_f(X, q=2.3):
    x1, x2 = X[:, 0], X[:, 1]
    return np.where(np.abs(x1) > q, np.abs(x1), np.abs(x2 - 2.0) - 6.0)


def twisted_strip_f(X, c=(0.1, 0.1), A=0.2, eps=0.1):
    x1 = X[:, 0] - c[0]
    x2 = X[:, 1] - c[1]
    bend = np.where(np.abs(x1) >= A, (np.abs(x1) - A) ** 2, 0.0)
    return 10.0 - bend - eps * x2 * x1


def dixon_price() -> ProblemSpec:
    return ProblemSpec(dixon_price_f, (), BoxDomain([-10.0, -10.0], [10.0, 10.0]),
                       name="dixon-price")


def linear2d() -> ProblemSpec:
    return ProblemSpec(linear2d_f, (), BoxDomain([-10.0, -10.0], [10.0, 10.0]),
                       name="linear2d")


def level_fn(q: float = 2.3) -> ProblemSpec:
    return ProblemSpec(partial(level_f, q=q), (), BoxDomain([-5.0, -5.0], [5.0, 5.0]),
                       name="level")


def twisted_strip(c=(0.1, 0.1), A: float = 0.2, eps: float = 0.1,
                  lower=(-1.0, -1.0), upper=(1.0, 1.0)) -> ProblemSpec:
    fn = partial(twisted_strip_f, c=tuple(float(v) for v in c), A=A, eps=eps)
    return ProblemSpec(fn, (), BoxDomain(lower, upper), name="twisted-strip")


# ------------------------------------------------- gas transmission compressor

def gtcd_f(X):
    x1, x2, x3, x4 = X.T
    return (8.61e5 * x1 ** 0.5 * x2 * x3 ** (-2.0 / 3.0) * x4 ** -0.5
            + 7.72e8 / x1 * x2 ** 0.219
            - 765.43e6 / x1
            + 3.69e4 * x3)


def gtcd_g1(X):
    x2, x4 = X[:, 1], X[:, 3]
    return x4 * x2 ** -2.0 + x2 ** -2.0 - 1.0


def gtcd() -> ProblemSpec:
    return ProblemSpec(gtcd_f, (gtcd_g1,),
                       BoxDomain([20.0, 1.0, 20.0, 0.1], [50.0, 10.0, 50.0, 60.0]),
                       name="gtcd")


# --------------------------------------------------------------- welded beam

def wb4_f(X):
    x1, x2, x3, x4 = X.T
    return 1.10471 * x1 ** 2 * x2 + 0.04811 * x3 * x4 * (14.0 + x2)


def _wb4_radius(X):
    x1, x2, x3 = X[:, 0], X[:, 1], X[:, 2]
    return np.sqrt(0.25 * (x2 ** 2 + (x1 + x3) ** 2))


def wb4_tau1(X):
    return 6000.0 / (np.sqrt(2.0) * X[:, 0] * X[:, 1])


def wb4_tau2(X):
    x1, x2, x3 = X[:, 0], X[:, 1], X[:, 2]
    num = 6000.0 * (14.0 + 0.5 * x2) * _wb4_radius(X)
    den = 2.0 * (np.sqrt(2.0) * x1 * x2 * (x2 ** 2 / 12.0 + 0.25 * (x1 + x3) ** 2))
    return num / den


def wb4_tau(X):
    t1, t2 = wb4_tau1(X), wb4_tau2(X)
    return np.sqrt(t1 ** 2 + t2 ** 2 + X[:, 1] * t1 * t2 / _wb4_radius(X))


def wb4_sigma(X):
    return 504000.0 / (X[:, 2] ** 2 * X[:, 3])


def wb4_pc(X):
    x3, x4 = X[:, 2], X[:, 3]
    return 102372.4 * (1.0 - 0.0282346 * x3) * x3 * x4 ** 3


def wb4_delta(X):
    return 2.1952 / (X[:, 2] ** 3 * X[:, 3])


def wb4_g1(X):
    return wb4_tau(X) - 13600.0


def wb4_g2(X):
    return wb4_sigma(X) - 30000.0


def wb4_g3(X):
    return X[:, 0] - X[:, 3]


def wb4_g4(X):
    return 6000.0 - wb4_pc(X)


def wb4_g5(X):
    return wb4_delta(X) - 0.25


def wb4() -> ProblemSpec:
    return ProblemSpec(wb4_f, (wb4_g1, wb4_g2, wb4_g3, wb4_g4, wb4_g5),
                       BoxDomain([0.125, 0.1, 0.1, 0.1], [10.0, 10.0, 10.0, 10.0]),
                       name="wb4")


CATALOG = {
    "dixon-price": dixon_price,
    "linear2d": linear2d,
    "level": level_fn,
    "twisted-strip": twisted_strip,
    "gtcd": gtcd,
    "wb4": wb4,
}

INFO = {
    # analytic optimum; f(1, 1) = 2, so (1, 1) is not a minimizer
    "dixon-price": BenchmarkInfo(2, 0, 0.0, (1.0, 2.0 ** -0.5),
                                 note="also (1, -2**-0.5)"),
    "linear2d": BenchmarkInfo(2, 0, -30.0, (-10.0, -10.0)),
    "level": BenchmarkInfo(2, 0, -6.0, (0.0, 2.0), note="minimizers |x1| <= q, x2 = 2"),
    "twisted-strip": BenchmarkInfo(2, 0, 9.069, (-1.0, -1.0)),
    "gtcd": BenchmarkInfo(4, 1, 2964893.85, (49.99, 1.178, 24.59, 0.389), 52.38),
    "wb4": BenchmarkInfo(4, 5, 1.7250, (0.206, 3.473, 9.037, 0.206), 5.6e-2),
}


def get(name: str, **kwargs) -> ProblemSpec:
    try:
        factory = CATALOG[name]
    except KeyError:
        raise ArgumentError(
            f"unknown benchmark {name!r}; choose from {', '.join(CATALOG)}") from None
    return factory(**kwargs)
