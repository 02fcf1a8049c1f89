import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hsicopt import benchmarks
from hsicopt.errors import (ArgumentError, DegenerateError, DegenerateOutputWarning,
                            ShapeError)
from hsicopt.hsic import hsic_biased, hsic_it, mmd2_biased, normalize, replicate_indices
from hsicopt.kernels import KernelSpec, center, gram
from hsicopt.problem import BoxDomain, ProblemSpec, evaluate
from hsicopt.sampling import Seed, uniform_sample
from hsicopt.thresholding import ThresholdSpec, sublevel_indicator

from oracles import hsic_expansion, hsic_naive, population_hsic, population_mmd2, rbf


def test_hsic_constant_L_is_zero():
    K = gram(KernelSpec.rbf(1.0), np.arange(5.0))
    assert abs(hsic_biased(K, np.full((5, 5), 3.0))) <= 1e-15


def test_hsic_identity_grams():
    assert hsic_biased(np.eye(2), np.eye(2)) == pytest.approx(0.25, abs=1e-15)


def test_hsic_shape_error():
    with pytest.raises(ShapeError):
        hsic_biased(np.eye(3), np.eye(4))


def test_hsic_matches_loop_oracles():
    rng = np.random.default_rng(0)
    for n in (2, 7, 25):
        x, y = rng.normal(size=n), rng.normal(size=n)
        K, L = gram(KernelSpec.rbf(0.8), x), gram(KernelSpec.rbf(1.7), y)
        assert hsic_biased(K, L) == pytest.approx(hsic_naive(K.tolist(), L.tolist()), abs=1e-12)
        assert hsic_biased(K, L) == pytest.approx(hsic_expansion(K.tolist(), L.tolist()),
                                                  abs=1e-12)


def test_mmd_examples():
    x = np.random.default_rng(1).normal(size=(20, 2))
    assert abs(mmd2_biased(x, x, KernelSpec.rbf(1.0))) <= 1e-12
    assert mmd2_biased([0.0], [1.0], KernelSpec.rbf(1.0)) == pytest.approx(
        2 - 2 * np.exp(-0.5), abs=1e-12)
    assert mmd2_biased([0.0], [1.0], KernelSpec.rbf(1.0)) == pytest.approx(0.786939, abs=1e-6)
    with pytest.raises(ArgumentError):
        mmd2_biased(np.zeros((0, 1)), x[:, :1], KernelSpec.rbf(1.0))


def test_population_hsic_equals_scaled_mmd():
    points = [-1.0, -0.2, 0.4, 1.1, 2.5]
    probs = [0.1, 0.3, 0.2, 0.25, 0.15]
    z = [1, 0, 1, 1, 0]
    k = rbf(0.9)
    pz = sum(p * zi for p, zi in zip(probs, z))
    cond = [p * zi / pz for p, zi in zip(probs, z)]
    lhs = population_hsic(points, probs, z, k)
    rhs = pz ** 2 * population_mmd2(points, cond, probs, k)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_hsic_it_constant_z_warns_and_returns_zero():
    X = np.random.default_rng(0).uniform(size=(30, 3))
    with pytest.warns(DegenerateOutputWarning):
        out = hsic_it(X, np.ones(30))
    assert out.tolist() == [0.0, 0.0, 0.0]


def test_hsic_it_independent_column_small():
    rng = np.random.default_rng(5)
    X = rng.uniform(size=(4000, 2))
    z = (X[:, 0] < 0.3).astype(float)
    out = hsic_it(X, z)
    assert out[1] <= 0.1 * out.max()


def test_hsic_it_dixon_price_x2_dominates():
    p = benchmarks.dixon_price()
    d = evaluate(p, uniform_sample(p.domain, 2000, Seed(2)))
    z = sublevel_indicator(d, ThresholdSpec(0.2)).z
    out = hsic_it(d.X, z)
    assert out[1] > out[0]


def test_normalize_examples():
    assert normalize([0.3, 0.1]).tolist() == pytest.approx([0.75, 0.25])
    assert normalize([2.0, 2.0, 2.0]).tolist() == pytest.approx([1 / 3] * 3)
    assert normalize([0.3, 0.6], "cross", ([0.09, 0.36], 1.0)).tolist() == pytest.approx([1, 1])
    with pytest.raises(DegenerateError):
        normalize([0.0, 0.0])
    with pytest.raises(ArgumentError):
        normalize([0.1], "cross")
    with pytest.raises(ArgumentError):
        normalize([0.1], "other")


@pytest.mark.property
@given(st.lists(st.floats(0, 1e3), min_size=1, max_size=10).filter(lambda v: sum(v) > 1e-6))
def test_normalize_sums_to_one(raw):
    assert normalize(raw).sum() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.property
@given(st.integers(2, 30), st.integers(0, 10**6))
def test_hsic_symmetric_and_nonnegative(n, s):
    rng = np.random.default_rng(s)
    K = gram(KernelSpec.rbf(rng.uniform(0.1, 3)), rng.normal(size=n))
    L = gram(KernelSpec.linear(), rng.integers(0, 2, n).astype(float))
    assert hsic_biased(K, L) == pytest.approx(hsic_biased(L, K), abs=1e-12)
    assert hsic_biased(K, L) >= -1e-12


@pytest.mark.property
@given(st.integers(2, 40), st.integers(0, 10**6))
def test_empirical_hsic_mmd_identity(n, s):
    rng = np.random.default_rng(s)
    x = rng.normal(size=n)
    z = rng.integers(0, 2, n).astype(float)
    z[0] = 1.0
    k = KernelSpec.rbf(1.1)
    lhs = hsic_biased(gram(k, x), gram(KernelSpec.linear(), z))
    rhs = (z.mean()) ** 2 * mmd2_biased(x[z == 1], x, k)
    assert lhs == pytest.approx(rhs, abs=1e-12)


@pytest.mark.property
@given(st.integers(2, 40), st.integers(0, 10**6))
def test_quadratic_form_equals_trace_form(n, s):
    rng = np.random.default_rng(s)
    K = gram(KernelSpec.rbf(0.5), rng.normal(size=n))
    z = rng.integers(0, 2, n).astype(float)
    assert z @ center(K) @ z / n ** 2 == pytest.approx(hsic_biased(K, np.outer(z, z)), abs=1e-12)


def _wave(X):
    return np.sin(3 * X[:, 0]) + X[:, 1] ** 2 + 0.1 * X[:, 2]


def _exp_wave(X):
    return np.exp(_wave(X))


def _ring(X):
    return X[:, 0] ** 2 + X[:, 1] ** 2 - 0.8


CUBE = BoxDomain([-1.0] * 3, [1.0] * 3)


@pytest.mark.property
@given(st.integers(0, 2**32), st.sampled_from([0.05, 0.2, 0.5, 0.9]))
def test_hsic_it_monotone_invariance(master, alpha):
    X = uniform_sample(CUBE, 300, Seed(master))
    p, q = ProblemSpec(_wave, (), CUBE), ProblemSpec(_exp_wave, (), CUBE)
    za = sublevel_indicator(evaluate(p, X), ThresholdSpec(alpha)).z
    zb = sublevel_indicator(evaluate(q, X), ThresholdSpec(alpha)).z
    assert hsic_it(X, za).tobytes() == hsic_it(X, zb).tobytes()


@pytest.mark.property
def test_replicate_indices_monotone_invariance():
    kw = dict(alphas=(0.1, 0.5), N=600, M=200, reps=3, seed=Seed(9), min_feasible=50)
    a = replicate_indices(ProblemSpec(_wave, (_ring,), CUBE), **kw)
    b = replicate_indices(ProblemSpec(_exp_wave, (_ring,), CUBE), **kw)
    assert a.normalized.tobytes() == b.normalized.tobytes()
    assert a.raw.tobytes() == b.raw.tobytes()


def test_replicate_indices_table_invariants():
    p = ProblemSpec(_wave, (_ring,), CUBE)
    t = replicate_indices(p, alphas=(0.1, 0.4, 1.0), N=800, M=300, reps=4, seed=Seed(1))
    assert t.mean.shape == (3, 3) and t.std.shape == (3, 3)
    assert np.all(t.std >= 0)
    assert t.mode == "fresh"
    sums = t.normalized[:, :2].sum(axis=2)
    assert np.allclose(sums, 1.0, atol=1e-9)
    assert np.all(t.n_in_D <= t.n_feasible)
    assert t.best_rows is not None and len(t.best_rows) == 4


def test_replicate_indices_is_seed_deterministic():
    p = ProblemSpec(_wave, (), CUBE)
    kw = dict(alphas=(0.2,), N=300, M=100, reps=2, seed=Seed(4))
    assert replicate_indices(p, **kw).mean.tobytes() == replicate_indices(p, **kw).mean.tobytes()


def test_replicate_indices_bootstrap_mode():
    p = ProblemSpec(_wave, (_ring,), CUBE)
    design = evaluate(p, uniform_sample(CUBE, 500, Seed(3)))
    t = replicate_indices(design=design, alphas=(0.2,), M=200, reps=3, seed=Seed(2),
                          min_feasible=30)
    assert t.mode == "bootstrap" and t.N == 500


def test_replicate_indices_cross_normalization():
    p = ProblemSpec(_wave, (), CUBE)
    t = replicate_indices(p, alphas=(0.2,), N=400, M=200, reps=2, seed=Seed(4),
                          normalization="cross")
    assert np.all(t.normalized >= 0) and np.all(t.normalized <= 1.0 + 1e-12)


def test_replicate_indices_degenerate_alpha_flagged():
    p = ProblemSpec(_wave, (), CUBE)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        t = replicate_indices(p, alphas=(0.3, 1.0), N=200, M=100, reps=2, seed=Seed(0))
    assert any(issubclass(w.category, DegenerateOutputWarning) for w in caught)
    assert t.degenerate == [(0, 1.0), (1, 1.0)]
    assert np.all(t.mean[1] == 0.0)


def test_replicate_indices_argument_errors():
    p = ProblemSpec(_wave, (), CUBE)
    with pytest.raises(ArgumentError):
        replicate_indices(p, N=100, M=200, reps=2)
    with pytest.raises(ArgumentError):
        replicate_indices(p, N=100, M=50, reps=1)
    with pytest.raises(ArgumentError):
        replicate_indices(N=100, M=50, reps=2)


def test_index_table_csv(tmp_path):
    p = ProblemSpec(_wave, (), CUBE)
    t = replicate_indices(p, alphas=(0.2, 0.5), N=300, M=100, reps=2, seed=Seed(0))
    lines = t.to_csv(tmp_path / "i.csv").read_text().splitlines()
    assert lines[0] == "input,alpha,mean,std,reps,N,M,normalization"
    assert len(lines) == 1 + 3 * 2
