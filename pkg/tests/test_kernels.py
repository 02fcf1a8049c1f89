import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hsicopt.errors import ArgumentError, DegenerateScaleError, ShapeError
from hsicopt.kernels import KernelSpec, center, gram, median_bandwidth

from oracles import naive_center


def test_rbf_diagonal_and_value():
    x = np.linspace(-2, 2, 7)
    assert np.all(np.diag(gram(KernelSpec.rbf(0.7), x)) == 1.0)
    assert gram(KernelSpec.rbf(1.0), [0.0], [1.0])[0, 0] == pytest.approx(np.exp(-0.5), abs=1e-12)


def test_linear_kernel_on_indicator():
    z = np.array([0.0, 1.0, 1.0])
    assert gram(KernelSpec.linear(), z).tolist() == [[0, 0, 0], [0, 1, 1], [0, 1, 1]]


def test_polynomial_kernel():
    assert gram(KernelSpec.polynomial(2), [2.0], [3.0])[0, 0] == 49.0


def test_kernel_validation():
    with pytest.raises(ArgumentError):
        KernelSpec.rbf(0.0)
    with pytest.raises(ArgumentError):
        KernelSpec.polynomial(0)
    with pytest.raises(ShapeError):
        gram(KernelSpec.linear(), np.zeros((2, 2)), np.zeros((2, 3)))


def test_median_examples():
    assert median_bandwidth([0.0, 1.0]) == 1.0
    assert median_bandwidth([0.0, 1.0, 2.0]) == 1.0
    with pytest.raises(DegenerateScaleError):
        median_bandwidth([3.0, 3.0, 3.0])


def test_median_tie_fallback():
    # 6 of the 10 pairs are zero; the nonzero pairs decide
    assert median_bandwidth([0.0, 0.0, 0.0, 0.0, 2.0]) == 2.0


def test_center_examples():
    assert np.allclose(center(np.ones((4, 4))), 0.0, atol=1e-15)
    assert center(np.eye(2)).tolist() == [[0.5, -0.5], [-0.5, 0.5]]
    with pytest.raises(ShapeError):
        center(np.zeros((2, 3)))


samples = st.lists(st.floats(-100, 100), min_size=2, max_size=60).filter(
    lambda v: max(v) - min(v) > 1e-3)


@pytest.mark.property
@given(samples, st.floats(-50, 50))
def test_median_translation_invariant(v, c):
    a = median_bandwidth(v)
    b = median_bandwidth(np.asarray(v) + c)
    assert b == pytest.approx(a, rel=1e-9, abs=1e-9)


@pytest.mark.property
@given(samples, st.floats(0.01, 100))
def test_median_scales_linearly(v, c):
    assert median_bandwidth(np.asarray(v) * c) == pytest.approx(c * median_bandwidth(v), rel=1e-9)


@pytest.mark.property
@given(st.integers(2, 40), st.integers(0, 10**6))
def test_center_matches_explicit_H_and_is_idempotent(n, s):
    G = np.random.default_rng(s).normal(size=(n, n))
    C = center(G)
    assert np.allclose(C, naive_center(G), atol=1e-12)
    assert np.allclose(center(C), C, atol=1e-12)
    assert np.allclose(C.sum(axis=1), 0.0, atol=1e-12)


@pytest.mark.property
@given(st.integers(2, 60), st.integers(0, 10**6), st.sampled_from(["rbf", "linear"]))
def test_gram_symmetric_psd(n, s, kind):
    x = np.random.default_rng(s).normal(size=(n, 2))
    k = KernelSpec.rbf(1.3) if kind == "rbf" else KernelSpec.linear()
    K = gram(k, x)
    assert np.array_equal(K, K.T)
    assert np.linalg.eigvalsh(K).min() >= -1e-10 * max(1.0, np.abs(K).max())
