import numpy as np
import pytest

from hsicopt import benchmarks as b
from hsicopt.errors import ArgumentError
from hsicopt.problem import evaluate, feasible_mask
from hsicopt.sampling import Seed, uniform_sample


def _f(problem, x):
    return evaluate(problem, np.atleast_2d(x)).f[0]


def test_dixon_price_values():
    p = b.dixon_price()
    assert _f(p, [1.0, 2 ** -0.5]) == pytest.approx(0.0, abs=1e-15)
    assert _f(p, [1.0, 1.0]) == 2.0
    assert _f(p, [0.0, 0.0]) == 1.0


def test_linear_values():
    p = b.linear2d()
    assert _f(p, [0.0, 0.0]) == 0.0 and _f(p, [1.0, 2.0]) == 5.0
    assert _f(p, [-10.0, -10.0]) == -30.0


def test_level_values():
    p = b.level_fn()
    assert _f(p, [3.0, 0.0]) == 3.0
    assert _f(p, [0.0, 2.0]) == -6.0
    assert _f(p, [0.0, -4.0]) == 0.0


def test_twisted_strip_values():
    p = b.twisted_strip()
    assert _f(p, [-1.0, -1.0]) == pytest.approx(9.069, abs=1e-12)
    assert _f(p, [1.0, 1.0]) == pytest.approx(9.429, abs=1e-12)
    assert _f(p, [-1.0, -1.0]) < min(_f(p, [1.0, 1.0]), _f(p, [-1.0, 1.0]))


def test_twisted_strip_continuous_at_strip_edge():
    p = b.twisted_strip()
    edge = 0.1 + 0.2
    assert _f(p, [edge - 1e-9, 0.3]) == pytest.approx(_f(p, [edge + 1e-9, 0.3]), abs=1e-8)


def test_gtcd_values():
    p = b.gtcd()
    d = evaluate(p, np.array([b.INFO["gtcd"].best_x]))
    assert d.f[0] == pytest.approx(2964893.85, rel=1e-3)
    assert d.G[0, 0] <= 1e-2
    x = np.array([[30.0, 2.0, 30.0, 1.0], [30.0, 1.0, 30.0, 0.1]])
    g = evaluate(p, x).G[:, 0]
    assert g[0] == pytest.approx(-0.5) and g[1] == pytest.approx(0.1)
    assert feasible_mask(evaluate(p, x)).tolist() == [True, False]


def test_gtcd_feasible_volume():
    p = b.gtcd()
    d = evaluate(p, uniform_sample(p.domain, 100000, Seed(0)))
    assert 100 * feasible_mask(d).mean() == pytest.approx(52.38, abs=1.0)


def test_wb4_values():
    p = b.wb4()
    d = evaluate(p, np.array([b.INFO["wb4"].best_x]))
    assert d.f[0] == pytest.approx(1.7250, rel=5e-3)
    assert np.all(d.G[0] <= 1e-2 * np.maximum(1.0, [13600, 30000, 1, 6000, 0.25]))
    assert b.wb4_sigma(np.array([[1.0, 1.0, 10.0, 10.0]]))[0] == pytest.approx(504.0)
    assert b.wb4_tau1(np.array([[1.0, 1.0, 1.0, 1.0]]))[0] == pytest.approx(4242.6407, abs=1e-4)
    assert b.wb4_g3(np.array([[0.2, 1.0, 1.0, 0.2]]))[0] == 0.0


@pytest.mark.xfail(strict=True, reason="the stated WB4 formulas give ~40% feasible volume, "
                                       "not the tabulated 5.6e-2 %; see the decisions ledger")
def test_wb4_feasible_volume_order_of_magnitude():
    p = b.wb4()
    d = evaluate(p, uniform_sample(p.domain, 1000000, Seed(0)))
    pct = 100 * feasible_mask(d).mean()
    assert 5.6e-3 <= pct <= 5.6e-1


def test_catalog_and_metadata():
    assert set(b.CATALOG) == {"dixon-price", "linear2d", "level", "twisted-strip", "gtcd", "wb4"}
    for name, factory in b.CATALOG.items():
        p = factory()
        assert (p.dim, p.n_constraints) == (b.INFO[name].d, b.INFO[name].m)
    with pytest.raises(ArgumentError):
        b.get("rosenbrock")


def test_problems_pickle():
    import pickle
    for factory in b.CATALOG.values():
        p = pickle.loads(pickle.dumps(factory()))
        x = uniform_sample(p.domain, 3, Seed(0))
        assert np.array_equal(evaluate(p, x).f, evaluate(factory(), x).f)
