import numpy as np
import pytest

from trademech.numkernel import certified_binary_search, simplex_maximize, project_simplex


def test_binary_search_threshold():
    r = certified_binary_search(lambda t: t <= 0.75, 0.0, 1.0, iters=100)
    assert r <= 0.75
    assert abs(r - 0.75) < 1e-12


def test_binary_search_returns_passing_value():
    calls = []

    def check(t):
        ok = t * t <= 2.0
        calls.append((t, ok))
        return ok

    r = certified_binary_search(check, 0.0, 2.0, iters=60)
    assert (r, True) in calls
    assert r * r <= 2.0
    assert abs(r - np.sqrt(2.0)) < 1e-9


def test_binary_search_precondition_errors():
    with pytest.raises(ValueError):
        certified_binary_search(lambda t: False, 0.0, 1.0)
    with pytest.raises(ValueError):
        certified_binary_search(lambda t: True, 0.0, 1.0)


def test_projection_is_simplex_point():
    rng = np.random.default_rng(0)
    for _ in range(50):
        w = project_simplex(rng.uniform(-1, 2, 6))
        assert np.all(w >= 0)
        assert w.sum() == pytest.approx(1.0, abs=1e-12)


def test_maximize_linear_objective():
    w, v = simplex_maximize(lambda w: w[0], 2, restarts=4, iters=200)
    assert v == pytest.approx(1.0, abs=1e-9)
    assert w[0] == pytest.approx(1.0, abs=1e-9)


def test_maximize_prefers_uniform():
    w, v = simplex_maximize(lambda w: -float(np.sum((w - 0.25) ** 2)), 4,
                            restarts=4, iters=400)
    assert np.allclose(w, 0.25, atol=1e-5)


def test_maximize_feasible_and_deterministic():
    f = lambda w: float(w[0] * w[2] + 0.5 * w[1])
    w1, v1 = simplex_maximize(f, 3, restarts=6, iters=300, seed=7)
    w2, v2 = simplex_maximize(f, 3, restarts=6, iters=300, seed=7)
    assert np.array_equal(w1, w2) and v1 == v2
    assert np.all(w1 >= 0) and w1.sum() == pytest.approx(1.0, abs=1e-12)
    assert v1 == pytest.approx(f(w1))


def test_maximize_n_equals_one():
    w, v = simplex_maximize(lambda w: 3.5, 1)
    assert w.tolist() == [1.0]
    assert v == 3.5
