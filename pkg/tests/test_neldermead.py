import numpy as np
import pytest

from contractforge import nelder_mead_minimize


def test_convex_quadratic():
    x, fx = nelder_mead_minimize(lambda v: float(v @ v), [1.0, 1.0],
                                 [(-5.0, 5.0)] * 2, max_iter=200)
    assert fx < 1e-8
    assert np.all(np.abs(x) < 1e-4)


def test_one_dimensional_parabola():
    x, fx = nelder_mead_minimize(lambda v: float((v[0] - 3.0) ** 2), [9.0],
                                 [(0.0, 10.0)], max_iter=200)
    assert x[0] == pytest.approx(3.0, abs=1e-4)


def _rosenbrock(v):
    return float((1 - v[0]) ** 2 + 100.0 * (v[1] - v[0] ** 2) ** 2)


def test_rosenbrock_beats_grid_search():
    x, fx = nelder_mead_minimize(_rosenbrock, [-1.2, 1.0], [(-2.0, 2.0)] * 2, max_iter=2000)
    assert fx < 1e-3
    # coarse grid-search oracle: the optimizer must do at least as well
    grid = np.linspace(-2, 2, 41)
    grid_best = min(_rosenbrock((a, b)) for a in grid for b in grid)
    assert fx <= grid_best + 1e-9


def test_box_respected_for_every_evaluation():
    seen = []

    def f(v):
        seen.append(np.array(v))
        return float((v[0] - 10.0) ** 2 + v[1] ** 2)

    box = [(0.0, 1.0), (-0.5, 0.5)]
    x, _ = nelder_mead_minimize(f, [0.5, 0.0], box, max_iter=120)
    for pt in seen:
        assert 0.0 - 1e-12 <= pt[0] <= 1.0 + 1e-12
        assert -0.5 - 1e-12 <= pt[1] <= 0.5 + 1e-12
    assert x[0] == pytest.approx(1.0, abs=1e-6)  # pinned to the box edge


def test_deterministic():
    runs = [nelder_mead_minimize(_rosenbrock, [0.0, 0.0], [(-2.0, 2.0)] * 2, max_iter=300)
            for _ in range(2)]
    assert np.array_equal(runs[0][0], runs[1][0])
    assert runs[0][1] == runs[1][1]


def test_returns_best_seen_on_exhaustion():
    x, fx = nelder_mead_minimize(lambda v: float(v[0] ** 2), [2.0], [(-4.0, 4.0)], max_iter=1)
    assert fx <= 4.0
