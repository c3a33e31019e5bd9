import numpy as np
import pytest
from hypothesis import given, strategies as st

from coolsim.core import (
    GradientReport,
    ObservationCounters,
    SolutionBox,
    WeightMatrix,
    build_weight_matrix,
    get_task,
    index_pair,
    items_from_task_count,
    mahalanobis_sq,
    n_pair_tasks,
    pair_index,
    set_task,
)


def test_pair_index_bijection():
    for n in (2, 3, 5, 10):
        seen = set()
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                z = pair_index(i, j, n)
                assert index_pair(z, n) == (i, j)
                seen.add(z)
        assert seen == set(range(n_pair_tasks(n)))


def test_pair_index_rejects_diagonal():
    with pytest.raises(ValueError):
        pair_index(2, 2, 5)


def test_items_from_task_count():
    assert items_from_task_count(6) == 3
    assert items_from_task_count(90) == 10
    with pytest.raises(ValueError):
        items_from_task_count(7)


@given(st.integers(1, 6), st.integers(1, 8), st.integers(0, 1000))
def test_layout_roundtrip(d, k, seed):
    rng = np.random.default_rng(seed)
    w = rng.normal(size=d * k)
    z = int(rng.integers(k))
    block = get_task(w, z, d)
    before = w.copy()
    set_task(w, z, d, block)
    assert np.array_equal(w, before)


def test_counter_conservation():
    rng = np.random.default_rng(0)
    counters = ObservationCounters.zeros(7)
    for t in range(1, 200):
        counters.observe(int(rng.integers(7)))
        assert counters.total == t
    assert np.all(counters.counts >= 0)


def test_build_weight_matrix_examples():
    q = build_weight_matrix(ObservationCounters(np.array([4, 1, 0])), 1)
    assert np.array_equal(q.diagonal, [2.0, 1.0, 0.0])
    q = build_weight_matrix(ObservationCounters(np.array([1])), 3)
    assert np.array_equal(q.diagonal, [1.0, 1.0, 1.0])
    q = build_weight_matrix(ObservationCounters(np.array([9, 16])), 2)
    assert np.array_equal(q.diagonal, [3.0, 3.0, 4.0, 4.0])


def test_mahalanobis_examples():
    a = np.array([1.7, -2.3])
    assert mahalanobis_sq(a, a, np.array([5.0, 7.0])) == 0.0
    assert mahalanobis_sq([3.0, 0.0], [1.0, 0.0], np.array([2.0, 1.0])) == 8.0
    assert mahalanobis_sq([1.0, 1.0], [0.0, 0.0], np.array([0.0, 4.0])) == 4.0
    with pytest.raises(ValueError):
        mahalanobis_sq([1.0], [1.0, 2.0], np.array([1.0, 1.0]))


def test_mahalanobis_symmetry_and_triangle():
    rng = np.random.default_rng(42)
    for _ in range(200):
        size = int(rng.integers(1, 8))
        q = rng.uniform(0, 3, size)
        a, b, c = rng.normal(size=(3, size))
        dab = mahalanobis_sq(a, b, q)
        assert dab == mahalanobis_sq(b, a, q)
        assert np.sqrt(mahalanobis_sq(a, c, q)) <= (
            np.sqrt(dab) + np.sqrt(mahalanobis_sq(b, c, q)) + 1e-12
        )


def test_solution_box():
    box = SolutionBox.interval(0.0, 9.0, 1)
    assert box.diameter == 9.0
    assert box.midpoint[0] == 4.5
    assert box.clamp(np.array([-3.0]))[0] == 0.0
    assert box.contains(np.array([4.0]))
    with pytest.raises(ValueError):
        SolutionBox(np.array([1.0]), np.array([0.0]))


def test_weight_matrix_rejects_negative():
    with pytest.raises(ValueError):
        WeightMatrix(np.array([-1.0]))


def test_gradient_report_norm_check():
    GradientReport(0, np.array([1.0]), 1.0)
    with pytest.raises(ValueError):
        GradientReport(0, np.array([2.0]), 1.0)
