"""The dense simplex against a vertex-enumeration oracle and edge cases."""

import numpy as np
import pytest

from conftest import vertex_enum_max
from scert._simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, maximize


class TestBasics:
    def test_box_maximum(self):
        A = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        b = np.array([2.0, 2.0, 1.0, 1.0])
        res = maximize(np.array([1.0, 0.0]), A, b)
        assert res.status == OPTIMAL
        assert abs(res.value - 2.0) < 1e-9

    def test_unbounded_direction(self):
        res = maximize(np.array([1.0, 0.0]), np.array([[-1.0, 0.0]]), np.array([1.0]))
        assert res.status == UNBOUNDED

    def test_infeasible(self):
        A = np.array([[1.0, 0.0], [-1.0, 0.0]])
        b = np.array([-2.0, 1.0])  # x <= -2 and x >= -1
        res = maximize(np.array([1.0, 0.0]), A, b)
        assert res.status == INFEASIBLE

    def test_negative_rhs_feasible(self):
        # x >= 1 (as -x <= -1), x <= 3
        A = np.array([[-1.0], [1.0]])
        b = np.array([-1.0, 3.0])
        res = maximize(np.array([-1.0]), A, b)
        assert res.status == OPTIMAL
        assert abs(res.value - (-1.0)) < 1e-9

    def test_zero_objective(self):
        res = maximize(np.zeros(2), np.array([[1.0, 1.0]]), np.array([1.0]))
        assert res.status == OPTIMAL
        assert abs(res.value) < 1e-12

    def test_no_constraints(self):
        assert maximize(np.zeros(3), np.zeros((0, 3)), np.zeros(0)).status == OPTIMAL
        assert maximize(np.array([0.0, 1.0]), np.zeros((0, 2)), np.zeros(0)).status == UNBOUNDED

    def test_degenerate_duplicate_rows(self):
        A = np.array([[1.0, 0.0]] * 5 + [[-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        b = np.array([1.0] * 5 + [0.0, 1.0, 1.0])
        res = maximize(np.array([1.0, 1.0]), A, b)
        assert res.status == OPTIMAL
        assert abs(res.value - 2.0) < 1e-9


class TestAgainstVertexEnumeration:
    def test_random_bounded_regions(self):
        rng = np.random.default_rng(7)
        box = np.vstack([np.eye(2), -np.eye(2)])
        for _ in range(300):
            m = rng.integers(3, 9)
            normals = np.vstack([rng.standard_normal((m, 2)), box])
            offsets = np.concatenate([rng.uniform(0.2, 2.0, size=m),
                                      np.full(4, 5.0)])
            objective = rng.standard_normal(2)
            res = maximize(objective, normals, offsets)
            assert res.status == OPTIMAL
            expected = vertex_enum_max(objective, normals, offsets)
            assert abs(res.value - expected) <= 1e-9
            assert np.all(normals @ res.point <= offsets + 1e-9)


class TestAgainstScipy:
    """Cross-check against an external solver when one is installed,
    exercising the phase-1 path with negative right-hand sides."""

    def test_random_general_problems(self):
        linprog = pytest.importorskip("scipy.optimize").linprog
        rng = np.random.default_rng(17)
        statuses = {OPTIMAL: 0, UNBOUNDED: 0, INFEASIBLE: 0}
        for _ in range(400):
            m = int(rng.integers(1, 10))
            n = int(rng.integers(1, 4))
            normals = rng.standard_normal((m, n))
            offsets = rng.uniform(-1.0, 2.0, size=m)
            objective = rng.standard_normal(n)
            res = maximize(objective, normals, offsets)
            ref = linprog(-objective, A_ub=normals, b_ub=offsets,
                          bounds=[(None, None)] * n, method="highs")
            if ref.status == 2:
                assert res.status == INFEASIBLE
            elif ref.status == 3:
                assert res.status == UNBOUNDED
            else:
                assert res.status == OPTIMAL
                assert abs(res.value - (-ref.fun)) <= 1e-7
            statuses[res.status] += 1
        # the sample actually exercises all three outcomes
        assert min(statuses.values()) > 0
