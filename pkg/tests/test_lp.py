import numpy as np
import pytest
from scipy.optimize import linprog

from getgrasp import lp

from oracles import lp_by_vertex_enumeration


def random_lp(rng, n=6, p=2, q=3):
    A_eq = rng.normal(size=(p, n))
    x0 = rng.uniform(0.1, 1.0, n)
    b_eq = A_eq @ x0
    A_ub = rng.uniform(0.0, 1.0, size=(q, n))
    b_ub = A_ub @ x0 + rng.uniform(0.1, 1.0, q)
    c = rng.normal(size=n)
    return c, A_eq, b_eq, A_ub, b_ub


def test_simple_box():
    res = lp.maximize([1.0, 1.0], A_ub=[[1, 0], [0, 1]], b_ub=[2.0, 3.0])
    assert res.status == lp.OPTIMAL
    assert res.objective == pytest.approx(5.0)
    np.testing.assert_allclose(res.x, [2.0, 3.0])


def test_infeasible():
    res = lp.maximize([1.0], A_eq=[[1.0]], b_eq=[-1.0])
    assert res.status == lp.INFEASIBLE
    assert lp.feasible(A_eq=[[1.0]], b_eq=[-1.0]) is None


def test_unbounded():
    assert lp.maximize([1.0, 0.0], A_eq=[[0.0, 1.0]], b_eq=[1.0]).status == lp.UNBOUNDED


def test_shape_mismatch():
    with pytest.raises(ValueError):
        lp.maximize([1.0, 2.0], A_eq=[[1.0]], b_eq=[1.0])


def test_degenerate_problem_terminates():
    # classic cycling example under the textbook rule; Bland's rule must finish
    c = np.array([10.0, -57.0, -9.0, -24.0])
    A = np.array([[0.5, -5.5, -2.5, 9.0], [0.5, -1.5, -0.5, 1.0], [1.0, 0.0, 0.0, 0.0]])
    res = lp.maximize(c, A_ub=A, b_ub=[0.0, 0.0, 1.0])
    assert res.status == lp.OPTIMAL
    assert res.objective == pytest.approx(1.0)


def test_matches_highs_random():
    rng = np.random.default_rng(3)
    for _ in range(200):
        c, A_eq, b_eq, A_ub, b_ub = random_lp(rng)
        ours = lp.maximize(c, A_eq, b_eq, A_ub, b_ub)
        ref = linprog(-c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
        if ref.status == 3:
            assert ours.status == lp.UNBOUNDED
            continue
        assert ref.status == 0 and ours.status == lp.OPTIMAL
        assert ours.objective == pytest.approx(-ref.fun, rel=1e-7, abs=1e-8)
        assert np.abs(A_eq @ ours.x - b_eq).max() < 1e-8
        assert np.all(A_ub @ ours.x <= b_ub + 1e-8)


def test_matches_vertex_enumeration():
    rng = np.random.default_rng(5)
    checked = 0
    while checked < 30:
        c, A_eq, b_eq, A_ub, b_ub = random_lp(rng, n=5, p=2, q=2)
        ours = lp.maximize(c, A_eq, b_eq, A_ub, b_ub)
        if ours.status != lp.OPTIMAL:
            continue
        assert ours.objective == pytest.approx(lp_by_vertex_enumeration(c, A_eq, b_eq, A_ub, b_ub), rel=1e-8)
        checked += 1


def test_tiny_noise_does_not_break_feasibility():
    A = np.array([[1.0, -1.0, 1e-20], [0.0, 1.0, 1.0]])
    res = lp.maximize([0.0, 0.0, 1.0], A_eq=A, b_eq=[0.0, 1.0])
    assert res.status == lp.OPTIMAL and res.objective == pytest.approx(1.0)
