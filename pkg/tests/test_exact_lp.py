"""Exact simplex and Fourier-Motzkin elimination."""

import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from dirichlet_forge.exact_lp import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    feasible_geq_one,
    fourier_motzkin,
    max_coordinate,
    nonneg_combination,
    solve_standard,
)

F = Fraction
small = st.fractions(min_value=F(-5), max_value=F(5), max_denominator=4)


def test_simplex_textbook_optimum():
    # max 3x + 2y s.t. x + y <= 4, x + 3y <= 6 (slacks added by hand)
    A = [[1, 1, 1, 0], [1, 3, 0, 1]]
    b = [4, 6]
    res = solve_standard([3, 2, 0, 0], A, b)
    assert res.status == OPTIMAL
    assert res.objective == F(12)  # x = 4, y = 0
    assert res.x[0] == F(4) and res.x[1] == F(0)


def test_simplex_degenerate_optimum():
    # redundant constraint row triggers the drive-out path
    A = [[1, 1, 1, 0], [2, 2, 2, 0]]
    b = [4, 8]
    res = solve_standard([1, 0, 0, 0], A, b)
    assert res.status == OPTIMAL
    assert res.objective == F(4)


def test_simplex_infeasible_with_farkas():
    # x1 + x2 = -1 with x >= 0 cannot hold
    A = [[1, 1]]
    b = [-1]
    res = solve_standard([0, 0], A, b)
    assert res.status == INFEASIBLE
    y = res.farkas
    # y.A <= 0 and y.b > 0, checked exactly
    assert all(sum(yi * aij for yi, aij in zip(y, col)) <= 0
               for col in zip(*A))
    assert sum(yi * bi for yi, bi in zip(y, b)) > 0


def test_simplex_unbounded():
    # max x with only x - y = 1: x can grow with y
    res = solve_standard([1, 0], [[1, -1]], [1])
    assert res.status == UNBOUNDED


def test_simplex_zero_rows_and_empty():
    res = solve_standard([-1, -2], [], [])
    assert res.status == OPTIMAL and res.objective == 0
    res = solve_standard([1], [], [])
    assert res.status == UNBOUNDED


def test_nonneg_combination_found():
    t, rho = nonneg_combination([(1, 0), (0, 1), (1, 1)], (3, 2))
    assert rho is None
    total = [sum(ti * v for ti, v in zip(t, col)) for col in zip(*[(1, 0), (0, 1), (1, 1)])]
    assert total == [F(3), F(2)]
    assert all(ti >= 0 for ti in t)


def test_nonneg_combination_separated():
    t, rho = nonneg_combination([(1, 0), (0, 1)], (-1, 1))
    assert t is None
    assert sum(r * v for r, v in zip(rho, (-1, 1))) > 0
    for g in [(1, 0), (0, 1)]:
        assert sum(r * v for r, v in zip(rho, g)) <= 0


def test_max_coordinate():
    # x = g0 + g1; each coordinate achieves its cap 1
    gens = [(1, 0), (0, 1)]
    val, t = max_coordinate(gens, (1, 1), 0)
    assert val == F(1)
    # target on the g0 ray: coordinate 1 is stuck at zero
    val, t = max_coordinate(gens, (2, 0), 1)
    assert val == F(0)
    # unreachable target
    val, t = max_coordinate(gens, (-1, 0), 0)
    assert val is None and t is None


def test_feasible_geq_one_separating():
    rho, coeffs = feasible_geq_one([(1, 0), (0, 1), (1, 1)])
    assert coeffs is None
    for p in [(1, 0), (0, 1), (1, 1)]:
        assert sum(r * v for r, v in zip(rho, p)) >= 1


def test_feasible_geq_one_zero_in_hull():
    rho, coeffs = feasible_geq_one([(1, 0), (-1, 0), (0, 1)])
    assert rho is None
    assert sum(coeffs) == 1
    assert all(c >= 0 for c in coeffs)
    mix = [sum(c * p[d] for c, p in zip(coeffs, [(1, 0), (-1, 0), (0, 1)]))
           for d in range(2)]
    assert mix == [F(0), F(0)]


def test_feasible_geq_one_one_dimensional():
    rho, coeffs = feasible_geq_one([(F(2),), (F(-3),)])
    assert rho is None
    # unique convex combination: 3/5 * 2 + 2/5 * (-3) = 0
    assert coeffs == [F(3, 5), F(2, 5)]


def test_fourier_motzkin_feasible_box():
    # 0 <= x <= 1, 0 <= y <= 1, x + y <= 3/2
    A = [[-1, 0], [1, 0], [0, -1], [0, 1], [1, 1]]
    b = [0, 1, 0, 1, F(3, 2)]
    ok, x = fourier_motzkin(A, b)
    assert ok
    for row, bi in zip(A, b):
        assert sum(r * v for r, v in zip(row, x)) <= bi


def test_fourier_motzkin_infeasible():
    # x <= 0 and -x <= -1 means x >= 1: contradiction
    ok, x = fourier_motzkin([[1], [-1]], [0, -1])
    assert not ok and x is None


def test_fourier_motzkin_empty_system():
    ok, x = fourier_motzkin([], [])
    assert ok


@st.composite
def lp_instances(draw):
    d = draw(st.integers(1, 3))
    k = draw(st.integers(1, 5))
    pts = [tuple(draw(small) for _ in range(d)) for _ in range(k)]
    return pts


@given(lp_instances())
@settings(max_examples=120, deadline=None)
def test_separation_dichotomy_cross_checked(pts):
    """feasible_geq_one agrees with Fourier-Motzkin on every low-dim instance."""
    rho, coeffs = feasible_geq_one(list(pts))
    d = len(pts[0])
    # FM solves the same system: -x_i . rho <= -1
    A = [[-v for v in p] for p in pts]
    b = [F(-1)] * len(pts)
    ok, x = fourier_motzkin(A, b)
    if rho is not None:
        assert ok
        assert coeffs is None
        for p in pts:
            assert sum(r * v for r, v in zip(rho, p)) >= 1
    else:
        assert not ok
        assert sum(coeffs) == 1 and all(c >= 0 for c in coeffs)
        for dd in range(d):
            assert sum(c * p[dd] for c, p in zip(coeffs, pts)) == 0


@given(lp_instances(), st.data())
@settings(max_examples=80, deadline=None)
def test_nonneg_combination_dichotomy(pts, data):
    d = len(pts[0])
    target = tuple(data.draw(small) for _ in range(d))
    t, rho = nonneg_combination(list(pts), target)
    if t is not None:
        assert all(ti >= 0 for ti in t)
        for dd in range(d):
            assert sum(ti * p[dd] for ti, p in zip(t, pts)) == target[dd]
    else:
        # rho certifies: nonpositive on every generator, positive on target
        assert sum(r * v for r, v in zip(rho, target)) > 0
        for p in pts:
            assert sum(r * v for r, v in zip(rho, p)) <= 0


@given(st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_random_bounded_lp_never_cycles(seed):
    """Objective maximization over a random bounded polytope terminates
    and the reported optimum is attained by the reported point."""
    rng = random.Random(seed)
    d = rng.randint(1, 3)
    k = rng.randint(1, 4)
    # equalities sum t_i v_i = target built from a known nonneg t
    vs = [tuple(F(rng.randint(-3, 3)) for _ in range(d)) for _ in range(k)]
    t0 = [F(rng.randint(0, 3)) for _ in range(k)]
    target = [sum(t * v[dd] for t, v in zip(t0, vs)) for dd in range(d)]
    idx = rng.randrange(k)
    val, t = max_coordinate(vs, target, idx, cap=F(5))
    assert val is not None  # t0 is a feasible point
    assert t[idx] == val
    assert F(0) <= val <= F(5)
    for dd in range(d):
        assert sum(ti * v[dd] for ti, v in zip(t, vs)) == target[dd]
