"""Exact linear programming over the rationals.

A small two-phase primal simplex with Bland's rule, used for every polyhedral
decision in the package: feasibility of nonnegative combinations, separating
functionals via infeasibility certificates, and bounded coordinate
maximization.  Everything is Fraction arithmetic; no floats enter.

Certificates: when {A x = b, x >= 0} is infeasible the phase-1 optimum yields
y with y.A <= 0 componentwise and y.b > 0 (returned for the original row
order and signs).  Callers turn this y directly into separating functionals.

fourier_motzkin() is an independent feasibility decision for inequality
systems, exponential in the dimension; it exists to cross-check the simplex
on low-dimensional instances, not to replace it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .exactnum import as_fraction

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    status: str
    x: Optional[list] = None           # primal point (optimal; feasible if unbounded)
    objective: Optional[Fraction] = None
    farkas: Optional[list] = None      # infeasible only: y.A <= 0, y.b > 0


def solve_standard(c, A, b) -> LPResult:
    """max c.x  subject to  A x = b, x >= 0,  exact rationals throughout."""
    m = len(A)
    c = [as_fraction(v) for v in c]
    n = len(c)
    rows = [[as_fraction(v) for v in row] for row in A]
    rhs = [as_fraction(v) for v in b]
    for row in rows:
        if len(row) != n:
            raise ValueError("ragged constraint matrix")

    if m == 0:
        if any(cj > 0 for cj in c):
            return LPResult(UNBOUNDED, x=[Fraction(0)] * n)
        return LPResult(OPTIMAL, x=[Fraction(0)] * n, objective=Fraction(0))

    # Row signs flipped so the rhs is nonnegative; remembered for certificates.
    signs = []
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]
            signs.append(-1)
        else:
            signs.append(1)

    ncols = n + m  # structural + artificial
    T = [rows[i] + [Fraction(1) if j == i else Fraction(0) for j in range(m)] + [rhs[i]]
         for i in range(m)]
    basis = list(range(n, n + m))

    def pivot(r, col):
        piv = T[r][col]
        T[r] = [v / piv for v in T[r]]
        prow = T[r]
        for k in range(m):
            if k != r and T[k][col] != 0:
                f = T[k][col]
                T[k] = [v - f * w for v, w in zip(T[k], prow)]
        basis[r] = col

    def run(cvec, allowed):
        """Bland-rule simplex on the current tableau; returns OPTIMAL/UNBOUNDED."""
        zrow = [cvec[j] - sum(cvec[basis[i]] * T[i][j] for i in range(m))
                for j in range(ncols)]
        while True:
            col = next((j for j in allowed if zrow[j] > 0), None)
            if col is None:
                return OPTIMAL
            r = None
            best = None
            for i in range(m):
                if T[i][col] > 0:
                    ratio = T[i][-1] / T[i][col]
                    if best is None or ratio < best or (
                            ratio == best and basis[i] < basis[r]):
                        best, r = ratio, i
            if r is None:
                return UNBOUNDED
            pivot(r, col)
            f = zrow[col]
            prow = T[r]
            zrow = [z - f * w for z, w in zip(zrow, prow)]

    # Phase 1: drive the artificial variables to zero.
    c1 = [Fraction(0)] * n + [Fraction(-1)] * m
    run(c1, range(ncols))
    value = sum(c1[basis[i]] * T[i][-1] for i in range(m))
    if value < 0:
        # y = c1_B B^{-1}; B^{-1} sits in the artificial columns.  -y certifies
        # infeasibility of the flipped system; unflip per row.
        y = [sum(c1[basis[k]] * T[k][n + i] for k in range(m)) for i in range(m)]
        farkas = [-yi * signs[i] for i, yi in enumerate(y)]
        return LPResult(INFEASIBLE, farkas=farkas)

    # Drive leftover basic artificials out (degenerate rows), drop redundant rows.
    redundant = []
    for i in range(m):
        if basis[i] >= n:
            col = next((j for j in range(n) if T[i][j] != 0), None)
            if col is None:
                redundant.append(i)  # 0 = 0 row
            else:
                pivot(i, col)
    if redundant:
        for i in sorted(redundant, reverse=True):
            del T[i]
            del basis[i]
        m = len(T)
        if m == 0:
            if any(cj > 0 for cj in c):
                return LPResult(UNBOUNDED, x=[Fraction(0)] * n)
            return LPResult(OPTIMAL, x=[Fraction(0)] * n, objective=Fraction(0))

    # Phase 2: original objective, artificial columns barred from entering.
    c2 = c + [Fraction(0)] * (ncols - n)
    status = run(c2, range(n))
    x = [Fraction(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i][-1]
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, x=x)
    obj = sum(cv * xv for cv, xv in zip(c, x))
    return LPResult(OPTIMAL, x=x, objective=obj)


def nonneg_combination(vectors, target):
    """t >= 0 with sum_i t_i v_i = target, or a strictly separating functional.

    Returns (t, None) on success.  On failure returns (None, rho) with
    rho . v_i <= 0 for every i and rho . target > 0, certifying that the
    target lies outside the cone of the vectors.
    """
    vs = [[as_fraction(x) for x in v] for v in vectors]
    tgt = [as_fraction(x) for x in target]
    d = len(tgt)
    for v in vs:
        if len(v) != d:
            raise ValueError("dimension mismatch")
    k = len(vs)
    A = [[vs[j][i] for j in range(k)] for i in range(d)]
    res = solve_standard([Fraction(0)] * k, A, tgt)
    if res.status == INFEASIBLE:
        return None, res.farkas
    return res.x, None


def max_coordinate(vectors, target, index, cap=Fraction(1)):
    """max t_index over {t >= 0 : sum t_i v_i = target, t_index <= cap}.

    Returns (value, t) with value in [0, cap], or (None, None) if the system
    admits no nonnegative combination at all.
    """
    vs = [[as_fraction(x) for x in v] for v in vectors]
    tgt = [as_fraction(x) for x in target]
    d, k = len(tgt), len(vs)
    # columns: t_0..t_{k-1}, slack s with t_index + s = cap
    A = [[vs[j][i] for j in range(k)] + [Fraction(0)] for i in range(d)]
    A.append([Fraction(1) if j == index else Fraction(0) for j in range(k)] + [Fraction(1)])
    b = tgt + [as_fraction(cap)]
    cvec = [Fraction(1) if j == index else Fraction(0) for j in range(k)] + [Fraction(0)]
    res = solve_standard(cvec, A, b)
    if res.status == INFEASIBLE:
        return None, None
    # bounded by construction (t_index <= cap)
    return res.objective, res.x[:k]


def feasible_geq_one(points):
    """rho with rho . x >= 1 for every x, or exact convex coefficients for 0.

    The dichotomy: either such a functional exists, or 0 is a convex
    combination of the points.  Returns (rho, None) or (None, coeffs) with
    coeffs summing to 1, nonnegative, sum coeffs_i x_i = 0.
    """
    pts = [[as_fraction(v) for v in p] for p in points]
    if not pts:
        raise ValueError("no points")
    d = len(pts[0])
    k = len(pts)
    # rho = u - v with u, v >= 0;  x_i . rho - w_i = 1,  w >= 0
    ncols = 2 * d + k
    A = []
    for i, p in enumerate(pts):
        row = list(p) + [-v for v in p] + [Fraction(-1) if j == i else Fraction(0)
                                           for j in range(k)]
        A.append(row)
    b = [Fraction(1)] * k
    res = solve_standard([Fraction(0)] * ncols, A, b)
    if res.status != INFEASIBLE:
        x = res.x
        rho = [x[i] - x[d + i] for i in range(d)]
        return rho, None
    # Farkas y: y.A <= 0 gives  sum y_i x_i = 0 (from the +-X blocks),
    # y >= 0 (from the -I block), and y.b = sum y_i > 0.
    y = res.farkas
    total = sum(y)
    coeffs = [yi / total for yi in y]
    return None, coeffs


def feasible_functional(strict_points, weak_points):
    """chi with chi . s >= 1 on strict_points and chi . v >= 0 on weak_points.

    Returns (chi, None) on success.  On failure returns (None, (ys, yw)):
    nonnegative multipliers with sum ys_i s_i + sum yw_j v_j = 0 and
    sum ys_i > 0, certifying that no such functional exists.
    """
    spts = [[as_fraction(v) for v in p] for p in strict_points]
    wpts = [[as_fraction(v) for v in p] for p in weak_points]
    if not spts and not wpts:
        raise ValueError("no points")
    d = len((spts + wpts)[0])
    ks, kw = len(spts), len(wpts)
    # chi = u - v, u, v >= 0; per point a surplus variable
    ncols = 2 * d + ks + kw
    A = []
    for i, p in enumerate(spts + wpts):
        row = list(p) + [-x for x in p] + [
            Fraction(-1) if j == i else Fraction(0) for j in range(ks + kw)]
        A.append(row)
    b = [Fraction(1)] * ks + [Fraction(0)] * kw
    res = solve_standard([Fraction(0)] * ncols, A, b)
    if res.status != INFEASIBLE:
        x = res.x
        chi = [x[i] - x[d + i] for i in range(d)]
        return chi, None
    y = res.farkas
    return None, (y[:ks], y[ks:])


def fourier_motzkin(A, b):
    """Feasibility of A x <= b over Q^d with witness, by variable elimination.

    Exponential in the dimension; use only as a low-dimensional cross-check.
    Returns (True, x) with A x <= b exactly, or (False, None).
    """
    if not A:
        return True, []
    n = len(A[0])
    sys_rows = [[as_fraction(v) for v in row] + [as_fraction(bi)]
                for row, bi in zip(A, b)]
    stack = []
    for k in range(n - 1, -1, -1):
        lows, ups, rest = [], [], []
        for row in sys_rows:
            a = row[k]
            if a > 0:
                ups.append(row)
            elif a < 0:
                lows.append(row)
            else:
                rest.append(row)
        new_rows = list(rest)
        for u in ups:
            au = u[k]
            for low in lows:
                al = low[k]
                comb = [(-al) * uv + au * lv for uv, lv in zip(u, low)]
                new_rows.append(comb)
        stack.append((k, lows, ups))
        sys_rows = new_rows
        for row in sys_rows:
            if all(v == 0 for v in row[:n]) and row[-1] < 0:
                return False, None
    for row in sys_rows:
        if row[-1] < 0:
            return False, None
    x = [Fraction(0)] * n
    for k, lows, ups in reversed(stack):
        lo = hi = None
        for row in lows:
            val = (row[-1] - sum(row[j] * x[j] for j in range(n) if j != k)) / row[k]
            lo = val if lo is None else max(lo, val)
        for row in ups:
            val = (row[-1] - sum(row[j] * x[j] for j in range(n) if j != k)) / row[k]
            hi = val if hi is None else min(hi, val)
        if lo is None and hi is None:
            x[k] = Fraction(0)
        elif lo is None:
            x[k] = min(Fraction(0), hi)
        elif hi is None:
            x[k] = max(Fraction(0), lo)
        else:
            x[k] = (lo + hi) / 2
    return True, x
