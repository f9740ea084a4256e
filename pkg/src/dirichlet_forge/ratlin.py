"""Exact rational linear algebra on tuples of Fractions.

Small dense routines (rref, solve, kernel, inverse) — inputs here are
desk-scale matrices coming from cone and character-extension problems.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

Vec = tuple


def vec(xs) -> tuple:
    return tuple(x if isinstance(x, Fraction) else Fraction(x) for x in xs)


def dot(u, v) -> Fraction:
    return sum((a * b for a, b in zip(u, v, strict=True)), Fraction(0))


def vadd(u, v):
    return tuple(a + b for a, b in zip(u, v, strict=True))


def vsub(u, v):
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vscale(c, v):
    c = c if isinstance(c, Fraction) else Fraction(c)
    return tuple(c * a for a in v)


def is_zero_vec(v) -> bool:
    return all(a == 0 for a in v)


def rref(rows):
    """Reduced row echelon form.  Returns (nonzero rows, pivot column list)."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return [tuple(row) for row in m[:r]], pivots


def rank(rows) -> int:
    return len(rref(rows)[0])


def solve(rows, rhs):
    """One exact solution x of (rows) x = rhs, or None if inconsistent.

    Free variables are set to zero.
    """
    if not rows:
        return None
    n = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs, strict=True)]
    red, pivots = rref(aug)
    for row in red:
        if all(a == 0 for a in row[:-1]) and row[-1] != 0:
            return None
    if n in pivots:  # pivot in the rhs column == inconsistent
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = red[i][-1]
    return tuple(x)


def kernel_basis(rows):
    """Basis of the right kernel {x : (rows) x = 0}."""
    if not rows:
        return []
    n = len(rows[0])
    red, pivots = rref(rows)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for i, c in enumerate(pivots):
            x[c] = -red[i][f]
        basis.append(tuple(x))
    return basis


def invert_matrix(rows):
    """Inverse of a square matrix given as rows, or None if singular."""
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise ValueError("square matrix required")
    aug = [list(r) + [Fraction(1) if i == j else Fraction(0) for j in range(n)]
           for i, r in enumerate(rows)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        return None
    return [tuple(red[i][n:]) for i in range(n)]


def independent_subset(vectors):
    """Greedy indices of a maximal Q-linearly independent subset."""
    chosen = []
    kept_rows = []
    r = 0
    for i, v in enumerate(vectors):
        trial = kept_rows + [list(v)]
        if rank(trial) > r:
            kept_rows = trial
            r += 1
            chosen.append(i)
    return chosen


def canonical_ray(v):
    """Scale a nonzero rational vector to coprime integers, direction kept."""
    fr = vec(v)
    if is_zero_vec(fr):
        return fr
    den = 1
    for a in fr:
        den = den * a.denominator // gcd(den, a.denominator)
    ints = [int(a * den) for a in fr]
    g = 0
    for a in ints:
        g = gcd(g, abs(a))
    return tuple(Fraction(a // g) for a in ints)


def canonical_line(v):
    """Like canonical_ray but sign-normalized: first nonzero entry positive."""
    r = canonical_ray(v)
    for a in r:
        if a != 0:
            if a < 0:
                return tuple(-x for x in r)
            break
    return r
