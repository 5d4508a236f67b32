"""Small exact linear algebra toolkit over Fraction.

Row-reduction based: rank, nullspace, inverse, determinant, plus an integer
Hermite normal form used for lattice point enumeration. Matrices are lists of
lists of Fraction (or int where noted); nothing here is performance-critical
beyond desk scale.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def _as_frac_rows(rows):
    return [[Fraction(x) for x in row] for row in rows]


def rref(rows, ncols=None):
    """Reduced row echelon form. Returns (matrix, pivot_columns)."""
    m = _as_frac_rows(rows)
    if not m:
        return [], []
    if ncols is None:
        ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
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
    return m, pivots


def rank(rows, ncols=None) -> int:
    _, pivots = rref(rows, ncols)
    return len(pivots)


def nullspace(rows, ncols):
    """Basis of {x : A x = 0}, one vector per free column."""
    m, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][fc]
        basis.append(v)
    return basis


def solve(a_rows, b):
    """One solution of A x = b, or None if inconsistent."""
    n = len(a_rows)
    if n == 0:
        return []
    ncols = len(a_rows[0])
    aug = [list(map(Fraction, row)) + [Fraction(bv)] for row, bv in zip(a_rows, b)]
    m, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = m[r][ncols]
    return x


def det(rows):
    m = _as_frac_rows(rows)
    n = len(m)
    d = Fraction(1)
    for c in range(n):
        pr = None
        for i in range(c, n):
            if m[i][c] != 0:
                pr = i
                break
        if pr is None:
            return Fraction(0)
        if pr != c:
            m[c], m[pr] = m[pr], m[c]
            d = -d
        d *= m[c][c]
        inv = 1 / m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return d


def invert(rows):
    """Inverse matrix, or None if singular."""
    n = len(rows)
    aug = [list(map(Fraction, row)) + [Fraction(1 if i == j else 0) for j in range(n)]
           for i, row in enumerate(rows)]
    m, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)):
        return None
    return [row[n:] for row in m[:n]]


def mat_vec(rows, v):
    return [sum((Fraction(a) * Fraction(x) for a, x in zip(row, v)), Fraction(0))
            for row in rows]


def primitive_integer_vector(v):
    """Scale a rational vector to a primitive integer vector, preserving direction."""
    v = [Fraction(x) for x in v]
    if all(x == 0 for x in v):
        raise ValueError("zero vector has no primitive representative")
    mult = 1
    for x in v:
        mult = mult * x.denominator // gcd(mult, x.denominator)
    ints = [int(x * mult) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return tuple(x // g for x in ints)


def hnf_rows(int_rows):
    """Row-style Hermite normal form of an integer matrix.

    Returns a row-echelon matrix (upper triangular for square nonsingular
    input) with positive pivots, integer row span equal to that of the input,
    and entries above each pivot reduced into [0, pivot).
    """
    m = [list(map(int, r)) for r in int_rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        # clear below with the euclidean algorithm on column c
        for i in range(r + 1, nrows):
            while m[i][c] != 0:
                q = m[r][c] // m[i][c]
                m[r] = [a - q * b for a, b in zip(m[r], m[i])]
                m[r], m[i] = m[i], m[r]
        if m[r][c] < 0:
            m[r] = [-x for x in m[r]]
        for i in range(r):
            q = m[i][c] // m[r][c]
            if q:
                m[i] = [a - q * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == nrows:
            break
    return m
