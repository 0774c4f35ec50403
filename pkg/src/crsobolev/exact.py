"""Fraction-free exact linear algebra over the rationals."""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm


def _integer_rows(rows):
    out = []
    for row in rows:
        row = [Fraction(v) for v in row]
        scale = lcm(*(v.denominator for v in row)) if row else 1
        out.append([int(v * scale) for v in row])
    return out


def echelon(rows, ncols=None):
    """Bareiss fraction-free row echelon form.

    Returns ``(M, pivots)`` where ``M`` is an integer matrix in echelon form
    and ``pivots`` lists the pivot column of each nonzero row.
    """
    m = _integer_rows(rows)
    if ncols is None:
        ncols = len(m[0]) if m else 0
    nrows = len(m)
    pivots = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        for i in range(r + 1, nrows):
            f = m[i][c]
            row_i = m[i]
            row_r = m[r]
            for cc in range(c + 1, ncols):
                row_i[cc] = (p * row_i[cc] - f * row_r[cc]) // prev
            row_i[c] = 0
        # columns skipped as free keep zeros below row r, so the division above stays exact
        prev = p
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(rows, ncols=None) -> int:
    return len(echelon(rows, ncols)[1])


def nullspace(rows, ncols):
    """Basis of {v : rows @ v = 0} as primitive integer vectors (lists of ints)."""
    if not rows:
        return [[int(i == f) for i in range(ncols)] for f in range(ncols)]
    m, pivots = echelon(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r in range(len(pivots) - 1, -1, -1):
            pc = pivots[r]
            row = m[r]
            s = sum((row[c] * v[c] for c in range(pc + 1, ncols) if row[c] and v[c]), Fraction(0))
            v[pc] = -s / row[pc]
        scale = lcm(*(x.denominator for x in v))
        ints = [int(x * scale) for x in v]
        g = 0
        for x in ints:
            g = gcd(g, x)
        basis.append([x // g for x in ints])
    return basis
