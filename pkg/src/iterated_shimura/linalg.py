"""Exact linear algebra over Q on lists of Fractions (row reduction)."""

from __future__ import annotations

from fractions import Fraction


def _mat(rows):
    return [[Fraction(x) for x in r] for r in rows]


def rref(rows):
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    m = _mat(rows)
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def transpose(rows):
    return [list(col) for col in zip(*rows)]


def nullspace(rows, ncols=None):
    """Basis of {x : A x = 0}."""
    if not rows:
        n = ncols or 0
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    ncols = len(rows[0])
    R, piv = rref(rows)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(R, piv):
            x[p] = -row[f]
        basis.append(x)
    return basis


def solve(rows, rhs):
    """One exact solution of A x = b (free variables zero), or None if inconsistent."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    ncols = len(rows[0]) if rows else 0
    R, piv = rref(aug)
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(R, piv):
        x[p] = row[-1]
    return x


class Subspace:
    """Row span of a set of vectors, kept in reduced echelon form for exact reduction mod the span."""

    def __init__(self, vectors, dim):
        self.dim = dim
        self.basis, self.pivots = rref(vectors) if vectors else ([], [])

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, v):
        """Canonical representative of v modulo the span (zero at pivot positions)."""
        v = [Fraction(x) for x in v]
        for row, p in zip(self.basis, self.pivots):
            if v[p] != 0:
                f = v[p]
                v = [x - f * y for x, y in zip(v, row)]
        return v

    def contains(self, v) -> bool:
        return not any(self.reduce(v))

    def complement_positions(self):
        return [i for i in range(self.dim) if i not in self.pivots]

    def coordinates(self, v):
        """Coordinates of v in the quotient, indexed by complement_positions()."""
        r = self.reduce(v)
        return [r[i] for i in self.complement_positions()]
