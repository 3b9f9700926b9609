"""Exact linear algebra over the integers and rationals (fraction-free)."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence


def _primitive(row: list) -> list:
    g = 0
    for a in row:
        g = gcd(g, a)
    if g > 1:
        row = [a // g for a in row]
    return row


def integer_row(values: Sequence) -> list:
    """Scale a rational row to a primitive integer row (same span)."""
    fr = [Fraction(v) for v in values]
    den = lcm(*(f.denominator for f in fr)) if fr else 1
    return _primitive([int(f * den) for f in fr])


class IncrementalEchelon:
    """
    Row echelon form maintained one row at a time, integer entries only.

    ``add(row)`` reduces the row against the current basis by integer
    cross-multiplication and keeps it iff it raises the rank.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: list[list] = []
        self.pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, row: Sequence) -> list:
        r = integer_row(row)
        for basis, p in zip(self.rows, self.pivots):
            if r[p]:
                a, b = basis[p], r[p]
                r = _primitive([a * x - b * y for x, y in zip(r, basis)])
        return r

    def add(self, row: Sequence) -> bool:
        r = self.reduce(row)
        piv = next((j for j, a in enumerate(r) if a), None)
        if piv is None:
            return False
        self.rows.append(r)
        self.pivots.append(piv)
        return True


def rank(matrix: Sequence[Sequence]) -> int:
    if not matrix:
        return 0
    ech = IncrementalEchelon(len(matrix[0]))
    for row in matrix:
        ech.add(row)
    return ech.rank


def independent_rows(matrix: Sequence[Sequence]) -> list[int]:
    """Indices of the first maximal set of linearly independent rows, in order."""
    if not matrix:
        return []
    ech = IncrementalEchelon(len(matrix[0]))
    return [i for i, row in enumerate(matrix) if ech.add(row)]


class SingularMatrixError(ArithmeticError):
    pass


def bareiss_solve(matrix: Sequence[Sequence[int]], rhs: Sequence) -> tuple[list[Fraction], list[int]]:
    """
    Solve a square system exactly with Bareiss fraction-free elimination.

    ``matrix`` has integer entries; ``rhs`` may be rational (it is scaled to
    integers first). Returns the solution and the sequence of Bareiss pivots;
    the last pivot is +-det(matrix).
    """
    n = len(matrix)
    fr = [Fraction(v) for v in rhs]
    den = lcm(*(f.denominator for f in fr)) if fr else 1
    a = [list(map(int, matrix[i])) + [int(fr[i] * den)] for i in range(n)]
    prev = 1
    pivots = []
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k]), None)
        if p is None:
            raise SingularMatrixError(f"matrix is singular (column {k})")
        if p != k:
            a[k], a[p] = a[p], a[k]
        piv = a[k][k]
        pivots.append(piv)
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n + 1):
                row_i[j] = (piv * row_i[j] - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = piv
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = Fraction(a[i][n])
        for j in range(i + 1, n):
            if a[i][j]:
                s -= a[i][j] * x[j]
        x[i] = s / a[i][i]
    return [v / den for v in x], pivots
