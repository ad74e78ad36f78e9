"""Small exact linear algebra over the rationals (row reduction only)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def independent_subset(vectors: Sequence[Sequence[Fraction]]) -> list[int]:
    """Indices of a maximal linearly independent subset, greedy in input order."""
    echelon: list[tuple[int, list[Fraction]]] = []  # (pivot position, reduced row)
    chosen: list[int] = []
    for idx, vec in enumerate(vectors):
        v = [Fraction(a) for a in vec]
        for piv, row in echelon:
            if v[piv]:
                f = v[piv] / row[piv]
                v = [a - f * b for a, b in zip(v, row)]
        piv = next((k for k, a in enumerate(v) if a), None)
        if piv is not None:
            echelon.append((piv, v))
            chosen.append(idx)
    return chosen


def rank(vectors: Sequence[Sequence[Fraction]]) -> int:
    return len(independent_subset(vectors))


def solve(matrix: Sequence[Sequence[Fraction]],
          rhs: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Solve ``M X = R`` for square nonsingular ``M``; ``R`` given column-major.

    Returns the solution columns in the same layout as ``rhs``.
    """
    n = len(matrix)
    k = len(rhs)
    aug = [[Fraction(a) for a in matrix[i]] + [Fraction(rhs[c][i]) for c in range(k)]
           for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [a / p for a in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [[aug[i][n + c] for i in range(n)] for c in range(k)]
