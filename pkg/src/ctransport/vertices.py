"""Exhaustive exact vertex enumeration for small bounded LP feasible regions.

Used as an independent check on support maximality.  The feasible region is
put in standard form, the right-hand side is perturbed lexicographically by
the columns of a starting basis (which makes the polytope simple), and every
lexicographically feasible basis is reached by a graph search over single
pivots.  Each such basis projects onto a vertex; every vertex arises this way.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from . import linalg
from .exactlp import EQ, GE, LE, Infeasible, LinearProgram, Optimal, solve_lp


class EnumerationError(RuntimeError):
    pass


def _standard_form(lp: LinearProgram) -> tuple[list[list[Fraction]], list[Fraction], int]:
    if lp.free:
        raise EnumerationError("free variables are not supported")
    n = lp.n_vars
    m = lp.n_rows
    slack_rows = [i for i, s in enumerate(lp.senses) if s != EQ]
    width = n + len(slack_rows)
    A, b = [], []
    for i in range(m):
        row = [Fraction(0)] * width
        for j, v in lp.rows[i].items():
            row[j] = Fraction(v)
        if lp.senses[i] == GE:
            row[n + slack_rows.index(i)] = Fraction(-1)
        elif lp.senses[i] == LE:
            row[n + slack_rows.index(i)] = Fraction(1)
        A.append(row)
        b.append(Fraction(lp.rhs[i]))
    keep = linalg.independent_subset(A)
    return [A[i] for i in keep], [b[i] for i in keep], n


def _tableau(A, b, P, basis) -> list[list[Fraction]]:
    """Rows of ``B^-1 [A | b | P]``."""
    T = [list(A[i]) + [b[i]] + list(P[i]) for i in range(len(A))]
    for r, c in enumerate(basis):
        piv = next((k for k in range(r, len(T)) if T[k][c]), None)
        if piv is None:
            raise EnumerationError("basis columns are dependent")
        T[r], T[piv] = T[piv], T[r]
        _pivot(T, r, c)
    return T


def _pivot(T: list[list[Fraction]], r: int, c: int) -> None:
    p = T[r][c]
    T[r] = [v / p for v in T[r]]
    for k in range(len(T)):
        if k != r and T[k][c]:
            f = T[k][c]
            T[k] = [a - f * bb for a, bb in zip(T[k], T[r])]


def enumerate_vertices(lp: LinearProgram, limit: int = 200000) -> list[tuple[Fraction, ...]]:
    """All vertices of ``{x >= 0 : rows of lp}``, sorted; ``[]`` if infeasible."""
    start = solve_lp(LinearProgram(tuple(Fraction(0) for _ in lp.objective), lp.rows, lp.senses,
                                   lp.rhs, lp.free, lp.var_labels, lp.row_labels))
    if isinstance(start, Infeasible):
        return []
    assert isinstance(start, Optimal)
    A, b, n = _standard_form(lp)
    m, width = len(A), len(A[0]) if A else n
    full = _complete_point(A, b, start.primal, n)
    support = [j for j, v in enumerate(full) if v]
    cols = [[A[i][j] for i in range(m)] for j in range(width)]
    order = support + [j for j in range(width) if j not in support]
    chosen = [order[k] for k in linalg.independent_subset([cols[j] for j in order])]
    if not set(support) <= set(chosen) or len(chosen) != m:
        raise EnumerationError("starting point is not a basic solution")
    P = [[A[i][j] for j in chosen] for i in range(m)]
    basis0 = list(chosen)
    T0 = _tableau(A, b, P, basis0)
    seen = {frozenset(basis0)}
    stack = [(basis0, T0)]
    vertices: set[tuple[Fraction, ...]] = set()
    while stack:
        basis, T = stack.pop()
        x = [Fraction(0)] * width
        for r, c in enumerate(basis):
            x[c] = T[r][width]
        if any(v < 0 for v in x):
            raise EnumerationError("lost feasibility during the search")
        vertices.add(tuple(x[:n]))
        in_basis = set(basis)
        for j in range(width):
            if j in in_basis:
                continue
            rows = [r for r in range(m) if T[r][j] > 0]
            if not rows:
                continue
            leave = min(rows, key=lambda r: [v / T[r][j] for v in T[r][width:]])
            nb = list(basis)
            nb[leave] = j
            key = frozenset(nb)
            if key in seen:
                continue
            seen.add(key)
            if len(seen) > limit:
                raise EnumerationError("too many bases")
            T2 = [list(row) for row in T]
            _pivot(T2, leave, j)
            stack.append((nb, T2))
    return sorted(vertices)


def _complete_point(A, b, x: Sequence[Fraction], n: int) -> list[Fraction]:
    """Extend ``x`` with the slack values determined by the standard-form rows."""
    width = len(A[0])
    full = list(x) + [Fraction(0)] * (width - n)
    for i, row in enumerate(A):
        slack = [j for j in range(n, width) if row[j]]
        act = sum((row[j] * full[j] for j in range(n)), Fraction(0))
        if slack:
            (j,) = slack
            full[j] = (b[i] - act) / row[j]
    return full
