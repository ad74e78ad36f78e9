"""Exact rational linear programming with checkable certificates.

Programs are always stated as ``maximize c.x`` subject to sparse rows
``a_i.x (<=, =, >=) b_i`` with each variable either non-negative or free.
The solver is a two-phase tableau simplex over :class:`fractions.Fraction`
with Bland's rule, so it terminates and returns the same vectors for equal
inputs.  Every outcome carries a certificate that :func:`verify_certificate`
checks from scratch:

* ``Optimal``: primal ``x`` and dual ``y`` with ``c.x == b.y``.
* ``Infeasible``: a Farkas vector ``y`` with ``y^T A`` sign-compatible with
  the variable bounds and ``b.y < 0``.
* ``Unbounded``: a feasible point and a recession ray with ``c.r > 0``.

Dual sign convention (matching ``min b.y`` as the dual of the max problem):
``y_i >= 0`` on ``<=`` rows, ``y_i <= 0`` on ``>=`` rows, free on ``=`` rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Mapping, Sequence, Union

try:  # gmpy2 rationals are several times faster than Fraction in the pivot loop
    from gmpy2 import mpq as _num
except ImportError:  # pragma: no cover
    _num = Fraction

LE, EQ, GE = "<=", "=", ">="
SENSES = (LE, EQ, GE)

Number = Union[int, Fraction]


class MalformedProgram(ValueError):
    """Raised when a program's dimensions or senses are inconsistent."""


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    # gmpy2.mpq and anything else exposing numerator/denominator
    return Fraction(int(v.numerator), int(v.denominator))


@dataclass(frozen=True)
class LinearProgram:
    objective: tuple[Fraction, ...]
    rows: tuple[Mapping[int, Fraction], ...]
    senses: tuple[str, ...]
    rhs: tuple[Fraction, ...]
    free: frozenset[int] = frozenset()
    var_labels: tuple[Hashable, ...] | None = None
    row_labels: tuple[Hashable, ...] | None = None

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def validate(self) -> None:
        n = self.n_vars
        if not (len(self.rows) == len(self.senses) == len(self.rhs)):
            raise MalformedProgram("rows, senses and rhs differ in length")
        for i, (row, sense) in enumerate(zip(self.rows, self.senses)):
            if sense not in SENSES:
                raise MalformedProgram(f"row {i}: unknown sense {sense!r}")
            if not any(v != 0 for v in row.values()):
                raise MalformedProgram(f"row {i} has no nonzero coefficient")
            for j in row:
                if not 0 <= j < n:
                    raise MalformedProgram(f"row {i} references variable {j} of {n}")
        for j in self.free:
            if not 0 <= j < n:
                raise MalformedProgram(f"free variable {j} out of range")
        if self.var_labels is not None and len(self.var_labels) != n:
            raise MalformedProgram("var_labels length mismatch")
        if self.row_labels is not None and len(self.row_labels) != len(self.rows):
            raise MalformedProgram("row_labels length mismatch")

    def row_dot(self, i: int, x: Sequence[Fraction]) -> Fraction:
        return sum((a * x[j] for j, a in self.rows[i].items()), Fraction(0))

    def column_dot(self, y: Sequence[Fraction]) -> list[Fraction]:
        """Return ``A^T y``."""
        out = [Fraction(0)] * self.n_vars
        for yi, row in zip(y, self.rows):
            if yi:
                for j, a in row.items():
                    out[j] += yi * a
        return out


class LPBuilder:
    """Incremental construction of a :class:`LinearProgram` by label."""

    def __init__(self) -> None:
        self._var_index: dict[Hashable, int] = {}
        self._var_labels: list[Hashable] = []
        self._objective: list[Fraction] = []
        self._free: set[int] = set()
        self._rows: list[dict[int, Fraction]] = []
        self._senses: list[str] = []
        self._rhs: list[Fraction] = []
        self._row_labels: list[Hashable] = []

    def add_var(self, label: Hashable, objective: Number = 0, free: bool = False) -> int:
        if label in self._var_index:
            raise MalformedProgram(f"duplicate variable {label!r}")
        j = len(self._var_labels)
        self._var_index[label] = j
        self._var_labels.append(label)
        self._objective.append(Fraction(objective))
        if free:
            self._free.add(j)
        return j

    def var(self, label: Hashable) -> int:
        return self._var_index[label]

    def has_var(self, label: Hashable) -> bool:
        return label in self._var_index

    def set_objective(self, label: Hashable, coeff: Number) -> None:
        self._objective[self._var_index[label]] = Fraction(coeff)

    def add_row(self, label: Hashable, coeffs: Mapping[Hashable, Number], sense: str,
                rhs: Number, drop_empty: bool = False) -> bool:
        """Add a row; returns False if it was all-zero and ``drop_empty`` was set."""
        row: dict[int, Fraction] = {}
        for lab, a in coeffs.items():
            a = Fraction(a)
            if a:
                j = self._var_index[lab]
                row[j] = row.get(j, Fraction(0)) + a
                if not row[j]:
                    del row[j]
        if not row:
            if drop_empty:
                return False
            raise MalformedProgram(f"row {label!r} has no nonzero coefficient")
        self._rows.append(row)
        self._senses.append(sense)
        self._rhs.append(Fraction(rhs))
        self._row_labels.append(label)
        return True

    def build(self) -> LinearProgram:
        lp = LinearProgram(
            objective=tuple(self._objective),
            rows=tuple(dict(r) for r in self._rows),
            senses=tuple(self._senses),
            rhs=tuple(self._rhs),
            free=frozenset(self._free),
            var_labels=tuple(self._var_labels),
            row_labels=tuple(self._row_labels),
        )
        lp.validate()
        return lp


@dataclass(frozen=True)
class Optimal:
    value: Fraction
    primal: tuple[Fraction, ...]
    dual: tuple[Fraction, ...]


@dataclass(frozen=True)
class Infeasible:
    farkas: tuple[Fraction, ...]


@dataclass(frozen=True)
class Unbounded:
    point: tuple[Fraction, ...]
    ray: tuple[Fraction, ...]


LPOutcome = Union[Optimal, Infeasible, Unbounded]


# ---------------------------------------------------------------- solver


@dataclass
class _Tableau:
    rows: list[dict[int, object]]
    rhs: list[object]
    basis: list[int]
    ncols: int
    obj: dict[int, object] = field(default_factory=dict)
    obj_value: object = 0

    def pivot(self, r: int, c: int) -> None:
        prow = self.rows[r]
        piv = prow[c]
        if piv != 1:
            inv = 1 / piv
            for k in prow:
                prow[k] = prow[k] * inv
            self.rhs[r] = self.rhs[r] * inv
        prow[c] = _num(1)
        prhs = self.rhs[r]
        items = list(prow.items())
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row.get(c)
            if not f:
                continue
            for k, v in items:
                nv = row.get(k, 0) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            self.rhs[i] = self.rhs[i] - f * prhs
        f = self.obj.get(c)
        if f:
            for k, v in items:
                nv = self.obj.get(k, 0) - f * v
                if nv:
                    self.obj[k] = nv
                else:
                    self.obj.pop(k, None)
            self.obj_value = self.obj_value + f * prhs
        self.basis[r] = c

    def set_objective(self, cost: Mapping[int, object]) -> None:
        """Install reduced costs ``c_j - c_B B^-1 A_j`` for a maximize objective."""
        obj = {k: _num(v) for k, v in cost.items() if v}
        value = _num(0)
        for r, b in enumerate(self.basis):
            cb = cost.get(b, 0)
            if cb:
                for k, v in self.rows[r].items():
                    nv = obj.get(k, 0) - cb * v
                    if nv:
                        obj[k] = nv
                    else:
                        obj.pop(k, None)
                value += cb * self.rhs[r]
        self.obj = obj
        self.obj_value = value

    def run(self, allowed) -> int | None:
        """Bland's-rule iterations; returns an unbounded column or None at optimum."""
        while True:
            entering = None
            for k in sorted(self.obj):
                if self.obj[k] > 0 and allowed(k):
                    entering = k
                    break
            if entering is None:
                return None
            best_r = None
            best_ratio = None
            for i, row in enumerate(self.rows):
                a = row.get(entering)
                if a is not None and a > 0:
                    ratio = self.rhs[i] / a
                    if (best_ratio is None or ratio < best_ratio
                            or (ratio == best_ratio and self.basis[i] < self.basis[best_r])):
                        best_r, best_ratio = i, ratio
            if best_r is None:
                return entering
            self.pivot(best_r, entering)


def solve_lp(lp: LinearProgram) -> LPOutcome:
    """Solve ``lp`` exactly; the outcome carries its certificate."""
    lp.validate()
    n, m = lp.n_vars, lp.n_rows

    # column layout: original vars, negative parts of free vars, slacks, artificials
    neg_col: dict[int, int] = {}
    col = n
    for j in sorted(lp.free):
        neg_col[j] = col
        col += 1
    slack_col: dict[int, int] = {}
    for i, s in enumerate(lp.senses):
        if s != EQ:
            slack_col[i] = col
            col += 1
    first_art = col

    rows: list[dict[int, object]] = []
    rhs: list[object] = []
    signs: list[int] = []
    ident: list[int] = []  # column holding e_i of the standardized system
    basis: list[int] = []
    art_cols: list[int] = []
    for i in range(m):
        sign = -1 if lp.rhs[i] < 0 else 1
        row: dict[int, object] = {}
        for j, a in lp.rows[i].items():
            row[j] = _num(sign * a)
            if j in neg_col:
                row[neg_col[j]] = _num(-sign * a)
        sense = lp.senses[i]
        if sense != EQ:
            row[slack_col[i]] = _num(sign if sense == LE else -sign)
        if sense != EQ and row[slack_col[i]] == 1:
            ident.append(slack_col[i])
        else:
            row[col] = _num(1)
            ident.append(col)
            art_cols.append(col)
            col += 1
        basis.append(ident[-1])
        rows.append(row)
        rhs.append(_num(sign * lp.rhs[i]))
        signs.append(sign)
    ncols = col
    tab = _Tableau(rows=rows, rhs=rhs, basis=basis, ncols=ncols)
    is_art = lambda k: k >= first_art  # noqa: E731

    # phase 1: maximize -sum(artificials)
    phase1 = {k: -1 for k in art_cols}
    if art_cols:
        tab.set_objective(phase1)
        tab.run(lambda k: True)
        if tab.obj_value < 0:
            y_std = [-(tab.obj.get(ident[i], 0)) + phase1.get(ident[i], 0) for i in range(m)]
            farkas = tuple(_frac(signs[i] * y_std[i]) for i in range(m))
            return Infeasible(farkas=farkas)
        # drive zero-level artificials out of the basis where possible
        for r in range(m):
            if is_art(tab.basis[r]):
                for k in sorted(tab.rows[r]):
                    if not is_art(k) and tab.rows[r][k] != 0:
                        tab.pivot(r, k)
                        break

    cost: dict[int, object] = {}
    for j, c in enumerate(lp.objective):
        if c:
            cost[j] = _num(c)
            if j in neg_col:
                cost[neg_col[j]] = _num(-c)
    tab.set_objective(cost)
    unbounded_col = tab.run(lambda k: not is_art(k))

    def primal_from(values: Mapping[int, object]) -> tuple[Fraction, ...]:
        x = []
        for j in range(n):
            v = values.get(j, 0)
            if j in neg_col:
                v = v - values.get(neg_col[j], 0)
            x.append(_frac(_num(v)))
        return tuple(x)

    bfs = {b: tab.rhs[r] for r, b in enumerate(tab.basis)}
    point = primal_from(bfs)
    if unbounded_col is not None:
        direction = {unbounded_col: _num(1)}
        for r, b in enumerate(tab.basis):
            a = tab.rows[r].get(unbounded_col)
            if a:
                direction[b] = -a
        return Unbounded(point=point, ray=primal_from(direction))

    y_std = [-(tab.obj.get(ident[i], 0)) for i in range(m)]
    dual = tuple(_frac(signs[i] * y_std[i]) for i in range(m))
    return Optimal(value=_frac(tab.obj_value), primal=point, dual=dual)


# ---------------------------------------------------------- verification


def _dual_signs_ok(lp: LinearProgram, y: Sequence[Fraction]) -> bool:
    for yi, s in zip(y, lp.senses):
        if s == LE and yi < 0:
            return False
        if s == GE and yi > 0:
            return False
    return True


def _primal_feasible(lp: LinearProgram, x: Sequence[Fraction]) -> bool:
    if len(x) != lp.n_vars:
        return False
    for j, v in enumerate(x):
        if j not in lp.free and v < 0:
            return False
    for i, s in enumerate(lp.senses):
        lhs = lp.row_dot(i, x)
        b = lp.rhs[i]
        if (s == LE and lhs > b) or (s == GE and lhs < b) or (s == EQ and lhs != b):
            return False
    return True


def verify_certificate(lp: LinearProgram, out: LPOutcome) -> bool:
    """Check ``out`` against ``lp`` using only exact algebra on the certificate."""
    try:
        lp.validate()
    except MalformedProgram:
        return False
    if isinstance(out, Optimal):
        x = [Fraction(v) for v in out.primal]
        y = [Fraction(v) for v in out.dual]
        if len(y) != lp.n_rows or not _primal_feasible(lp, x) or not _dual_signs_ok(lp, y):
            return False
        aty = lp.column_dot(y)
        for j, c in enumerate(lp.objective):
            if j in lp.free:
                if aty[j] != c:
                    return False
            elif aty[j] < c:
                return False
        primal_value = sum((c * v for c, v in zip(lp.objective, x)), Fraction(0))
        dual_value = sum((b * v for b, v in zip(lp.rhs, y)), Fraction(0))
        return primal_value == dual_value == out.value
    if isinstance(out, Infeasible):
        y = [Fraction(v) for v in out.farkas]
        if len(y) != lp.n_rows or not _dual_signs_ok(lp, y):
            return False
        aty = lp.column_dot(y)
        for j in range(lp.n_vars):
            if j in lp.free:
                if aty[j] != 0:
                    return False
            elif aty[j] < 0:
                return False
        return sum((b * v for b, v in zip(lp.rhs, y)), Fraction(0)) < 0
    if isinstance(out, Unbounded):
        x = [Fraction(v) for v in out.point]
        r = [Fraction(v) for v in out.ray]
        if len(r) != lp.n_vars or not _primal_feasible(lp, x):
            return False
        for j, v in enumerate(r):
            if j not in lp.free and v < 0:
                return False
        for i, s in enumerate(lp.senses):
            ar = lp.row_dot(i, r)
            if (s == LE and ar > 0) or (s == GE and ar < 0) or (s == EQ and ar != 0):
                return False
        return sum((c * v for c, v in zip(lp.objective, r)), Fraction(0)) > 0
    return False
