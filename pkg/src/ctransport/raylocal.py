"""Kantorovich potentials on finite metric spaces and their transport rays.

A transport ray is read discretely as a maximal clique of the tightness
relation ``|v(a) - v(b)| = d(a, b)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Mapping, Sequence

from .exactlp import EQ, LE, LPBuilder, Optimal, solve_lp
from .ground import GroundSet, rational


class MetricError(ValueError):
    pass


class MassMismatch(MetricError):
    pass


class NotLipschitz(MetricError):
    pass


def _masses(m) -> dict[str, Fraction]:
    raw = m.masses if hasattr(m, "masses") else m
    return {pid: rational(v) for pid, v in raw.items() if rational(v) != 0}


def _exact_sqrt(q: Fraction) -> Fraction | None:
    n, d = isqrt(q.numerator), isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return None


@dataclass(frozen=True)
class MetricInstance:
    ground: GroundSet
    distance: tuple[tuple[Fraction, ...], ...]  # ground order
    mu: Mapping[str, Fraction]
    nu: Mapping[str, Fraction]

    def __post_init__(self):
        n = len(self.ground)
        D = self.distance
        if len(D) != n or any(len(r) != n for r in D):
            raise MetricError("metric matrix does not match the ground set")
        for i in range(n):
            if D[i][i] != 0:
                raise MetricError("metric has a nonzero diagonal entry")
            for j in range(n):
                if D[i][j] != D[j][i]:
                    raise MetricError("metric is not symmetric")
                if i != j and D[i][j] <= 0:
                    raise MetricError("metric does not separate points")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if D[i][k] > D[i][j] + D[j][k]:
                        raise MetricError("metric violates the triangle inequality")
        for m in (self.mu, self.nu):
            for pid, v in m.items():
                if pid not in self.ground:
                    raise MetricError(f"mass on unknown point {pid!r}")
                if v < 0:
                    raise MetricError(f"negative mass at {pid!r}")

    @classmethod
    def build(cls, ground: GroundSet, metric, mu, nu) -> "MetricInstance":
        """``metric`` is a matrix, ``"euclidean"`` or ``"l1"``."""
        pts = ground.points
        if metric == "l1":
            D = [[sum((abs(a - b) for a, b in zip(p.coords, q.coords)), Fraction(0))
                  for q in pts] for p in pts]
        elif metric == "euclidean":
            D = []
            for p in pts:
                row = []
                for q in pts:
                    sq = sum(((a - b) ** 2 for a, b in zip(p.coords, q.coords)), Fraction(0))
                    r = _exact_sqrt(sq)
                    if r is None:
                        raise MetricError(f"distance {p.id}-{q.id} is irrational; use l1")
                    row.append(r)
                D.append(row)
        else:
            D = [[rational(v) for v in row] for row in metric]
        return cls(ground, tuple(tuple(r) for r in D), _masses(mu), _masses(nu))

    def d(self, a: str, b: str) -> Fraction:
        return self.distance[self.ground.index(a)][self.ground.index(b)]

    def check_masses(self) -> None:
        tm, tn = sum(self.mu.values(), Fraction(0)), sum(self.nu.values(), Fraction(0))
        if tm != tn:
            raise MassMismatch(f"total masses differ: {tm} vs {tn}")


@dataclass(frozen=True)
class Potential:
    values: Mapping[str, Fraction]

    def __getitem__(self, pid: str) -> Fraction:
        return self.values[pid]


def kantorovich_potential(inst: MetricInstance) -> tuple[Potential, Fraction]:
    """Maximize ``sum v d(nu - mu)`` over 1-Lipschitz ``v``, pinned to 0 at the first point."""
    inst.check_masses()
    ids = inst.ground.ids
    b = LPBuilder()
    for a in ids:
        b.add_var(a, inst.nu.get(a, 0) - inst.mu.get(a, 0), free=True)
    b.add_row("pin", {ids[0]: 1}, EQ, 0)
    for a in ids:
        for c in ids:
            if a != c:
                b.add_row((a, c), {c: 1, a: -1}, LE, inst.d(a, c))
    lp = b.build()
    out = solve_lp(lp)
    assert isinstance(out, Optimal)
    return Potential(dict(zip(ids, out.primal))), out.value


def w1_primal(inst: MetricInstance) -> tuple[dict[tuple[str, str], Fraction], Fraction]:
    """Minimum-cost coupling of ``mu`` and ``nu`` for the metric cost."""
    inst.check_masses()
    X = [a for a in inst.ground.ids if a in inst.mu]
    Y = [a for a in inst.ground.ids if a in inst.nu]
    b = LPBuilder()
    for x in X:
        for y in Y:
            b.add_var((x, y), -inst.d(x, y))
    for x in X:
        b.add_row(("row", x), {(x, y): 1 for y in Y}, EQ, inst.mu[x])
    for y in Y:
        b.add_row(("col", y), {(x, y): 1 for x in X}, EQ, inst.nu[y])
    lp = b.build()
    out = solve_lp(lp)
    assert isinstance(out, Optimal)
    plan = {lab: v for lab, v in zip(lp.var_labels, out.primal) if v}
    return plan, -out.value


def is_lipschitz(inst: MetricInstance, v: Potential) -> bool:
    ids = inst.ground.ids
    return all(abs(v[a] - v[c]) <= inst.d(a, c) for a in ids for c in ids)


def tightness_graph(inst: MetricInstance, v: Potential) -> dict[str, set[str]]:
    ids = inst.ground.ids
    return {a: {c for c in ids if c != a and abs(v[a] - v[c]) == inst.d(a, c)} for a in ids}


def maximal_cliques(adj: Mapping[str, set[str]], order: Sequence[str]) -> list[tuple[str, ...]]:
    """Bron-Kerbosch with pivoting; cliques listed by their ordered member tuples."""
    rank = {v: k for k, v in enumerate(order)}
    found: list[tuple[str, ...]] = []

    def expand(R: list[str], P: set[str], X: set[str]) -> None:
        if not P and not X:
            found.append(tuple(sorted(R, key=rank.__getitem__)))
            return
        pivot = max(sorted(P | X, key=rank.__getitem__), key=lambda u: len(adj[u] & P))
        for v in sorted(P - adj[pivot], key=rank.__getitem__):
            expand(R + [v], P & adj[v], X & adj[v])
            P = P - {v}
            X = X | {v}

    expand([], set(order), set())
    return sorted(found, key=lambda c: [rank[v] for v in c])


@dataclass(frozen=True)
class RayDecomposition:
    rays: tuple[tuple[str, ...], ...]
    branch_points: tuple[str, ...]


def transport_rays(inst: MetricInstance, v: Potential) -> RayDecomposition:
    if not is_lipschitz(inst, v):
        raise NotLipschitz("potential is not 1-Lipschitz for this metric")
    ids = inst.ground.ids
    rays = maximal_cliques(tightness_graph(inst, v), ids)
    count = {a: sum(a in r for r in rays) for a in ids}
    return RayDecomposition(tuple(rays), tuple(a for a in ids if count[a] >= 2))


@dataclass(frozen=True)
class RayBalance:
    differences: tuple[Fraction, ...]  # mu(R) - nu(R) per ray
    branch_points: tuple[str, ...]

    @property
    def asserted(self) -> bool:
        return not self.branch_points

    @property
    def balanced(self) -> bool | None:
        if not self.asserted:
            return None
        return all(d == 0 for d in self.differences)


def ray_mass_balance(inst: MetricInstance, rays: RayDecomposition) -> RayBalance:
    diffs = tuple(
        sum((inst.mu.get(a, Fraction(0)) - inst.nu.get(a, Fraction(0)) for a in r), Fraction(0))
        for r in rays.rays
    )
    return RayBalance(diffs, rays.branch_points)
