"""Irreducible components, their equal-or-disjoint paving, and faces.

Components are stored as closed, vertex-listed polytopes in evaluation
coordinates; the component proper is the relative interior.  Every geometric
predicate is one exact LP.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import linalg
from .exactlp import EQ, GE, LPBuilder, Infeasible, Optimal, Unbounded, solve_lp
from .ground import DiscreteMeasure, GeneratorSet, in_convex_hull
from .order import (NotInOrder, NotInOrderError, SupportMatrix, TransportPlan,
                    check_f_order, maximal_support_plan)

Vector = tuple[Fraction, ...]


class PavingError(ValueError):
    pass


class EmptySupport(PavingError):
    pass


class DimensionMismatch(PavingError):
    pass


class PointOutside(PavingError):
    pass


class DichotomyViolation(AssertionError):
    """Two components overlap in their relative interiors without being equal."""


def _strict_weight(points: Sequence[Vector], target: Vector) -> Fraction | None:
    """Largest t with target = sum w_i p_i, sum w = 1, all w_i >= t; None if outside."""
    b = LPBuilder()
    b.add_var("t", 1)
    for k in range(len(points)):
        b.add_var(k)
        b.add_row(("floor", k), {k: 1, "t": -1}, GE, 0)
    b.add_row("sum", {k: 1 for k in range(len(points))}, EQ, 1)
    for c, tc in enumerate(target):
        if not b.add_row(("coord", c), {k: p[c] for k, p in enumerate(points)}, EQ, tc,
                         drop_empty=True) and tc != 0:
            return None
    out = solve_lp(b.build())
    if isinstance(out, Infeasible):
        return None
    assert isinstance(out, Optimal)
    return out.value


@dataclass(frozen=True)
class Polytope:
    vertices: tuple[Vector, ...]
    affine_dim: int

    @property
    def ambient_dim(self) -> int:
        return len(self.vertices[0])

    @classmethod
    def from_points(cls, points: Iterable[Sequence[Fraction]]) -> "Polytope":
        pts: list[Vector] = []
        for p in points:
            p = tuple(Fraction(c) for c in p)
            if p not in pts:
                pts.append(p)
        if not pts:
            raise EmptySupport("polytope of an empty point set")
        verts = [p for k, p in enumerate(pts)
                 if len(pts) == 1 or not in_convex_hull(pts[:k] + pts[k + 1:], p)]
        base = verts[0]
        diffs = [tuple(a - b for a, b in zip(v, base)) for v in verts[1:]]
        return cls(tuple(verts), linalg.rank(diffs))

    def contains(self, point: Sequence[Fraction]) -> bool:
        """Membership in the closed hull."""
        return in_convex_hull(self.vertices, tuple(point))

    def contains_rint(self, point: Sequence[Fraction]) -> bool:
        t = _strict_weight(self.vertices, tuple(point))
        return t is not None and t > 0

    def same_vertices(self, other: "Polytope") -> bool:
        return sorted(self.vertices) == sorted(other.vertices)


def component(support_row: Iterable[str], gs: GeneratorSet) -> Polytope:
    """Closed hull of the evaluation images of one atom's maximal support."""
    row = list(support_row)
    if not row:
        raise EmptySupport("atom has empty support row")
    return Polytope.from_points(gs.phi(y) for y in row)


def _same_ambient(P: Polytope, Q: Polytope) -> None:
    if P.ambient_dim != Q.ambient_dim:
        raise DimensionMismatch(f"ambient dimensions {P.ambient_dim} and {Q.ambient_dim}")


def rint_intersects(P: Polytope, Q: Polytope) -> bool:
    """Do the relative interiors meet?  Maximize a common floor on both weight vectors."""
    _same_ambient(P, Q)
    b = LPBuilder()
    b.add_var("t", 1)
    lam = [("l", i) for i in range(len(P.vertices))]
    mus = [("m", j) for j in range(len(Q.vertices))]
    for v in lam + mus:
        b.add_var(v)
        b.add_row(("floor", v), {v: 1, "t": -1}, GE, 0)
    b.add_row("sum_l", {v: 1 for v in lam}, EQ, 1)
    b.add_row("sum_m", {v: 1 for v in mus}, EQ, 1)
    for c in range(P.ambient_dim):
        coeffs = {v: P.vertices[i][c] for i, v in enumerate(lam)}
        for j, v in enumerate(mus):
            coeffs[v] = -Q.vertices[j][c]
        b.add_row(("coord", c), coeffs, EQ, 0, drop_empty=True)
    out = solve_lp(b.build())
    if isinstance(out, Infeasible):
        return False
    assert isinstance(out, Optimal)
    return out.value > 0


def hull_equal(P: Polytope, Q: Polytope) -> bool:
    _same_ambient(P, Q)
    if P.same_vertices(Q):
        return True
    return all(Q.contains(v) for v in P.vertices) and all(P.contains(w) for w in Q.vertices)


def gleason_part(P: Polytope, point: Sequence[Fraction]) -> Polytope:
    """Minimal face of ``P`` containing ``point``.

    A vertex ``v`` belongs to it iff the ray from ``v`` through ``point``
    continues inside ``P`` past ``point``.
    """
    point = tuple(Fraction(c) for c in point)
    if len(point) != P.ambient_dim:
        raise DimensionMismatch("point and polytope dimensions differ")
    if not P.contains(point):
        raise PointOutside(f"{point} is not in the polytope")
    face = []
    for v in P.vertices:
        if v == point:
            face.append(v)
            continue
        b = LPBuilder()
        b.add_var("eps", 1)
        for k in range(len(P.vertices)):
            b.add_var(k)
        b.add_row("sum", {k: 1 for k in range(len(P.vertices))}, EQ, 1)
        for c in range(P.ambient_dim):
            coeffs = {k: w[c] for k, w in enumerate(P.vertices)}
            coeffs["eps"] = v[c] - point[c]
            b.add_row(("coord", c), coeffs, EQ, point[c], drop_empty=True)
        out = solve_lp(b.build())
        if isinstance(out, Unbounded) or (isinstance(out, Optimal) and out.value > 0):
            face.append(v)
    return Polytope.from_points(face)


def gleason_equal(P: Polytope, Q: Polytope, point: Sequence[Fraction]) -> bool:
    """Whether ``point`` has the same Gleason part in ``P`` and in ``Q``."""
    return hull_equal(gleason_part(P, point), gleason_part(Q, point))


# ------------------------------------------------------------------ paving


@dataclass(frozen=True)
class PavingClass:
    atoms: tuple[str, ...]
    component: Polytope
    support: Mapping[str, tuple[str, ...]]  # per-atom maximal support rows

    @property
    def targets(self) -> tuple[str, ...]:
        seen: list[str] = []
        for row in self.support.values():
            seen.extend(y for y in row if y not in seen)
        return tuple(seen)


@dataclass(frozen=True)
class Paving:
    gs: GeneratorSet
    classes: tuple[PavingClass, ...]
    plan: TransportPlan
    support: SupportMatrix
    delta: Fraction = Fraction(0)

    def class_of(self, atom: str) -> int:
        for k, c in enumerate(self.classes):
            if atom in c.atoms:
                return k
        raise KeyError(atom)

    def component_of(self, atom: str) -> Polytope:
        return self.classes[self.class_of(atom)].component

    def partition(self) -> list[frozenset[str]]:
        return [frozenset(c.atoms) for c in self.classes]


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        a, b = self.find(i), self.find(j)
        if a != b:
            # smaller atom index is the representative
            self.parent[max(a, b)] = min(a, b)


def build_paving(mu: DiscreteMeasure, nu: DiscreteMeasure, gs: GeneratorSet,
                 delta: Fraction = Fraction(0),
                 p: Mapping[str, Fraction] | None = None) -> Paving:
    """Irreducible paving from the maximal support of the transport polytope.

    Raises :class:`DichotomyViolation` if two atoms' components overlap in
    their relative interiors without being equal, or if two final classes do.
    """
    plan, sup = maximal_support_plan(mu, nu, gs, delta, p)
    atoms = list(mu.support)
    comps = [component(sup.row(x), gs) for x in atoms]
    uf = _UnionFind(len(atoms))
    for i in range(len(atoms)):
        for j in range(i + 1, len(atoms)):
            if uf.find(i) == uf.find(j) and comps[i].same_vertices(comps[j]):
                continue
            if comps[i].same_vertices(comps[j]):
                uf.union(i, j)
            elif rint_intersects(comps[i], comps[j]):
                if not hull_equal(comps[i], comps[j]):
                    raise DichotomyViolation(
                        f"components of {atoms[i]!r} and {atoms[j]!r} overlap but differ")
                uf.union(i, j)
    groups: dict[int, list[str]] = {}
    for i, x in enumerate(atoms):
        groups.setdefault(uf.find(i), []).append(x)
    classes = []
    for root in sorted(groups):
        members = groups[root]
        rows = {x: sup.row(x) for x in members}
        union = [y for y in nu.support if any(y in r for r in rows.values())]
        classes.append(PavingClass(tuple(members), component(union, gs), rows))
    for i in range(len(classes)):
        for j in range(i + 1, len(classes)):
            if rint_intersects(classes[i].component, classes[j].component):
                raise DichotomyViolation(f"classes {i} and {j} overlap after merging")
    return Paving(gs, tuple(classes), plan, sup, Fraction(delta))


def dichotomy_holds(paving: Paving) -> bool:
    """Exhaustive re-check: distinct classes rint-disjoint, members hull-equal."""
    for i, ci in enumerate(paving.classes):
        for x, row in ci.support.items():
            if not hull_equal(component(row, paving.gs), ci.component):
                return False
        for cj in paving.classes[i + 1:]:
            if rint_intersects(ci.component, cj.component):
                return False
    return True


@dataclass(frozen=True)
class AtomMembership:
    atom: str
    projection_ok: bool
    rint_ok: bool | None  # only decided when every generator is lineal

    @property
    def passed(self) -> bool:
        return self.projection_ok and self.rint_ok is not False


@dataclass(frozen=True)
class MembershipReport:
    lineal: tuple[str, ...]
    fully_symmetric: bool
    atoms: tuple[AtomMembership, ...]

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.atoms)


def check_b_membership(paving: Paving, mu: DiscreteMeasure,
                       gs: GeneratorSet | None = None) -> MembershipReport:
    """Each atom's lineal coordinates lie in the projection of its closed component.

    When every generator is lineal the atom itself must lie in the relative
    interior of its component.
    """
    gs = gs or paving.gs
    lineal = gs.lineal()
    full = all(gs.lineality_flags)
    results = []
    for x in mu.support:
        cls = paving.classes[paving.class_of(x)]
        targets = cls.targets
        proj = [tuple([Fraction(1)] + [g(y) for g in lineal]) for y in targets]
        here = tuple([Fraction(1)] + [g(x) for g in lineal])
        proj_ok = in_convex_hull(proj, here)
        rint_ok = cls.component.contains_rint(gs.phi(x)) if full else None
        results.append(AtomMembership(x, proj_ok, rint_ok))
    return MembershipReport(tuple(g.id for g in lineal), full, tuple(results))


# ------------------------------------------------------------------- apirc


@dataclass(frozen=True)
class ApircPaving:
    gs: GeneratorSet
    subsets: tuple[tuple[int, ...], ...]
    pavings: tuple[Paving, ...]
    labels: Mapping[str, tuple[int, ...]]
    classes: tuple[tuple[str, ...], ...]
    supp_inclusion: bool

    def contains(self, atom: str, pid: str) -> bool:
        """Is ``pid`` in every closed per-subset component of ``atom``?"""
        for pav in self.pavings:
            if not pav.component_of(atom).contains(pav.gs.phi(pid)):
                return False
        return True

    def partition(self) -> list[frozenset[str]]:
        return [frozenset(c) for c in self.classes]


def _normalize_subset(gs: GeneratorSet, subset: Iterable) -> tuple[int, ...]:
    out = []
    for item in subset:
        k = gs.index_of(item) if isinstance(item, str) else int(item)
        if not 0 <= k < len(gs.generators):
            raise IndexError(f"generator index {k} out of range")
        if k not in out:
            out.append(k)
    if not out:
        raise ValueError("empty generator subset")
    return tuple(out)


def build_apirc(mu: DiscreteMeasure, nu: DiscreteMeasure, gs: GeneratorSet,
                subsets: Sequence[Iterable]) -> ApircPaving:
    """Meet of the pavings for finitely many generator subsets of ``gs``."""
    if isinstance(check_f_order(mu, nu, gs), NotInOrder):
        raise NotInOrderError("measures are not in order for the full generator set")
    norm = tuple(_normalize_subset(gs, z) for z in subsets)
    if not norm:
        raise ValueError("no generator subsets given")
    pavings = tuple(build_paving(mu, nu, gs.subset(z)) for z in norm)
    labels = {x: tuple(pav.class_of(x) for pav in pavings) for x in mu.support}
    groups: dict[tuple[int, ...], list[str]] = {}
    for x in mu.support:
        groups.setdefault(labels[x], []).append(x)
    classes = tuple(tuple(v) for v in groups.values())

    _, full_sup = maximal_support_plan(mu, nu, gs)
    inclusion = True
    cache: dict[tuple[int, int, str], bool] = {}
    for x, y in sorted(full_sup.pairs, key=lambda pr: (mu.support.index(pr[0]),
                                                        nu.support.index(pr[1]))):
        for zi, pav in enumerate(pavings):
            key = (zi, pav.class_of(x), y)
            if key not in cache:
                cache[key] = pav.component_of(x).contains(pav.gs.phi(y))
            inclusion = inclusion and cache[key]
    return ApircPaving(gs, norm, pavings, labels, classes, inclusion)


def refines(finer: Sequence[frozenset], coarser: Sequence[frozenset]) -> bool:
    """Every block of ``finer`` sits inside a block of ``coarser``."""
    return all(any(b <= c for c in coarser) for b in finer)
