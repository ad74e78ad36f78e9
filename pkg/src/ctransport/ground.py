"""Finite ground sets, discrete measures and tabulated generator sets.

The evaluation map sends a point to the values of a fixed basis of
``span(G + {1})`` at that point.  The constant function is always the first
basis element, followed by the generators that add a new direction, in
input order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import linalg
from .exactlp import EQ, LPBuilder, Infeasible, solve_lp


class GroundError(ValueError):
    pass


class DimensionMismatch(GroundError):
    pass


class EmptyGenerators(GroundError):
    pass


class EmptySet(GroundError):
    pass


class InvalidMeasure(GroundError):
    pass


def rational(v) -> Fraction:
    """Parse ``"p/q"`` strings, ints and Fractions; floats are refused."""
    if isinstance(v, bool):
        raise TypeError("bool is not a rational")
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    raise TypeError(f"expected an exact rational, got {type(v).__name__} {v!r}")


def fmt(q: Fraction) -> str:
    """Canonical string form used in every JSON artifact."""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Point:
    id: str
    coords: tuple[Fraction, ...]


@dataclass(frozen=True)
class GroundSet:
    points: tuple[Point, ...]
    _index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index: dict[str, int] = {}
        dims = {len(p.coords) for p in self.points}
        if len(dims) > 1:
            raise DimensionMismatch(f"points of mixed dimension {sorted(dims)}")
        seen = set()
        for k, p in enumerate(self.points):
            if p.id in index:
                raise GroundError(f"duplicate point id {p.id!r}")
            if p.coords in seen:
                raise GroundError(f"point {p.id!r} repeats coordinates {p.coords}")
            seen.add(p.coords)
            index[p.id] = k
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_coords(cls, items: Iterable[tuple[str, Sequence]]) -> "GroundSet":
        return cls(tuple(Point(pid, tuple(rational(c) for c in cs)) for pid, cs in items))

    @classmethod
    def line(cls, xs: Iterable) -> "GroundSet":
        """Points on the real line, labelled by their canonical coordinate string."""
        return cls.from_coords((fmt(rational(x)), (x,)) for x in xs)

    @property
    def dimension(self) -> int:
        return len(self.points[0].coords) if self.points else 0

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.points)

    def index(self, pid: str) -> int:
        try:
            return self._index[pid]
        except KeyError:
            raise GroundError(f"unknown point id {pid!r}") from None

    def coords(self, pid: str) -> tuple[Fraction, ...]:
        return self.points[self.index(pid)].coords

    def __contains__(self, pid) -> bool:
        return pid in self._index

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class DiscreteMeasure:
    masses: Mapping[str, Fraction]

    @classmethod
    def build(cls, ground: GroundSet, masses: Mapping[str, object]) -> "DiscreteMeasure":
        clean: dict[str, Fraction] = {}
        for pid, m in masses.items():
            if pid not in ground:
                raise InvalidMeasure(f"mass on unknown point {pid!r}")
            m = rational(m)
            if m < 0:
                raise InvalidMeasure(f"negative mass at {pid!r}")
            if m:
                clean[pid] = m
        if sum(clean.values(), Fraction(0)) != 1:
            raise InvalidMeasure(f"total mass {sum(clean.values(), Fraction(0))} != 1")
        # ground order, so iteration is deterministic
        ordered = {pid: clean[pid] for pid in ground.ids if pid in clean}
        return cls(ordered)

    @classmethod
    def uniform(cls, ground: GroundSet, ids: Sequence[str]) -> "DiscreteMeasure":
        return cls.build(ground, {pid: Fraction(1, len(ids)) for pid in ids})

    def __getitem__(self, pid: str) -> Fraction:
        return self.masses.get(pid, Fraction(0))

    @property
    def support(self) -> tuple[str, ...]:
        return tuple(self.masses)

    def integrate(self, f: Mapping[str, Fraction]) -> Fraction:
        return sum((m * f[pid] for pid, m in self.masses.items()), Fraction(0))


@dataclass(frozen=True)
class Generator:
    id: str
    values: Mapping[str, Fraction]
    declared_symmetric: bool = False
    provenance: str = "tabulated"

    def __call__(self, pid: str) -> Fraction:
        return self.values[pid]

    def negated(self) -> "Generator":
        neg_id = self.id[1:] if self.id.startswith("-") else "-" + self.id
        return Generator(neg_id, {k: -v for k, v in self.values.items()},
                         self.declared_symmetric, self.provenance)


@dataclass(frozen=True)
class GridPatch:
    """A grid domain inside the ground set: interior and exit-boundary point ids."""

    interior: tuple[str, ...]
    boundary: tuple[str, ...]


def _grid_neighbors(ground: GroundSet, pid: str) -> list[str]:
    x, y = ground.coords(pid)
    by_coord = {p.coords: p.id for p in ground.points}
    out = []
    for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        q = by_coord.get((x + dx, y + dy))
        if q is None:
            raise GroundError(f"grid neighbour of {pid!r} missing from ground set")
        out.append(q)
    return out


def harmonic_measure(ground: GroundSet, patch: GridPatch) -> dict[str, dict[str, Fraction]]:
    """Exit law of simple random walk from every patch point, per boundary vertex.

    ``result[b][p]`` is the probability that the walk started at ``p`` first
    leaves the interior at ``b``; boundary points exit immediately.
    """
    interior = list(patch.interior)
    pos = {pid: k for k, pid in enumerate(interior)}
    bset = set(patch.boundary)
    n = len(interior)
    mat = [[Fraction(0)] * n for _ in range(n)]
    rhs = [[Fraction(0)] * n for _ in patch.boundary]
    bpos = {b: k for k, b in enumerate(patch.boundary)}
    for i, pid in enumerate(interior):
        mat[i][i] = Fraction(4)
        for q in _grid_neighbors(ground, pid):
            if q in pos:
                mat[i][pos[q]] -= 1
            elif q in bset:
                rhs[bpos[q]][i] += 1
            else:
                raise GroundError(f"neighbour {q!r} of interior {pid!r} is not in the patch")
    cols = linalg.solve(mat, rhs) if n else [[] for _ in patch.boundary]
    out: dict[str, dict[str, Fraction]] = {}
    for b, col in zip(patch.boundary, cols):
        vals = {pid: col[i] for i, pid in enumerate(interior)}
        for q in patch.boundary:
            vals[q] = Fraction(int(q == b))
        out[b] = vals
    return out


def _complex_power(x: Fraction, y: Fraction, m: int) -> tuple[Fraction, Fraction]:
    re, im = Fraction(1), Fraction(0)
    for _ in range(m):
        re, im = re * x - im * y, re * y + im * x
    return re, im


def _spec_values(ground: GroundSet, spec: Mapping, grids: Sequence[GridPatch],
                 harmonic_cache: dict) -> tuple[dict[str, Fraction], str]:
    kind = spec.get("kind")
    if kind == "affine":
        coeffs = [rational(c) for c in spec["coeffs"]]
        if len(coeffs) != ground.dimension:
            raise DimensionMismatch(f"affine generator has {len(coeffs)} coefficients, "
                                    f"ground dimension is {ground.dimension}")
        const = rational(spec.get("constant", 0))
        vals = {p.id: const + sum((c * x for c, x in zip(coeffs, p.coords)), Fraction(0))
                for p in ground.points}
        prov = "monotone-affine" if all(c >= 0 for c in coeffs) else "affine"
        return vals, prov
    if kind == "tabulated":
        raw = spec["values"]
        missing = [pid for pid in ground.ids if pid not in raw]
        if missing:
            raise GroundError(f"tabulated generator missing values at {missing[:3]}")
        return {pid: rational(raw[pid]) for pid in ground.ids}, "tabulated"
    if kind == "harmonic2d":
        if ground.dimension != 2:
            raise DimensionMismatch("harmonic2d generators need planar points")
        m, part = int(spec["m"]), spec["part"]
        if part not in ("re", "im"):
            raise GroundError(f"harmonic2d part must be 're' or 'im', got {part!r}")
        vals = {}
        for p in ground.points:
            re, im = _complex_power(p.coords[0], p.coords[1], m)
            vals[p.id] = re if part == "re" else im
        return vals, f"harmonic2d({m},{part})"
    if kind == "grid_harmonic":
        if ground.dimension != 2:
            raise DimensionMismatch("grid_harmonic generators need planar points")
        b = spec["boundary"]
        if "grid" in spec:
            k = int(spec["grid"])
            patch = grids[k] if 0 <= k < len(grids) and b in grids[k].boundary else None
        else:
            patch = next((g for g in grids if b in g.boundary), None)
        if patch is None:
            raise GroundError(f"boundary vertex {b!r} belongs to no grid patch")
        if id(patch) not in harmonic_cache:
            harmonic_cache[id(patch)] = harmonic_measure(ground, patch)
        ext = harmonic_cache[id(patch)][b]
        return {pid: ext.get(pid, Fraction(0)) for pid in ground.ids}, f"grid-harmonic({b})"
    raise GroundError(f"unknown generator kind {kind!r}")


@dataclass(frozen=True)
class GeneratorSet:
    ground: GroundSet
    generators: tuple[Generator, ...]
    basis_labels: tuple[str, ...]
    basis_vectors: tuple[tuple[Fraction, ...], ...]  # each over ground order
    lineality_flags: tuple[bool, ...]
    separates: bool

    @property
    def dim(self) -> int:
        return len(self.basis_labels)

    def phi(self, pid: str) -> tuple[Fraction, ...]:
        k = self.ground.index(pid)
        return tuple(v[k] for v in self.basis_vectors)

    def lineal(self) -> tuple[Generator, ...]:
        return tuple(g for g, f in zip(self.generators, self.lineality_flags) if f)

    def index_of(self, gid: str) -> int:
        for k, g in enumerate(self.generators):
            if g.id == gid:
                return k
        raise KeyError(gid)

    def subset(self, indices: Iterable[int]) -> "GeneratorSet":
        return from_generators(self.ground, [self.generators[k] for k in indices])


def _lineality_flags(ground: GroundSet, gens: Sequence[Generator]) -> tuple[bool, ...]:
    flags = []
    for k, g in enumerate(gens):
        # -g = sum c_i g_i + c0, c_i >= 0, c0 free
        b = LPBuilder()
        for i in range(len(gens)):
            b.add_var(("c", i))
        b.add_var("c0", free=True)
        for pid in ground.ids:
            coeffs = {("c", i): gens[i].values[pid] for i in range(len(gens))}
            coeffs["c0"] = 1
            b.add_row(pid, coeffs, EQ, -g.values[pid])
        flags.append(not isinstance(solve_lp(b.build()), Infeasible))
    return tuple(flags)


def from_generators(ground: GroundSet, gens: Sequence[Generator]) -> GeneratorSet:
    """Assemble basis, lineality flags and the separation report."""
    if not gens:
        raise EmptyGenerators("generator set is empty")
    ids = [g.id for g in gens]
    if len(set(ids)) != len(ids):
        raise GroundError(f"duplicate generator ids in {ids}")
    const = tuple(Fraction(1) for _ in ground.ids)
    candidates = [const] + [tuple(g.values[pid] for pid in ground.ids) for g in gens]
    chosen = linalg.independent_subset(candidates)
    labels = tuple("1" if k == 0 else gens[k - 1].id for k in chosen)
    vectors = tuple(candidates[k] for k in chosen)
    rows = {tuple(v[i] for v in vectors) for i in range(len(ground))}
    return GeneratorSet(
        ground=ground,
        generators=tuple(gens),
        basis_labels=labels,
        basis_vectors=vectors,
        lineality_flags=_lineality_flags(ground, gens),
        separates=len(rows) == len(ground),
    )


def build_generator_set(ground: GroundSet, specs: Sequence[Mapping],
                        grids: Sequence[GridPatch] = ()) -> GeneratorSet:
    """Evaluate generator specs on ``ground`` and derive the induced structure.

    A spec with ``"symmetric": true`` contributes both ``g`` and ``-g``.
    """
    if not specs:
        raise EmptyGenerators("no generator specs given")
    gens: list[Generator] = []
    cache: dict = {}
    for k, spec in enumerate(specs):
        vals, prov = _spec_values(ground, spec, grids, cache)
        sym = bool(spec.get("symmetric", False))
        g = Generator(str(spec.get("id", f"g{k}")), vals, sym, prov)
        gens.append(g)
        if sym:
            gens.append(g.negated())
    return from_generators(ground, gens)


@dataclass(frozen=True)
class EvaluationMatrix:
    ids: tuple[str, ...]
    labels: tuple[str, ...]
    rows: Mapping[str, tuple[Fraction, ...]]

    @property
    def injective(self) -> bool:
        return len(set(self.rows.values())) == len(self.ids)

    def __getitem__(self, pid: str) -> tuple[Fraction, ...]:
        return self.rows[pid]


def evaluation_matrix(gs: GeneratorSet, ground: GroundSet | None = None) -> EvaluationMatrix:
    ground = ground or gs.ground
    return EvaluationMatrix(ground.ids, gs.basis_labels, {pid: gs.phi(pid) for pid in ground.ids})


def weight(ground: GroundSet, kind: str = "one") -> dict[str, Fraction]:
    """Growth weight p: constant one, or one plus the max-norm of the coordinates."""
    if kind == "one":
        return {pid: Fraction(1) for pid in ground.ids}
    if kind == "one_plus_maxnorm":
        return {p.id: 1 + max((abs(c) for c in p.coords), default=Fraction(0))
                for p in ground.points}
    raise GroundError(f"unknown weight {kind!r}")


def growth_norm(g: Generator | Mapping[str, Fraction], p: Mapping[str, Fraction]) -> Fraction:
    """``max |g| / p`` over the ground points."""
    values = g.values if isinstance(g, Generator) else g
    return max((abs(values[pid]) / p[pid] for pid in p), default=Fraction(0))


def in_convex_hull(points: Sequence[Sequence[Fraction]], target: Sequence[Fraction]) -> bool:
    """Exact LP test: is ``target`` a convex combination of ``points``?"""
    if not points:
        raise EmptySet("hull of an empty set")
    b = LPBuilder()
    for k in range(len(points)):
        b.add_var(k)
    b.add_row("sum", {k: 1 for k in range(len(points))}, EQ, 1)
    for c, t in enumerate(target):
        added = b.add_row(("coord", c), {k: p[c] for k, p in enumerate(points)}, EQ, t,
                          drop_empty=True)
        if not added and t != 0:
            return False
    return not isinstance(solve_lp(b.build()), Infeasible)


def f_convex_hull_membership(S: Iterable[str], omega: str, gs: GeneratorSet) -> bool:
    """Whether ``omega`` lies in the closed F-convex hull of ``S``."""
    S = list(S)
    if not S:
        raise EmptySet("membership test against an empty set")
    return in_convex_hull([gs.phi(s) for s in S], gs.phi(omega))


@dataclass(frozen=True)
class Instance:
    """Everything read from one instance file."""

    ground: GroundSet
    mu: DiscreteMeasure
    nu: DiscreteMeasure
    generator_specs: tuple[Mapping, ...]
    weight: str = "one"
    grids: tuple[GridPatch, ...] = ()
    delta: Fraction | None = None

    def generator_set(self) -> GeneratorSet:
        return build_generator_set(self.ground, self.generator_specs, self.grids)

    def weights(self) -> dict[str, Fraction]:
        return weight(self.ground, self.weight)
