"""Deterministic instance generators: the classic fixed instances and grid walks."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .ground import (DiscreteMeasure, GridPatch, GroundSet, Instance, InvalidMeasure,
                     fmt, harmonic_measure, rational)


class ScenarioError(ValueError):
    pass


class UnknownScenario(ScenarioError):
    pass


class DisconnectedInterior(ScenarioError):
    pass


class StartOnBoundary(ScenarioError):
    pass


class NoStarts(ScenarioError):
    pass


class NotPlanar(ScenarioError):
    pass


Cell = tuple[int, int]
_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))


def grid_id(cell: Cell) -> str:
    return f"{cell[0]},{cell[1]}"


@dataclass(frozen=True)
class GridDomain:
    """Interior cells of a lattice domain; the boundary is derived."""

    interior: frozenset[Cell]

    def __post_init__(self):
        if not self.interior:
            raise ScenarioError("grid domain has no interior")
        start = min(self.interior)
        seen, stack = {start}, [start]
        while stack:
            x, y = stack.pop()
            for dx, dy in _STEPS:
                c = (x + dx, y + dy)
                if c in self.interior and c not in seen:
                    seen.add(c)
                    stack.append(c)
        if seen != set(self.interior):
            raise DisconnectedInterior("interior is not 4-connected")

    @classmethod
    def from_cells(cls, cells: Iterable[Sequence[int]]) -> "GridDomain":
        return cls(frozenset((int(a), int(b)) for a, b in cells))

    @classmethod
    def rectangle(cls, x0: int, y0: int, width: int, height: int) -> "GridDomain":
        return cls(frozenset((x0 + i, y0 + j) for i in range(width) for j in range(height)))

    @classmethod
    def from_mask(cls, rows: Sequence[str], origin: Cell = (0, 0)) -> "GridDomain":
        """``rows`` top to bottom, ``#`` marks an interior cell."""
        h = len(rows)
        return cls(frozenset((origin[0] + i, origin[1] + h - 1 - j)
                             for j, row in enumerate(rows) for i, ch in enumerate(row) if ch == "#"))

    @property
    def boundary(self) -> tuple[Cell, ...]:
        out = {(x + dx, y + dy) for x, y in self.interior for dx, dy in _STEPS}
        return tuple(sorted(out - self.interior))

    @property
    def width(self) -> int:
        xs = [c[0] for c in self.interior]
        return max(xs) - min(xs) + 1

    @property
    def height(self) -> int:
        ys = [c[1] for c in self.interior]
        return max(ys) - min(ys) + 1


def _affine_specs() -> list[dict]:
    return [
        {"kind": "affine", "id": "x", "coeffs": ["1", "0"], "symmetric": True},
        {"kind": "affine", "id": "y", "coeffs": ["0", "1"], "symmetric": True},
    ]


def gen_grid_harmonic(domains: Sequence[GridDomain],
                      starts: Sequence[tuple[Cell, object]]) -> Instance:
    """Walks started in grid domains and stopped on exit.

    The target law is the exact exit distribution.  Generators are the
    affine pair ``x, y`` (both signs) and one harmonic extension per boundary
    vertex, listed domain by domain.
    """
    if not starts:
        raise NoStarts("no starting points given")
    if not domains:
        raise ScenarioError("no grid domains given")
    cells: set[Cell] = set()
    for dom in domains:
        cells |= dom.interior | set(dom.boundary)
    for k, dom in enumerate(domains):
        for other in domains[k + 1:]:
            if dom.interior & (other.interior | set(other.boundary)) or \
                    other.interior & set(dom.boundary):
                raise ScenarioError("grid domains overlap")
    ground = GroundSet.from_coords((grid_id(c), c) for c in sorted(cells, key=lambda c: (c[1], c[0])))

    mass: dict[str, Fraction] = {}
    for cell, m in starts:
        cell = (int(cell[0]), int(cell[1]))
        homes = [k for k, d in enumerate(domains) if cell in d.interior]
        if len(homes) != 1:
            raise StartOnBoundary(f"start {cell} is not interior to exactly one domain")
        mass[grid_id(cell)] = mass.get(grid_id(cell), Fraction(0)) + rational(m)
    if sum(mass.values(), Fraction(0)) != 1:
        raise InvalidMeasure("start masses must sum to 1")

    patches = tuple(GridPatch(tuple(grid_id(c) for c in sorted(d.interior)),
                              tuple(grid_id(c) for c in d.boundary)) for d in domains)
    exit_law: dict[str, Fraction] = {}
    for k, patch in enumerate(patches):
        h = harmonic_measure(ground, patch)
        here = [s for s in mass if s in patch.interior]
        for b in patch.boundary:
            v = sum((mass[s] * h[b][s] for s in here), Fraction(0))
            if v:
                exit_law[b] = exit_law.get(b, Fraction(0)) + v
    specs = _affine_specs()
    for k, patch in enumerate(patches):
        specs += [{"kind": "grid_harmonic", "id": f"h{k}:{b}", "boundary": b, "grid": k}
                  for b in patch.boundary]
    return Instance(ground, DiscreteMeasure.build(ground, mass),
                    DiscreteMeasure.build(ground, exit_law), tuple(specs), grids=patches)


def l_domain(arm: int = 5) -> GridDomain:
    return GridDomain(frozenset({(x, 0) for x in range(arm + 1)} | {(0, y) for y in range(arm + 1)}))


def single_cell_domain(center: Cell = (3, 3)) -> GridDomain:
    return GridDomain(frozenset({center}))


def two_domain_grid() -> Instance:
    """An L-shaped domain and a one-cell domain lying inside its hull, one walk in each."""
    return gen_grid_harmonic([l_domain(), single_cell_domain()],
                             [((0, 0), Fraction(1, 2)), ((3, 3), Fraction(1, 2))])


def affine_indices(inst: Instance) -> list[int]:
    return [k for k, g in enumerate(inst.generator_set().generators)
            if not g.id.startswith(("h", "-h"))]


def _line_instance(xs, mu, nu, specs, delta=None) -> Instance:
    ground = GroundSet.line(xs)
    return Instance(ground, DiscreteMeasure.build(ground, mu), DiscreteMeasure.build(ground, nu),
                    tuple(specs), delta=None if delta is None else rational(delta))


_X = {"kind": "affine", "id": "x", "coeffs": ["1"]}
_X_SYM = {"kind": "affine", "id": "x", "coeffs": ["1"], "symmetric": True}


def gen_classic(name: str) -> Instance:
    if name == "submartingale_shift":
        return _line_instance([0, 1, Fraction(3, 2), 2], {"0": 1},
                              {"1": Fraction(1, 3), "3/2": Fraction(1, 3), "2": Fraction(1, 3)},
                              [_X])
    if name == "symmetric_split":
        return _line_instance([-1, 0, 1], {"0": 1}, {"-1": Fraction(1, 2), "1": Fraction(1, 2)},
                              [_X_SYM])
    if name in ("two_islands", "relaxed_threshold"):
        q = Fraction(1, 4)
        return _line_instance([-3, -2, -1, 1, 2, 3], {"-2": Fraction(1, 2), "2": Fraction(1, 2)},
                              {"-3": q, "-1": q, "1": q, "3": q}, [_X_SYM],
                              delta=2 if name == "relaxed_threshold" else None)
    if name == "two_domain_grid":
        return two_domain_grid()
    raise UnknownScenario(f"unknown scenario {name!r}")


SCENARIOS = ("submartingale_shift", "symmetric_split", "two_islands", "relaxed_threshold",
             "two_domain_grid")


def gen_harmonic_polynomials(points: Sequence[Sequence], max_degree: int,
                             rounding_denominator: int | None = None) -> list[dict]:
    """Tabulated ``Re z^m`` and ``Im z^m`` for ``m = 1..max_degree``.

    Points are ``(id, (x, y))``.  Coordinates may be floats only when a
    rounding denominator is given; values are then rounded to that grid,
    which can break exact order relations.
    """
    vals: dict[tuple[int, str], dict[str, str]] = {}
    for pid, coords in points:
        if len(coords) != 2:
            raise NotPlanar("harmonic polynomials need planar points")
        if rounding_denominator is None:
            x, y = rational(coords[0]), rational(coords[1])
        else:
            x, y = (Fraction(c).limit_denominator(rounding_denominator) for c in coords)
        re, im = Fraction(1), Fraction(0)
        for m in range(1, max_degree + 1):
            re, im = re * x - im * y, re * y + im * x
            for part, v in (("re", re), ("im", im)):
                if rounding_denominator is not None:
                    v = Fraction(round(v * rounding_denominator), rounding_denominator)
                vals.setdefault((m, part), {})[pid] = fmt(v)
    return [{"kind": "tabulated", "id": f"{part}{m}", "values": vals[(m, part)]}
            for m in range(1, max_degree + 1) for part in ("re", "im")]
