from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from ctransport.ground import (DimensionMismatch, DiscreteMeasure, EmptyGenerators, EmptySet,
                               GridPatch, GroundError, GroundSet, InvalidMeasure,
                               build_generator_set, evaluation_matrix,
                               f_convex_hull_membership, growth_norm, harmonic_measure,
                               rational, weight)

X = {"kind": "affine", "id": "x", "coeffs": ["1"]}


def line(*xs):
    return GroundSet.line(xs)


def test_single_monotone_generator():
    gs = build_generator_set(line(-1, 0, 1), [X])
    assert gs.basis_labels == ("1", "x")
    assert gs.lineality_flags == (False,)


def test_symmetric_pair_is_lineal():
    gs = build_generator_set(line(-1, 0, 1), [dict(X, symmetric=True)])
    assert [g.id for g in gs.generators] == ["x", "-x"]
    assert gs.lineality_flags == (True, True)
    assert [g.id for g in gs.lineal()] == ["x", "-x"]


def test_harmonic_basis_rank_matches_sympy():
    pts = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 1)]
    g = GroundSet.from_coords((f"p{k}", p) for k, p in enumerate(pts))
    specs = [{"kind": "harmonic2d", "m": 1, "part": "re"},
             {"kind": "harmonic2d", "m": 1, "part": "im"},
             {"kind": "harmonic2d", "m": 2, "part": "re"}]
    gs = build_generator_set(g, specs)
    oracle = sympy.Matrix([[1, x, y, x * x - y * y] for x, y in pts]).rank()
    assert gs.dim == oracle == 4


def test_evaluation_rows_on_two_points():
    gs = build_generator_set(line(0, 1), [X])
    ev = evaluation_matrix(gs, gs.ground)
    assert ev["0"] == (1, 0) and ev["1"] == (1, 1)
    assert ev.injective and gs.separates


def test_constant_generator_is_not_injective():
    gs = build_generator_set(line(0, 1), [{"kind": "affine", "coeffs": ["0"], "constant": "1"}])
    assert gs.basis_labels == ("1",)
    assert not evaluation_matrix(gs).injective
    assert not gs.separates


def test_constant_column_all_ones():
    gs = build_generator_set(line(-2, 1, 5), [X])
    assert all(evaluation_matrix(gs)[pid][0] == 1 for pid in gs.ground.ids)


def grid(cells):
    return GroundSet.from_coords((f"{x},{y}", (x, y)) for x, y in cells)


def test_harmonic_measure_single_interior_point():
    cells = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]
    g = grid(cells)
    h = harmonic_measure(g, GridPatch(("0,0",), ("1,0", "-1,0", "0,1", "0,-1")))
    assert all(h[b]["0,0"] == Fraction(1, 4) for b in h)


def test_harmonic_measure_two_interior_points_by_hand():
    # h0 = (1 + h1)/4 and h1 = h0/4 for the exit at (-1, 0)
    interior = [(0, 0), (1, 0)]
    boundary = [(-1, 0), (2, 0), (0, 1), (0, -1), (1, 1), (1, -1)]
    g = grid(interior + boundary)
    patch = GridPatch(tuple(f"{x},{y}" for x, y in interior),
                      tuple(f"{x},{y}" for x, y in boundary))
    h = harmonic_measure(g, patch)
    assert h["-1,0"]["0,0"] == Fraction(4, 15)
    assert h["-1,0"]["1,0"] == Fraction(1, 15)
    for p in patch.interior:
        assert sum(h[b][p] for b in patch.boundary) == 1


def test_grid_harmonic_rows_are_harmonic_extensions():
    cells = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]
    g = grid(cells)
    patch = GridPatch(("0,0",), ("1,0", "-1,0", "0,1", "0,-1"))
    gs = build_generator_set(g, [{"kind": "grid_harmonic", "boundary": b, "id": b}
                                 for b in patch.boundary], grids=[patch])
    for gen in gs.generators:
        assert gen("0,0") == Fraction(1, 4)
        assert gen(gen.id) == 1


def test_growth_norm_examples():
    g = build_generator_set(line(-2, 3), [X]).generators[0]
    ones = {"-2": Fraction(1), "3": Fraction(1)}
    assert growth_norm(g, ones) == 3
    assert growth_norm(g, {k: v + 1 for k, v in ones.items()}) == Fraction(3, 2)
    assert growth_norm({"-2": Fraction(0), "3": Fraction(0)}, ones) == 0
    sq = {"-2": Fraction(4), "0": Fraction(0), "3": Fraction(9)}
    p = {"-2": Fraction(3), "0": Fraction(1), "3": Fraction(4)}
    assert growth_norm(sq, p) == Fraction(9, 4)


def test_weight_kinds():
    g = line(-2, 0, 3)
    assert weight(g) == {"-2": 1, "0": 1, "3": 1}
    assert weight(g, "one_plus_maxnorm") == {"-2": 3, "0": 1, "3": 4}
    with pytest.raises(GroundError):
        weight(g, "cubic")


def test_hull_membership_examples():
    gs = build_generator_set(line(-1, 0, 1, 2), [X])
    assert f_convex_hull_membership(["-1", "1"], "0", gs)
    assert not f_convex_hull_membership(["-1", "1"], "2", gs)
    with pytest.raises(EmptySet):
        f_convex_hull_membership([], "0", gs)


def test_hull_membership_square():
    pts = {"a": (0, 0), "b": (4, 0), "c": (0, 4), "d": (4, 4), "e": (1, 3)}
    g = GroundSet.from_coords(pts.items())
    gs = build_generator_set(g, [{"kind": "affine", "coeffs": ["1", "0"]},
                                 {"kind": "affine", "coeffs": ["0", "1"]}])
    # hand solution of the weight system: 1/4 a + 1/2 c + 1/4 d = (1, 3)
    w = {"a": Fraction(1, 4), "b": Fraction(0), "c": Fraction(1, 2), "d": Fraction(1, 4)}
    assert tuple(sum(w[k] * pts[k][i] for k in w) for i in range(2)) == pts["e"]
    assert f_convex_hull_membership("abcd", "e", gs)
    assert not f_convex_hull_membership("abc", "d", gs)


def test_rejects_floats_and_bad_sets():
    with pytest.raises(TypeError):
        rational(0.5)
    assert rational("3/6") == Fraction(1, 2)
    with pytest.raises(GroundError):
        GroundSet.from_coords([("a", (0,)), ("b", (0,))])
    with pytest.raises(GroundError):
        GroundSet.from_coords([("a", (0,)), ("a", (1,))])
    with pytest.raises(GroundError):
        GroundSet.from_coords([("a", (0,)), ("b", (1, 2))])


def test_measure_validation():
    g = line(0, 1)
    with pytest.raises(InvalidMeasure):
        DiscreteMeasure.build(g, {"0": "1/2"})
    with pytest.raises(InvalidMeasure):
        DiscreteMeasure.build(g, {"0": "3/2", "1": "-1/2"})
    with pytest.raises(InvalidMeasure):
        DiscreteMeasure.build(g, {"7": "1"})
    m = DiscreteMeasure.build(g, {"1": "1", "0": "0"})
    assert m.support == ("1",)


def test_generator_errors():
    with pytest.raises(EmptyGenerators):
        build_generator_set(line(0, 1), [])
    with pytest.raises(DimensionMismatch):
        build_generator_set(line(0, 1), [{"kind": "affine", "coeffs": ["1", "1"]}])
    with pytest.raises(DimensionMismatch):
        build_generator_set(line(0, 1), [{"kind": "harmonic2d", "m": 1, "part": "re"}])


coords = st.lists(st.integers(-3, 3), min_size=2, max_size=6, unique=True)


@settings(max_examples=60, deadline=None)
@given(coords, st.data())
def test_hull_contains_its_generators_and_is_monotone(xs, data):
    g = GroundSet.line(xs)
    gs = build_generator_set(g, [X, {"kind": "tabulated",
                                      "values": {fmt: str(int(fmt) ** 2) for fmt in g.ids}}])
    S = data.draw(st.lists(st.sampled_from(g.ids), min_size=1, unique=True))
    bigger = data.draw(st.lists(st.sampled_from(g.ids), unique=True)) + S
    omega = data.draw(st.sampled_from(g.ids))
    assert all(f_convex_hull_membership(S, s, gs) for s in S)
    if f_convex_hull_membership(S, omega, gs):
        assert f_convex_hull_membership(bigger, omega, gs)


@settings(max_examples=40, deadline=None)
@given(st.permutations(range(4)))
def test_lineality_flags_follow_generators_under_reordering(order):
    g = GroundSet.from_coords([("a", (0, 0)), ("b", (1, 0)), ("c", (0, 1)), ("d", (2, 3))])
    specs = [{"kind": "affine", "id": "x", "coeffs": ["1", "0"]},
             {"kind": "affine", "id": "-x", "coeffs": ["-1", "0"]},
             {"kind": "affine", "id": "y", "coeffs": ["0", "1"]},
             {"kind": "affine", "id": "s", "coeffs": ["1", "1"]}]
    base = build_generator_set(g, specs)
    flags = dict(zip([s["id"] for s in specs], base.lineality_flags))
    perm = build_generator_set(g, [specs[k] for k in order])
    assert dict(zip([g.id for g in perm.generators], perm.lineality_flags)) == flags
    assert flags == {"x": True, "-x": True, "y": False, "s": False}


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=6,
                unique=True))
def test_separation_report_matches_row_comparison(pts):
    g = GroundSet.from_coords((f"p{k}", p) for k, p in enumerate(pts))
    gs = build_generator_set(g, [{"kind": "affine", "coeffs": ["1", "0"]}])
    rows = [gs.phi(pid) for pid in g.ids]
    assert gs.separates == (len(set(rows)) == len(rows))
