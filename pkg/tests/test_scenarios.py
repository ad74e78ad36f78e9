from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ctransport.ground import InvalidMeasure, build_generator_set
from ctransport.order import InOrder, check_f_order
from ctransport.paving import build_apirc, build_paving, refines
from ctransport.scenarios import (SCENARIOS, DisconnectedInterior, GridDomain, NoStarts,
                                  NotPlanar, ScenarioError, StartOnBoundary, UnknownScenario,
                                  affine_indices, gen_classic, gen_grid_harmonic,
                                  gen_harmonic_polynomials, grid_id, two_domain_grid)

F = Fraction


def test_single_interior_cell_exits_uniformly():
    inst = gen_grid_harmonic([GridDomain.rectangle(1, 1, 1, 1)], [((1, 1), 1)])
    assert dict(inst.nu.masses) == {b: F(1, 4) for b in ("1,0", "0,1", "2,1", "1,2")}
    assert isinstance(check_f_order(inst.mu, inst.nu, inst.generator_set()), InOrder)


def test_grid_errors():
    with pytest.raises(NoStarts):
        gen_grid_harmonic([GridDomain.rectangle(0, 0, 2, 2)], [])
    with pytest.raises(StartOnBoundary):
        gen_grid_harmonic([GridDomain.rectangle(0, 0, 2, 2)], [((2, 0), 1)])
    with pytest.raises(InvalidMeasure):
        gen_grid_harmonic([GridDomain.rectangle(0, 0, 2, 2)], [((0, 0), F(1, 2))])
    with pytest.raises(DisconnectedInterior):
        GridDomain.from_cells([(0, 0), (2, 0)])
    with pytest.raises(ScenarioError):
        gen_grid_harmonic([GridDomain.rectangle(0, 0, 2, 2), GridDomain.rectangle(2, 0, 1, 1)],
                          [((0, 0), 1)])


def test_mask_matches_rectangle():
    assert GridDomain.from_mask(["##", "##"]) == GridDomain.rectangle(0, 0, 2, 2)


def test_classic_instances():
    sub = gen_classic("submartingale_shift")
    assert dict(sub.mu.masses) == {"0": 1}
    assert dict(sub.nu.masses) == {"1": F(1, 3), "3/2": F(1, 3), "2": F(1, 3)}
    sym = gen_classic("symmetric_split")
    assert dict(sym.nu.masses) == {"-1": F(1, 2), "1": F(1, 2)}
    assert all(sym.generator_set().lineality_flags)
    isl = gen_classic("two_islands")
    assert dict(isl.mu.masses) == {"-2": F(1, 2), "2": F(1, 2)}
    assert gen_classic("relaxed_threshold").delta == 2
    with pytest.raises(UnknownScenario):
        gen_classic("three_islands")
    for name in SCENARIOS:
        inst = gen_classic(name)
        assert isinstance(check_f_order(inst.mu, inst.nu, inst.generator_set()), InOrder)


def test_harmonic_polynomial_values():
    specs = gen_harmonic_polynomials([("p", (3, 4))], 2)
    values = {s["id"]: s["values"]["p"] for s in specs}
    assert values == {"re1": "3", "im1": "4", "re2": "-7", "im2": "24"}


def test_harmonic_polynomial_rounding():
    specs = gen_harmonic_polynomials([("p", (2 ** 0.5, 1 / 3))], 2, rounding_denominator=9)
    for s in specs:
        assert (F(s["values"]["p"]) * 9).denominator == 1
    with pytest.raises(TypeError):
        gen_harmonic_polynomials([("p", (2 ** 0.5, 0))], 1)
    with pytest.raises(NotPlanar):
        gen_harmonic_polynomials([("p", (1, 2, 3))], 1)


def test_harmonic_polynomials_build_generators():
    inst = gen_classic("two_domain_grid")
    pts = [(p.id, p.coords) for p in inst.ground.points]
    gs = build_generator_set(inst.ground, gen_harmonic_polynomials(pts, 3))
    assert len(gs.generators) == 6


def test_two_domain_grid_separation():
    inst = two_domain_grid()
    gs = inst.generator_set()
    affine = affine_indices(inst)
    # an exit site of the one-cell domain; its harmonic extension is 1/4 at (3,3)
    h = gs.index_of("h1:3,4")
    ap = build_apirc(inst.mu, inst.nu, gs, [affine, affine + [h]])
    by_affine, by_harmonic = ap.pavings
    assert len(by_affine.classes) == 1
    assert len(by_harmonic.classes) == 2
    assert len(ap.classes) == 2 and ap.supp_inclusion
    assert len(build_paving(inst.mu, inst.nu, gs).classes) == 2


def test_exit_masses_per_domain():
    inst = two_domain_grid()
    near = {b for b in inst.nu.support
            if abs(int(b.split(",")[0]) - 3) + abs(int(b.split(",")[1]) - 3) == 1}
    assert sum(inst.nu[b] for b in near) == F(1, 2)
    assert sum(inst.nu.masses.values()) == 1


rects = st.tuples(st.integers(1, 3), st.integers(1, 3))


@settings(max_examples=25, deadline=None)
@given(rects, st.data())
def test_grid_order_always_holds(size, data):
    w, h = size
    dom = GridDomain.rectangle(0, 0, w, h)
    cells = sorted(dom.interior)
    chosen = data.draw(st.lists(st.sampled_from(cells), min_size=1, max_size=3, unique=True))
    raw = data.draw(st.lists(st.integers(1, 3), min_size=len(chosen), max_size=len(chosen)))
    starts = [(c, F(r, sum(raw))) for c, r in zip(chosen, raw)]
    inst = gen_grid_harmonic([dom], starts)
    assert sum(inst.nu.masses.values()) == 1
    assert all(isinstance(m, Fraction) for m in inst.nu.masses.values())
    assert isinstance(check_f_order(inst.mu, inst.nu, inst.generator_set()), InOrder)


def test_nested_stopping_refines():
    # one walk per subdomain of a strip, stopped at the subdomain exit versus the strip exit
    strip = GridDomain.rectangle(0, 0, 7, 1)
    starts = [((1, 0), F(1, 2)), ((5, 0), F(1, 2))]
    full = gen_grid_harmonic([strip], starts)
    parts = gen_grid_harmonic([GridDomain.rectangle(0, 0, 2, 1), GridDomain.rectangle(4, 0, 3, 1)],
                              starts)
    coarse = build_paving(full.mu, full.nu, full.generator_set().subset(affine_indices(full)))
    fine = build_paving(parts.mu, parts.nu, parts.generator_set().subset(affine_indices(parts)))
    assert refines(fine.partition(), coarse.partition())
    assert len(fine.classes) == 2 and len(coarse.classes) == 1
    assert set(parts.mu.support) == set(full.mu.support) == {grid_id(c) for c, _ in starts}
