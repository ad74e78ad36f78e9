import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ctransport.acceptance import random_instance
from ctransport.order import InOrder, check_f_order
from ctransport.polar import (PairSet, SectionHypothesisViolated, check_polar_theorem,
                              is_trivially_polar, max_mass_on, saturating_delta)
from ctransport.scenarios import gen_classic


@pytest.fixture
def islands():
    inst = gen_classic("two_islands")
    return inst, inst.generator_set()


def pairs(inst, *prs):
    return PairSet.build(inst.ground, prs)


def test_empty_set(islands):
    inst, gs = islands
    U = pairs(inst)
    assert max_mass_on(U, inst.mu, inst.nu, gs) == 0
    assert is_trivially_polar(U, inst.mu, inst.nu)


def test_cross_pair_is_polar_only_at_zero_delta(islands):
    inst, gs = islands
    U = pairs(inst, ("-2", "1"))
    assert max_mass_on(U, inst.mu, inst.nu, gs) == 0
    delta = saturating_delta(inst.mu, inst.nu)
    assert max_mass_on(U, inst.mu, inst.nu, gs, delta) > 0
    report = check_polar_theorem(U, inst.mu, inst.nu, gs, delta)
    assert not report.polar and report.coupling_polar is False
    assert not report.trivially_polar and report.equivalence_holds


def test_trivial_polarity_examples(islands):
    inst, _ = islands
    assert is_trivially_polar(pairs(inst, ("-3", "1"), ("1", "-3")), inst.mu, inst.nu)
    assert not is_trivially_polar(pairs(inst, ("-2", "-1")), inst.mu, inst.nu)


def test_section_hypothesis_cases(islands):
    inst, gs = islands
    inside = check_polar_theorem(pairs(inst, ("-2", "-2")), inst.mu, inst.nu, gs)
    assert inside.section_hypothesis and inside.equivalence_holds
    # (-2, -2) has zero nu-mass: the plan cannot charge it, and it is trivially polar
    assert inside.polar and inside.trivially_polar
    zero_row = check_polar_theorem(pairs(inst, ("-3", "3")), inst.mu, inst.nu, gs)
    assert zero_row.polar and zero_row.trivially_polar
    with pytest.raises(SectionHypothesisViolated):
        check_polar_theorem(pairs(inst, ("-2", "1")), inst.mu, inst.nu, gs)


def test_endpoint_pair_breaks_hypothesis(islands):
    # -1 is a vertex of the closed component, not in its open interior
    inst, gs = islands
    with pytest.raises(SectionHypothesisViolated):
        check_polar_theorem(pairs(inst, ("-2", "-1")), inst.mu, inst.nu, gs)


def test_unknown_point_rejected(islands):
    inst, _ = islands
    with pytest.raises(KeyError):
        pairs(inst, ("-2", "9"))


def charged_instance(seed):
    inst = random_instance(random.Random(seed))
    gs = inst.generator_set()
    if not isinstance(check_f_order(inst.mu, inst.nu, gs), InOrder):
        return None
    return inst, gs


def all_pairs_of(inst):
    return [(x, y) for x in inst.ground.ids for y in inst.ground.ids]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.data())
def test_polarity_is_monotone(seed, data):
    got = charged_instance(seed)
    if got is None:
        return
    inst, gs = got
    big = data.draw(st.lists(st.sampled_from(all_pairs_of(inst)), max_size=6, unique=True))
    small = data.draw(st.lists(st.sampled_from(big), unique=True)) if big else []
    m_big = max_mass_on(pairs(inst, *big), inst.mu, inst.nu, gs)
    m_small = max_mass_on(pairs(inst, *small), inst.mu, inst.nu, gs)
    assert m_small <= m_big


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.data())
def test_max_mass_grows_with_delta(seed, data):
    got = charged_instance(seed)
    if got is None:
        return
    inst, gs = got
    U = pairs(inst, *data.draw(st.lists(st.sampled_from(all_pairs_of(inst)), max_size=4,
                                        unique=True)))
    p = inst.weights()
    values = [max_mass_on(U, inst.mu, inst.nu, gs, Fraction(d), p) for d in (0, 1, 2)]
    assert values == sorted(values)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.data(), st.sampled_from([Fraction(1, 16), Fraction(1)]))
def test_relaxed_polarity_agrees_with_plain_couplings(seed, data, delta):
    got = charged_instance(seed)
    if got is None:
        return
    inst, gs = got
    U = pairs(inst, *data.draw(st.lists(st.sampled_from(all_pairs_of(inst)), max_size=4,
                                        unique=True)))
    report = check_polar_theorem(U, inst.mu, inst.nu, gs, delta, inst.weights())
    assert report.equivalence_holds
    assert report.max_mass <= report.coupling_max_mass
