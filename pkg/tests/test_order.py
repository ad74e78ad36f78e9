import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ctransport.acceptance import random_instance
from ctransport.exactlp import solve_lp
from ctransport.ground import DiscreteMeasure, GroundSet, build_generator_set
from ctransport.order import (InOrder, NotInOrder, NotInOrderError, TransportPlan,
                              assemble_transport_lp, check_f_order, maximal_support_plan,
                              maximize_mass, verify_order_certificate, verify_plan)
from ctransport.polar import saturating_delta
from ctransport.scenarios import gen_classic

X = {"kind": "affine", "id": "x", "coeffs": ["1"]}
X_SYM = dict(X, symmetric=True)
half = Fraction(1, 2)


def setup(xs, mu, nu, specs):
    g = GroundSet.line(xs)
    return DiscreteMeasure.build(g, mu), DiscreteMeasure.build(g, nu), build_generator_set(g, specs)


def test_identity_transport():
    mu, nu, gs = setup([0], {"0": 1}, {"0": 1}, [X])
    lp = assemble_transport_lp(mu, nu, gs)
    assert lp.n_vars == 1
    verdict = check_f_order(mu, nu, gs)
    assert isinstance(verdict, InOrder) and verdict.witness.mass("0", "0") == 1


def test_symmetric_martingale_is_forced():
    mu, nu, gs = setup([-1, 0, 1], {"0": 1}, {"-1": half, "1": half}, [X_SYM])
    assert assemble_transport_lp(mu, nu, gs).n_vars == 2
    verdict = check_f_order(mu, nu, gs)
    assert verdict.witness.entries == {("0", "-1"): half, ("0", "1"): half}


def test_submartingale_example_sides():
    mu, nu, gs = setup([0, 1, Fraction(3, 2), 2], {"0": 1},
                       {"1": Fraction(1, 3), "3/2": Fraction(1, 3), "2": Fraction(1, 3)}, [X])
    assert isinstance(check_f_order(mu, nu, gs), InOrder)
    sym = build_generator_set(gs.ground, [X_SYM])
    verdict = check_f_order(mu, nu, sym)
    assert isinstance(verdict, NotInOrder)
    assert verify_order_certificate(verdict, mu, nu, sym)


def test_reversed_convex_order_certificate():
    mu, nu, gs = setup([-1, 0, 1], {"-1": half, "1": half}, {"0": 1}, [X_SYM])
    verdict = check_f_order(mu, nu, gs)
    assert isinstance(verdict, NotInOrder)
    check = verify_order_certificate(verdict, mu, nu, gs)
    assert check.valid
    # the separating function is convex on the line and strictly separates
    f = check.separating
    assert f["-1"] + f["1"] > 2 * f["0"]
    assert check.mu_integral > check.nu_integral


def test_tampered_certificate_fails():
    mu, nu, gs = setup([-1, 0, 1], {"-1": half, "1": half}, {"0": 1}, [X_SYM])
    verdict = check_f_order(mu, nu, gs)
    negated = tuple(-v for v in verdict.farkas)
    assert not verify_order_certificate(NotInOrder(negated, verdict.row_labels), mu, nu, gs)
    zeros = tuple(Fraction(0) for _ in verdict.farkas)
    assert not verify_order_certificate(NotInOrder(zeros, verdict.row_labels), mu, nu, gs)


def test_reversed_submartingale_certificate():
    mu, nu, gs = setup([0, 1, Fraction(3, 2), 2],
                       {"1": Fraction(1, 3), "3/2": Fraction(1, 3), "2": Fraction(1, 3)},
                       {"0": 1}, [X])
    verdict = check_f_order(mu, nu, gs)
    check = verify_order_certificate(verdict, mu, nu, gs)
    assert check.valid
    f = check.separating
    assert f["0"] <= f["1"] <= f["3/2"] <= f["2"]  # monotone, like f = x


def test_maximal_support_single_plan():
    mu, nu, gs = setup([-1, 0, 1], {"0": 1}, {"-1": half, "1": half}, [X_SYM])
    _, sup = maximal_support_plan(mu, nu, gs)
    assert sup.row("0") == ("-1", "1")


def test_two_islands_support_matches_per_pair_oracle():
    inst = gen_classic("two_islands")
    gs = inst.generator_set()
    _, sup = maximal_support_plan(inst.mu, inst.nu, gs)
    assert sup.row("-2") == ("-3", "-1") and sup.row("2") == ("1", "3")
    for x in inst.mu.support:
        for y in inst.nu.support:
            value, _ = maximize_mass(inst.mu, inst.nu, gs, [(x, y)])
            assert (value > 0) == sup[(x, y)]


def test_saturating_delta_gives_full_support():
    inst = gen_classic("two_islands")
    gs = inst.generator_set()
    delta = saturating_delta(inst.mu, inst.nu)
    assert delta == 2
    _, sup = maximal_support_plan(inst.mu, inst.nu, gs, delta)
    assert sup.pairs == {(x, y) for x in inst.mu.support for y in inst.nu.support}


def test_maximal_support_needs_order():
    mu, nu, gs = setup([-1, 0, 1], {"-1": half, "1": half}, {"0": 1}, [X_SYM])
    with pytest.raises(NotInOrderError):
        maximal_support_plan(mu, nu, gs)


def test_negative_delta_rejected():
    mu, nu, gs = setup([0], {"0": 1}, {"0": 1}, [X])
    with pytest.raises(ValueError):
        assemble_transport_lp(mu, nu, gs, Fraction(-1))


def test_verify_plan_rejects_bad_marginals():
    mu, nu, gs = setup([-1, 0, 1], {"0": 1}, {"-1": half, "1": half}, [X_SYM])
    assert not verify_plan(TransportPlan({("0", "-1"): Fraction(1)}), mu, nu, gs)


seeds = st.integers(0, 10**6)


def drawn(seed):
    inst = random_instance(random.Random(seed))
    return inst, inst.generator_set()


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([Fraction(1, 4), Fraction(1), Fraction(3)]))
def test_relaxation_is_monotone(seed, bump):
    inst, gs = drawn(seed)
    p = inst.weights()
    for delta in (Fraction(0), Fraction(1, 2)):
        verdict = check_f_order(inst.mu, inst.nu, gs, delta, p)
        if isinstance(verdict, InOrder):
            plan = verdict.witness
            assert verify_plan(plan, inst.mu, inst.nu, gs, delta, p)
            assert verify_plan(plan, inst.mu, inst.nu, gs, delta + bump, p)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_lineal_generators_hold_with_equality(seed):
    inst, gs = drawn(seed)
    verdict = check_f_order(inst.mu, inst.nu, gs)
    if not isinstance(verdict, InOrder):
        return
    plan, _ = maximal_support_plan(inst.mu, inst.nu, gs)
    for g in gs.lineal():
        for x in inst.mu.support:
            mean = sum((m * g(y) for y, m in plan.row(x).items()), Fraction(0))
            assert mean == inst.mu[x] * g(x)
    for x in inst.mu.support:
        assert sum(plan.row(x).values()) == inst.mu[x]
    for y in inst.nu.support:
        assert sum(plan.mass(x, y) for x in inst.mu.support) == inst.nu[y]


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_unmarked_pairs_have_zero_per_pair_maximum(seed):
    inst, gs = drawn(seed)
    if not isinstance(check_f_order(inst.mu, inst.nu, gs), InOrder):
        return
    _, sup = maximal_support_plan(inst.mu, inst.nu, gs)
    for x in inst.mu.support:
        for y in inst.nu.support:
            value, _ = maximize_mass(inst.mu, inst.nu, gs, [(x, y)])
            assert (value > 0) == sup[(x, y)]


@settings(max_examples=40, deadline=None)
@given(seeds, st.randoms(use_true_random=False))
def test_sampled_lattice_functions_respect_order(seed, rnd):
    inst, gs = drawn(seed)
    verdict = check_f_order(inst.mu, inst.nu, gs)
    gens = list(gs.generators)
    for _ in range(5):
        pieces = []
        for _ in range(rnd.randint(1, 3)):
            coeffs = [Fraction(rnd.randint(0, 3)) for _ in gens]
            const = Fraction(rnd.randint(-3, 3))
            pieces.append((coeffs, const))
        f = {pid: max(sum((c * g(pid) for c, g in zip(cs, gens)), Fraction(0)) + k
                      for cs, k in pieces) for pid in inst.ground.ids}
        if isinstance(verdict, InOrder):
            assert inst.mu.integrate(f) <= inst.nu.integrate(f)
    if isinstance(verdict, NotInOrder):
        check = verify_order_certificate(verdict, inst.mu, inst.nu, gs)
        assert check.valid and check.mu_integral > check.nu_integral


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_relaxed_certificates_verify(seed):
    inst, gs = drawn(seed)
    p = inst.weights()
    delta = Fraction(1, 8)
    verdict = check_f_order(inst.mu, inst.nu, gs, delta, p)
    if isinstance(verdict, NotInOrder):
        assert verify_order_certificate(verdict, inst.mu, inst.nu, gs, delta, p)
    else:
        assert verify_plan(verdict.witness, inst.mu, inst.nu, gs, delta, p)
    lp = assemble_transport_lp(inst.mu, inst.nu, gs, delta, p)
    assert solve_lp(lp) == solve_lp(lp)
