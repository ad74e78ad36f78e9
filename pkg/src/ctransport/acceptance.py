"""The acceptance criteria as plain functions, shared by the test suite and ``selftest``.

Every check is exact.  Each function returns a :class:`CriterionResult`
whose ``line()`` is the one-line pass/fail summary.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .exactlp import verify_certificate, solve_lp
from .ground import DiscreteMeasure, GroundSet, Instance, fmt
from .order import (InOrder, assemble_transport_lp, check_f_order, maximal_support_plan,
                    verify_order_certificate, verify_plan)
from .paving import (DichotomyViolation, Polytope, build_apirc, build_paving, dichotomy_holds,
                     gleason_part, hull_equal, refines, rint_intersects)
from .polar import PairSet, check_polar_theorem, saturating_delta
from .raylocal import (MetricInstance, kantorovich_potential, ray_mass_balance,
                       transport_rays, w1_primal)
from .scenarios import affine_indices, gen_classic, two_domain_grid
from .vertices import enumerate_vertices


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d} {self.name}: {self.detail} ({self.seconds:.2f}s)"


# ------------------------------------------------------------ random instances

_PLANE_DIRECTIONS = [("x", ["1", "0"]), ("y", ["0", "1"]), ("s", ["1", "1"]),
                     ("t", ["1", "-1"]), ("u", ["2", "1"])]


def _pid(coords) -> str:
    return ",".join(fmt(c) for c in coords)


def random_instance(rng: random.Random) -> Instance:
    """At most six atoms per side, dimension one or two, affine and monotone generators.

    Half the draws push each atom of mu to two or three points with the same
    mean, optionally shifted by a nonnegative drift; the rest draw nu freely.
    """
    d = rng.choice([1, 2])
    if d == 1:
        specs = [{"kind": "affine", "id": "x", "coeffs": ["1"],
                  "symmetric": rng.random() < 0.5}]
    else:
        picks = rng.sample(_PLANE_DIRECTIONS, rng.randint(1, 3))
        specs = [{"kind": "affine", "id": name, "coeffs": coeffs,
                  "symmetric": rng.random() < 0.5} for name, coeffs in picks]

    def point():
        return tuple(Fraction(rng.randint(-3, 3)) for _ in range(d))

    k = rng.randint(1, 3)
    atoms: list[tuple] = []
    while len(atoms) < k:
        p = point()
        if p not in atoms:
            atoms.append(p)
    raw = [rng.randint(1, 4) for _ in atoms]
    mu = {a: Fraction(r, sum(raw)) for a, r in zip(atoms, raw)}
    nu: dict[tuple, Fraction] = {}
    if rng.random() < 0.5:
        for a, m in mu.items():
            u = tuple(Fraction(rng.randint(-2, 2)) for _ in range(d))
            p = rng.choice([Fraction(1, 2), Fraction(1, 3), Fraction(2, 3)])
            drift = tuple(Fraction(rng.randint(0, 1)) for _ in range(d)) \
                if rng.random() < 0.4 else (Fraction(0),) * d
            if k < 3 and rng.random() < 0.5:
                h = Fraction(1, 4)
                split = ((h, Fraction(1)), (2 * h, Fraction(0)), (h, Fraction(-1)))
            else:
                split = ((p, 1 - p), (1 - p, -p))
            for w, t in split:
                y = tuple(ac + t * uc + dc for ac, uc, dc in zip(a, u, drift))
                nu[y] = nu.get(y, Fraction(0)) + m * w
    else:
        targets = []
        for _ in range(rng.randint(1, 6)):
            p = point()
            if p not in targets:
                targets.append(p)
        raw = [rng.randint(1, 4) for _ in targets]
        nu = {t: Fraction(r, sum(raw)) for t, r in zip(targets, raw)}
    coords = sorted(set(mu) | set(nu))
    ground = GroundSet.from_coords((_pid(c), c) for c in coords)
    return Instance(ground,
                    DiscreteMeasure.build(ground, {_pid(a): m for a, m in mu.items()}),
                    DiscreteMeasure.build(ground, {_pid(a): m for a, m in nu.items()}),
                    tuple(specs), rng.choice(["one", "one_plus_maxnorm"]))


def random_instances(seed: int, count: int) -> list[Instance]:
    rng = random.Random(seed)
    return [random_instance(rng) for _ in range(count)]


def in_order_instances(seed: int, count: int) -> list[Instance]:
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        inst = random_instance(rng)
        if isinstance(check_f_order(inst.mu, inst.nu, inst.generator_set()), InOrder):
            out.append(inst)
    return out


# ------------------------------------------------------------------ criteria


def _timed(number: int, name: str, body: Callable[[], tuple[bool, str]],
           budget: float | None = None) -> CriterionResult:
    t0 = time.perf_counter()
    try:
        ok, detail = body()
    except DichotomyViolation as exc:
        ok, detail = False, f"DichotomyViolation: {exc}"
    dt = time.perf_counter() - t0
    if budget is not None and dt >= budget:
        ok, detail = False, f"{detail}; runtime {dt:.2f}s over the {budget:g}s budget"
    return CriterionResult(number, name, ok, detail, dt)


def criterion_1() -> CriterionResult:
    def body():
        inst = gen_classic("submartingale_shift")
        gs = inst.generator_set()
        verdict = check_f_order(inst.mu, inst.nu, gs)
        pav = build_paving(inst.mu, inst.nu, gs)
        comp = pav.classes[0].component
        xs = sorted(v[gs.basis_labels.index("x")] for v in comp.vertices)
        outside = not comp.contains(gs.phi("0"))
        ok = (isinstance(verdict, InOrder) and len(pav.classes) == 1
              and xs == [1, 2] and outside)
        return ok, f"in order, 1 class, vertices x={[fmt(v) for v in xs]}, Phi(0) outside: {outside}"
    return _timed(1, "submartingale example", body, budget=1.0)


def criterion_2(seed: int = 0, count: int = 200) -> CriterionResult:
    def body():
        good = yes = 0
        for inst in random_instances(seed, count):
            gs = inst.generator_set()
            lp = assemble_transport_lp(inst.mu, inst.nu, gs)
            lp_ok = verify_certificate(lp, solve_lp(lp))
            verdict = check_f_order(inst.mu, inst.nu, gs)
            if isinstance(verdict, InOrder):
                yes += 1
                ok = verify_plan(verdict.witness, inst.mu, inst.nu, gs)
            else:
                ok = bool(verify_order_certificate(verdict, inst.mu, inst.nu, gs))
            good += ok and lp_ok
        return good == count, f"{good}/{count} verified ({yes} in order, {count - yes} not)"
    return _timed(2, "order dichotomy certificates", body, budget=60.0)


def criterion_3(seed: int = 0, count: int = 200) -> CriterionResult:
    def body():
        n = good = 0
        for inst in random_instances(seed, count):
            gs = inst.generator_set()
            if not isinstance(check_f_order(inst.mu, inst.nu, gs), InOrder):
                continue
            n += 1
            good += dichotomy_holds(build_paving(inst.mu, inst.nu, gs))
        return good == n and n > 0, f"{good}/{n} in-order pavings equal-or-disjoint"
    return _timed(3, "equal-or-disjoint paving", body)


def minimality_check(inst: Instance) -> tuple[bool, int]:
    """Vertex plans stay in closed components and charge every component vertex."""
    gs = inst.generator_set()
    pav = build_paving(inst.mu, inst.nu, gs)
    lp = assemble_transport_lp(inst.mu, inst.nu, gs)
    labels = lp.var_labels
    verts = enumerate_vertices(lp)
    charged: set[tuple[str, str]] = set()
    for v in verts:
        for lab, m in zip(labels, v):
            if m:
                charged.add((lab[1], lab[2]))
    inside = all(pav.component_of(x).contains(gs.phi(y)) for x, y in charged)
    hit = all(
        any(x in c.atoms and gs.phi(y) == vert for x, y in charged)
        for c in pav.classes for vert in c.component.vertices
    )
    same = charged == set(pav.support.pairs)
    return inside and hit and same, len(verts)


def criterion_4(seed: int = 0, count: int = 200) -> CriterionResult:
    def body():
        n = good = total = 0
        for inst in random_instances(seed, count):
            if len(inst.mu.support) > 4 or len(inst.nu.support) > 4:
                continue
            if not isinstance(check_f_order(inst.mu, inst.nu, inst.generator_set()), InOrder):
                continue
            ok, nv = minimality_check(inst)
            n += 1
            good += ok
            total += nv
        return good == n and n > 0, f"{good}/{n} instances, {total} vertex plans enumerated"
    return _timed(4, "minimality and constraint", body)


def _section_candidates(inst: Instance, gs, pav) -> list[tuple[str, str]]:
    out = []
    for x in inst.ground.ids:
        if inst.mu[x] == 0:
            out += [(x, y) for y in inst.ground.ids]
            continue
        comp = pav.component_of(x)
        out += [(x, y) for y in inst.ground.ids if comp.contains_rint(gs.phi(y))]
    return out


def criterion_5(seed: int = 1, count: int = 50) -> CriterionResult:
    def body():
        rng = random.Random(seed + 1000)
        good = nontrivial = 0
        for inst in in_order_instances(seed, count):
            gs = inst.generator_set()
            pav = build_paving(inst.mu, inst.nu, gs)
            cands = _section_candidates(inst, gs, pav)
            charged = [pr for pr in cands if inst.mu[pr[0]] > 0 and inst.nu[pr[1]] > 0]
            pool = charged if charged and rng.random() < 0.7 else cands
            U = PairSet(frozenset(rng.sample(pool, rng.randint(1, min(3, len(pool))))))
            rep = check_polar_theorem(U, inst.mu, inst.nu, gs)
            good += rep.equivalence_holds
            nontrivial += bool(U.pairs) and not rep.trivially_polar
        ok = good == count and nontrivial >= 10
        return ok, f"{good}/{count} equivalences, {nontrivial} nonempty nontrivial U"
    return _timed(5, "polar characterization", body)


def criterion_6(seed: int = 2, count: int = 20) -> CriterionResult:
    def body():
        rng = random.Random(seed + 1000)
        full = equiv = 0
        for inst in in_order_instances(seed, count):
            gs = inst.generator_set()
            p = inst.weights()
            delta = saturating_delta(inst.mu, inst.nu, p)
            _, sup = maximal_support_plan(inst.mu, inst.nu, gs, delta, p)
            full += sup.pairs == {(x, y) for x in inst.mu.support for y in inst.nu.support}
            ids = inst.ground.ids
            U = PairSet(frozenset((rng.choice(ids), rng.choice(ids))
                                  for _ in range(rng.randint(1, 3))))
            equiv += check_polar_theorem(U, inst.mu, inst.nu, gs, delta, p).equivalence_holds
        ok = full == count and equiv == count
        return ok, f"full support {full}/{count}, three-way polarity agreement {equiv}/{count}"
    return _timed(6, "relaxed transports", body)


def criterion_7() -> CriterionResult:
    def body():
        inst = two_domain_grid()
        gs = inst.generator_set()
        aff = affine_indices(inst)
        hs = [gs.index_of(g) for g in ("h1:2,3", "h1:3,4")]
        lists = [[aff], [aff, aff + [hs[0]]], [aff, aff + [hs[0]], aff + [hs[1]]]]
        aps = [build_apirc(inst.mu, inst.nu, gs, zs) for zs in lists]
        affine_classes = len(aps[0].classes)
        joint = len(aps[1].classes)
        inclusion = all(a.supp_inclusion for a in aps)
        nested = all(refines(aps[k + 1].partition(), aps[k].partition()) for k in range(2))
        ok = affine_classes == 1 and joint == 2 and inclusion and nested
        return ok, (f"affine-only {affine_classes} class, joint {joint} classes, "
                    f"supp-inclusion {inclusion}, nested refinement {nested}")
    return _timed(7, "apirc refinement on grid walks", body, budget=30.0)


def shared_point_instance() -> Instance:
    """Two martingale components on the line that touch in a single point."""
    ground = GroundSet.line([-2, -1, 0, 1, 2])
    q = Fraction(1, 4)
    return Instance(ground, DiscreteMeasure.build(ground, {"-1": Fraction(1, 2), "1": Fraction(1, 2)}),
                    DiscreteMeasure.build(ground, {"-2": q, "0": 2 * q, "2": q}),
                    ({"kind": "affine", "id": "x", "coeffs": ["1"], "symmetric": True},))


def random_polytope_point(rng: random.Random) -> tuple[Polytope, tuple[Fraction, ...]]:
    d = rng.choice([2, 3])
    pts = [tuple(Fraction(rng.randint(-3, 3)) for _ in range(d)) for _ in range(rng.randint(2, 7))]
    P = Polytope.from_points(pts)
    chosen = rng.sample(list(P.vertices), rng.randint(1, len(P.vertices)))
    w = [Fraction(rng.randint(1, 5)) for _ in chosen]
    s = sum(w)
    point = tuple(sum((wi * v[c] for wi, v in zip(w, chosen)), Fraction(0)) / s for c in range(d))
    return P, point


def criterion_8(seed: int = 3, count: int = 100) -> CriterionResult:
    def body():
        inst = shared_point_instance()
        gs = inst.generator_set()
        pav = build_paving(inst.mu, inst.nu, gs)
        P, Q = pav.component_of("-1"), pav.component_of("1")
        shared = [v for v in P.vertices if Q.contains(v)]
        touching = (len(pav.classes) == 2 and not rint_intersects(P, Q) and len(shared) == 1
                    and all(not P.contains(w) or w in shared for w in Q.vertices))
        fp, fq = gleason_part(P, shared[0]), gleason_part(Q, shared[0])
        same = hull_equal(fp, fq) and fp.vertices == (shared[0],)
        rng = random.Random(seed)
        idem = 0
        for _ in range(count):
            poly, pt = random_polytope_point(rng)
            face = gleason_part(poly, pt)
            idem += hull_equal(gleason_part(face, pt), face) and face.contains_rint(pt)
        ok = touching and same and idem == count
        return ok, f"shared-point faces equal: {same}, idempotent {idem}/{count}"
    return _timed(8, "Gleason parts", body)


def random_metric_instance(rng: random.Random, planar: bool) -> MetricInstance:
    d = 2 if planar else 1
    n = rng.randint(3, 7)
    pts: list[tuple] = []
    while len(pts) < n:
        p = tuple(Fraction(rng.randint(-5, 5)) for _ in range(d))
        if p not in pts:
            pts.append(p)
    ground = GroundSet.from_coords((_pid(c), c) for c in pts)
    ids = ground.ids

    def measure():
        chosen = rng.sample(ids, rng.randint(1, len(ids)))
        raw = [rng.randint(1, 4) for _ in chosen]
        return {pid: Fraction(r, sum(raw)) for pid, r in zip(chosen, raw)}

    return MetricInstance.build(ground, "l1", measure(), measure())


def criterion_9(seed: int = 4) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        insts = [random_metric_instance(rng, False) for _ in range(20)]
        insts += [random_metric_instance(rng, True) for _ in range(5)]
        gap = tight = balanced = branch_free = 0
        for inst in insts:
            v, value = kantorovich_potential(inst)
            plan, cost = w1_primal(inst)
            gap += value == cost
            tight += all(v[y] - v[x] == inst.d(x, y) for x, y in plan)
            rays = transport_rays(inst, v)
            bal = ray_mass_balance(inst, rays)
            if bal.asserted:
                branch_free += 1
                balanced += bool(bal.balanced)
        n = len(insts)
        ok = gap == n and tight == n and balanced == branch_free
        return ok, (f"zero gap {gap}/{n}, supports tight {tight}/{n}, "
                    f"balanced {balanced}/{branch_free} branch-free")
    return _timed(9, "ray localisation", body)


def criterion_10() -> CriterionResult:
    def body():
        from .cli import determinism_check
        ok, detail = determinism_check()
        return ok, detail
    return _timed(10, "deterministic reports", body)


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10)


def run_all(seed: int = 0) -> list[CriterionResult]:
    """All criteria; ``seed`` shifts every random instance stream."""
    return [criterion_1(), criterion_2(seed), criterion_3(seed), criterion_4(seed),
            criterion_5(seed + 1), criterion_6(seed + 2), criterion_7(), criterion_8(seed + 3),
            criterion_9(seed + 4), criterion_10()]
