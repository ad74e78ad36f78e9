"""F-order decisions, F-transports and delta-approximating transports.

The transport polytope lives on plan entries ``pi(x, y)`` for ``x`` in the
support of mu and ``y`` in the support of nu.  For every positive-mass atom
``x`` and generator ``g`` the one-step submartingale condition is written as

    sum_y pi(x, y) * (g(y) - g(x)) >= 0

which equals the textbook form once the row marginal ``sum_y pi(x, y) =
mu(x)`` is used.  Lineal generators (``-g`` in the cone) get an equality.
With ``delta > 0`` each generator instead gets slack variables bounding the
positive part of the defect, and a budget row

    sum_x s(g, x) <= delta * ||g||_{p+1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .exactlp import (EQ, GE, LE, Infeasible, LinearProgram, LPBuilder, Optimal,
                      solve_lp, verify_certificate)
from .ground import DiscreteMeasure, GeneratorSet, growth_norm


class NotInOrderError(ValueError):
    """The requested transport set is empty."""


@dataclass(frozen=True)
class TransportPlan:
    entries: Mapping[tuple[str, str], Fraction]  # nonzero entries, ground order
    delta: Fraction = Fraction(0)

    def mass(self, x: str, y: str) -> Fraction:
        return self.entries.get((x, y), Fraction(0))

    @property
    def support(self) -> frozenset[tuple[str, str]]:
        return frozenset(self.entries)

    def row(self, x: str) -> dict[str, Fraction]:
        return {y: m for (a, y), m in self.entries.items() if a == x}


@dataclass(frozen=True)
class InOrder:
    witness: TransportPlan


@dataclass(frozen=True)
class NotInOrder:
    farkas: tuple[Fraction, ...]
    row_labels: tuple


OrderVerdict = InOrder | NotInOrder


def plan_var(x: str, y: str) -> tuple:
    return ("pi", x, y)


def _weights(mu: DiscreteMeasure, p: Mapping[str, Fraction] | None, gs: GeneratorSet):
    return p if p is not None else {pid: Fraction(1) for pid in gs.ground.ids}


def assemble_transport_lp(mu: DiscreteMeasure, nu: DiscreteMeasure, gs: GeneratorSet,
                          delta: Fraction = Fraction(0),
                          p: Mapping[str, Fraction] | None = None,
                          objective: Mapping[tuple[str, str], Fraction] | None = None,
                          cone: bool = True) -> LinearProgram:
    """The feasibility system of the (delta-approximating) F-transport polytope.

    ``objective`` maps plan pairs to coefficients of a maximization; pairs
    outside the two supports are ignored.  ``cone=False`` drops every
    generator constraint, leaving the plain coupling polytope.
    """
    delta = Fraction(delta)
    if delta < 0:
        raise ValueError("delta must be non-negative")
    objective = objective or {}
    X, Y = mu.support, nu.support
    b = LPBuilder()
    for x in X:
        for y in Y:
            b.add_var(plan_var(x, y), objective.get((x, y), 0))
    for x in X:
        b.add_row(("row", x), {plan_var(x, y): 1 for y in Y}, EQ, mu[x])
    for y in Y:
        b.add_row(("col", y), {plan_var(x, y): 1 for x in X}, EQ, nu[y])
    if not cone:
        return b.build()

    if delta == 0:
        for g, lineal in zip(gs.generators, gs.lineality_flags):
            for x in X:
                coeffs = {plan_var(x, y): g(y) - g(x) for y in Y}
                b.add_row(("gen", g.id, x), coeffs, EQ if lineal else GE, 0, drop_empty=True)
        return b.build()

    shifted = {pid: w + 1 for pid, w in _weights(mu, p, gs).items()}
    for g in gs.generators:
        norm = growth_norm(g, shifted)
        if norm == 0:
            continue
        slacks = []
        for x in X:
            coeffs = {plan_var(x, y): g(y) - g(x) for y in Y}
            if not any(coeffs.values()):
                continue
            s = ("s", g.id, x)
            b.add_var(s)
            coeffs[s] = 1
            b.add_row(("slack", g.id, x), coeffs, GE, 0)
            slacks.append(s)
        if slacks:
            b.add_row(("budget", g.id), {s: 1 for s in slacks}, LE, delta * norm)
    return b.build()


def _plan_from(lp: LinearProgram, x: tuple[Fraction, ...], delta: Fraction) -> TransportPlan:
    entries = {}
    for label, v in zip(lp.var_labels, x):
        if label[0] == "pi" and v:
            entries[(label[1], label[2])] = v
    return TransportPlan(entries, Fraction(delta))


def check_f_order(mu: DiscreteMeasure, nu: DiscreteMeasure, gs: GeneratorSet,
                  delta: Fraction = Fraction(0),
                  p: Mapping[str, Fraction] | None = None) -> OrderVerdict:
    """Decide whether a (delta-approximating) F-transport exists."""
    lp = assemble_transport_lp(mu, nu, gs, delta, p)
    out = solve_lp(lp)
    if isinstance(out, Infeasible):
        return NotInOrder(out.farkas, lp.row_labels)
    assert isinstance(out, Optimal)
    return InOrder(_plan_from(lp, out.primal, delta))


def verify_plan(plan: TransportPlan, mu: DiscreteMeasure, nu: DiscreteMeasure,
                gs: GeneratorSet, delta: Fraction = Fraction(0),
                p: Mapping[str, Fraction] | None = None) -> bool:
    """Check marginals and the cone conditions of ``plan`` directly."""
    delta = Fraction(delta)
    if any(m < 0 for m in plan.entries.values()):
        return False
    X, Y = mu.support, nu.support
    if any(x not in mu.masses or y not in nu.masses for x, y in plan.entries):
        return False
    for x in X:
        if sum(plan.row(x).values(), Fraction(0)) != mu[x]:
            return False
    for y in Y:
        if sum((plan.mass(x, y) for x in X), Fraction(0)) != nu[y]:
            return False
    if delta == 0:
        for g, lineal in zip(gs.generators, gs.lineality_flags):
            for x in X:
                mean = sum((plan.mass(x, y) * g(y) for y in Y), Fraction(0))
                if mean < mu[x] * g(x) or (lineal and mean != mu[x] * g(x)):
                    return False
        return True
    shifted = {pid: w + 1 for pid, w in _weights(mu, p, gs).items()}
    for g in gs.generators:
        defect = Fraction(0)
        for x in X:
            d = mu[x] * g(x) - sum((plan.mass(x, y) * g(y) for y in Y), Fraction(0))
            defect += max(d, Fraction(0))
        if defect > delta * growth_norm(g, shifted):
            return False
    return True


@dataclass(frozen=True)
class CertificateCheck:
    valid: bool
    separating: dict[str, Fraction] | None = None
    mu_integral: Fraction | None = None
    nu_integral: Fraction | None = None

    def __bool__(self) -> bool:
        return self.valid


def separating_function(verdict: NotInOrder, mu: DiscreteMeasure,
                        gs: GeneratorSet) -> dict[str, Fraction]:
    """The lattice-cone function read off a delta = 0 Farkas vector.

    ``f = max_x ( sum_g lam(g, x) * (g - g(x)) - u_x )`` where ``u`` are the
    row-marginal multipliers and ``lam = -y`` on generator rows.
    """
    y = dict(zip(verdict.row_labels, verdict.farkas))
    pieces = []
    for x in mu.support:
        u = y.get(("row", x), Fraction(0))
        lam = {g.id: -y.get(("gen", g.id, x), Fraction(0)) for g in gs.generators}
        pieces.append((x, u, lam))
    f = {}
    for pid in gs.ground.ids:
        f[pid] = max(
            sum((lam[g.id] * (g(pid) - g(x)) for g in gs.generators), Fraction(0)) - u
            for x, u, lam in pieces
        )
    return f


def verify_order_certificate(verdict: NotInOrder, mu: DiscreteMeasure, nu: DiscreteMeasure,
                             gs: GeneratorSet, delta: Fraction = Fraction(0),
                             p: Mapping[str, Fraction] | None = None) -> CertificateCheck:
    """Re-assemble the transport system and contract the Farkas vector against it."""
    if not isinstance(verdict, NotInOrder):
        return CertificateCheck(False)
    lp = assemble_transport_lp(mu, nu, gs, delta, p)
    if tuple(verdict.row_labels) != lp.row_labels:
        return CertificateCheck(False)
    if not verify_certificate(lp, Infeasible(tuple(verdict.farkas))):
        return CertificateCheck(False)
    if Fraction(delta) != 0:
        return CertificateCheck(True)
    f = separating_function(verdict, mu, gs)
    mi, ni = mu.integrate(f), nu.integrate(f)
    return CertificateCheck(mi > ni, f, mi, ni)


@dataclass(frozen=True)
class SupportMatrix:
    rows: tuple[str, ...]
    cols: tuple[str, ...]
    pairs: frozenset[tuple[str, str]]

    def __getitem__(self, key: tuple[str, str]) -> bool:
        return key in self.pairs

    def matrix(self) -> list[list[bool]]:
        return [[(x, y) in self.pairs for y in self.cols] for x in self.rows]

    def row(self, x: str) -> tuple[str, ...]:
        return tuple(y for y in self.cols if (x, y) in self.pairs)


def maximize_mass(mu: DiscreteMeasure, nu: DiscreteMeasure, gs: GeneratorSet,
                  pairs, delta: Fraction = Fraction(0),
                  p: Mapping[str, Fraction] | None = None,
                  cone: bool = True) -> tuple[Fraction, TransportPlan]:
    """Maximum total mass a feasible plan can put on ``pairs``, with a maximizer."""
    lp = assemble_transport_lp(mu, nu, gs, delta, p, {pr: 1 for pr in pairs}, cone=cone)
    out = solve_lp(lp)
    if isinstance(out, Infeasible):
        raise NotInOrderError("transport polytope is empty")
    assert isinstance(out, Optimal)
    return out.value, _plan_from(lp, out.primal, delta)


def maximal_support_plan(mu: DiscreteMeasure, nu: DiscreteMeasure, gs: GeneratorSet,
                         delta: Fraction = Fraction(0),
                         p: Mapping[str, Fraction] | None = None
                         ) -> tuple[TransportPlan, SupportMatrix]:
    """A feasible plan whose support contains that of every feasible plan.

    Rather than one LP per pair, repeatedly maximize the total mass on the
    pairs not yet known to be charged; a zero optimum proves every remaining
    pair has zero per-pair maximum.  The returned plan is the uniform average
    of the maximizers found, so it charges exactly the union.
    """
    verdict = check_f_order(mu, nu, gs, delta, p)
    if isinstance(verdict, NotInOrder):
        raise NotInOrderError("measures are not in order for this cone and delta")
    plans = [verdict.witness]
    charged = set(verdict.witness.support)
    all_pairs = [(x, y) for x in mu.support for y in nu.support]
    while True:
        rest = [pr for pr in all_pairs if pr not in charged]
        if not rest:
            break
        value, plan = maximize_mass(mu, nu, gs, rest, delta, p)
        if value == 0:
            break
        plans.append(plan)
        charged |= plan.support
    k = len(plans)
    entries: dict[tuple[str, str], Fraction] = {}
    for pr in all_pairs:
        m = sum((pl.mass(*pr) for pl in plans), Fraction(0)) / k
        if m:
            entries[pr] = m
    plan = TransportPlan(entries, Fraction(delta))
    return plan, SupportMatrix(mu.support, nu.support, frozenset(plan.entries))
