"""Polar pair-sets: exact decisions and the two characterization checks."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .ground import DiscreteMeasure, GeneratorSet, GroundSet
from .order import NotInOrder, NotInOrderError, check_f_order, maximize_mass
from .paving import build_paving


class SectionHypothesisViolated(ValueError):
    """Some section of U leaves the open component of its atom."""


@dataclass(frozen=True)
class PairSet:
    pairs: frozenset[tuple[str, str]]

    @classmethod
    def build(cls, ground: GroundSet, pairs: Iterable[Iterable[str]]) -> "PairSet":
        out = set()
        for pr in pairs:
            x, y = pr
            for pid in (x, y):
                if pid not in ground:
                    raise KeyError(f"pair mentions unknown point {pid!r}")
            out.add((x, y))
        return cls(frozenset(out))

    def sorted(self, ground: GroundSet) -> list[tuple[str, str]]:
        return sorted(self.pairs, key=lambda pr: (ground.index(pr[0]), ground.index(pr[1])))

    def __len__(self) -> int:
        return len(self.pairs)


def _charged(U: PairSet, mu: DiscreteMeasure, nu: DiscreteMeasure) -> list[tuple[str, str]]:
    return [(x, y) for x, y in U.pairs if mu[x] > 0 and nu[y] > 0]


def max_mass_on(U: PairSet, mu: DiscreteMeasure, nu: DiscreteMeasure, gs: GeneratorSet,
                delta: Fraction = Fraction(0), p: Mapping[str, Fraction] | None = None,
                cone: bool = True) -> Fraction:
    """Largest mass any feasible transport puts on ``U``; ``cone=False`` drops the cone."""
    value, _ = maximize_mass(mu, nu, gs, _charged(U, mu, nu), delta, p, cone=cone)
    return value


def is_trivially_polar(U: PairSet, mu: DiscreteMeasure, nu: DiscreteMeasure) -> bool:
    """Every pair has a null first or second coordinate."""
    return not _charged(U, mu, nu)


@dataclass(frozen=True)
class PolarReport:
    delta: Fraction
    max_mass: Fraction
    trivially_polar: bool
    section_hypothesis: bool | None  # None when not applicable (delta > 0)
    coupling_max_mass: Fraction | None  # plain couplings, delta > 0 only

    @property
    def polar(self) -> bool:
        return self.max_mass == 0

    @property
    def coupling_polar(self) -> bool | None:
        return None if self.coupling_max_mass is None else self.coupling_max_mass == 0

    @property
    def equivalence_holds(self) -> bool:
        if self.coupling_max_mass is None:
            return self.polar == self.trivially_polar
        return self.polar == self.coupling_polar == self.trivially_polar


def section_hypothesis_holds(U: PairSet, mu: DiscreteMeasure, nu: DiscreteMeasure,
                             gs: GeneratorSet) -> bool:
    """Each ``Phi(y)`` with ``(x, y)`` in U, ``mu(x) > 0``, lies in the open component of x."""
    paving = build_paving(mu, nu, gs)
    cache: dict[tuple[int, str], bool] = {}
    for x, y in U.pairs:
        if mu[x] == 0:
            continue
        k = paving.class_of(x)
        if (k, y) not in cache:
            cache[(k, y)] = paving.classes[k].component.contains_rint(gs.phi(y))
        if not cache[(k, y)]:
            return False
    return True


def check_polar_theorem(U: PairSet, mu: DiscreteMeasure, nu: DiscreteMeasure,
                        gs: GeneratorSet, delta: Fraction = Fraction(0),
                        p: Mapping[str, Fraction] | None = None) -> PolarReport:
    """Evaluate both sides of the polar characterization at level ``delta``.

    At ``delta = 0`` the equivalence with trivial polarity is only claimed
    under the section hypothesis, so a violation raises.  At ``delta > 0``
    it is claimed for every ``U`` and compared against plain couplings too.
    """
    delta = Fraction(delta)
    if isinstance(check_f_order(mu, nu, gs, delta, p), NotInOrder):
        raise NotInOrderError("measures are not in order at this delta")
    trivial = is_trivially_polar(U, mu, nu)
    if delta == 0:
        if not section_hypothesis_holds(U, mu, nu, gs):
            raise SectionHypothesisViolated("a section of U leaves its component")
        return PolarReport(delta, max_mass_on(U, mu, nu, gs), trivial, True, None)
    return PolarReport(delta, max_mass_on(U, mu, nu, gs, delta, p), trivial, None,
                       max_mass_on(U, mu, nu, gs, delta, p, cone=False))


def saturating_delta(mu: DiscreteMeasure, nu: DiscreteMeasure,
                     p: Mapping[str, Fraction] | None = None) -> Fraction:
    """``integral of p d(mu + nu)``, the level at which every pair becomes chargeable."""
    p = p or {pid: Fraction(1) for pid in set(mu.masses) | set(nu.masses)}
    return mu.integrate(p) + nu.integrate(p)
