"""JSON reading and writing.  Rationals travel as canonical ``"p/q"`` strings."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .ground import (DiscreteMeasure, GridPatch, GroundError, GroundSet, Instance, Point,
                     fmt, rational)
from .order import InOrder, NotInOrder, SupportMatrix, TransportPlan
from .paving import ApircPaving, MembershipReport, Paving, Polytope
from .polar import PairSet, PolarReport
from .raylocal import MetricInstance


class ParseError(ValueError):
    """Malformed JSON or a malformed rational."""


class SchemaError(ValueError):
    """Well-formed JSON that does not describe a valid object."""


def q(v) -> Fraction:
    try:
        return rational(v)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {v!r}: {exc}") from None


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _need(data: Mapping, key: str, kind: type | tuple):
    if not isinstance(data, Mapping) or key not in data:
        raise SchemaError(f"missing field {key!r}")
    v = data[key]
    if not isinstance(v, kind):
        raise SchemaError(f"field {key!r} has the wrong type")
    return v


def _vec(v: Sequence[Fraction]) -> list[str]:
    return [fmt(c) for c in v]


# ------------------------------------------------------------------ instance

_RATIONAL_FIELDS = {"constant"}


def _canonical_spec(spec: Mapping) -> dict:
    if not isinstance(spec, Mapping) or "kind" not in spec:
        raise SchemaError("generator spec needs a 'kind'")
    out: dict[str, Any] = {}
    for k, v in spec.items():
        if k == "coeffs":
            out[k] = [fmt(q(c)) for c in v]
        elif k == "values":
            out[k] = {pid: fmt(q(c)) for pid, c in v.items()}
        elif k in _RATIONAL_FIELDS:
            out[k] = fmt(q(v))
        else:
            out[k] = v
    return out


def parse_ground(data: Mapping) -> GroundSet:
    pts = _need(data, "points", list)
    try:
        ground = GroundSet(tuple(Point(str(_need(p, "id", (str, int))),
                                       tuple(q(c) for c in _need(p, "coords", list)))
                                 for p in pts))
    except GroundError as exc:
        raise SchemaError(str(exc)) from None
    if "dimension" in data and data["dimension"] != ground.dimension:
        raise SchemaError("declared dimension disagrees with the coordinates")
    return ground


def parse_instance(data: Mapping) -> Instance:
    ground = parse_ground(data)
    try:
        mu = DiscreteMeasure.build(ground, {k: q(v) for k, v in _need(data, "mu", dict).items()})
        nu = DiscreteMeasure.build(ground, {k: q(v) for k, v in _need(data, "nu", dict).items()})
    except GroundError as exc:
        raise SchemaError(str(exc)) from None
    specs = tuple(_canonical_spec(s) for s in _need(data, "generators", list))
    weight = data.get("weight", "one")
    if weight not in ("one", "one_plus_maxnorm"):
        raise SchemaError(f"unknown weight {weight!r}")
    grids = tuple(GridPatch(tuple(_need(g, "interior", list)), tuple(_need(g, "boundary", list)))
                  for g in data.get("grids", []))
    delta = q(data["delta"]) if data.get("delta") is not None else None
    return Instance(ground, mu, nu, specs, weight, grids, delta)


def dump_ground(ground: GroundSet) -> dict:
    return {"dimension": ground.dimension,
            "points": [{"id": p.id, "coords": _vec(p.coords)} for p in ground.points]}


def dump_instance(inst: Instance) -> dict:
    out = dump_ground(inst.ground)
    out["mu"] = {k: fmt(v) for k, v in inst.mu.masses.items()}
    out["nu"] = {k: fmt(v) for k, v in inst.nu.masses.items()}
    out["generators"] = [_canonical_spec(s) for s in inst.generator_specs]
    out["weight"] = inst.weight
    if inst.grids:
        out["grids"] = [{"interior": list(g.interior), "boundary": list(g.boundary)}
                        for g in inst.grids]
    if inst.delta is not None:
        out["delta"] = fmt(inst.delta)
    return out


def parse_metric_instance(data: Mapping) -> MetricInstance:
    ground = parse_ground(data)
    metric = data.get("metric", "euclidean")
    if isinstance(metric, list):
        metric = [[q(v) for v in row] for row in metric]
    elif metric not in ("euclidean", "l1"):
        raise SchemaError(f"unknown metric {metric!r}")
    mu = {k: q(v) for k, v in _need(data, "mu", dict).items()}
    nu = {k: q(v) for k, v in _need(data, "nu", dict).items()}
    try:
        return MetricInstance.build(ground, metric, mu, nu)
    except (GroundError, ValueError) as exc:
        if isinstance(exc, (ParseError, SchemaError)):
            raise
        raise SchemaError(str(exc)) from None


def parse_pairs(data: Any, ground: GroundSet) -> PairSet:
    pairs = _need(data, "pairs", list) if isinstance(data, Mapping) else data
    if not isinstance(pairs, list) or any(not isinstance(p, list) or len(p) != 2 for p in pairs):
        raise SchemaError("pairs must be a list of [from, to] lists")
    try:
        return PairSet.build(ground, [(str(a), str(b)) for a, b in pairs])
    except KeyError as exc:
        raise SchemaError(str(exc)) from None


def parse_subsets(data: Any) -> list[list]:
    subsets = _need(data, "subsets", list) if isinstance(data, Mapping) else data
    if not isinstance(subsets, list) or not all(isinstance(z, list) and z for z in subsets):
        raise SchemaError("subsets must be a list of nonempty lists")
    return subsets


# ------------------------------------------------------------------ results


def dump_plan(plan: TransportPlan, ground: GroundSet) -> dict:
    pairs = sorted(plan.entries, key=lambda pr: (ground.index(pr[0]), ground.index(pr[1])))
    return {"delta": fmt(plan.delta),
            "entries": [{"from": x, "to": y, "mass": fmt(plan.entries[(x, y)])} for x, y in pairs]}


def parse_plan(data: Mapping) -> TransportPlan:
    entries = {}
    for e in _need(data, "entries", list):
        entries[(str(_need(e, "from", str)), str(_need(e, "to", str)))] = q(e["mass"])
    return TransportPlan(entries, q(data.get("delta", "0")))


def _label(lab) -> Any:
    if isinstance(lab, tuple):
        return [_label(v) for v in lab]
    return lab


def dump_verdict(verdict, ground: GroundSet, check=None) -> dict:
    if isinstance(verdict, InOrder):
        return {"verdict": "in_order", "witness": dump_plan(verdict.witness, ground)}
    assert isinstance(verdict, NotInOrder)
    out: dict[str, Any] = {
        "verdict": "not_in_order",
        "certificate": [{"row": _label(lab), "value": fmt(v)}
                        for lab, v in zip(verdict.row_labels, verdict.farkas) if v],
    }
    if check is not None:
        out["certificate_valid"] = check.valid
        if check.separating is not None:
            out["separating_function"] = {pid: fmt(check.separating[pid]) for pid in ground.ids}
            out["mu_integral"] = fmt(check.mu_integral)
            out["nu_integral"] = fmt(check.nu_integral)
    return out


def dump_support(sup: SupportMatrix) -> dict:
    return {"rows": list(sup.rows), "cols": list(sup.cols),
            "matrix": [[int(b) for b in row] for row in sup.matrix()]}


def dump_polytope(P: Polytope) -> dict:
    return {"vertices": [_vec(v) for v in P.vertices], "affine_dim": P.affine_dim}


def dump_membership(rep: MembershipReport) -> list[dict]:
    return [{"atom": a.atom, "projection": a.projection_ok,
             "relative_interior": a.rint_ok, "passed": a.passed} for a in rep.atoms]


def dump_paving(pav: Paving, dichotomy: bool | None = None,
                membership: MembershipReport | None = None) -> dict:
    out: dict[str, Any] = {
        "basis": list(pav.gs.basis_labels),
        "delta": fmt(pav.delta),
        "classes": [{"atoms": list(c.atoms), "component": dump_polytope(c.component),
                     "support": {x: list(r) for x, r in c.support.items()}}
                    for c in pav.classes],
    }
    checks: dict[str, Any] = {}
    if dichotomy is not None:
        checks["dichotomy"] = dichotomy
    if membership is not None:
        checks["b_membership"] = dump_membership(membership)
    if checks:
        out["checks"] = checks
    return out


def dump_apirc(ap: ApircPaving) -> dict:
    return {
        "subsets": [[ap.gs.generators[k].id for k in z] for z in ap.subsets],
        "pavings": [dump_paving(p) for p in ap.pavings],
        "classes": [list(c) for c in ap.classes],
        "labels": {x: list(v) for x, v in ap.labels.items()},
        "checks": {"supp_inclusion": ap.supp_inclusion},
    }


def dump_polar(rep: PolarReport, U: PairSet, ground: GroundSet) -> dict:
    out: dict[str, Any] = {
        "pairs": [list(pr) for pr in U.sorted(ground)],
        "delta": fmt(rep.delta),
        "max_mass": fmt(rep.max_mass),
        "polar": rep.polar,
        "trivially_polar": rep.trivially_polar,
    }
    if rep.section_hypothesis is not None:
        out["section_hypothesis"] = rep.section_hypothesis
    if rep.coupling_max_mass is not None:
        out["coupling_max_mass"] = fmt(rep.coupling_max_mass)
        out["coupling_polar"] = rep.coupling_polar
    out["equivalence_holds"] = rep.equivalence_holds
    return out
