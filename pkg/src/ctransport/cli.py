"""Command-line front end.

Exit status is 0 on success, 2 when the answer is mathematically negative
(a certificate is emitted), and 1 on bad input.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import schema
from .ground import GroundError, GroundSet, Instance, fmt
from .order import (NotInOrder, check_f_order, maximal_support_plan, verify_plan,
                    verify_order_certificate)
from .paving import DichotomyViolation, build_apirc, build_paving, check_b_membership, dichotomy_holds
from .polar import (SectionHypothesisViolated, check_polar_theorem, is_trivially_polar,
                    max_mass_on, saturating_delta)
from .raylocal import (MetricError, kantorovich_potential, ray_mass_balance, transport_rays,
                       w1_primal)
from .scenarios import SCENARIOS, ScenarioError, gen_classic

EXIT_OK, EXIT_INPUT, EXIT_NEGATIVE = 0, 1, 2
EMIT_KINDS = ("json", "csv", "svg")


class InputError(Exception):
    pass


# -------------------------------------------------------------------- inputs


def _read_json(path: str) -> Any:
    try:
        return schema.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def load_instance(source: str) -> Instance:
    """A JSON file path, or ``scenario:<name>`` for a built-in instance."""
    if source.startswith("scenario:"):
        return gen_classic(source.split(":", 1)[1])
    return schema.parse_instance(_read_json(source))


def _delta(args, inst: Instance, default: Fraction = Fraction(0)) -> Fraction:
    if args.delta is not None:
        d = schema.q(args.delta)
    elif inst.delta is not None:
        d = inst.delta
    else:
        d = default
    if d < 0:
        raise InputError("delta must be non-negative")
    return d


def _weights(args, inst: Instance):
    if args.weight is not None:
        inst = Instance(inst.ground, inst.mu, inst.nu, inst.generator_specs, args.weight,
                        inst.grids, inst.delta)
    return inst.weights()


def _not_in_order(verdict: NotInOrder, inst: Instance, gs, delta, p) -> dict:
    check = verify_order_certificate(verdict, inst.mu, inst.nu, gs, delta, p)
    out = schema.dump_verdict(verdict, inst.ground, check)
    out["delta"] = fmt(delta)
    return out


# ------------------------------------------------------------------ rendering


def _hull2d(pts: list[tuple[float, float]]) -> list[tuple[float, float]]:
    pts = sorted(set(pts))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2")


def render_paving_svg(pav, ground: GroundSet) -> str:
    """Points coloured by class (mu atoms filled, targets hollow), class hulls outlined."""
    d = ground.dimension
    if d > 2:
        raise InputError("SVG output needs dimension at most 2")

    def xy(pid):
        c = ground.coords(pid)
        return float(c[0]), float(c[1]) if d == 2 else 0.0

    coords = [xy(pid) for pid in ground.ids]
    xs, ys = [c[0] for c in coords], [c[1] for c in coords]
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
    scale, pad = 360.0 / span, 20.0

    def px(pt):
        return (pad + (pt[0] - min(xs)) * scale, pad + (max(ys) - pt[1]) * scale)

    w = pad * 2 + (max(xs) - min(xs)) * scale
    h = pad * 2 + (max(ys) - min(ys)) * scale
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1f}" height="{h:.1f}">']
    for k, cls in enumerate(pav.classes):
        colour = _PALETTE[k % len(_PALETTE)]
        hull = [px(p) for p in _hull2d([xy(y) for y in cls.targets])]
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in hull)
        out.append(f'<polygon points="{pts}" fill="none" stroke="{colour}" stroke-width="2"/>')
        for y in cls.targets:
            a, b = px(xy(y))
            out.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="5" fill="white" stroke="{colour}"/>')
        for x in cls.atoms:
            a, b = px(xy(x))
            out.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="4" fill="{colour}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ------------------------------------------------------------------ commands


def cmd_check_order(args) -> tuple[int, dict, dict]:
    inst = load_instance(args.input)
    gs = inst.generator_set()
    p = _weights(args, inst)
    delta = _delta(args, inst)
    verdict = check_f_order(inst.mu, inst.nu, gs, delta, p)
    if isinstance(verdict, NotInOrder):
        return EXIT_NEGATIVE, _not_in_order(verdict, inst, gs, delta, p), {}
    out = schema.dump_verdict(verdict, inst.ground)
    out["delta"] = fmt(delta)
    out["witness_verified"] = verify_plan(verdict.witness, inst.mu, inst.nu, gs, delta, p)
    return EXIT_OK, out, {}


def _plan_csv(plan) -> str:
    rows = ["from,to,mass"] + [f"{e['from']},{e['to']},{e['mass']}" for e in plan["entries"]]
    return "\n".join(rows) + "\n"


def _support_csv(sup: dict) -> str:
    rows = ["," + ",".join(sup["cols"])]
    rows += [x + "," + ",".join(str(b) for b in row) for x, row in zip(sup["rows"], sup["matrix"])]
    return "\n".join(rows) + "\n"


def cmd_transport(args) -> tuple[int, dict, dict]:
    inst = load_instance(args.input)
    gs = inst.generator_set()
    p = _weights(args, inst)
    delta = _delta(args, inst)
    verdict = check_f_order(inst.mu, inst.nu, gs, delta, p)
    if isinstance(verdict, NotInOrder):
        return EXIT_NEGATIVE, _not_in_order(verdict, inst, gs, delta, p), {}
    plan, sup = maximal_support_plan(inst.mu, inst.nu, gs, delta, p)
    out = {"delta": fmt(delta),
           "witness": schema.dump_plan(verdict.witness, inst.ground),
           "maximal_plan": schema.dump_plan(plan, inst.ground),
           "support": schema.dump_support(sup),
           "verified": verify_plan(plan, inst.mu, inst.nu, gs, delta, p)}
    return EXIT_OK, out, {"csv": _plan_csv(out["maximal_plan"])}


def cmd_relaxed_support(args) -> tuple[int, dict, dict]:
    inst = load_instance(args.input)
    gs = inst.generator_set()
    p = _weights(args, inst)
    delta = _delta(args, inst, saturating_delta(inst.mu, inst.nu, p))
    verdict = check_f_order(inst.mu, inst.nu, gs, delta, p)
    if isinstance(verdict, NotInOrder):
        return EXIT_NEGATIVE, _not_in_order(verdict, inst, gs, delta, p), {}
    _, sup = maximal_support_plan(inst.mu, inst.nu, gs, delta, p)
    full = sup.pairs == {(x, y) for x in inst.mu.support for y in inst.nu.support}
    out = {"delta": fmt(delta), "saturating_delta": fmt(saturating_delta(inst.mu, inst.nu, p)),
           "support": schema.dump_support(sup), "full_support": full}
    return EXIT_OK, out, {"csv": _support_csv(out["support"])}


def _require_order(inst, gs):
    verdict = check_f_order(inst.mu, inst.nu, gs)
    if isinstance(verdict, NotInOrder):
        return _not_in_order(verdict, inst, gs, Fraction(0), None)
    return None


def cmd_paving(args) -> tuple[int, dict, dict]:
    inst = load_instance(args.input)
    gs = inst.generator_set()
    p = _weights(args, inst)
    delta = _delta(args, inst)
    verdict = check_f_order(inst.mu, inst.nu, gs, delta, p)
    if isinstance(verdict, NotInOrder):
        return EXIT_NEGATIVE, _not_in_order(verdict, inst, gs, delta, p), {}
    try:
        pav = build_paving(inst.mu, inst.nu, gs, delta, p)
    except DichotomyViolation as exc:
        return EXIT_NEGATIVE, {"dichotomy_violation": str(exc)}, {}
    out = schema.dump_paving(pav, dichotomy_holds(pav), check_b_membership(pav, inst.mu))
    extras = {"csv": "atom,class\n" + "".join(f"{x},{k}\n" for k, c in enumerate(pav.classes)
                                              for x in c.atoms)}
    if "svg" in args.emit:
        extras["svg"] = render_paving_svg(pav, inst.ground)
    return EXIT_OK, out, extras


def cmd_apirc(args) -> tuple[int, dict, dict]:
    inst = load_instance(args.input)
    gs = inst.generator_set()
    if args.subsets is None:
        raise InputError("apirc needs --subsets")
    subsets = schema.parse_subsets(_read_json(args.subsets))
    negative = _require_order(inst, gs)
    if negative:
        return EXIT_NEGATIVE, negative, {}
    try:
        ap = build_apirc(inst.mu, inst.nu, gs, subsets)
    except (KeyError, IndexError) as exc:
        raise InputError(f"bad generator subset: {exc}") from None
    out = schema.dump_apirc(ap)
    csv = "atom," + ",".join(f"z{k}" for k in range(len(ap.subsets))) + "\n"
    csv += "".join(f"{x}," + ",".join(map(str, lab)) + "\n" for x, lab in ap.labels.items())
    return EXIT_OK, out, {"csv": csv}


def cmd_polar(args) -> tuple[int, dict, dict]:
    inst = load_instance(args.input)
    gs = inst.generator_set()
    if args.pairs is None:
        raise InputError("polar needs --pairs")
    U = schema.parse_pairs(_read_json(args.pairs), inst.ground)
    p = _weights(args, inst)
    delta = _delta(args, inst)
    verdict = check_f_order(inst.mu, inst.nu, gs, delta, p)
    if isinstance(verdict, NotInOrder):
        return EXIT_NEGATIVE, _not_in_order(verdict, inst, gs, delta, p), {}
    try:
        rep = check_polar_theorem(U, inst.mu, inst.nu, gs, delta, p)
    except SectionHypothesisViolated:
        # the polarity decision stands; only the characterization is not claimed
        m = max_mass_on(U, inst.mu, inst.nu, gs, delta, p)
        return EXIT_OK, {"pairs": [list(pr) for pr in U.sorted(inst.ground)],
                         "delta": fmt(delta), "max_mass": fmt(m), "polar": m == 0,
                         "trivially_polar": is_trivially_polar(U, inst.mu, inst.nu),
                         "section_hypothesis": False, "equivalence_asserted": False}, {}
    out = schema.dump_polar(rep, U, inst.ground)
    out["equivalence_asserted"] = True
    return EXIT_OK, out, {}


def cmd_rays(args) -> tuple[int, dict, dict]:
    inst = schema.parse_metric_instance(_read_json(args.input))
    if args.metric is not None:
        inst = type(inst).build(inst.ground, args.metric, inst.mu, inst.nu)
    v, value = kantorovich_potential(inst)
    plan, cost = w1_primal(inst)
    rays = transport_rays(inst, v)
    bal = ray_mass_balance(inst, rays)
    g = inst.ground
    out = {
        "potential": {pid: fmt(v[pid]) for pid in g.ids},
        "dual_value": fmt(value),
        "primal_value": fmt(cost),
        "plan": [{"from": x, "to": y, "mass": fmt(m)}
                 for (x, y), m in sorted(plan.items(), key=lambda kv: (g.index(kv[0][0]),
                                                                       g.index(kv[0][1])))],
        "rays": [list(r) for r in rays.rays],
        "branch_points": list(rays.branch_points),
        "mass_balance": {"differences": [fmt(d) for d in bal.differences],
                         "asserted": bal.asserted, "balanced": bal.balanced},
    }
    return EXIT_OK, out, {}


def cmd_scenario(args) -> tuple[int, dict, dict]:
    return EXIT_OK, schema.dump_instance(gen_classic(args.name)), {}


def cmd_selftest(args) -> tuple[int, dict, dict]:
    from .acceptance import run_all
    results = run_all(args.seed or 0)
    for r in results:
        print(r.line(), file=sys.stderr)
    ok = all(r.passed for r in results)
    out = {"passed": ok, "criteria": [{"number": r.number, "name": r.name, "passed": r.passed,
                                       "detail": r.detail} for r in results]}
    return (EXIT_OK if ok else EXIT_INPUT), out, {}


COMMANDS = {
    "check-order": cmd_check_order,
    "transport": cmd_transport,
    "paving": cmd_paving,
    "apirc": cmd_apirc,
    "polar": cmd_polar,
    "relaxed-support": cmd_relaxed_support,
    "rays": cmd_rays,
    "scenario": cmd_scenario,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--emit", default="json",
                        help="comma-separated artifact kinds: json, csv, svg")
    common.add_argument("--out", help="directory for artifacts (default: JSON to stdout)")
    parser = argparse.ArgumentParser(prog="ctransport",
                                     description="Exact constrained-transport computations.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("check-order", "transport", "paving", "apirc", "polar", "relaxed-support"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("--input", required=True,
                        help="instance JSON, or scenario:<name> for a built-in one")
        sp.add_argument("--delta", help="relaxation level as p/q")
        sp.add_argument("--weight", choices=("one", "one_plus_maxnorm"))
        if name == "apirc":
            sp.add_argument("--subsets", help="JSON list of generator id or index lists")
        if name == "polar":
            sp.add_argument("--pairs", help='JSON {"pairs": [[from, to], ...]}')
    sp = sub.add_parser("rays", parents=[common])
    sp.add_argument("--input", required=True, help="metric instance JSON")
    sp.add_argument("--metric", choices=("euclidean", "l1"), help="override the file's metric")
    sp = sub.add_parser("scenario", parents=[common])
    sp.add_argument("name", choices=SCENARIOS)
    sp = sub.add_parser("selftest", parents=[common])
    sp.add_argument("--seed", type=int, default=0, help="seed for the random instance streams")
    return parser


def _write(args, payload: dict, extras: dict) -> None:
    kinds = [k.strip() for k in args.emit.split(",") if k.strip()]
    bad = [k for k in kinds if k not in EMIT_KINDS]
    if bad:
        raise InputError(f"unknown --emit kinds {bad}")
    text = schema.dumps(payload)
    if args.out is None:
        sys.stdout.write(text)
        return
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = args.command
    if "json" in kinds:
        (out / f"{stem}.json").write_text(text)
    for kind in ("csv", "svg"):
        if kind in kinds and kind in extras:
            (out / f"{stem}.{kind}").write_text(extras[kind])


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        status, payload, extras = COMMANDS[args.command](args)
        _write(args, payload, extras)
        return status
    except (InputError, schema.ParseError, schema.SchemaError, GroundError, ScenarioError,
            MetricError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


# ---------------------------------------------------------------- determinism


def determinism_check() -> tuple[bool, str]:
    """Run each command twice in-process and compare the emitted bytes."""
    with tempfile.TemporaryDirectory() as tmp:
        subsets = os.path.join(tmp, "subsets.json")
        Path(subsets).write_text('{"subsets": [["x", "-x"]]}')
        pairs = os.path.join(tmp, "pairs.json")
        Path(pairs).write_text('{"pairs": [["-2", "-3"], ["2", "1"]]}')
        metric = os.path.join(tmp, "metric.json")
        Path(metric).write_text(
            '{"points": [{"id": "a", "coords": ["0"]}, {"id": "b", "coords": ["1"]},'
            ' {"id": "c", "coords": ["2"]}, {"id": "d", "coords": ["3"]}],'
            ' "metric": "l1", "mu": {"a": "1/2", "c": "1/2"}, "nu": {"b": "1/2", "d": "1/2"}}')
        runs = [
            ["scenario", "two_islands"],
            ["check-order", "--input", "scenario:two_islands"],
            ["check-order", "--input", "scenario:submartingale_shift"],
            ["transport", "--input", "scenario:symmetric_split"],
            ["paving", "--input", "scenario:two_islands"],
            ["apirc", "--input", "scenario:two_islands", "--subsets", subsets],
            ["polar", "--input", "scenario:two_islands", "--pairs", pairs],
            ["relaxed-support", "--input", "scenario:relaxed_threshold"],
            ["rays", "--input", metric],
        ]
        differing = []
        for argv in runs:
            outputs = []
            for _ in range(2):
                buf = io.StringIO()
                with contextlib.redirect_stdout(buf):
                    main(argv)
                outputs.append(buf.getvalue().encode())
            if outputs[0] != outputs[1] or not outputs[0]:
                differing.append(argv[0])
    ok = not differing
    return ok, f"{len(runs) - len(differing)}/{len(runs)} commands byte-identical"


if __name__ == "__main__":
    sys.exit(main())
