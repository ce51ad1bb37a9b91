"""Command-line driver.

Exit codes: 0 on success (or a passed check), 1 when a decision procedure
found a violation (permutability counterexample, repetitiveness witness,
invalid forest), 2 on usage or validation errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import decide, forest as forests, series as series_mod, workspace as ws
from .errors import MarbleworksError, ValidationError
from .machines import eval_machine
from .products import prod_positions


def _load_ws(args) -> ws.Workspace:
    if getattr(args, "workspace", None):
        return ws.load_workspace(args.workspace)
    return ws.Workspace()


def _machine(args, name, space):
    if os.path.exists(name):
        with open(name) as fh:
            return ws.load_machine(json.load(fh), name, space)
    if name in space.machines:
        return space.machines[name]
    raise ValidationError(name, "no such machine file or workspace entry")


def _morphism(args, name, space):
    if os.path.exists(name):
        with open(name) as fh:
            return ws.load_morphism(json.load(fh), name).morphism
    if name in space.morphisms:
        return space.morphisms[name].morphism
    raise ValidationError(name, "no such morphism file or workspace entry")


def _series(args, name, space):
    if os.path.exists(name):
        with open(name) as fh:
            return ws.load_series(json.load(fh), name, space)
    if name in space.series:
        return space.series[name]
    raise ValidationError(name, "no such series file or workspace entry")


def _forest_text(arg) -> str:
    if os.path.exists(arg):
        with open(arg) as fh:
            return fh.read().strip()
    return arg


def _emit(args, text_lines, payload):
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def cmd_eval(args):
    space = _load_ws(args)
    machine = _machine(args, args.machine, space)
    value = eval_machine(machine, args.word)
    _emit(args, [str(value)], {"value": value})
    return 0


def cmd_series_eval(args):
    space = _load_ws(args)
    expr = _series(args, args.series, space)
    value = series_mod.eval_series(expr, args.word)
    _emit(args, [str(value)], {"value": value})
    return 0


def cmd_forest(args):
    space = _load_ws(args)
    mu = _morphism(args, args.morphism, space)
    if args.action == "build":
        f = forests.build_forest(mu, args.word)
        text = forests.serialize_forest(f)
        _emit(args, [text], {
            "forest": text,
            "height": f.height(),
            "bound": forests.height_bound(mu),
        })
        return 0
    f = forests.parse_forest(_forest_text(args.forest), mu, args.word)
    if args.action == "dot":
        violation = forests.validate_forest(f)
        if violation is not None:
            _emit(args, [f"invalid: {violation.reason} at {violation.path}"],
                  {"ok": False, "path": list(violation.path), "reason": violation.reason})
            return 1
        print(forests.forest_dot(f))
        return 0
    violation = forests.validate_forest(f)
    if violation is not None:
        _emit(args, [f"violation at {violation.path}: {violation.reason}"],
              {"ok": False, "path": list(violation.path), "reason": violation.reason})
        return 1
    try:
        forests.partition_check(f)
    except MarbleworksError as exc:
        _emit(args, [f"violation: {exc}"], {"ok": False, "reason": str(exc)})
        return 1
    _emit(args, [f"ok: height {f.height()} <= bound {forests.height_bound(mu)}"],
          {"ok": True, "height": f.height(), "bound": forests.height_bound(mu)})
    return 0


def cmd_prod(args):
    space = _load_ws(args)
    machine = _machine(args, args.machine, space)
    positions = [int(p) for p in args.positions.split(",") if p]
    value = prod_positions(machine, args.word, positions)
    _emit(args, [str(value)], {"value": value})
    return 0


def cmd_permutable(args):
    space = _load_ws(args)
    machine = _machine(args, args.machine, space)
    report = decide.check_permutable(
        machine, args.k_max_word, budget=args.budget, jobs=args.jobs
    )
    if report.ok:
        _emit(args, [f"permutable at K={args.k_max_word} ({report.instances} instances checked)"],
              {"ok": True, "k_max_word": args.k_max_word, "instances": report.instances})
        return 0
    ce = report.counterexample.to_json(machine.morphism)
    _emit(args, [
        f"counterexample after {report.instances} instances:",
        json.dumps(ce, indent=2, sort_keys=True),
    ], {"ok": False, "instances": report.instances, "counterexample": ce})
    return 1


def cmd_pump(args):
    space = _load_ws(args)
    machine = _machine(args, args.machine, space)
    probe = None
    if args.probe:
        if os.path.exists(args.probe):
            with open(args.probe) as fh:
                probe = ws.load_probe(json.load(fh), args.probe)
        elif args.probe in space.probes:
            probe = space.probes[args.probe]
        else:
            raise ValidationError(args.probe, "no such probe file or workspace entry")
        if args.omega and args.omega != probe.omega:
            probe = ws.RepetitivenessProbe(
                probe.alpha, probe.alpha_parts, probe.us, probe.beta,
                args.omega, probe.lo, probe.hi,
            )
    report = decide.falsify_repetitive(
        machine, args.k, probe, budget=args.budget or 5000, seed=args.seed
    )
    if report.witness is None:
        _emit(args, [f"no witness within budget ({report.evaluations} evaluations)"],
              {"witness": None, "evaluations": report.evaluations})
        return 0
    w = report.witness
    w1, w2 = w.words()
    payload = {
        "xs": list(w.xs), "ys": list(w.ys), "xs2": list(w.xs2), "ys2": list(w.ys2),
        "sums": list(w.sums), "value1": w.value1, "value2": w.value2,
        "word1": w1, "word2": w2, "evaluations": report.evaluations,
    }
    _emit(args, [
        f"witness: X={w.xs} Y={w.ys} vs X'={w.xs2} Y'={w.ys2} (sums {w.sums})",
        f"  f({w1}) = {w.value1}",
        f"  f({w2}) = {w.value2}",
    ], payload)
    return 1


def cmd_decompose(args):
    space = _load_ws(args)
    machine = _machine(args, args.machine, space)
    result = decide.decompose(
        machine, args.word,
        k_max_word=args.k_max_word,
        check=not args.skip_permutability_check,
        budget=args.budget,
    )
    lines = [
        f"f    = {result.value}",
        f"f'   = {result.blind_part}",
        f"f''  = {result.lower_part}",
    ]
    payload = {"f": result.value, "f1": result.blind_part, "f2": result.lower_part,
               "forest": forests.serialize_forest(result.forest)}
    if args.verify:
        check = eval_machine(machine, args.word) == result.blind_part + result.lower_part
        lines.append(f"verifyf = f' + f'': {'ok' if check else 'FAIL'}")
        payload["verified"] = check
    _emit(args, lines, payload)
    return 0


def cmd_counts(args):
    space = _load_ws(args)
    with open(args.arch) as fh:
        doc = json.load(fh)
    if "morphism" not in doc:
        raise ValidationError(args.arch, "architecture file needs a morphism")
    if isinstance(doc["morphism"], str):
        mu = _morphism(args, doc["morphism"], space)
    else:
        mu = ws.load_morphism(doc["morphism"], args.arch).morphism
    arch = ws.arch_from_json(doc.get("arch"), mu, args.arch)
    f = forests.parse_forest(_forest_text(args.forest), mu)
    violation = forests.validate_forest(f)
    if violation is not None:
        raise ValidationError(args.forest, f"invalid forest: {violation.reason}")
    total = decide.count_architecture(f, arch)
    lead, rest = decide.count_split(f, arch)
    _emit(args, [f"count   = {total}", f"count'  = {lead}", f"count'' = {rest}"],
          {"count": total, "count_lead": lead, "count_rest": rest})
    return 0


def cmd_convert(args):
    space = _load_ws(args)
    if args.direction == "blind-to-series":
        machine = _machine(args, args.source, space)
        expr = series_mod.blind_to_series(machine)
        doc = ws.series_to_json(expr)
    else:
        expr = _series(args, args.source, space)
        machine = series_mod.series_to_blind(expr)
        doc = ws.machine_to_json(machine)
    text = json.dumps(doc, indent=2, sort_keys=True)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {args.output}")
    else:
        print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="marbleworks",
        description="Workbench for unary-output marble/blind/pebble bimachines.",
    )
    parser.add_argument("--workspace", "-w", help="workspace JSON with named objects")
    parser.add_argument("--json", action="store_true", help="machine-readable reports")
    default_budget = os.environ.get("MARBLEWORKS_BUDGET")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a machine on a word")
    p.add_argument("machine")
    p.add_argument("word")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("series-eval", help="evaluate a series expression on a word")
    p.add_argument("series")
    p.add_argument("word")
    p.set_defaults(fn=cmd_series_eval)

    p = sub.add_parser("forest", help="build, check, or render factorization forests")
    p.add_argument("action", choices=["build", "check", "dot"])
    p.add_argument("morphism")
    p.add_argument("word_or_forest")
    p.add_argument("--word", help="word the forest must factor (check/dot)")
    p.set_defaults(fn=cmd_forest)

    p = sub.add_parser("prod", help="production on a position multiset")
    p.add_argument("machine")
    p.add_argument("word")
    p.add_argument("--positions", required=True, help="comma-separated 1-based positions")
    p.set_defaults(fn=cmd_prod)

    p = sub.add_parser("permutable", help="bounded permutability check")
    p.add_argument("machine")
    p.add_argument("--k-max-word", type=int, default=2,
                   help="max factor length K (the sound bound 2^(3|M|) is usually out of reach)")
    p.add_argument("--budget", type=int, default=int(default_budget) if default_budget else None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_permutable)

    p = sub.add_parser("pump", help="search for a repetitiveness violation")
    p.add_argument("machine")
    p.add_argument("--k", type=int, required=True, help="number of pumped factors")
    p.add_argument("--omega", type=int, default=0, help="override the probe's omega")
    p.add_argument("--probe", help="probe file or workspace name (random probes otherwise)")
    p.add_argument("--budget", type=int, default=int(default_budget) if default_budget else None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_pump)

    p = sub.add_parser("decompose", help="split f into the leading blind part and the rest")
    p.add_argument("machine")
    p.add_argument("word")
    p.add_argument("--k-max-word", type=int, default=2)
    p.add_argument("--budget", type=int, default=int(default_budget) if default_budget else None)
    p.add_argument("--skip-permutability-check", action="store_true")
    p.add_argument("--verify", action="store_true")
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("counts", help="architecture count and its split on a forest")
    p.add_argument("forest", help="forest file or bracketed text")
    p.add_argument("arch", help="JSON file with the morphism and the architecture")
    p.set_defaults(fn=cmd_counts)

    p = sub.add_parser("convert", help="translate between blind machines and series")
    p.add_argument("direction", choices=["blind-to-series", "series-to-blind"])
    p.add_argument("source")
    p.add_argument("--output", "-o")
    p.set_defaults(fn=cmd_convert)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "forest":
        if args.action == "build":
            args.word = args.word_or_forest
        else:
            args.forest = args.word_or_forest
    try:
        return args.fn(args)
    except (MarbleworksError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
