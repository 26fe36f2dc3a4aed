"""Command-line interface.

Exit codes: 0 success, 1 property violated or points differ, 2 usage or
input error.
"""
import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .equivalences import ALL_VERDICTS, EquivalenceKind, compare, distinguish, equivalence
from .errors import ClosureBisimError, NoWitnessError
from .generators import random_model
from .io import (export_dot, image_to_model, load_palette, load_partition, read_model,
                 render_classes, save_model, save_projection)
from .logic import evaluate, parse, to_text
from .minimize import minimize, verify_quotient
from .model import validate

KINDS = [k.value for k in EquivalenceKind]


class UsageError(Exception):
    pass


def _read_bytes(path):
    with open(path, "rb") as fh:
        return fh.read()


def _read_text(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(text, out=None):
    if out:
        mode = "wb" if isinstance(text, bytes) else "w"
        with open(out, mode) as fh:
            fh.write(text)
    elif isinstance(text, bytes):
        sys.stdout.buffer.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_check(args):
    model = read_model(args.model)
    f = parse(args.formula)
    sat = evaluate(model, f, strict=args.strict)
    if args.point is not None:
        value = bool(sat[model.id_of(args.point)])
        print(json.dumps(value))
        return 0 if value else 1
    print(json.dumps(model.names_of(sat)))
    return 0


def cmd_compare(args):
    model = read_model(args.model)
    kinds = [k.strip() for k in args.kinds.split(",") if k.strip()]
    bad = [k for k in kinds if k not in ALL_VERDICTS]
    if bad:
        raise UsageError(f"unknown kind {bad[0]!r}; choose from {','.join(ALL_VERDICTS)}")
    report = compare(model, args.p1, args.p2, kinds)
    print(json.dumps(report))
    return 0 if all(report[k] for k in kinds) else 1


def cmd_minimize(args):
    model = read_model(args.model)
    result = minimize(model, args.kind)
    _emit(save_model(result.quotient), args.out)
    proj = save_projection(model, result.quotient, result.projection)
    if args.projection:
        _emit(proj, args.projection)
    elif args.out:
        _emit(proj, os.path.splitext(args.out)[0] + ".projection.json")
    print(f"{args.kind}: {model.n} points -> {result.class_count} classes", file=sys.stderr)
    if args.verify:
        check = verify_quotient(model, result, seed=args.seed)
        print("verify: " + ("ok" if check else "FAILED " + check.counterexample), file=sys.stderr)
        return 0 if check else 1
    return 0


def _grid(args):
    return image_to_model(_read_bytes(args.image), load_palette(_read_text(args.palette)))


def cmd_ingest(args):
    grid = _grid(args)
    _emit(save_model(grid.base), args.out)
    return 0


def cmd_render(args):
    grid = _grid(args)
    fmt = "png" if args.out.lower().endswith(".png") else "ppm"
    part = equivalence(grid.base, args.kind)
    _emit(render_classes(grid, part, fmt), args.out)
    print(f"{args.kind}: {len(part)} classes", file=sys.stderr)
    return 0


def cmd_distinguish(args):
    model = read_model(args.model)
    try:
        w = distinguish(model, args.p1, args.p2)
    except NoWitnessError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    _emit(json.dumps({"formula": to_text(w.formula), "holds_at": w.holds_at,
                      "fails_at": w.fails_at}), args.out)
    return 0


def cmd_dot(args):
    model = read_model(args.model)
    part = None
    if args.partition:
        part = load_partition(_read_text(args.partition), model)
    elif args.kind:
        part = equivalence(model, args.kind)
    _emit(export_dot(model, part), args.out)
    return 0


def cmd_validate(args):
    doc = json.loads(_read_text(args.model))
    findings = validate(doc, axioms=args.axioms)
    for f in findings:
        print(f"{f.level}: {f.message}")
    return 1 if any(f.level == "error" for f in findings) else 0


def cmd_random(args):
    model = random_model(np.random.default_rng(args.seed), n=args.points,
                         max_points=args.max_points)
    _emit(save_model(model), args.out)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="closurebisim",
                                description="Spatial bisimilarities and logics on finite closure models.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", help="evaluate a formula")
    s.add_argument("--model", required=True)
    s.add_argument("--formula", required=True)
    s.add_argument("--point")
    s.add_argument("--strict", action="store_true", help="unknown atoms are an error")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("compare", help="verdict report for two points")
    s.add_argument("--model", required=True)
    s.add_argument("--p1", required=True)
    s.add_argument("--p2", required=True)
    s.add_argument("--kinds", default=",".join(ALL_VERDICTS))
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("minimize", help="quotient modulo an equivalence")
    s.add_argument("--model", required=True)
    s.add_argument("--kind", required=True, choices=KINDS)
    s.add_argument("--out")
    s.add_argument("--projection", help="projection file (default: next to --out)")
    s.add_argument("--verify", action="store_true")
    s.add_argument("--seed", type=int, default=0, help="seed for the sampled formulas of --verify")
    s.set_defaults(func=cmd_minimize)

    s = sub.add_parser("ingest", help="image to model")
    s.add_argument("--image", required=True)
    s.add_argument("--palette", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("render", help="colour an image by equivalence class")
    s.add_argument("--image", required=True)
    s.add_argument("--palette", required=True)
    s.add_argument("--kind", required=True, choices=KINDS)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("distinguish", help="formula separating two points")
    s.add_argument("--model", required=True)
    s.add_argument("--p1", required=True)
    s.add_argument("--p2", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_distinguish)

    s = sub.add_parser("dot", help="Graphviz export")
    s.add_argument("--model", required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--partition")
    g.add_argument("--kind", choices=KINDS)
    s.add_argument("--out")
    s.set_defaults(func=cmd_dot)

    s = sub.add_parser("validate", help="check a model file")
    s.add_argument("--model", required=True)
    s.add_argument("--axioms", action="store_true")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("random", help="random model")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--points", type=int)
    s.add_argument("--max-points", type=int, default=12)
    s.add_argument("--out")
    s.set_defaults(func=cmd_random)
    return p


def run(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ClosureBisimError, UsageError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
