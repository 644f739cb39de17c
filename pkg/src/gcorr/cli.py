"""Command-line front end: validate / compose / verify / example / random.

Exit codes: 0 ok, 1 parse or validation failure, 2 composition failure,
3 theorem tolerance breach.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import catalog, cstar, io_json
from .composition import CompositionStageError, GroupoidMismatch, compose
from .correspondence import validate
from .randgen import random_pair
from .report import Report
from .util import GcorrError, parse_scalar

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_COMPOSITION = 2
EXIT_THEOREM = 3


def _emit(report: Report, as_json: bool) -> None:
    if as_json:
        print(json.dumps(report.to_json(), indent=2, sort_keys=True))
    else:
        print(report.render())


def _load(path: str) -> io_json.InstanceData:
    return io_json.parse_instance(Path(path).read_text(), source=path)


def _load_pair(path_x: str, path_y: str):
    data_x = _load(path_x)
    data_y = _load(path_y)
    if not data_x.correspondences or not data_y.correspondences:
        raise io_json.ParseError(path_x, "instance files must contain a correspondence")
    return data_x.correspondences[0][1], data_y.correspondences[0][1]


def cmd_validate(args) -> int:
    try:
        data = _load(args.path)
    except io_json.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    overall = Report(f"validate {args.path}")
    for name, corr in data.correspondences:
        rep = validate(corr, tol=args.tol)
        for chk in rep.checks:
            overall.add(f"{name}.{chk.name}", chk.passed, chk.residual, chk.witness)
        overall.notes[f"{name}.scalar_mode"] = rep.notes.get("scalar_mode", "exact")
    _emit(overall, args.json)
    return EXIT_OK if overall.passed else EXIT_VALIDATION


def _read_cochain(path: str, result_points) -> tuple:
    doc = json.loads(Path(path).read_text())
    try:
        return tuple(parse_scalar(doc[p]) for p in result_points)
    except KeyError as exc:
        raise io_json.ParseError(path, f"cochain file misses point {exc}") from exc


def cmd_compose(args) -> int:
    try:
        corr_x, corr_y = _load_pair(args.path_x, args.path_y)
    except io_json.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    for name, corr in (("first", corr_x), ("second", corr_y)):
        rep = validate(corr, tol=args.tol)
        if not rep.passed:
            print(f"{name} input fails validation:\n{rep.render()}", file=sys.stderr)
            return EXIT_VALIDATION
    b_values = None
    try:
        if args.cochain_file:
            # probe the middle space once so the override can be indexed
            from .groupoids import fibre_product

            fp = fibre_product(corr_x.space.right, corr_y.space.left)
            b_values = _read_cochain(args.cochain_file, fp.point_ids)
        result = compose(corr_x, corr_y, b_values=b_values, tol=args.tol)
    except (GroupoidMismatch, CompositionStageError, io_json.ParseError, GcorrError) as exc:
        stage = getattr(exc, "stage", "input")
        print(f"composition failed at {stage}: {exc}", file=sys.stderr)
        return EXIT_COMPOSITION
    Path(args.out).write_text(
        io_json.serialize_instance([("composite", result.composite)])
    )
    _emit(result.report, args.json)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        corr_x, corr_y = _load_pair(args.path_x, args.path_y)
    except io_json.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        # the composition precondition runs at its own stage tolerance;
        # --tol governs the theorem deviations below
        result = compose(corr_x, corr_y)
    except (GroupoidMismatch, CompositionStageError) as exc:
        stage = getattr(exc, "stage", "input")
        print(f"composition failed at {stage}: {exc}", file=sys.stderr)
        return EXIT_COMPOSITION
    gram = cstar.verify_theorem(
        corr_x, corr_y, result,
        trials=args.trials, seed=args.seed, tol=args.tol, threads=args.threads,
    )
    _emit(gram.report(), args.json)
    return EXIT_OK if gram.passed else EXIT_THEOREM


def cmd_example(args) -> int:
    try:
        corr_x, corr_y, meta = catalog.example_pair(args.name)
    except GcorrError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_VALIDATION
    _write_pair(args.out, corr_x, corr_y)
    print(f"{args.name}: {meta['description']}")
    print(f"wrote {args.out}.x.json and {args.out}.y.json")
    return EXIT_OK


def cmd_random(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",")]
        max_x, max_y, max_mid = (sizes + [16, 16, 8])[:3]
    except ValueError:
        print(f"bad --sizes {args.sizes!r}; expected e.g. 16,16,8", file=sys.stderr)
        return EXIT_VALIDATION
    corr_x, corr_y = random_pair(args.seed, max_x=max_x, max_y=max_y, max_mid=max_mid)
    _write_pair(args.out, corr_x, corr_y)
    print(f"wrote {args.out}.x.json and {args.out}.y.json (seed {args.seed})")
    return EXIT_OK


def _write_pair(prefix: str, corr_x, corr_y) -> None:
    Path(f"{prefix}.x.json").write_text(io_json.serialize_instance([("x", corr_x)]))
    Path(f"{prefix}.y.json").write_text(io_json.serialize_instance([("y", corr_y)]))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gcorr",
        description="validate, compose and certify finite groupoid correspondences",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tol", type=float, default=1e-9, help="numerical tolerance")
        p.add_argument("--json", action="store_true", help="machine-readable report")

    p = sub.add_parser("validate", help="check one instance file")
    p.add_argument("path")
    common(p)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("compose", help="compose two instances and write the composite")
    p.add_argument("path_x")
    p.add_argument("path_y")
    p.add_argument("out")
    p.add_argument("--cochain-file", default=None, help="JSON {point: weight} overriding the middle cochain")
    common(p)
    p.set_defaults(fn=cmd_compose)

    p = sub.add_parser("verify", help="compose and certify the Hilbert-module isometry")
    p.add_argument("path_x")
    p.add_argument("path_y")
    p.add_argument("--trials", type=int, default=200, help="random vectors per instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("example", help="emit a catalog pair as instance files")
    p.add_argument("name", choices=list(catalog.EXAMPLE_NAMES))
    p.add_argument("out", help="output path prefix")
    p.set_defaults(fn=cmd_example)

    p = sub.add_parser("random", help="emit a seeded random pair as instance files")
    p.add_argument("out", help="output path prefix")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sizes", default="16,16,8", help="max points X, max points Y, max middle arrows")
    p.set_defaults(fn=cmd_random)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
