"""Command-line front end.

Exit codes: 0 success or verified, 1 property refuted, 2 usage or parse
error, 3 indeterminate (round budget exhausted).
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import analysis, constructions, dynamics, io
from .dynamics import BP, MAJORITY, MODELS, REVERSIBLE, Rule
from .torus import TorusShape, VertexSet

EXIT_OK, EXIT_REFUTED, EXIT_USAGE, EXIT_INDETERMINATE = 0, 1, 2, 3
DEFAULT_SEED = 20240101
TABLE_COLUMNS = ["d", "r", "n", "model", "monotone", "lower", "constructed", "upper", "verified"]

CONSTRUCTIONS = {
    "large-r": lambda shape, r: constructions.build_large_r_monotone(shape, r),
    "large-r-bp": lambda shape, r: constructions.build_large_r_bp(shape, r),
    "small-r-monotone": lambda shape, r: constructions.build_small_r_monotone(shape, r),
    "small-r-bp": lambda shape, r: constructions.build_small_r_bp(shape, r),
    "odd-n": lambda shape, r: constructions.build_small_r_reversible_odd(shape, r),
    "a0": lambda shape, r: constructions.build_a0(shape, r),
    "majority": lambda shape, r: constructions.build_majority_dynamo(shape),
}


class UsageError(Exception):
    pass


def _int_range(text: str) -> list[int]:
    """``"5"``, ``"4,5"`` or ``"9..15"`` (inclusive; empty when reversed)."""
    out: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = part.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            elif part:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer range {text!r}") from None
    return out


def _rule(args) -> Rule:
    if args.model == MAJORITY:
        return Rule.majority()
    if args.r is None:
        raise UsageError(f"--r is required for model {args.model}")
    return Rule(args.model, args.r)


def _shape(args) -> TorusShape:
    if args.n is None or args.d is None:
        raise UsageError("--n and --d are required")
    return TorusShape(args.n, args.d)


def _build(name: str, shape: TorusShape, r: int | None) -> constructions.ConstructionReport:
    if r is None and name not in ("a0", "majority"):
        raise UsageError(f"construction {name} needs --r")
    return CONSTRUCTIONS[name](shape, r)


def _table1(shape: TorusShape, report: constructions.ConstructionReport):
    rule = report.rule
    try:
        return analysis.table1_bounds(shape.d, rule.r, shape.n, rule.kind,
                                      report.claim == constructions.MONOTONE_DYNAMO)
    except ValueError:
        return None


def _seed_config(args, shape_hint: TorusShape | None = None):
    if args.seed_file:
        return io.read_config(args.seed_file)
    if getattr(args, "construction", None):
        shape = _shape(args)
        return _build(args.construction, shape, args.r).config
    if getattr(args, "random_density", None) is not None:
        shape = _shape(args)
        rng = np.random.default_rng(args.seed)
        return VertexSet(shape, rng.random(shape.vertex_count) < args.random_density)
    raise UsageError("give --seed-file, --construction or --random-density")


def cmd_construct(args) -> int:
    shape = _shape(args)
    report = _build(args.construction, shape, args.r)
    if args.model is not None and args.model != report.rule.kind:
        raise UsageError(f"construction {args.construction} is for model {report.rule.kind}, "
                         f"not {args.model}")
    path = Path(f"{args.out}.cfg")
    io.write_config(path, report.config)
    ref = _table1(shape, report)
    table = "n/a" if ref is None else str(ref.upper)
    print(f"construction={args.construction} claim={report.claim} model={report.rule} "
          f"size={report.size}, bound={report.predicted_size_bound}, table1={table} "
          f"file={path}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = _seed_config(args)
    shape = config.shape
    rule = _rule(args)
    outcome = dynamics.run(shape, config, rule, args.max_rounds, record=args.trace is not None)
    if args.trace:
        with open(args.trace, "w") as fh:
            for t, frame in enumerate(outcome.frames):
                state = io.encode_config(VertexSet(shape, frame)).splitlines()[1]
                fh.write(f"{t} {state}\n")
    print(f"{outcome.describe()} monotone={str(outcome.monotone).lower()} "
          f"rounds={outcome.rounds_run}")
    return {True: EXIT_OK, False: EXIT_REFUTED, None: EXIT_INDETERMINATE}[outcome.is_dynamo]


def cmd_verify(args) -> int:
    config = io.read_config(args.seed_file)
    shape = config.shape
    rule = _rule(args)
    outcome = dynamics.run(shape, config, rule, args.max_rounds)
    kind = "monotone dynamo" if args.monotone else "dynamo"
    if outcome.is_dynamo is None:
        print(f"{kind}: {outcome.describe()}")
        return EXIT_INDETERMINATE
    if not outcome.is_dynamo:
        print(f"not a {kind}: {outcome.describe()}")
        return EXIT_REFUTED
    if args.monotone and not outcome.monotone:
        print(f"not a {kind}: {outcome.describe()} but some vertex deactivated")
        return EXIT_REFUTED
    print(f"{kind}: {outcome.describe()}")
    return EXIT_OK


def cmd_search(args) -> int:
    shape = _shape(args)
    rule = _rule(args)
    if shape.vertex_count > args.cap:
        raise UsageError(f"T_{shape.n}^{shape.d} has {shape.vertex_count} vertices, "
                         f"over the enumeration cap of {args.cap}")
    result = analysis.min_dynamo_search(shape, rule, args.monotone, args.budget,
                                        args.symmetry, max_vertices=args.cap)
    witness = [] if result.witness is None else result.witness.to_coords()
    shown = "none" if result.minimum is None else result.minimum
    print(f"min={shown} witness={witness} examined={result.examined} "
          f"exhaustive={str(result.exhaustive).lower()}")
    if args.out and result.witness is not None:
        io.write_config(f"{args.out}.cfg", result.witness)
    return EXIT_OK


def _table_builder(d: int, r: int | None, n: int, model: str, monotone: bool) -> str:
    if model == MAJORITY:
        if not monotone:
            raise LookupError("no construction for the non-monotone majority cell")
        return "majority"
    if r > d:
        return "large-r" if model == REVERSIBLE else "large-r-bp"
    if model == BP:
        return "small-r-bp"
    if not monotone and n % 2:
        return "odd-n"
    return "small-r-monotone"


def table_rows(ds, rs, ns, model: str, monotone: bool, max_rounds: int | None = None):
    """Yield one dict per (d, r, n) cell, with the construction verified by simulation."""
    for d in ds:
        for r in ([None] if model == MAJORITY else rs):
            for n in ns:
                row = dict(d=d, r="" if r is None else r, n=n, model=model,
                           monotone=str(monotone).lower(), lower="", constructed="",
                           upper="", verified="")
                try:
                    ref = analysis.table1_bounds(d, r, n, model, monotone)
                    row["lower"] = str(ref.lower)
                    shape = TorusShape(n, d)
                    report = _build(_table_builder(d, r, n, model, monotone), shape, r)
                    verdict, _ = analysis.verify_construction(shape, report, max_rounds)
                    if monotone and report.claim != constructions.MONOTONE_DYNAMO:
                        verdict = False
                    row.update(constructed=report.size, upper=report.predicted_size_bound,
                               verified="indeterminate" if verdict is None
                               else str(bool(verdict and report.within_bound())).lower())
                except (ValueError, LookupError, UsageError) as exc:
                    row["verified"] = f"skip: {exc}"
                yield row


def cmd_table(args) -> int:
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=TABLE_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in table_rows(args.d, args.r or [], args.n, args.model or REVERSIBLE,
                              args.monotone, args.max_rounds):
            writer.writerow(row)
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def cmd_render(args) -> int:
    config = _seed_config(args)
    shape = config.shape
    if shape.d != 2:
        raise UsageError(f"render needs d = 2, got d={shape.d}")
    rule = _rule(args)
    outcome = dynamics.run(shape, config, rule, args.max_rounds, record=True)
    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for t, frame in enumerate(outcome.frames):
        path = prefix.parent / f"{prefix.name}_{t:04d}.pgm"
        path.write_bytes(io.pgm_bytes(shape, frame))
        lines.append(f"{t} {path.name}\n")
    index = prefix.parent / f"{prefix.name}_index.txt"
    index.write_text("".join(lines))
    print(f"{len(lines)} frames, {outcome.describe()}, index={index}")
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dynamo-lab",
        description="Dynamos of bootstrap percolation and majority dynamics on the torus.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="side length of the torus")
    common.add_argument("--d", type=int, help="dimension of the torus")
    common.add_argument("--r", type=int, help="threshold (ignored by the majority model)")
    common.add_argument("--model", choices=MODELS,
                        help="bp = r-bootstrap percolation, rbp = reversible, maj = majority")
    common.add_argument("--max-rounds", type=int, default=None,
                        help="round budget (default 4*d*n + 16)")

    seeds = argparse.ArgumentParser(add_help=False)
    seeds.add_argument("--seed-file", help="configuration file to start from")
    seeds.add_argument("--construction", choices=sorted(CONSTRUCTIONS),
                       help="start from a built configuration instead")
    seeds.add_argument("--random-density", type=float,
                       help="start from a random configuration with this active fraction")
    seeds.add_argument("--seed", type=int, default=DEFAULT_SEED,
                       help=f"64-bit RNG seed for --random-density (default {DEFAULT_SEED})")

    p = sub.add_parser("construct", parents=[common], help="build a configuration")
    p.add_argument("--construction", required=True, choices=sorted(CONSTRUCTIONS))
    p.add_argument("--out", default="dynamo", help="output prefix; writes <out>.cfg")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("simulate", parents=[common, seeds], help="run a process")
    p.add_argument("--trace", help="write one '<round> <hex>' line per round")
    p.set_defaults(func=cmd_simulate, model=REVERSIBLE)

    p = sub.add_parser("verify", parents=[common], help="check a configuration file")
    p.add_argument("--seed-file", required=True)
    p.add_argument("--monotone", action="store_true", help="require a monotone dynamo")
    p.set_defaults(func=cmd_verify, model=REVERSIBLE)

    p = sub.add_parser("search", parents=[common], help="exhaustive minimum dynamo search")
    p.add_argument("--monotone", action="store_true")
    p.add_argument("--budget", type=int, default=None, help="max candidates to examine")
    p.add_argument("--symmetry", action="store_true", help="only sets containing the origin")
    p.add_argument("--cap", type=int, default=analysis.SEARCH_MAX_VERTICES,
                   help=f"max vertices (default {analysis.SEARCH_MAX_VERTICES})")
    p.add_argument("--out", help="write the witness to <out>.cfg")
    p.set_defaults(func=cmd_search, model=REVERSIBLE)

    p = sub.add_parser("table", help="CSV of bounds against built and verified sizes")
    p.add_argument("--n", type=_int_range, required=True, help="e.g. 9..15 or 4,5")
    p.add_argument("--d", type=_int_range, required=True)
    p.add_argument("--r", type=_int_range, default=None)
    p.add_argument("--model", choices=MODELS, default=REVERSIBLE)
    p.add_argument("--monotone", action="store_true")
    p.add_argument("--max-rounds", type=int, default=None)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("render", parents=[common, seeds], help="PGM frames of a 2-d run")
    p.add_argument("--out", default="frames/frame", help="frame path prefix")
    p.set_defaults(func=cmd_render, model=REVERSIBLE)
    return parser


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except io.ConfigFormatError as exc:
        print(f"error: cannot parse configuration: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
