"""Command-line interface.

Exit codes: 0 success, 1 semantic failure (invalid instance, failed
verification, optimum below its floor), 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import csv
import io as _stdio
import logging
import sys
import time
from fractions import Fraction

from . import generator, oracle, render
from .generator import ConfigError, GenConfig
from .io import (FormatError, atomic_write, dumps, instance_to_json, read_instance,
                 read_selected, selection_to_dict, stats_to_dict)
from .selector import ParameterError, parse_p, select_leaves
from .tree import InvalidInstanceError, validate

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        atomic_write(out, text)


def _load(path: str):
    try:
        return read_instance(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except FormatError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _p_arg(text: str):
    try:
        return parse_p(text)
    except ParameterError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _sizes_arg(text: str) -> list[int]:
    """Comma list of sizes; ``2^k`` is allowed and ``2^a..2^b`` expands powers of two."""
    sizes = []
    try:
        for item in text.split(","):
            item = item.strip()
            if ".." in item:
                lo, hi = (int(part.strip().removeprefix("2^")) for part in item.split(".."))
                sizes.extend(2 ** k for k in range(lo, hi + 1))
            elif item.startswith("2^"):
                sizes.append(2 ** int(item[2:]))
            else:
                sizes.append(int(item))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None
    if not sizes or min(sizes) < 2:
        raise argparse.ArgumentTypeError("sizes must be at least 2")
    return sizes


def _p_list_arg(text: str):
    return [_p_arg(item) for item in text.split(",")]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_generate(args) -> int:
    try:
        cfg = GenConfig(args.n, args.m, args.seed, args.shape, args.marking, args.burst,
                        args.nh_growth)
    except ConfigError as exc:
        raise UsageError(str(exc)) from exc
    mt = generator.generate(cfg)
    _emit(instance_to_json(mt), args.out)
    return EXIT_OK


def cmd_select(args) -> int:
    mt = _load(args.input)
    try:
        sel = select_leaves(mt, args.p)
    except InvalidInstanceError as exc:
        sys.stderr.write(dumps(exc.report.as_dict()))
        return EXIT_FAIL
    _emit(dumps(selection_to_dict(sel)), args.out)
    if args.stats:
        _emit(dumps(stats_to_dict(mt, sel)), args.stats)
    return EXIT_OK


def cmd_verify(args) -> int:
    mt = _load(args.input)
    try:
        leaves = read_selected(args.selection)
    except OSError as exc:
        raise UsageError(f"cannot read {args.selection}: {exc.strerror}") from exc
    except FormatError as exc:
        raise UsageError(f"{args.selection}: {exc}") from exc
    try:
        report = oracle.verify_selection(mt, leaves)
    except ValueError as exc:
        sys.stdout.write(dumps({"ok": False, "error": str(exc)}))
        return EXIT_FAIL
    sys.stdout.write(dumps(report.as_dict()))
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_oracle(args) -> int:
    mt = _load(args.input)
    if mt.m > oracle.ORACLE_LIMIT:
        raise UsageError(f"exhaustive search is limited to m <= {oracle.ORACLE_LIMIT}, got {mt.m}")
    report = validate(mt)
    if not report.ok:
        sys.stderr.write(dumps(report.as_dict()))
        return EXIT_FAIL
    res = oracle.oracle_report(mt)
    out = {"optimum": res.optimum, "floor": res.floor, "disjointOptimum": res.disjoint_optimum,
           "witness": sorted(res.witness)}
    status = EXIT_OK if res.meets_floor else EXIT_FAIL
    if args.compare_p is not None:
        sel = select_leaves(mt, args.compare_p, validate=False)
        out["algorithm"] = len(sel.leaves)
        if len(sel.leaves) > res.optimum or not oracle.verify_selection(mt, sel.leaves).ok:
            status = EXIT_FAIL
    sys.stdout.write(dumps(out))
    return status


def cmd_bench(args) -> int:
    buf = _stdio.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "m", "p", "steps", "wall_ns", "selected"])
    ratio = args.m_ratio
    for n in args.sizes:
        m = max(1, min(n, int(n * ratio)))
        for seed in range(args.seeds):
            cfg = GenConfig(n, m, seed, args.shape, "uniform", 1, args.nh_growth)
            mt = generator.generate(cfg)
            for p in args.p_list:
                t0 = time.perf_counter_ns()
                sel = select_leaves(mt, p, validate=False)
                wall = time.perf_counter_ns() - t0
                writer.writerow([n, m, f"{p.numerator}/{p.denominator}", sel.total_steps,
                                 wall, len(sel.leaves)])
    _emit(buf.getvalue(), args.csv)
    return EXIT_OK


def cmd_render(args) -> int:
    mt = _load(args.input)
    selected: list[int] = []
    if args.selection:
        try:
            selected = read_selected(args.selection)
        except OSError as exc:
            raise UsageError(f"cannot read {args.selection}: {exc.strerror}") from exc
        except FormatError as exc:
            raise UsageError(f"{args.selection}: {exc}") from exc
    report = validate(mt)
    if not report.ok:
        sys.stderr.write(dumps(report.as_dict()))
        return EXIT_FAIL
    if any(not mt.is_marked[x] if 0 <= x < mt.tree.n_nodes else True for x in selected):
        raise UsageError("selection lists a node that is not a marked leaf")
    text = render.to_dot(mt, selected) if args.format == "dot" else render.to_svg(mt, selected)
    _emit(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="leafselect", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random valid instance")
    g.add_argument("--n", type=int, required=True, help="number of leaves")
    g.add_argument("--m", type=int, required=True, help="number of marked leaves")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--shape", choices=generator.SHAPES, default="random")
    g.add_argument("--marking", choices=generator.MARKINGS, default="uniform")
    g.add_argument("--burst", type=int, default=1, help="run length for clustered marking")
    g.add_argument("--nh-growth", type=int, default=1, help="mean neighbourhood size")
    g.add_argument("--out", help="output file (default stdout)")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("select", help="run the selection algorithm")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--p", type=_p_arg, required=True, help='trade-off, written "num/den"')
    s.add_argument("--out", help="selection file (default stdout)")
    s.add_argument("--stats", help="also write per-component statistics here")
    s.set_defaults(func=cmd_select)

    v = sub.add_parser("verify", help="check a selection for overlaps and bridging edges")
    v.add_argument("--in", dest="input", required=True)
    v.add_argument("--selection", required=True)
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="exact optimum by exhaustive search (m <= 24)")
    o.add_argument("--in", dest="input", required=True)
    o.add_argument("--compare-p", type=_p_arg, help="also run the algorithm at this p")
    o.set_defaults(func=cmd_oracle)

    b = sub.add_parser("bench", help="step counts and wall time over generated instances")
    b.add_argument("--sizes", type=_sizes_arg, default=_sizes_arg("2^10..2^16"))
    b.add_argument("--p-list", type=_p_list_arg, default=_p_list_arg("1/2,3/4,9/10"))
    b.add_argument("--seeds", type=int, default=1, help="seeds 0..k-1 per size")
    b.add_argument("--m-ratio", type=_ratio_arg, default=_ratio_arg("3/10"))
    b.add_argument("--shape", choices=generator.SHAPES, default="random")
    b.add_argument("--nh-growth", type=int, default=3)
    b.add_argument("--csv", help="output file (default stdout)")
    b.set_defaults(func=cmd_bench)

    r = sub.add_parser("render", help="draw the instance as DOT or SVG")
    r.add_argument("--in", dest="input", required=True)
    r.add_argument("--selection")
    r.add_argument("--format", choices=("dot", "svg"), default="dot")
    r.add_argument("--out", help="output file (default stdout)")
    r.set_defaults(func=cmd_render)
    return parser


def _ratio_arg(text: str) -> Fraction:
    try:
        num, den = text.split("/")
        q = Fraction(int(num), int(den))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f'ratio must be "num/den", got {text!r}') from None
    if not 0 < q <= 1:
        raise argparse.ArgumentTypeError("ratio must lie in (0, 1]")
    return q


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.exit(EXIT_USAGE, f"{parser.prog} {args.command}: error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
