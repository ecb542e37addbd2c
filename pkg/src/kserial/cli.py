"""Command-line entry point.

Exit codes: 0 on success or a positive verdict, 1 on a negative verdict,
2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from kserial.analysis import (
    InvalidInput,
    UnsupportedKind,
    compose,
    era_decompose,
    is_robust,
    worked_example_pair,
)
from kserial.checkers import TooLarge, Verdict, check
from kserial.formats import (
    ParseError,
    dump_behavior,
    dump_trace,
    dump_workload,
    format_value,
    parse_behavior,
    parse_trace,
    parse_workload,
)
from kserial.harness import generate_workload, run_workload
from kserial.histories import MalformedHistory
from kserial.impls import ImplConfig
from kserial.semantics import DataStructureKind, describe, is_valid_behavior

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2

#: Expected era tables and interleaving for the built-in queue example.
DEMO_EXPECTED = {
    "e": [
        "Era_1 = enq(5)·deq(3)·deq(4)",
        "Era_2 = enq(3)·deq(2)·enq(4)",
        "Era_3 = enq(2)·deq(1)",
        "Era_4 = enq(1)",
    ],
    "f": [
        "Era_1 = enq(9)·enq(10)·deq(8)",
        "Era_2 = enq(8)·deq(7)",
        "Era_3 = enq(7)",
    ],
    "f_prefix": "enq(6)·deq(6)",
    "interleaving": (
        "enq(6)·deq(6)·enq(1)·enq(2)·deq(1)·enq(7)·enq(3)·deq(2)·"
        "enq(4)·enq(8)·deq(7)·enq(5)·deq(3)·deq(4)·enq(9)·enq(10)·deq(8)"
    ),
}


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _verdict_record(v: Verdict) -> dict:
    return {
        "condition": v.condition,
        "holds": v.holds,
        "witness": None if v.witness is None else [
            [e.id, e.method, format_value(e.input), format_value(e.output)] for e in v.witness
        ],
        "nodes": v.checked_nodes,
    }


def _render_verdict(v: Verdict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_verdict_record(v)) + "\n"
    lines = [
        f"condition: {v.condition}",
        f"holds: {'true' if v.holds else 'false'}",
        f"nodes: {v.checked_nodes}",
    ]
    if v.witness is not None:
        lines.append(f"witness: {describe(v.witness) or 'ε'}")
        text = "\n".join(lines) + "\n" + dump_behavior(v.witness)
        return text
    return "\n".join(lines) + "\n"


def _impl_config(args) -> ImplConfig:
    conf: dict = {}
    if args.config:
        try:
            conf = json.loads(_read(args.config))
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {args.config}: {exc}") from exc
    variant = args.impl or conf.get("impl", "lock")
    chosen = args.chosen if args.chosen is not None else conf.get("chosen")
    k = args.k if args.k is not None else conf.get("k")
    if variant == "singular" and chosen is None:
        chosen = 0
    if variant == "ksc" and chosen is None:
        chosen = 0
    try:
        return ImplConfig(variant, chosen, k)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_check(args) -> int:
    h = parse_trace(_read(args.trace))
    verdict = check(args.kind, h, args.condition, args.k, cap=args.cap)
    sys.stdout.write(_render_verdict(verdict, args.format))
    return EXIT_OK if verdict.holds else EXIT_NEGATIVE


def cmd_run(args) -> int:
    config = _impl_config(args)
    if args.workload:
        workload = parse_workload(_read(args.workload), args.kind)
    else:
        if args.kind is None:
            raise UsageError("run needs --kind or --workload")
        workload = generate_workload(
            args.kind, args.threads, args.ops, args.seed, distinct_values=args.distinct
        )
    h = run_workload(config, workload)
    _write(args.out, dump_trace(h))
    if args.condition:
        verdict = check(workload.kind, h, args.condition, args.k, cap=args.cap)
        stream = sys.stderr if args.out in (None, "-") else sys.stdout
        stream.write(_render_verdict(verdict, args.format))
        return EXIT_OK if verdict.holds else EXIT_NEGATIVE
    return EXIT_OK


def cmd_generate(args) -> int:
    w = generate_workload(args.kind, args.threads, args.ops, args.seed, distinct_values=args.distinct)
    _write(args.out, dump_workload(w))
    return EXIT_OK


def cmd_compose(args) -> int:
    e = parse_behavior(_read(args.e))
    f = parse_behavior(_read(args.f))
    result = compose(args.kind, e, f)
    if args.format == "json":
        record = {
            "interleaving": describe(result.interleaving),
            "partition_e": [describe(p) for p in result.partition_e],
            "partition_f": [describe(p) for p in result.partition_f],
        }
        _write(args.out, json.dumps(record) + "\n")
        return EXIT_OK
    out = []
    for name, parts in (("e", result.partition_e), ("f", result.partition_f)):
        for i, part in enumerate(parts, start=1):
            out.append(f"# {name}[{i}]: {describe(part) or 'ε'}\n")
            out.append(dump_behavior(part))
    out.append(f"# interleaving: {describe(result.interleaving) or 'ε'}\n")
    out.append(dump_behavior(result.interleaving))
    _write(args.out, "".join(out))
    return EXIT_OK


def _era_lines(behavior) -> tuple[str, list[str]]:
    d = era_decompose(behavior)
    return describe(d.prefix) or "ε", [
        f"Era_{j} = {describe(d.era(j))}" for j in range(1, d.max_index + 1)
    ]


def cmd_eras(args) -> int:
    behavior = parse_behavior(_read(args.behavior))
    d = era_decompose(behavior)
    out = [f"# prefix: {describe(d.prefix) or 'ε'}\n", dump_behavior(d.prefix)]
    for j in range(d.max_index, 0, -1):
        out.append(f"# Era_{j}: {describe(d.era(j))}\n")
        out.append(dump_behavior(d.era(j)))
    _write(args.out, "".join(out))
    return EXIT_OK


def cmd_robust(args) -> int:
    behavior = parse_behavior(_read(args.behavior))
    robust = is_robust(args.kind, behavior)
    sys.stdout.write(f"robust: {'true' if robust else 'false'}\n")
    return EXIT_OK if robust else EXIT_NEGATIVE


def demo_report() -> tuple[str, bool]:
    e, f = worked_example_pair()
    e_prefix, e_eras = _era_lines(e)
    f_prefix, f_eras = _era_lines(f)
    result = compose(DataStructureKind.QUEUE, e, f)
    interleaving = describe(result.interleaving)
    ok = (
        e_prefix == "ε"
        and e_eras == DEMO_EXPECTED["e"]
        and f_prefix == DEMO_EXPECTED["f_prefix"]
        and f_eras == DEMO_EXPECTED["f"]
        and interleaving == DEMO_EXPECTED["interleaving"]
        and is_valid_behavior(DataStructureKind.QUEUE, result.interleaving)
    )
    lines = [
        f"e = {describe(e)}",
        f"  prefix = {e_prefix}",
        *(f"  {line}" for line in e_eras),
        f"f = {describe(f)}",
        f"  prefix = {f_prefix}",
        *(f"  {line}" for line in f_eras),
        f"interleaving ({len(result.interleaving)} events) = {interleaving}",
        f"fixture: {'ok' if ok else 'MISMATCH'}",
    ]
    return "\n".join(lines) + "\n", ok


def cmd_demo(args) -> int:
    text, ok = demo_report()
    sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_NEGATIVE


def _kind(name: str) -> DataStructureKind:
    try:
        return DataStructureKind.parse(name)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kserial", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("check", help="check a recorded trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--kind", type=_kind, required=True)
    p.add_argument("--condition", choices=("lin", "sc", "ksc"), default="lin")
    p.add_argument("--k", type=int)
    p.add_argument("--cap", type=int, default=14)
    add_format(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", help="run a workload and write its trace")
    p.add_argument("--kind", type=_kind)
    p.add_argument("--impl", choices=ImplConfig.VARIANTS)
    p.add_argument("--config", help="JSON file with impl/chosen/k keys")
    p.add_argument("--threads", type=int, default=2)
    p.add_argument("--ops", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chosen", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--distinct", action="store_true")
    p.add_argument("--workload", help="workload script instead of a generated one")
    p.add_argument("--condition", choices=("lin", "sc", "ksc"))
    p.add_argument("--cap", type=int, default=14)
    p.add_argument("--out")
    add_format(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("generate", help="write a seeded workload script")
    p.add_argument("--kind", type=_kind, required=True)
    p.add_argument("--threads", type=int, default=2)
    p.add_argument("--ops", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--distinct", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("compose", help="interleave two valid behaviors")
    p.add_argument("--kind", type=_kind, required=True)
    p.add_argument("e")
    p.add_argument("f")
    p.add_argument("--out")
    add_format(p)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("eras", help="era decomposition of a queue behavior")
    p.add_argument("behavior")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eras)

    p = sub.add_parser("robust", help="decide whether a behavior is robust")
    p.add_argument("--kind", type=_kind, required=True)
    p.add_argument("behavior")
    p.set_defaults(func=cmd_robust)

    p = sub.add_parser("demo", help="built-in queue composition example")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, MalformedHistory, TooLarge, InvalidInput, UnsupportedKind, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
