"""Command-line entry point: ``bitelect {gen,run,verify,sweep}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .generators import Family, GenerationError, GeneratorSpec, IdAssignment, IdStrategy, generate
from .oracle import format_report, verify_trace
from .protocol import ProtocolViolation
from .simulator import (
    AssertionLevel,
    Granularity,
    InvariantViolation,
    Outcome,
    SimConfig,
    TraceFormatError,
    load_trace,
    run,
    write_trace,
)
from .sweep import DEFAULT_VALUES, sweep, write_csv
from .topology import TopologyError, format_topology, load_topology

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_TIMEOUT = 3
EXIT_ASSERT = 4
EXIT_MISMATCH = 5
EXIT_BAD_INPUT = 6

log = logging.getLogger("bitwise_election")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_gen(args: argparse.Namespace) -> int:
    spec = GeneratorSpec(Family(args.family), args.n, args.p, args.seed)
    assignment = IdAssignment(
        IdStrategy(args.ids),
        args.id_bits,
        args.seed if args.id_seed is None else args.id_seed,
        tuple(args.custom_ids or ()),
    )
    topo = generate(spec, assignment)
    _write(args.output, format_topology(topo, with_ports=args.with_ports))
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    topo = load_topology(args.graph)
    config = SimConfig(
        max_rounds=args.max_rounds,
        assertion_level=AssertionLevel(args.assertion_level),
        trace_granularity=Granularity(args.granularity),
    )
    try:
        trace = run(topo, config)
    except (InvariantViolation, ProtocolViolation) as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        return EXIT_ASSERT
    if args.trace_out:
        with open(args.trace_out, "w", encoding="utf-8") as fh:
            write_trace(trace, fh)
    s = trace.summary
    node = s.elected_node
    elected = topo.ids[node] if node is not None else "none"
    margin = "" if s.rounds_to_election is None else s.election_bound - s.rounds_to_election
    print(
        f"n={topo.n} m={topo.m} D={s.diameter} max_id={s.max_id} alpha_len={s.alpha_len} "
        f"elected={elected} rounds_election={s.rounds_to_election} "
        f"rounds_quiescent={s.rounds_to_quiescence} bound={s.election_bound} margin={margin} "
        f"outcome={s.outcome.value}"
    )
    if s.outcome is Outcome.TIMEOUT:
        print(f"timeout after {s.rounds_run} rounds", file=sys.stderr)
        return EXIT_TIMEOUT
    if node is None:
        return EXIT_FAIL
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    trace = load_trace(args.trace)
    topo = load_topology(args.graph)
    if trace.summary is not None and trace.summary.outcome is Outcome.TIMEOUT:
        print("refusing to verify a timed-out trace", file=sys.stderr)
        return EXIT_TIMEOUT
    reports = verify_trace(trace, topo)
    print(format_report(reports))
    if not reports[0].passed and reports[0].name == "topology_echo":
        return EXIT_MISMATCH
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_sweep(args: argparse.Namespace) -> int:
    rows = sweep(
        args.axis,
        args.values,
        args.repetitions,
        args.seed,
        family=args.family,
        id_bits=args.id_bits,
        n=args.n,
        jobs=args.jobs,
    )
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, sys.stdout)
    print("rounds are raw simulated rounds; each message is 6 bits wide", file=sys.stderr)
    late = [r for r in rows if r.rounds_election is None or r.rounds_election > r.bound]
    return EXIT_FAIL if late else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bitelect", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a graph file")
    g.add_argument("--family", choices=[f.value for f in Family], required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=float, default=0.5, help="edge probability (gnp)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--ids", choices=[s.value for s in IdStrategy], default="sequential")
    g.add_argument("--id-bits", type=int)
    g.add_argument("--id-seed", type=int, help="defaults to --seed")
    g.add_argument("--custom-ids", type=_int_list, help="comma-separated, for --ids custom-list")
    g.add_argument("--with-ports", action="store_true", help="emit the explicit ports section")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="simulate the protocol on a graph file")
    r.add_argument("graph")
    r.add_argument("--max-rounds", type=int)
    r.add_argument("--trace-out")
    r.add_argument("--assertion-level", choices=[a.value for a in AssertionLevel], default="per-round-invariants")
    r.add_argument("--granularity", choices=[g.value for g in Granularity], default="per-round")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="check a trace against its graph")
    v.add_argument("trace")
    v.add_argument("graph")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="scaling sweep, CSV to stdout or --output")
    s.add_argument("--axis", choices=sorted(DEFAULT_VALUES), required=True)
    s.add_argument("--values", type=_int_list, help="node counts (diameter) or identifier widths (id-bits)")
    s.add_argument("--repetitions", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--family", choices=["path", "ring", "complete", "star", "balanced-tree"])
    s.add_argument("--id-bits", type=int, default=16, help="identifier width for the diameter axis")
    s.add_argument("--n", type=int, default=8, help="graph size for the id-bits axis")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (TopologyError, TraceFormatError, GenerationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
