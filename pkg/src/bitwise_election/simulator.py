"""Lock-step synchronous execution of the election protocol over a topology."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Iterator

from . import oracle
from .encoding import encoded_length
from .protocol import (
    NodeState,
    Role,
    RoundMessage,
    Rule,
    SpreadSignal,
    TreeSignal,
    TreeStatus,
    apply_round,
    ingest_messages,
    init_node,
)
from .topology import Topology, diameter

log = logging.getLogger(__name__)

__all__ = [
    "AssertionLevel",
    "Granularity",
    "Outcome",
    "SimConfig",
    "NodeRecord",
    "RoundRecord",
    "Summary",
    "RoundTrace",
    "InvariantViolation",
    "TraceFormatError",
    "default_max_rounds",
    "run",
    "write_trace",
    "read_trace",
    "dump_trace",
    "load_trace",
]


class AssertionLevel(Enum):
    OFF = "off"
    PER_ROUND = "per-round-invariants"
    FULL = "full"


class Granularity(Enum):
    FINAL_ONLY = "final-only"
    PER_ROUND = "per-round"


class Outcome(Enum):
    QUIESCENT = "quiescent"
    TIMEOUT = "timeout"


class InvariantViolation(AssertionError):
    def __init__(self, round_no: int, message: str):
        super().__init__(f"round {round_no}: {message}")
        self.round = round_no


class TraceFormatError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    max_rounds: int | None = None  # None: election bound plus settling slack
    assertion_level: AssertionLevel = AssertionLevel.PER_ROUND
    trace_granularity: Granularity = Granularity.PER_ROUND
    extra_rounds: int = 0  # forced rounds after quiescence

    def __post_init__(self) -> None:
        if self.max_rounds is not None and self.max_rounds < 1:
            raise ValueError(f"max_rounds must be >= 1, got {self.max_rounds}")
        if self.extra_rounds < 0:
            raise ValueError("extra_rounds must be >= 0")

    def to_dict(self) -> dict:
        return {
            "max_rounds": self.max_rounds,
            "assertion_level": self.assertion_level.value,
            "trace_granularity": self.trace_granularity.value,
            "extra_rounds": self.extra_rounds,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        return cls(
            max_rounds=d.get("max_rounds"),
            assertion_level=AssertionLevel(d.get("assertion_level", "per-round-invariants")),
            trace_granularity=Granularity(d.get("trace_granularity", "per-round")),
            extra_rounds=d.get("extra_rounds", 0),
        )


@dataclass(frozen=True)
class NodeRecord:
    z: str
    role: Role
    parent_port: int | None
    term: bool
    elected: bool
    action: SpreadSignal
    rule: Rule

    @classmethod
    def of(cls, s: NodeState) -> "NodeRecord":
        return cls(s.z, s.role, s.parent_port, s.term, s.elected, s.last_action, s.last_rule)


@dataclass(frozen=True)
class RoundRecord:
    """State of every node at the end of ``round``; ``messages[u][p - 1]`` is the
    byte node ``u`` sent on port ``p`` during that round (empty for round 0)."""

    round: int
    nodes: tuple[NodeRecord, ...]
    messages: tuple[tuple[int, ...], ...] = ()


@dataclass
class Summary:
    outcome: Outcome
    rounds_run: int
    elected_nodes: list[int]
    rounds_to_election: int | None
    rounds_to_quiescence: int | None
    diameter: int
    max_id: int
    alpha_len: int

    @property
    def elected_node(self) -> int | None:
        return self.elected_nodes[0] if len(self.elected_nodes) == 1 else None

    @property
    def spread_bound(self) -> int:
        return self.alpha_len + 6 * self.diameter

    @property
    def election_bound(self) -> int:
        return self.alpha_len + 7 * self.diameter

    def to_dict(self, topo: Topology) -> dict:
        node = self.elected_node
        return {
            "outcome": self.outcome.value,
            "rounds_run": self.rounds_run,
            "elected_nodes": self.elected_nodes,
            "elected_id": topo.ids[node] if node is not None else None,
            "rounds_to_election": self.rounds_to_election,
            "rounds_to_quiescence": self.rounds_to_quiescence,
            "diameter": self.diameter,
            "max_id": self.max_id,
            "alpha_len": self.alpha_len,
            "bound": self.election_bound,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Summary":
        return cls(
            outcome=Outcome(d["outcome"]),
            rounds_run=d["rounds_run"],
            elected_nodes=list(d["elected_nodes"]),
            rounds_to_election=d["rounds_to_election"],
            rounds_to_quiescence=d["rounds_to_quiescence"],
            diameter=d["diameter"],
            max_id=d["max_id"],
            alpha_len=d["alpha_len"],
        )


@dataclass
class RoundTrace:
    topology: Topology
    config: SimConfig
    rounds: list[RoundRecord] = field(default_factory=list)
    summary: Summary | None = None

    @property
    def per_round(self) -> bool:
        return self.config.trace_granularity is Granularity.PER_ROUND

    @property
    def final(self) -> RoundRecord:
        return self.rounds[-1]


def default_max_rounds(topo: Topology, diam: int | None = None) -> int:
    d = diameter(topo) if diam is None else diam
    return encoded_length(max(topo.ids)) + 7 * d + 8 * d + 8


def _check_round(topo: Topology, states: list[NodeState], round_no: int, level: AssertionLevel) -> None:
    ports = topo.ports
    parents = [None if s.parent_port is None else ports[u][s.parent_port - 1] for u, s in enumerate(states)]
    for u, s in enumerate(states):
        if (s.role is Role.ACTIVE) != (s.parent_port is None):
            raise InvariantViolation(round_no, f"node {u}: role {s.role.value} with parent port {s.parent_port}")
        if s.elected and not (s.role is Role.ACTIVE and s.z == s.y):
            raise InvariantViolation(round_no, f"node {u}: elected without holding its own encoding")
        for p, (m, v) in enumerate(zip(s.mirrors, ports[u]), 1):
            other = states[v]
            if m.z != other.z:
                raise InvariantViolation(round_no, f"node {u} mirrors {m.z!r} for node {v} holding {other.z!r}")
            if m.term != other.term:
                raise InvariantViolation(round_no, f"node {u} has a stale term bit for node {v}")
            if (m.status is TreeStatus.CHILD) != (parents[v] == u):
                raise InvariantViolation(round_no, f"node {u}: child status of node {v} inconsistent")
            if (m.status is TreeStatus.PARENT) != (s.parent_port == p):
                raise InvariantViolation(round_no, f"node {u}: parent status of port {p} inconsistent")
    if level is AssertionLevel.FULL:
        for u, v in topo.edges:
            su, sv = states[u], states[v]
            if oracle.neighbor_form(su.z, sv.z, su.last_action.is_delete, sv.last_action.is_delete) is None:
                raise InvariantViolation(round_no, f"edge ({u}, {v}): words {su.z!r} / {sv.z!r} fit no neighbour form")
        cycle = oracle.find_parent_cycle(parents)
        if cycle is not None:
            raise InvariantViolation(round_no, f"parent cycle through nodes {cycle}")


def run(topology: Topology, config: SimConfig | None = None) -> RoundTrace:
    """Execute rounds until a round changes nothing, or ``max_rounds``.

    Each round every node computes from the end-of-previous-round snapshot,
    then all messages are delivered and ingested before the next round.
    """
    config = config or SimConfig()
    topo = topology
    diam = diameter(topo)
    max_rounds = config.max_rounds or default_max_rounds(topo, diam)
    level = config.assertion_level
    per_round = config.trace_granularity is Granularity.PER_ROUND

    states = [init_node(topo.ids[u], topo.degree(u)) for u in range(topo.n)]
    trace = RoundTrace(topo, config)
    if per_round:
        trace.rounds.append(RoundRecord(0, tuple(NodeRecord.of(s) for s in states)))
    back_port = [[topo.port_of(topo.neighbor(u, p), u) for p in range(1, topo.degree(u) + 1)] for u in range(topo.n)]

    election_round = None
    quiet_round = None
    last_change = 0
    round_no = 0
    extra_left = config.extra_rounds
    record = None
    while round_no < max_rounds:
        round_no += 1
        stepped = [apply_round(s) for s in states]
        inboxes: list[dict[int, RoundMessage]] = [{} for _ in range(topo.n)]
        for u, (_, out) in enumerate(stepped):
            for (p, msg), v, q in zip(out.items(), topo.ports[u], back_port[u]):
                inboxes[v][q] = msg
        new_states = [ingest_messages(st, inboxes[u]) for u, (st, _) in enumerate(stepped)]

        changed = new_states != states
        if changed:
            last_change = round_no
            if quiet_round is not None:
                raise InvariantViolation(round_no, "state changed after quiescence")
        states = new_states
        if level is not AssertionLevel.OFF:
            _check_round(topo, states, round_no, level)

        record = RoundRecord(
            round_no,
            tuple(NodeRecord.of(s) for s in states),
            tuple(tuple(out[p].to_byte() for p in range(1, len(out) + 1)) for _, out in stepped),
        )
        if per_round:
            trace.rounds.append(record)
        if election_round is None and any(s.elected for s in states):
            election_round = round_no
        if not changed:
            if quiet_round is None:
                quiet_round = round_no
            if extra_left == 0:
                break
            extra_left -= 1

    if not per_round and record is not None:
        trace.rounds.append(record)
    outcome = Outcome.QUIESCENT if quiet_round is not None else Outcome.TIMEOUT
    trace.summary = Summary(
        outcome=outcome,
        rounds_run=round_no,
        elected_nodes=[u for u, s in enumerate(states) if s.elected],
        rounds_to_election=election_round,
        rounds_to_quiescence=last_change if outcome is Outcome.QUIESCENT else None,
        diameter=diam,
        max_id=max(topo.ids),
        alpha_len=encoded_length(max(topo.ids)),
    )
    log.debug("run finished: %s", trace.summary)
    return trace


# -- trace files: one JSON object per line -------------------------------------------


def _dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _iter_lines(trace: RoundTrace) -> Iterator[str]:
    topo = trace.topology
    yield _dumps({"kind": "topology", **topo.to_dict()})
    yield _dumps({"kind": "config", **trace.config.to_dict()})
    for rec in trace.rounds:
        for u, nr in enumerate(rec.nodes):
            yield _dumps({
                "kind": "node",
                "round": rec.round,
                "node": u,
                "z": nr.z,
                "role": nr.role.value,
                "parent_port": nr.parent_port,
                "term": nr.term,
                "elected": nr.elected,
                "action": nr.action.label,
                "rule": nr.rule.value,
            })
        for u, row in enumerate(rec.messages):
            for p, byte in enumerate(row, 1):
                msg = RoundMessage.from_byte(byte)
                yield _dumps({
                    "kind": "msg",
                    "round": rec.round,
                    "src": u,
                    "port": p,
                    "dst": topo.neighbor(u, p),
                    "byte": byte,
                    "spread": msg.spread.label,
                    "tree": msg.tree.name.lower(),
                    "term": msg.term,
                })
    if trace.summary is not None:
        yield _dumps({"kind": "summary", **trace.summary.to_dict(topo)})


def write_trace(trace: RoundTrace, fh: IO[str]) -> None:
    for line in _iter_lines(trace):
        fh.write(line)
        fh.write("\n")


def dump_trace(trace: RoundTrace) -> str:
    return "".join(line + "\n" for line in _iter_lines(trace))


def read_trace(fh: IO[str]) -> RoundTrace:
    topo = config = summary = None
    nodes: dict[int, dict[int, NodeRecord]] = {}
    msgs: dict[int, dict[tuple[int, int], int]] = {}
    for lineno, line in enumerate(fh, 1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            kind = obj["kind"]
            if kind == "topology":
                topo = Topology.from_dict(obj)
            elif kind == "config":
                config = SimConfig.from_dict(obj)
            elif kind == "node":
                nodes.setdefault(obj["round"], {})[obj["node"]] = NodeRecord(
                    z=obj["z"],
                    role=Role(obj["role"]),
                    parent_port=obj["parent_port"],
                    term=obj["term"],
                    elected=obj["elected"],
                    action=SpreadSignal.from_label(obj["action"]),
                    rule=Rule(obj["rule"]),
                )
            elif kind == "msg":
                msgs.setdefault(obj["round"], {})[(obj["src"], obj["port"])] = obj["byte"]
            elif kind == "summary":
                summary = Summary.from_dict(obj)
            else:
                raise TraceFormatError(f"line {lineno}: unknown record kind {kind!r}")
        except (KeyError, ValueError, TypeError) as exc:
            if isinstance(exc, TraceFormatError):
                raise
            raise TraceFormatError(f"line {lineno}: {exc}") from exc
    if topo is None or config is None:
        raise TraceFormatError("trace lacks topology or config header")
    trace = RoundTrace(topo, config, summary=summary)
    for r in sorted(nodes):
        row = nodes[r]
        if sorted(row) != list(range(topo.n)):
            raise TraceFormatError(f"round {r}: node records incomplete")
        messages: tuple[tuple[int, ...], ...] = ()
        if r in msgs:
            try:
                messages = tuple(
                    tuple(msgs[r][(u, p)] for p in range(1, topo.degree(u) + 1)) for u in range(topo.n)
                )
            except KeyError as exc:
                raise TraceFormatError(f"round {r}: missing message {exc.args[0]}") from exc
        trace.rounds.append(RoundRecord(r, tuple(row[u] for u in range(topo.n)), messages))
    return trace


def load_trace(path) -> RoundTrace:
    with open(path, encoding="utf-8") as fh:
        return read_trace(fh)
