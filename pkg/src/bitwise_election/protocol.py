"""Per-node state machine for pipelined maximum spreading, tree building and
termination detection.

A node is advanced one synchronous round at a time by two pure functions:

* :func:`apply_round` looks at the node's own word and its mirrors of the
  neighbours' words (all as of the end of the previous round), updates the
  word according to the prioritised rules, and returns the per-port messages;
* :func:`ingest_messages` replays the received signals onto the mirrors.

Words are ``str`` over ``'0'``/``'1'`` (see :mod:`bitwise_election.encoding`).
Ports are numbered ``1..degree``; ``NodeState.mirrors[p - 1]`` mirrors the
neighbour behind port ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum, IntEnum
from functools import lru_cache
from typing import Mapping

from .encoding import common_prefix_length, encode_alpha, is_well_formed

__all__ = [
    "ProtocolViolation",
    "SpreadSignal",
    "TreeSignal",
    "TreeStatus",
    "Role",
    "Rule",
    "RoundMessage",
    "NeighborMirror",
    "NodeState",
    "SpreadingDecision",
    "init_node",
    "select_spreading_action",
    "apply_signal",
    "apply_round",
    "ingest_messages",
]


class ProtocolViolation(AssertionError):
    """A step produced something the protocol's invariants rule out."""


class SpreadSignal(IntEnum):
    NULL = 0
    APPEND0 = 1
    APPEND1 = 2
    DELETE1 = 3
    DELETE2 = 4
    DELETE3 = 5
    CHANGE = 6

    @property
    def is_delete(self) -> bool:
        return self in _DELETES

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, label: str) -> "SpreadSignal":
        return cls[label.upper()]


_DELETES = frozenset({SpreadSignal.DELETE1, SpreadSignal.DELETE2, SpreadSignal.DELETE3})
_DELETE_BY_AMOUNT = {1: SpreadSignal.DELETE1, 2: SpreadSignal.DELETE2, 3: SpreadSignal.DELETE3}


class TreeSignal(IntEnum):
    NONE = 0
    PARENT = 1
    OTHER = 2


class TreeStatus(Enum):
    CHILD = "child"
    PARENT = "parent"
    OTHER = "other"


class Role(Enum):
    ACTIVE = "active"
    FOLLOWER = "follower"


class Rule(Enum):
    """Which update rule produced a node's action in a round."""

    DELETE_PREFIX = "delete-prefix"  # a neighbour that just deleted is a proper prefix
    DELETE_DIVERGENT = "delete-divergent"  # own 0 faces a neighbour's 1, drop the tail
    CHANGE = "change"  # own last letter 0 faces a neighbour's 1
    APPEND_ADOPT = "append-adopt"  # copy the next letter of a longer neighbour
    APPEND_OWN = "append-own"  # active node emits the next letter of its encoding
    IDLE = "idle"

    @property
    def dominated(self) -> bool:
        """Rules that only fire when some node holds a larger identifier."""
        return self not in (Rule.APPEND_OWN, Rule.IDLE)


@lru_cache(maxsize=None)
def _byte(spread: SpreadSignal, tree: TreeSignal, term: bool) -> int:
    return int(spread) | (int(tree) << 3) | (int(term) << 5)


@dataclass(frozen=True)
class RoundMessage:
    """Constant-size per-edge payload: spread signal, tree signal, term bit."""

    spread: SpreadSignal = SpreadSignal.NULL
    tree: TreeSignal = TreeSignal.NONE
    term: bool = False

    def to_byte(self) -> int:
        # bits 0-2 spread, bits 3-4 tree, bit 5 term
        return _byte(self.spread, self.tree, self.term)

    @classmethod
    def from_byte(cls, value: int) -> "RoundMessage":
        if not 0 <= value < 64:
            raise ValueError(f"message byte out of range: {value}")
        spread, tree = value & 0b111, (value >> 3) & 0b11
        if spread > 6 or tree > 2:
            raise ValueError(f"invalid message byte: {value:#04x}")
        return cls(SpreadSignal(spread), TreeSignal(tree), bool(value >> 5))


@dataclass(frozen=True)
class NeighborMirror:
    z: str = ""
    last_was_delete: bool = False
    term: bool = False
    status: TreeStatus = TreeStatus.OTHER


@dataclass(frozen=True)
class NodeState:
    id: int
    y: str
    z: str = ""
    role: Role = Role.ACTIVE
    mirrors: tuple[NeighborMirror, ...] = ()
    parent_port: int | None = None
    term: bool = False
    elected: bool = False
    last_action: SpreadSignal = SpreadSignal.NULL
    last_rule: Rule = Rule.IDLE

    @property
    def degree(self) -> int:
        return len(self.mirrors)

    def mirror(self, port: int) -> NeighborMirror:
        return self.mirrors[port - 1]

    def child_ports(self) -> list[int]:
        return [p for p, m in enumerate(self.mirrors, 1) if m.status is TreeStatus.CHILD]


@dataclass(frozen=True)
class SpreadingDecision:
    rule: Rule
    signal: SpreadSignal
    witness: int | None = None  # port that justified the action; None for own/idle


def init_node(ident: int, degree: int) -> NodeState:
    if degree < 1:
        raise ValueError(f"a node needs at least one port, got degree={degree}")
    return NodeState(id=ident, y=encode_alpha(ident), mirrors=(NeighborMirror(),) * degree)


def _append_signal(letter: str) -> SpreadSignal:
    return SpreadSignal.APPEND1 if letter == "1" else SpreadSignal.APPEND0


def select_spreading_action(state: NodeState) -> SpreadingDecision:
    """Pick the highest-priority applicable update for ``state.z``.

    Deletes beat changes, which beat adopting a neighbour's ``1``, then a
    neighbour's ``0``, then emitting the node's own next letter.  Among
    delete candidates the largest amount wins; for the other rules the
    lowest qualifying port is the witness.
    """
    z = state.z
    nz = len(z)
    best_amount, best_rule, best_port = 0, None, None
    change_port = one_port = zero_port = None

    for port, m in enumerate(state.mirrors, 1):
        zv = m.z
        c = common_prefix_length(z, zv)
        if c == len(zv) < nz:
            # neighbour's word is a proper prefix of ours
            if m.last_was_delete:
                amount = min(nz - c, 3)
                if amount > best_amount:
                    best_amount, best_rule, best_port = amount, Rule.DELETE_PREFIX, port
        elif c < nz and c < len(zv):
            if z[c] == "0":
                if nz > c + 1:
                    amount = nz - c - 1
                    if amount > best_amount:
                        best_amount, best_rule, best_port = amount, Rule.DELETE_DIVERGENT, port
                elif change_port is None:
                    change_port = port
        elif c == nz < len(zv):
            if zv[c] == "1":
                if one_port is None:
                    one_port = port
            elif zero_port is None:
                zero_port = port

    if best_rule is not None:
        if best_amount > 3:
            raise ProtocolViolation(
                f"node {state.id}: delete of {best_amount} letters from {z!r} (port {best_port})"
            )
        return SpreadingDecision(best_rule, _DELETE_BY_AMOUNT[best_amount], best_port)
    if change_port is not None:
        return SpreadingDecision(Rule.CHANGE, SpreadSignal.CHANGE, change_port)
    if one_port is not None:
        return SpreadingDecision(Rule.APPEND_ADOPT, SpreadSignal.APPEND1, one_port)
    if zero_port is not None:
        return SpreadingDecision(Rule.APPEND_ADOPT, SpreadSignal.APPEND0, zero_port)
    if state.role is Role.ACTIVE and nz < len(state.y) and state.y.startswith(z):
        return SpreadingDecision(Rule.APPEND_OWN, _append_signal(state.y[nz]))
    return SpreadingDecision(Rule.IDLE, SpreadSignal.NULL)


def apply_signal(z: str, signal: SpreadSignal) -> str:
    """Return ``z`` updated by ``signal``; raises on an impossible update."""
    if signal is SpreadSignal.NULL:
        return z
    if signal is SpreadSignal.APPEND0:
        return z + "0"
    if signal is SpreadSignal.APPEND1:
        return z + "1"
    if signal is SpreadSignal.CHANGE:
        if not z.endswith("0"):
            raise ProtocolViolation(f"change applied to {z!r}")
        return z[:-1] + "1"
    k = int(signal) - int(SpreadSignal.DELETE1) + 1
    if len(z) < k:
        raise ProtocolViolation(f"delete{k} applied to {z!r}")
    return z[:-k]


def apply_round(state: NodeState) -> tuple[NodeState, dict[int, RoundMessage]]:
    """Local computation of one round, returning the new state and the
    message for every port."""
    decision = select_spreading_action(state)
    z = apply_signal(state.z, decision.signal)
    term = state.term and decision.signal is SpreadSignal.NULL
    role, parent = state.role, state.parent_port
    mirrors = list(state.mirrors)
    tree: dict[int, TreeSignal] = {}

    if decision.rule in (Rule.CHANGE, Rule.APPEND_ADOPT):
        role = Role.FOLLOWER
        w = decision.witness
        if w != parent:
            tree[w] = TreeSignal.PARENT
            mirrors[w - 1] = replace(mirrors[w - 1], status=TreeStatus.PARENT)
            if parent is not None:
                tree[parent] = TreeSignal.OTHER
                mirrors[parent - 1] = replace(mirrors[parent - 1], status=TreeStatus.OTHER)
            parent = w

    all_equal = all(m.z == z for m in mirrors)
    if (
        role is Role.FOLLOWER
        and not term
        and all_equal
        and is_well_formed(z)
        and all(m.term for m in mirrors if m.status is TreeStatus.CHILD)
    ):
        term = True

    elected = state.elected or (
        role is Role.ACTIVE and z == state.y and all_equal and all(m.term for m in mirrors)
    )

    new_state = NodeState(
        state.id, state.y, z, role, tuple(mirrors), parent, term, elected, decision.signal, decision.rule
    )
    plain = RoundMessage(decision.signal, TreeSignal.NONE, term)
    outgoing = dict.fromkeys(range(1, state.degree + 1), plain)
    for p, signal in tree.items():
        outgoing[p] = RoundMessage(decision.signal, signal, term)
    return new_state, outgoing


def ingest_messages(state: NodeState, incoming: Mapping[int, RoundMessage]) -> NodeState:
    if set(incoming) != set(range(1, state.degree + 1)):
        raise ProtocolViolation(
            f"node {state.id}: expected one message on each of ports 1..{state.degree}, "
            f"got {sorted(incoming)}"
        )
    mirrors = []
    for port, m in enumerate(state.mirrors, 1):
        msg = incoming[port]
        status = m.status
        if msg.tree is TreeSignal.PARENT:
            status = TreeStatus.CHILD
        elif msg.tree is TreeSignal.OTHER:
            status = TreeStatus.OTHER
        if msg.spread is SpreadSignal.NULL and msg.term == m.term and status is m.status and not m.last_was_delete:
            mirrors.append(m)
            continue
        mirrors.append(
            NeighborMirror(apply_signal(m.z, msg.spread), msg.spread in _DELETES, msg.term, status)
        )
    s = state
    return NodeState(s.id, s.y, s.z, s.role, tuple(mirrors), s.parent_port, s.term, s.elected, s.last_action, s.last_rule)
