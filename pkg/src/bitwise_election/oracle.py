"""Global-view checks over execution traces.

Every check is a pure function of ``(trace, topology)`` returning a
:class:`Report`.  The checks only read recorded data; they never step the
protocol.  Message bytes are decoded here independently of
:class:`~bitwise_election.protocol.RoundMessage`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Any, Callable, Sequence

from .encoding import common_prefix_length, encode_alpha

__all__ = [
    "Report",
    "Reference",
    "neighbor_form",
    "find_parent_cycle",
    "brute_force_reference",
    "check_trace_replay",
    "check_spreading_convergence",
    "check_election",
    "check_spanning_tree",
    "check_neighbor_forms",
    "check_action_sequences",
    "check_topology_echo",
    "verify_trace",
    "format_report",
    "ALL_CHECKS",
]


@dataclass(frozen=True)
class Report:
    name: str
    passed: bool
    locator: str | None = None
    measured: Any = None
    bound: Any = None
    detail: str = ""

    def line(self) -> str:
        parts = [f"{self.name:<28}", "PASS" if self.passed else "FAIL"]
        if self.measured is not None:
            parts.append(f"measured={self.measured}")
        if self.bound is not None:
            parts.append(f"bound={self.bound}")
        if self.locator:
            parts.append(f"at={self.locator}")
        if self.detail:
            parts.append(f"-- {self.detail}")
        return " ".join(parts)


def format_report(reports: Sequence[Report]) -> str:
    return "\n".join(r.line() for r in reports)


# -- independent reference -----------------------------------------------------------


@dataclass(frozen=True)
class Reference:
    elected_id: int
    elected_node: int
    diameter: int
    alpha_len: int
    spread_bound: int
    election_bound: int
    bfs_tree_edges: int


def _adjacency(topo) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(len(topo.ids))]
    for u, v in topo.edges:
        adj[u].append(v)
        adj[v].append(u)
    return adj


def _bfs(adj: list[list[int]], src: int) -> list[int]:
    dist = [-1] * len(adj)
    dist[src] = 0
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def brute_force_reference(topo) -> Reference:
    """Expected outcome computed from the graph alone."""
    adj = _adjacency(topo)
    dists = [_bfs(adj, u) for u in range(len(adj))]
    diam = max(max(d) for d in dists)
    x = max(topo.ids)
    root = topo.ids.index(x)
    alpha_len = 2 * x.bit_length() + 1
    tree_edges = sum(1 for d in dists[root] if d > 0)  # one BFS parent per non-root node
    return Reference(
        elected_id=x,
        elected_node=root,
        diameter=diam,
        alpha_len=alpha_len,
        spread_bound=alpha_len + 6 * diam,
        election_bound=alpha_len + 7 * diam,
        bfs_tree_edges=tree_edges,
    )


# -- pure helpers ----------------------------------------------------------------------


def neighbor_form(za: str, zb: str, a_deleted: bool = False, b_deleted: bool = False) -> int | None:
    """Classify a pair of adjacent words into one of the five admissible
    shapes (1-5), or ``None`` if the pair fits none of them.

    ``a_deleted``/``b_deleted`` say whether that side's last action was a
    delete; shape 5 needs the shorter side to have just deleted.
    """
    if za == zb:
        return 1
    c = common_prefix_length(za, zb)
    if c == min(len(za), len(zb)):
        if len(za) < len(zb):
            w, short_deleted = len(zb) - c, a_deleted
        else:
            w, short_deleted = len(za) - c, b_deleted
        if 1 <= w <= 2:
            return 2
        if 3 <= w <= 6 and short_deleted:
            return 5
        return None
    zero, one = (za, zb) if za[c] == "0" else (zb, za)
    if len(one) == c + 1 and len(zero) <= c + 4:
        return 4
    if len(zero) == c + 1 and len(one) == c + 2:
        return 3
    return None


def find_parent_cycle(parents: Sequence[int | None]) -> list[int] | None:
    """Return the nodes of some cycle in the parent pointers, or None."""
    state = [0] * len(parents)  # 0 new, 1 on current walk, 2 done
    for start in range(len(parents)):
        walk = []
        u = start
        while u is not None and state[u] == 0:
            state[u] = 1
            walk.append(u)
            u = parents[u]
        if u is not None and state[u] == 1:
            return walk[walk.index(u):]
        for w in walk:
            state[w] = 2
    return None


_SPREAD_LABELS = ["null", "append0", "append1", "delete1", "delete2", "delete3", "change"]


def _replay(word: str, code: int) -> str | None:
    if code == 0:
        return word
    if code in (1, 2):
        return word + ("0" if code == 1 else "1")
    if code == 6:
        return word[:-1] + "1" if word.endswith("0") else None
    k = code - 2
    return word[:-k] if len(word) >= k else None


def _label(rec) -> str:
    return _SPREAD_LABELS[rec.action]


def _is_delete(rec) -> bool:
    return 3 <= rec.action <= 5


def _role(rec) -> str:
    return rec.role.value


def _rule(rec) -> str:
    return rec.rule.value


def _parents(topo, rec) -> list[int | None]:
    return [None if n.parent_port is None else topo.ports[u][n.parent_port - 1] for u, n in enumerate(rec.nodes)]


def _needs_rounds(name: str, trace) -> Report | None:
    if not trace.per_round or not trace.rounds or trace.rounds[0].round != 0:
        return Report(name, False, detail="per-round trace required")
    if [r.round for r in trace.rounds] != list(range(len(trace.rounds))):
        return Report(name, False, detail="round numbers are not contiguous")
    return None


def _needs_completion(name: str, trace) -> Report | None:
    s = trace.summary
    if s is None or getattr(s.outcome, "value", s.outcome) != "quiescent":
        return Report(name, False, detail="trace did not reach quiescence")
    return None


# -- checks ---------------------------------------------------------------------------


def check_topology_echo(trace, topo) -> Report:
    name = "topology_echo"
    t = trace.topology
    if tuple(t.ids) != tuple(topo.ids) or tuple(t.edges) != tuple(topo.edges):
        return Report(name, False, detail="trace was recorded on a different graph")
    if tuple(t.ports) != tuple(topo.ports):
        return Report(name, False, detail="port numbering differs from the graph file")
    return Report(name, True)


def check_trace_replay(trace, topo) -> Report:
    """Words and tree relations are reproduced by replaying the messages."""
    name = "trace_replay"
    bad = _needs_rounds(name, trace)
    if bad:
        return bad
    n = len(topo.ids)
    first = trace.rounds[0]
    for u, rec in enumerate(first.nodes):
        if rec.z != "" or _role(rec) != "active" or rec.parent_port is not None or rec.term or rec.elected:
            return Report(name, False, f"round 0 node {u}", detail="initial state is not pristine")
    words = ["" for _ in range(n)]
    children: list[set[int]] = [set() for _ in range(n)]
    for prev, rec in zip(trace.rounds, trace.rounds[1:]):
        r = rec.round
        if len(rec.messages) != n:
            return Report(name, False, f"round {r}", detail="messages missing")
        for u in range(n):
            row = rec.messages[u]
            if len(row) != len(topo.ports[u]):
                return Report(name, False, f"round {r} node {u}", detail="one message per port expected")
            spreads = {b & 7 for b in row}
            terms = {bool(b >> 5) for b in row}
            if len(spreads) != 1 or len(terms) != 1:
                return Report(name, False, f"round {r} node {u}", detail="ports disagree on spread/term")
            code = spreads.pop()
            if code > 6 or _SPREAD_LABELS[code] != _label(rec.nodes[u]):
                return Report(name, False, f"round {r} node {u}", detail="sent signal differs from recorded action")
            nxt = _replay(words[u], code)
            if nxt is None or nxt != rec.nodes[u].z:
                return Report(
                    name, False, f"round {r} node {u}",
                    detail=f"replayed word {nxt!r} != recorded {rec.nodes[u].z!r}",
                )
            words[u] = nxt
            if terms.pop() != rec.nodes[u].term:
                return Report(name, False, f"round {r} node {u}", detail="sent term bit differs from recorded term")
            for p, b in enumerate(row, 1):
                v = topo.ports[u][p - 1]
                tree = (b >> 3) & 3
                if tree == 1:
                    children[v].add(u)
                elif tree == 2:
                    children[v].discard(u)
                elif tree == 3:
                    return Report(name, False, f"round {r} node {u}", detail="invalid tree signal")
        parents = _parents(topo, rec)
        for u, nr in enumerate(rec.nodes):
            pr = prev.nodes[u]
            if (_role(nr) == "active") != (nr.parent_port is None):
                return Report(name, False, f"round {r} node {u}", detail="active iff parentless violated")
            if _role(pr) == "follower" and _role(nr) == "active":
                return Report(name, False, f"round {r} node {u}", detail="follower became active again")
            if pr.elected and not nr.elected:
                return Report(name, False, f"round {r} node {u}", detail="elected flag was withdrawn")
        pointed: list[set[int]] = [set() for _ in range(n)]
        for u, p in enumerate(parents):
            if p is not None:
                pointed[p].add(u)
        for v in range(n):
            expected = pointed[v]
            if children[v] != expected:
                return Report(
                    name, False, f"round {r} node {v}",
                    detail=f"signalled children {sorted(children[v])} != parent pointers {sorted(expected)}",
                )
    return Report(name, True, measured=f"{len(trace.rounds) - 1} rounds")


def check_spreading_convergence(trace, topo) -> Report:
    """Every word equals the maximum's encoding from ``|enc| + 6D`` onward and
    never moves once it gets there."""
    name = "spreading_convergence"
    ref = brute_force_reference(topo)
    bad = _needs_completion(name, trace) or _needs_rounds(name, trace)
    if bad:
        return bad
    target = encode_alpha(ref.elected_id)
    reached: list[int | None] = [None] * len(topo.ids)
    for rec in trace.rounds:
        for u, nr in enumerate(rec.nodes):
            if reached[u] is None:
                if nr.z == target:
                    reached[u] = rec.round
            elif nr.z != target:
                return Report(name, False, f"round {rec.round} node {u}", detail="word left the maximum encoding")
            if rec.round >= ref.spread_bound and nr.z != target:
                return Report(
                    name, False, f"round {rec.round} node {u}", bound=ref.spread_bound,
                    detail=f"word {nr.z!r} != {target!r}",
                )
    if any(r is None for r in reached):
        u = reached.index(None)
        return Report(name, False, f"final node {u}", detail="never reached the maximum encoding")
    worst = max(reached)  # type: ignore[type-var]
    return Report(name, worst <= ref.spread_bound, measured=worst, bound=ref.spread_bound)


def _election_predicate(topo, rec, u: int) -> bool:
    nr = rec.nodes[u]
    if _role(nr) != "active" or nr.z != encode_alpha(topo.ids[u]):
        return False
    return all(rec.nodes[v].z == nr.z and rec.nodes[v].term for v in topo.ports[u])


def check_election(trace, topo) -> Report:
    name = "election"
    ref = brute_force_reference(topo)
    bad = _needs_completion(name, trace) or _needs_rounds(name, trace)
    if bad:
        return bad
    first: dict[int, int] = {}
    for rec in trace.rounds:
        for u, nr in enumerate(rec.nodes):
            if nr.elected and u not in first:
                first[u] = rec.round
            if u != ref.elected_node and _election_predicate(topo, rec, u):
                return Report(
                    name, False, f"round {rec.round} node {u}",
                    detail="a non-maximum node satisfies the election condition",
                )
    if len(first) != 1:
        return Report(name, False, detail=f"{len(first)} nodes elected: {sorted(first)}")
    (u, r), = first.items()
    if u != ref.elected_node:
        return Report(name, False, f"node {u}", detail=f"elected id {topo.ids[u]}, maximum is {ref.elected_id}")
    s = trace.summary
    if s is not None and s.rounds_to_election != r:
        return Report(name, False, detail=f"summary says round {s.rounds_to_election}, records say {r}")
    return Report(
        name, r <= ref.election_bound, None if r <= ref.election_bound else f"round {r}",
        measured=r, bound=ref.election_bound,
    )


def check_spanning_tree(trace, topo) -> Report:
    name = "spanning_tree"
    ref = brute_force_reference(topo)
    bad = _needs_completion(name, trace) or _needs_rounds(name, trace)
    if bad:
        return bad
    n = len(topo.ids)
    for rec in trace.rounds:
        parents = _parents(topo, rec)
        cycle = find_parent_cycle(parents)
        if cycle is not None:
            return Report(name, False, f"round {rec.round}", detail=f"parent cycle {cycle}")
        for u, nr in enumerate(rec.nodes):
            if (parents[u] is None) != (_role(nr) == "active"):
                return Report(name, False, f"round {rec.round} node {u}", detail="tree root is not an active node")
    parents = _parents(topo, trace.final)
    roots = [u for u in range(n) if parents[u] is None]
    if roots != [ref.elected_node]:
        return Report(name, False, "final", detail=f"roots {roots}, expected [{ref.elected_node}]")
    edges = {(min(u, p), max(u, p)) for u, p in enumerate(parents) if p is not None}
    if len(edges) != n - 1 or not edges <= set(map(tuple, topo.edges)):
        return Report(name, False, "final", detail="parent edges are not n-1 graph edges")
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    if min(_bfs(adj, ref.elected_node)) < 0:
        return Report(name, False, "final", detail="parent edges do not connect the graph")
    return Report(name, True, measured=f"{len(edges)} edges", bound=f"{n - 1} edges")


def check_neighbor_forms(trace, topo) -> Report:
    name = "neighbor_forms"
    bad = _needs_rounds(name, trace)
    if bad:
        return bad
    seen = set()
    for prev, rec in zip([None, *trace.rounds], trace.rounds):
        nodes = rec.nodes
        for u, v in topo.edges:
            form = neighbor_form(nodes[u].z, nodes[v].z, _is_delete(nodes[u]), _is_delete(nodes[v]))
            if form is None:
                return Report(
                    name, False, f"round {rec.round} edge ({u},{v})",
                    detail=f"{nodes[u].z!r} vs {nodes[v].z!r}",
                )
            seen.add(form)
        if prev is None:
            continue
        for u, nr in enumerate(nodes):
            if _rule(nr) != "delete-divergent":
                continue
            zu = prev.nodes[u].z
            for v in topo.ports[u]:
                zv = prev.nodes[v].z
                c = common_prefix_length(zu, zv)
                if c < len(zu) and c < len(zv) and zu[c] == "0" and len(zu) > c + 1:
                    if not (len(zu) - c - 1 <= 3 and len(zv) == c + 1):
                        return Report(
                            name, False, f"round {rec.round} node {u}",
                            detail=f"divergent delete with tails {zu[c + 1:]!r} / {zv[c + 1:]!r}",
                        )
    return Report(name, True, measured="forms " + ",".join(map(str, sorted(seen))))


def check_action_sequences(trace, topo) -> Report:
    name = "action_sequences"
    bad = _needs_rounds(name, trace)
    if bad:
        return bad
    root = brute_force_reference(topo).elected_node
    rounds = trace.rounds[1:]
    for u in range(len(topo.ids)):
        for a, b in zip(rounds, rounds[1:]):
            if _is_delete(a.nodes[u]) and not (_is_delete(b.nodes[u]) or _label(b.nodes[u]) == "change"):
                return Report(
                    name, False, f"node {u} round {b.round}",
                    detail=f"{_label(a.nodes[u])} followed by {_label(b.nodes[u])}",
                )
        if rounds and _is_delete(rounds[-1].nodes[u]):
            return Report(name, False, f"node {u} round {rounds[-1].round}", detail="trace ends inside a delete run")
        for rec in rounds:
            if u == root and _rule(rec.nodes[u]) not in ("append-own", "idle"):
                return Report(
                    name, False, f"node {u} round {rec.round}",
                    detail=f"maximum node applied {_rule(rec.nodes[u])}",
                )
    return Report(name, True)


ALL_CHECKS: list[Callable[[Any, Any], Report]] = [
    check_trace_replay,
    check_spreading_convergence,
    check_election,
    check_spanning_tree,
    check_neighbor_forms,
    check_action_sequences,
]


def verify_trace(trace, topo=None) -> list[Report]:
    reports = []
    if topo is None:
        topo = trace.topology
    else:
        reports.append(check_topology_echo(trace, topo))
        if not reports[0].passed:
            return reports
    reports += [check(trace, topo) for check in ALL_CHECKS]
    return reports
