"""Static connected communication graphs with port numbering.

Text format (``#`` starts a comment, blank lines ignored)::

    n m
    <index> <identifier>      # n lines, indices 0..n-1
    <u> <v>                   # m lines, undirected edges
    ports                     # optional section
    <index> <nbr> <nbr> ...   # neighbours of <index> in port order 1..degree
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

__all__ = [
    "TopologyError",
    "DisconnectedGraph",
    "DuplicateIdentifier",
    "InvalidIdentifier",
    "SelfLoop",
    "MultiEdge",
    "TooFewNodes",
    "PortError",
    "Topology",
    "load_topology",
    "parse_topology",
    "format_topology",
    "diameter",
    "eccentricities",
]


class TopologyError(ValueError):
    pass


class DisconnectedGraph(TopologyError):
    pass


class DuplicateIdentifier(TopologyError):
    pass


class InvalidIdentifier(TopologyError):
    pass


class SelfLoop(TopologyError):
    pass


class MultiEdge(TopologyError):
    pass


class TooFewNodes(TopologyError):
    pass


class PortError(TopologyError):
    pass


@dataclass(frozen=True)
class Topology:
    """``ports[u][p - 1]`` is the neighbour of ``u`` behind port ``p``."""

    ids: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    ports: tuple[tuple[int, ...], ...]
    _port_of: tuple[dict[int, int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "_port_of", tuple({v: p for p, v in enumerate(nbrs, 1)} for nbrs in self.ports)
        )

    @classmethod
    def build(
        cls,
        ids: Sequence[int],
        edges: Iterable[tuple[int, int]],
        ports: Sequence[Sequence[int]] | None = None,
    ) -> "Topology":
        """Validate and construct; default ports follow ascending neighbour index."""
        ids = tuple(ids)
        n = len(ids)
        if n < 2:
            raise TooFewNodes(f"need at least 2 nodes, got {n}")
        for i, ident in enumerate(ids):
            if isinstance(ident, bool) or not isinstance(ident, int) or ident < 1:
                raise InvalidIdentifier(f"node {i}: identifier must be an integer >= 1, got {ident!r}")
        if len(set(ids)) != n:
            seen: set[int] = set()
            dup = next(x for x in ids if x in seen or seen.add(x))
            raise DuplicateIdentifier(f"identifier {dup} assigned to more than one node")

        norm: list[tuple[int, int]] = []
        seen_edges: set[tuple[int, int]] = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise TopologyError(f"edge ({u}, {v}) references a node outside 0..{n - 1}")
            if u == v:
                raise SelfLoop(f"self-loop at node {u}")
            e = (min(u, v), max(u, v))
            if e in seen_edges:
                raise MultiEdge(f"edge {e} listed more than once")
            seen_edges.add(e)
            norm.append(e)
        norm.sort()

        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in norm:
            adj[u].append(v)
            adj[v].append(u)
        if ports is None:
            port_table = tuple(tuple(sorted(a)) for a in adj)
        else:
            if len(ports) != n:
                raise PortError(f"port table has {len(ports)} rows for {n} nodes")
            port_table = tuple(tuple(row) for row in ports)
            for u, row in enumerate(port_table):
                if sorted(row) != sorted(adj[u]):
                    raise PortError(f"node {u}: ports {list(row)} do not match neighbours {sorted(adj[u])}")

        seen_nodes = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in seen_nodes:
                    seen_nodes.add(v)
                    queue.append(v)
        if len(seen_nodes) != n:
            missing = min(set(range(n)) - seen_nodes)
            raise DisconnectedGraph(f"graph is disconnected: node {missing} unreachable from node 0")
        return cls(ids, tuple(norm), port_table)

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, u: int) -> int:
        return len(self.ports[u])

    def neighbor(self, u: int, port: int) -> int:
        return self.ports[u][port - 1]

    def port_of(self, u: int, v: int) -> int:
        """Port at ``u`` leading to neighbour ``v``."""
        return self._port_of[u][v]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "ids": list(self.ids),
            "edges": [list(e) for e in self.edges],
            "ports": [list(p) for p in self.ports],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Topology":
        return cls.build(d["ids"], [tuple(e) for e in d["edges"]], d.get("ports"))


def _tokens(text: str) -> list[list[str]]:
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    return rows


def parse_topology(text: str) -> Topology:
    rows = _tokens(text)
    if not rows:
        raise TopologyError("empty graph description")
    try:
        n, m = (int(x) for x in rows[0])
    except ValueError as exc:
        raise TopologyError(f"bad header {' '.join(rows[0])!r}, expected 'n m'") from exc
    if len(rows) < 1 + n + m:
        raise TopologyError(f"expected {n} node lines and {m} edge lines, found {len(rows) - 1} lines")
    ids: list[int | None] = [None] * n
    for row in rows[1:1 + n]:
        if len(row) != 2:
            raise TopologyError(f"bad node line {' '.join(row)!r}")
        idx, ident = int(row[0]), int(row[1])
        if not 0 <= idx < n or ids[idx] is not None:
            raise TopologyError(f"bad or repeated node index {idx}")
        ids[idx] = ident
    edges = []
    for row in rows[1 + n:1 + n + m]:
        if len(row) != 2:
            raise TopologyError(f"bad edge line {' '.join(row)!r}")
        edges.append((int(row[0]), int(row[1])))
    rest = rows[1 + n + m:]
    ports = None
    if rest:
        if rest[0] != ["ports"]:
            raise TopologyError(f"unexpected trailing line {' '.join(rest[0])!r}")
        table: list[list[int] | None] = [None] * n
        for row in rest[1:]:
            idx = int(row[0])
            if not 0 <= idx < n or table[idx] is not None:
                raise PortError(f"bad or repeated port row for node {idx}")
            table[idx] = [int(x) for x in row[1:]]
        if any(r is None for r in table):
            raise PortError("ports section must list every node")
        ports = table
    return Topology.build(ids, edges, ports)  # type: ignore[arg-type]


def load_topology(path) -> Topology:
    with open(path, encoding="utf-8") as fh:
        return parse_topology(fh.read())


def format_topology(topo: Topology, with_ports: bool = False) -> str:
    lines = [f"{topo.n} {topo.m}"]
    lines += [f"{i} {ident}" for i, ident in enumerate(topo.ids)]
    lines += [f"{u} {v}" for u, v in topo.edges]
    if with_ports:
        lines.append("ports")
        lines += [" ".join(str(x) for x in (u, *row)) for u, row in enumerate(topo.ports)]
    return "\n".join(lines) + "\n"


def _bfs_dist(topo: Topology, src: int) -> list[int]:
    dist = [-1] * topo.n
    dist[src] = 0
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in topo.ports[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def eccentricities(topo: Topology) -> list[int]:
    return [max(_bfs_dist(topo, u)) for u in range(topo.n)]


def diameter(topo: Topology) -> int:
    return max(eccentricities(topo))
