from dataclasses import replace

import pytest

from bitwise_election.protocol import NeighborMirror, NodeState, Role, init_node
from bitwise_election.topology import Topology


def make_state(ident, z, mirrors, role=Role.ACTIVE, parent_port=None, **kw):
    """Node with the given word and neighbour words; ``mirrors`` entries are
    words or ``(word, last_was_delete)`` pairs or full NeighborMirror objects."""
    built = []
    for m in mirrors:
        if isinstance(m, NeighborMirror):
            built.append(m)
        elif isinstance(m, tuple):
            built.append(NeighborMirror(z=m[0], last_was_delete=m[1]))
        else:
            built.append(NeighborMirror(z=m))
    base = init_node(ident, len(built))
    return replace(base, z=z, mirrors=tuple(built), role=role, parent_port=parent_port, **kw)


def path(ids):
    return Topology.build(ids, [(i, i + 1) for i in range(len(ids) - 1)])


def ring(ids):
    n = len(ids)
    return Topology.build(ids, [(i, (i + 1) % n) for i in range(n)])


def complete(ids):
    n = len(ids)
    return Topology.build(ids, [(i, j) for i in range(n) for j in range(i + 1, n)])


@pytest.fixture
def p2():
    return path([1, 2])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS):
            terminalreporter.write_line(line)
