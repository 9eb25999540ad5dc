import numpy as np
import pytest
from scipy.sparse.csgraph import floyd_warshall

from bitwise_election.generators import Family, GeneratorSpec, IdAssignment, generate
from bitwise_election.topology import (
    DisconnectedGraph,
    DuplicateIdentifier,
    InvalidIdentifier,
    MultiEdge,
    PortError,
    SelfLoop,
    Topology,
    TooFewNodes,
    TopologyError,
    diameter,
    format_topology,
    load_topology,
    parse_topology,
)

P2 = "2 1\n0 1\n1 2\n0 1\n"
C5 = """# five-cycle
5 5
0 3
1 1
2 4
3 5
4 2
0 1
1 2
2 3
3 4
4 0
"""


def test_parse_p2():
    t = parse_topology(P2)
    assert t.ids == (1, 2) and t.edges == ((0, 1),) and t.ports == ((1,), (0,))
    assert diameter(t) == 1


def test_parse_ring_default_ports():
    t = parse_topology(C5)
    assert t.ids == (3, 1, 4, 5, 2)
    assert t.ports[0] == (1, 4) and t.ports[4] == (0, 3)
    assert t.port_of(0, 4) == 2 and t.neighbor(4, 1) == 0
    assert diameter(t) == 2


def test_explicit_ports_section():
    t = parse_topology(C5 + "ports\n0 4 1\n1 0 2\n2 1 3\n3 2 4\n4 3 0\n")
    assert t.ports[0] == (4, 1) and t.port_of(0, 4) == 1


@pytest.mark.parametrize(
    "text, error",
    [
        ("3 3\n0 7\n1 7\n2 2\n0 1\n1 2\n0 2\n", DuplicateIdentifier),
        ("3 1\n0 1\n1 2\n2 3\n0 1\n", DisconnectedGraph),
        ("2 1\n0 0\n1 2\n0 1\n", InvalidIdentifier),
        ("2 2\n0 1\n1 2\n0 1\n1 1\n", SelfLoop),
        ("2 2\n0 1\n1 2\n0 1\n1 0\n", MultiEdge),
        ("1 0\n0 5\n", TooFewNodes),
        (P2 + "ports\n0 1\n1 1\n", PortError),
        ("2 1\n0 1\n", TopologyError),
        ("two one\n", TopologyError),
        ("", TopologyError),
    ],
)
def test_load_errors(text, error):
    with pytest.raises(error):
        parse_topology(text)


def test_error_classes_are_distinct():
    classes = [DuplicateIdentifier, DisconnectedGraph, InvalidIdentifier, SelfLoop, TooFewNodes]
    assert len(set(classes)) == len(classes)
    assert all(issubclass(c, TopologyError) for c in classes)


def test_format_round_trip(tmp_path):
    t = parse_topology(C5 + "ports\n0 4 1\n1 0 2\n2 1 3\n3 2 4\n4 3 0\n")
    f = tmp_path / "g.txt"
    f.write_text(format_topology(t, with_ports=True))
    assert load_topology(f) == t
    assert parse_topology(format_topology(parse_topology(C5))) == parse_topology(C5)


def floyd_warshall_diameter(t: Topology) -> int:
    a = np.zeros((t.n, t.n))
    for u, v in t.edges:
        a[u, v] = a[v, u] = 1
    return int(floyd_warshall(a, directed=False).max())


@pytest.mark.parametrize("seed", range(8))
def test_diameter_against_floyd_warshall(seed):
    t = generate(GeneratorSpec(Family.GNP, 16, p=0.3, seed=seed))
    assert diameter(t) == floyd_warshall_diameter(t)


@pytest.mark.parametrize("family, n, expected", [("path", 9, 8), ("ring", 9, 4), ("complete", 6, 1),
                                                 ("star", 7, 2), ("balanced-tree", 15, 6)])
def test_family_diameters(family, n, expected):
    assert diameter(generate(GeneratorSpec(Family(family), n), IdAssignment())) == expected
