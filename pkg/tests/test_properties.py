import numpy as np
from hypothesis import given, settings, strategies as st

from bitwise_election.oracle import verify_trace
from bitwise_election.simulator import AssertionLevel, SimConfig, run
from bitwise_election.sweep import fit_slope
from bitwise_election.topology import Topology


@st.composite
def connected_graphs(draw, max_n=12):
    n = draw(st.integers(2, max_n))
    # spanning tree first, then extra chords
    edges = {(draw(st.integers(0, i - 1)), i) for i in range(1, n)}
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=2 * n))
    edges |= {(min(u, v), max(u, v)) for u, v in extra if u != v}
    ids = draw(st.lists(st.integers(1, 2**20), min_size=n, max_size=n, unique=True))
    return Topology.build(ids, sorted(edges))


@settings(max_examples=60, deadline=None)
@given(connected_graphs())
def test_every_check_holds(topo):
    trace = run(topo, SimConfig(assertion_level=AssertionLevel.FULL))
    reports = verify_trace(trace, topo)
    assert all(r.passed for r in reports), [r.line() for r in reports if not r.passed]


@settings(max_examples=30, deadline=None)
@given(connected_graphs(), st.integers(1, 50), st.integers(1, 7))
def test_monotone_relabelling_keeps_the_winner(topo, shift, scale):
    relabelled = Topology.build([scale * i + shift for i in topo.ids], topo.edges)
    assert run(topo).summary.elected_nodes == run(relabelled).summary.elected_nodes


@settings(max_examples=30, deadline=None)
@given(connected_graphs(max_n=9), st.randoms(use_true_random=False))
def test_port_numbering_does_not_change_the_outcome(topo, rnd):
    ports = [list(row) for row in topo.ports]
    for row in ports:
        rnd.shuffle(row)
    permuted = Topology.build(topo.ids, topo.edges, ports)
    a, b = run(topo).summary, run(permuted, SimConfig(assertion_level=AssertionLevel.FULL)).summary
    assert a.elected_nodes == b.elected_nodes
    assert b.rounds_to_election <= b.election_bound


@given(st.lists(st.integers(-1000, 1000), min_size=3, max_size=20, unique=True), st.floats(-5, 5), st.floats(-50, 50))
def test_fit_slope_matches_polyfit(xs, a, b):
    ys = [a * x + b + (i % 3) * 0.1 for i, x in enumerate(xs)]
    slope, intercept = fit_slope(xs, ys)
    ref = np.polyfit(xs, ys, 1)
    assert np.allclose([slope, intercept], ref, rtol=1e-6, atol=1e-6)
