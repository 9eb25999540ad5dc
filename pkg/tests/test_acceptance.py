"""Exit criteria.  Run ``pytest tests/test_acceptance.py`` (one PASS/FAIL line per
criterion appears in the terminal summary) or ``python tests/test_acceptance.py``."""

import hashlib
import itertools
import math
import random
import sys
import time
from dataclasses import replace

import pytest

from bitwise_election.encoding import Order, decode_alpha, encode_alpha, lex_compare
from bitwise_election.generators import Family, GeneratorSpec, IdAssignment, IdStrategy, generate
from bitwise_election.oracle import (
    brute_force_reference,
    check_action_sequences,
    check_election,
    check_neighbor_forms,
    check_spanning_tree,
    check_spreading_convergence,
    check_trace_replay,
)
from bitwise_election.protocol import SpreadSignal
from bitwise_election.simulator import AssertionLevel, Outcome, SimConfig, dump_trace, run
from bitwise_election.sweep import fit_slope, sweep
from bitwise_election.topology import Topology

RESULTS: list[str] = []


def record(number: int, title: str, ok: bool, detail: str) -> None:
    RESULTS.append(f"criterion {number} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
    assert ok, detail


# -- corpus ------------------------------------------------------------------------------


def exhaustive_topologies(rng: random.Random):
    """Every connected labelled graph on 2..5 nodes, three id assignments each."""
    for n in range(2, 6):
        pairs = list(itertools.combinations(range(n), 2))
        for mask in range(1, 1 << len(pairs)):
            edges = [e for i, e in enumerate(pairs) if mask >> i & 1]
            if not _connected(n, edges):
                continue
            for _ in range(3):
                yield Topology.build(rng.sample(range(1, 1000), n), edges)


def _connected(n, edges):
    seen, stack = {0}, [0]
    adj = {u: [] for u in range(n)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    while stack:
        for v in adj[stack.pop()]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == n


def random_topologies(count: int = 200):
    for seed in range(count):
        rng = random.Random(seed)
        n = rng.randint(2, 64)
        bits = rng.choice([None, 8, 16, 32])
        ids = IdAssignment(IdStrategy.RANDOM_PERMUTATION, bits, seed)
        kind = seed % 3
        if kind == 0:
            p = min(1.0, 2.5 * math.log(n + 1) / n)
            yield generate(GeneratorSpec(Family.GNP, n, p=p, seed=seed), ids)
        elif kind == 1:
            yield generate(GeneratorSpec(Family.GNP, n, p=min(1.0, rng.uniform(0.2, 0.6)), seed=seed), ids)
        else:
            # random recursive tree: long paths, large diameter
            edges = [(rng.randrange(i), i) for i in range(1, n)]
            topo = Topology.build(list(range(1, n + 1)), edges)
            yield Topology.build(list(generate(GeneratorSpec(Family.PATH, n), ids).ids), topo.edges)


@pytest.fixture(scope="module")
def corpus():
    rng = random.Random(2024)
    topos = list(exhaustive_topologies(rng)) + list(random_topologies())
    config = SimConfig(assertion_level=AssertionLevel.FULL)
    runs, errors = [], []
    start = time.perf_counter()
    for topo in topos:
        try:
            runs.append((topo, run(topo, config)))
        except AssertionError as exc:
            errors.append(f"{topo.ids}: {exc}")
    return runs, errors, time.perf_counter() - start


def _failures(runs, check):
    bad = []
    for topo, trace in runs:
        rep = check(trace, topo)
        if not rep.passed:
            bad.append(f"ids={topo.ids[:6]}... {rep.line()}")
    return bad


# -- criteria ---------------------------------------------------------------------------


def test_c1_unique_correct_leader(corpus):
    runs, errors, secs = corpus
    wrong = [t.ids for t, tr in runs if tr.summary.elected_nodes != [brute_force_reference(t).elected_node]]
    wrong += _failures(runs, check_election)
    ok = not errors and not wrong and len(runs) == 2313 + 200
    record(1, "unique leader holds the maximum", ok,
           f"{len(runs)} runs, {len(wrong)} wrong, {len(errors)} assertion errors, {secs:.1f}s")


def test_c2_election_bound(corpus):
    runs, errors, _ = corpus
    late, worst = [], 0.0
    for topo, tr in runs:
        s = tr.summary
        ref = brute_force_reference(topo)
        assert tr.config.max_rounds is None  # default limit = bound + 8D + 8
        if s.outcome is Outcome.TIMEOUT or s.rounds_to_election is None or s.rounds_to_election > ref.election_bound:
            late.append(topo.ids)
        else:
            worst = max(worst, s.rounds_to_election / ref.election_bound)
    record(2, "election within |enc(max)| + 7D", not late and not errors,
           f"{len(late)} late or timed out; worst rounds/bound = {worst:.3f}")


def test_c3_spreading_bound(corpus):
    runs, errors, _ = corpus
    bad = _failures(runs, check_spreading_convergence)
    record(3, "all words equal enc(max) from |enc(max)| + 6D on", not bad and not errors,
           f"{len(bad)} violations" + (f"; first: {bad[0]}" if bad else ""))


def test_c4_neighbor_forms(corpus, p2_trace):
    runs, errors, _ = corpus
    bad = _failures(runs, check_neighbor_forms)
    topo, trace = p2_trace
    corrupted = _edit(_edit(trace, 3, 0, z="1"), 3, 1, z="11110111")
    rejected = not check_neighbor_forms(corrupted, topo).passed
    record(4, "five neighbour forms every round", not bad and not errors and rejected,
           f"{len(bad)} violations under full assertions; corrupted control rejected={rejected}")


def test_c5_delete_succession(corpus, p2_trace):
    runs, _, _ = corpus
    bad = _failures(runs, check_action_sequences)
    topo, trace = p2_trace
    control = _edit(trace, 3, 1, action=SpreadSignal.DELETE1)  # delete followed by append
    rejected = not check_action_sequences(control, topo).passed
    deletes = sum(n.action.is_delete for _, tr in runs for rec in tr.rounds for n in rec.nodes)
    record(5, "delete runs continue and end in change", not bad and rejected,
           f"{len(bad)} violations over {deletes} delete actions; delete-then-append control rejected={rejected}")


def test_c6_spanning_tree(corpus):
    runs, _, _ = corpus
    bad = _failures(runs, check_spanning_tree) + _failures(runs, check_trace_replay)
    record(6, "parent edges form a spanning tree rooted at the maximum", not bad,
           f"{len(bad)} violations" + (f"; first: {bad[0]}" if bad else ""))


def test_c7_scaling_separation():
    start = time.perf_counter()
    rows = sweep("id-bits", [4, 8, 16, 32, 64], seed=1)
    slope_bits, _ = fit_slope([r.id_bits for r in rows], [r.rounds_election for r in rows])
    path_rows = sweep("diameter", [4, 8, 16, 32, 64, 128, 256], id_bits=16, seed=1)
    slope_d, _ = fit_slope([r.D for r in path_rows], [r.rounds_election for r in path_rows])
    under = all(r.rounds_election is not None and r.rounds_election <= r.bound for r in rows + path_rows)
    ok = 1.5 <= slope_bits <= 2.5 and 0.5 <= slope_d <= 7.0 and under
    record(7, "rounds additive in D and |id|", ok,
           f"slope vs id_bits on K8 = {slope_bits:.3f} (want [1.5, 2.5]); slope vs D on paths = {slope_d:.3f} "
           f"(want [0.5, 7.0]); all under bound={under}; {time.perf_counter() - start:.1f}s")


def test_c8_encoding_properties():
    rng = random.Random(8)
    failures = 0
    for _ in range(100_000):
        x, y = rng.getrandbits(rng.randint(1, 64)) + 1, rng.getrandbits(rng.randint(1, 64)) + 1
        expected = Order.LESS if x < y else Order.GREATER if x > y else Order.EQUAL
        failures += lex_compare(encode_alpha(x), encode_alpha(y)) is not expected
        failures += decode_alpha(encode_alpha(x)) != x
    words = [encode_alpha(i) for i in range(513)[1:]]
    for i, a in enumerate(words, 1):
        for j, b in enumerate(words, 1):
            failures += lex_compare(a, b) is not Order((i > j) - (i < j))
        failures += decode_alpha(a) != i
    record(8, "order embedding and round trip", failures == 0,
           f"{failures} failures over 1e5 random pairs + all {512 * 512} pairs <= 512")


def test_c9_determinism():
    configs = [
        (Family.PATH, 12, 0.5), (Family.RING, 15, 0.5), (Family.COMPLETE, 7, 0.5), (Family.STAR, 9, 0.5),
        (Family.BALANCED_TREE, 20, 0.5), (Family.GNP, 18, 0.25), (Family.GNP, 30, 0.15), (Family.GNP, 10, 0.6),
        (Family.RING, 9, 0.5), (Family.PATH, 25, 0.5),
    ]
    mismatched = 0
    for k, (family, n, p) in enumerate(configs):
        digests = set()
        for _ in range(2):
            topo = generate(GeneratorSpec(family, n, p, seed=k),
                            IdAssignment(IdStrategy.RANDOM_PERMUTATION, 10, seed=100 + k))
            digests.add(hashlib.sha256(dump_trace(run(topo)).encode()).hexdigest())
        mismatched += len(digests) != 1
    record(9, "gen -> run byte-identical", mismatched == 0, f"{len(configs)} configurations, {mismatched} differ")


# -- helpers ----------------------------------------------------------------------------


@pytest.fixture(scope="module")
def p2_trace():
    topo = Topology.build([1, 2], [(0, 1)])
    return topo, run(topo)


def _edit(trace, round_no, node, **changes):
    rounds = list(trace.rounds)
    nodes = list(rounds[round_no].nodes)
    nodes[node] = replace(nodes[node], **changes)
    rounds[round_no] = replace(rounds[round_no], nodes=tuple(nodes))
    return replace(trace, rounds=rounds)


if __name__ == "__main__":
    code = pytest.main([__file__, "-q"])
    sys.exit(code)
