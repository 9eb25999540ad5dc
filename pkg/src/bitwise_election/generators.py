"""Seeded graph families and identifier assignments."""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .topology import DisconnectedGraph, Topology, eccentricities

__all__ = [
    "Family",
    "IdStrategy",
    "GeneratorSpec",
    "IdAssignment",
    "GenerationError",
    "family_edges",
    "assign_ids",
    "generate",
]


class GenerationError(RuntimeError):
    pass


class Family(Enum):
    PATH = "path"
    RING = "ring"
    COMPLETE = "complete"
    STAR = "star"
    BALANCED_TREE = "balanced-tree"
    GNP = "gnp"


class IdStrategy(Enum):
    SEQUENTIAL = "sequential"
    RANDOM_PERMUTATION = "random-permutation"
    ADVERSARIAL_FAR_MAX = "adversarial-far-max"
    CUSTOM_LIST = "custom-list"


@dataclass(frozen=True)
class GeneratorSpec:
    family: Family
    n: int
    p: float = 0.5
    seed: int = 0
    max_retries: int = 1000

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if self.family is Family.RING and self.n < 3:
            raise ValueError("a ring needs at least 3 nodes")
        if not 0 < self.p <= 1:
            raise ValueError(f"p must lie in (0, 1], got {self.p}")


@dataclass(frozen=True)
class IdAssignment:
    strategy: IdStrategy = IdStrategy.SEQUENTIAL
    id_bits: int | None = None
    seed: int = 0
    custom: tuple[int, ...] = ()


def family_edges(spec: GeneratorSpec) -> list[tuple[int, int]]:
    n = spec.n
    fam = spec.family
    if fam is Family.PATH:
        return [(i, i + 1) for i in range(n - 1)]
    if fam is Family.RING:
        return [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]
    if fam is Family.COMPLETE:
        return [(i, j) for i in range(n) for j in range(i + 1, n)]
    if fam is Family.STAR:
        return [(0, i) for i in range(1, n)]
    if fam is Family.BALANCED_TREE:
        return [((i - 1) // 2, i) for i in range(1, n)]
    rng = random.Random(spec.seed)
    for _ in range(spec.max_retries):
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < spec.p]
        if _connected(n, edges):
            return edges
    raise GenerationError(f"no connected G({n}, {spec.p}) after {spec.max_retries} attempts")


def _connected(n: int, edges: Sequence[tuple[int, int]]) -> bool:
    root = list(range(n))

    def find(x: int) -> int:
        while root[x] != x:
            root[x] = root[root[x]]
            x = root[x]
        return x

    parts = n
    for u, v in edges:
        a, b = find(u), find(v)
        if a != b:
            root[a] = b
            parts -= 1
    return parts == 1


def _distinct_ids(n: int, id_bits: int | None, rng: random.Random) -> list[int]:
    if id_bits is None:
        return rng.sample(range(1, n + 1), n)
    if id_bits < 1 or n > 1 << (id_bits - 1):
        raise ValueError(f"cannot draw {n} distinct identifiers of exactly {id_bits} bits")
    low = 1 << (id_bits - 1)
    if n * 4 >= low:
        return rng.sample(range(low, 2 * low), n)
    chosen: dict[int, None] = {}
    while len(chosen) < n:
        chosen.setdefault(low | rng.getrandbits(id_bits - 1))
    return list(chosen)


def assign_ids(edges: Sequence[tuple[int, int]], n: int, assignment: IdAssignment) -> list[int]:
    strategy = assignment.strategy
    if strategy is IdStrategy.CUSTOM_LIST:
        ids = list(assignment.custom)
        if len(ids) != n:
            raise ValueError(f"custom id list has {len(ids)} entries for {n} nodes")
        return ids
    if strategy is IdStrategy.SEQUENTIAL:
        base = 1 if assignment.id_bits is None else 1 << (assignment.id_bits - 1)
        if assignment.id_bits is not None and n > base:
            raise ValueError(f"cannot draw {n} distinct identifiers of exactly {assignment.id_bits} bits")
        return [base + i for i in range(n)]
    rng = random.Random(assignment.seed)
    ids = _distinct_ids(n, assignment.id_bits, rng)
    if strategy is IdStrategy.ADVERSARIAL_FAR_MAX:
        # put the maximum on a node of maximal eccentricity
        ecc = eccentricities(Topology.build(list(range(1, n + 1)), edges))
        far = ecc.index(max(ecc))
        top = ids.index(max(ids))
        ids[far], ids[top] = ids[top], ids[far]
    return ids


def generate(spec: GeneratorSpec, assignment: IdAssignment = IdAssignment()) -> Topology:
    edges = family_edges(spec)
    ids = assign_ids(edges, spec.n, assignment)
    try:
        return Topology.build(ids, edges)
    except DisconnectedGraph as exc:  # pragma: no cover - families are connected by construction
        raise GenerationError(str(exc)) from exc
