"""Scaling sweeps: rounds-to-election against diameter or identifier width.

Rows report raw simulated rounds.  Each round moves one constant-size
(6-bit) message per edge direction, so bit rounds are at most 6x these
figures.
"""

from __future__ import annotations

import csv
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

from .generators import Family, GeneratorSpec, IdAssignment, IdStrategy, family_edges, assign_ids
from .simulator import AssertionLevel, Granularity, Outcome, SimConfig, run
from .topology import Topology

__all__ = ["CSV_HEADER", "SweepRow", "sweep", "write_csv", "fit_slope", "DEFAULT_VALUES"]

CSV_HEADER = [
    "family", "n", "m", "D", "id_bits", "trial",
    "rounds_election", "rounds_quiescent", "bound", "margin",
]

DEFAULT_VALUES = {
    "diameter": [4, 8, 16, 32, 64, 128, 256],
    "id-bits": [4, 8, 16, 32, 64],
}


@dataclass(frozen=True)
class SweepRow:
    family: str
    n: int
    m: int
    D: int
    id_bits: int
    trial: int
    rounds_election: int | None
    rounds_quiescent: int | None
    bound: int

    @property
    def margin(self) -> int | None:
        return None if self.rounds_election is None else self.bound - self.rounds_election

    def as_list(self) -> list:
        return [
            self.family, self.n, self.m, self.D, self.id_bits, self.trial,
            self.rounds_election, self.rounds_quiescent, self.bound, self.margin,
        ]


_FAST = SimConfig(assertion_level=AssertionLevel.OFF, trace_granularity=Granularity.FINAL_ONLY)


def _one(job: tuple[str, int, int, int, int]) -> SweepRow:
    family, n, id_bits, trial, seed = job
    spec = GeneratorSpec(Family(family), n, seed=seed)
    edges = family_edges(spec)
    id_seed = random.Random(f"{seed}:{family}:{n}:{id_bits}:{trial}").getrandbits(64)
    ids = assign_ids(edges, n, IdAssignment(IdStrategy.RANDOM_PERMUTATION, id_bits, id_seed))
    trace = run(Topology.build(ids, edges), _FAST)
    s = trace.summary
    return SweepRow(
        family=family,
        n=n,
        m=len(edges),
        D=s.diameter,
        id_bits=id_bits,
        trial=trial,
        rounds_election=s.rounds_to_election,
        rounds_quiescent=s.rounds_to_quiescence if s.outcome is Outcome.QUIESCENT else None,
        bound=s.election_bound,
    )


def sweep(
    axis: str,
    values: Sequence[int] | None = None,
    repetitions: int = 1,
    seed: int = 0,
    *,
    family: str | None = None,
    id_bits: int = 16,
    n: int = 8,
    jobs: int = 1,
) -> list[SweepRow]:
    """Run the sweep and return rows ordered by (value, trial).

    ``axis="diameter"`` varies the node count of a path (or ring) at fixed
    ``id_bits``; ``axis="id-bits"`` varies identifier width on ``K_n``.
    """
    if axis not in DEFAULT_VALUES:
        raise ValueError(f"unknown sweep axis {axis!r}")
    values = list(values or DEFAULT_VALUES[axis])
    if axis == "diameter":
        family = family or "path"
        plan = [(family, v, id_bits, t, seed) for v in values for t in range(repetitions)]
    else:
        family = family or "complete"
        plan = [(family, n, v, t, seed) for v in values for t in range(repetitions)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_one, plan))
    return [_one(job) for job in plan]


def write_csv(rows: Iterable[SweepRow], fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(["" if x is None else x for x in row.as_list()])


def fit_slope(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    """Least-squares ``(slope, intercept)``."""
    k = len(xs)
    if k < 2:
        raise ValueError("need at least two points")
    mx = sum(xs) / k
    my = sum(ys) / k
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0:
        raise ValueError("x values are all equal")
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx
    return slope, my - slope * mx
