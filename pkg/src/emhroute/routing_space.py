"""The space of uplink routings and its RSSI-constrained subset.

A station may only pick a parent that the gateway hears at least as strongly
as the station itself.  Ties are broken by node id (lower id counts as
stronger), which makes the order strict: every station's candidates come
strictly earlier in it, so independent parent choices can never close a
cycle and the constrained space factorises into a product of candidate sets.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Collection, Iterator

import numpy as np

from .model import GATEWAY, RoutingVector

DEFAULT_ENUMERATION_LIMIT = 10_080


class SpaceTooLarge(ValueError):
    def __init__(self, cardinality: int, limit: int):
        super().__init__(f"constrained space has {cardinality} routings, limit is {limit}")
        self.cardinality = cardinality
        self.limit = limit


def count_all_routings(n: int) -> int:
    """Number of uplink routings of an n-node network (labelled trees, Cayley)."""
    if n < 2:
        raise ValueError("need at least the gateway and one station")
    return n ** (n - 2)


@dataclass(frozen=True, eq=False)
class ConstrainedSpace:
    gamma: tuple[float, ...]
    order: tuple[int, ...]
    candidate_parents: tuple[tuple[int, ...], ...]  # index s - 1

    @property
    def n(self) -> int:
        return len(self.gamma) + 1

    @property
    def cardinality(self) -> int:
        return math.prod(len(c) for c in self.candidate_parents)

    def contains(self, r: RoutingVector) -> bool:
        if len(r) != len(self.candidate_parents):
            return False
        return all(p in cands for p, cands in zip(r.parents, self.candidate_parents))

    def candidates(self, s: int) -> tuple[int, ...]:
        return self.candidate_parents[s - 1]

    def draw(self, rng: np.random.Generator) -> RoutingVector:
        """One routing uniform over the whole space."""
        cands = self.candidate_parents
        picks = rng.integers(0, [len(c) for c in cands])
        return RoutingVector(tuple(c[i] for i, c in zip(picks, cands)))


def build_constrained_space(gamma) -> ConstrainedSpace:
    gamma = tuple(float(g) for g in gamma)
    stations = range(1, len(gamma) + 1)
    order = tuple(sorted(stations, key=lambda s: (-gamma[s - 1], s)))
    rank = {s: i for i, s in enumerate(order)}
    cands = tuple((GATEWAY,) + order[: rank[s]] for s in stations)
    return ConstrainedSpace(gamma=gamma, order=order, candidate_parents=cands)


def iter_constrained(space: ConstrainedSpace) -> Iterator[RoutingVector]:
    for parents in itertools.product(*space.candidate_parents):
        yield RoutingVector(parents)


def enumerate_constrained(space: ConstrainedSpace, limit: int = DEFAULT_ENUMERATION_LIMIT) -> list[RoutingVector]:
    """Every routing in the space exactly once, lexicographic in candidate index."""
    if space.cardinality > limit:
        raise SpaceTooLarge(space.cardinality, limit)
    return list(iter_constrained(space))


def sample_unexplored(
    space: ConstrainedSpace,
    explored: Collection[RoutingVector],
    rng: np.random.Generator,
    enumeration_limit: int = DEFAULT_ENUMERATION_LIMIT,
) -> RoutingVector | None:
    """Uniform routing from the space minus ``explored``; None once exhausted."""
    card = space.cardinality
    taken = {r for r in explored if space.contains(r)}
    if len(taken) >= card:
        return None
    if len(taken) * 2 > card and card <= enumeration_limit:
        rest = [r for r in iter_constrained(space) if r not in taken]
        return rest[int(rng.integers(len(rest)))]
    while True:
        r = space.draw(rng)
        if r not in taken:
            return r
