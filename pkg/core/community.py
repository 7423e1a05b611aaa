# core/community.py
"""Partitions, Newman modularity and Louvain community detection.

Louvain works on a symmetric adjacency held as one dict per node. Self-loops
carry A_ii, so that the strength k_i = sum_j A_ij holds at every level; an
aggregated community stores twice its internal weight on its own loop.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from core.errors import InvalidPartitionError, UndefinedStatisticError
from core.graph import ProjectedGraph
from core.rng import SeedLike, make_rng
from logs.logger import get_logger, kv

logger = get_logger(__name__)

TOLERANCE = 1e-7


def _first_appearance(assignment: Iterable[int]) -> tuple[int, ...]:
    renumber: dict[int, int] = {}
    return tuple(renumber.setdefault(c, len(renumber)) for c in assignment)


@dataclass(frozen=True)
class Partition:
    """Community id per node; ids are dense, 0..community_count-1."""

    nodes: tuple[str, ...]
    assignment: tuple[int, ...]

    def __post_init__(self):
        if len(self.nodes) != len(self.assignment):
            raise InvalidPartitionError("partition needs exactly one community per node")
        if len(set(self.nodes)) != len(self.nodes):
            raise InvalidPartitionError("partition lists a node twice")
        used = set(self.assignment)
        if used != set(range(len(used))):
            raise InvalidPartitionError("community ids must be 0..k-1 without gaps")

    @classmethod
    def from_labels(cls, nodes: Iterable[str], labels: Iterable[int]) -> "Partition":
        """Any hashable community labels, renumbered by first appearance."""
        return cls(tuple(nodes), _first_appearance(labels))

    @classmethod
    def from_mapping(cls, nodes: Iterable[str], mapping: Mapping[str, int]) -> "Partition":
        nodes = tuple(nodes)
        missing = [n for n in nodes if n not in mapping]
        if missing:
            raise InvalidPartitionError(f"partition misses {len(missing)} node(s), e.g. {missing[0]!r}")
        return cls.from_labels(nodes, (mapping[n] for n in nodes))

    @classmethod
    def singletons(cls, nodes: Iterable[str]) -> "Partition":
        nodes = tuple(nodes)
        return cls(nodes, tuple(range(len(nodes))))

    @classmethod
    def whole(cls, nodes: Iterable[str]) -> "Partition":
        nodes = tuple(nodes)
        return cls(nodes, (0,) * len(nodes))

    @property
    def community_count(self) -> int:
        return max(self.assignment) + 1 if self.assignment else 0

    def community_of(self, node: str) -> int:
        try:
            return self.assignment[self.nodes.index(node)]
        except ValueError:
            raise InvalidPartitionError(f"node {node!r} is not in the partition") from None

    def groups(self) -> list[tuple[str, ...]]:
        members: list[list[str]] = [[] for _ in range(self.community_count)]
        for node, c in zip(self.nodes, self.assignment):
            members[c].append(node)
        return [tuple(m) for m in members]

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.nodes, self.assignment))


def _aligned(graph: ProjectedGraph, partition: Partition) -> np.ndarray:
    if partition.nodes == graph.nodes:
        return np.asarray(partition.assignment, dtype=np.int64)
    lookup = partition.as_dict()
    missing = [n for n in graph.nodes if n not in lookup]
    if missing:
        raise InvalidPartitionError(f"partition misses {len(missing)} node(s), e.g. {missing[0]!r}")
    if len(lookup) != graph.n_nodes:
        raise InvalidPartitionError("partition holds nodes that are not in the graph")
    return np.array([lookup[n] for n in graph.nodes], dtype=np.int64)


def modularity(graph: ProjectedGraph, partition: Partition, use_weights: bool = True) -> float:
    """Q = sum_c (W_c / W - (S_c / 2W)^2)."""
    communities = _aligned(graph, partition)
    weights = graph.edge_weights(use_weights)
    total = float(weights.sum())
    if graph.n_edges == 0 or total <= 0:
        raise UndefinedStatisticError("modularity is undefined on a graph without edges")
    size = int(communities.max()) + 1 if len(communities) else 0
    inside = communities[graph.source] == communities[graph.target]
    internal = np.bincount(communities[graph.source[inside]], weights=weights[inside], minlength=size)
    strength = np.bincount(communities, weights=graph.strengths(use_weights), minlength=size)
    return float(np.sum(internal / total) - np.sum((strength / (2.0 * total)) ** 2))


@dataclass(frozen=True)
class LouvainResult:
    partition: Partition
    modularity: float | None
    levels: int
    level_modularity: tuple[float, ...] = ()


class _Level:
    def __init__(self, adjacency: list[dict[int, float]]):
        self.adjacency = adjacency
        self.n = len(adjacency)
        self.strength = np.array([sum(row.values()) for row in adjacency], dtype=np.float64)
        self.two_w = float(self.strength.sum())

    def quality(self, community: list[int]) -> float:
        size = max(community) + 1
        internal = np.zeros(size)
        for i, row in enumerate(self.adjacency):
            ci = community[i]
            for j, w in row.items():
                if community[j] == ci:
                    internal[ci] += w
        tot = np.bincount(community, weights=self.strength, minlength=size)
        return float(np.sum(internal / self.two_w) - np.sum((tot / self.two_w) ** 2))

    def move_nodes(self, rng: np.random.Generator, tolerance: float) -> tuple[list[int], int]:
        community = list(range(self.n))
        tot = self.strength.copy()
        w_total = self.two_w / 2.0
        moves = 0
        while True:
            moved = False
            for i in rng.permutation(self.n).tolist():
                ci = community[i]
                k_i = self.strength[i]
                links: dict[int, float] = defaultdict(float)
                for j, w in self.adjacency[i].items():
                    if j != i:
                        links[community[j]] += w
                tot[ci] -= k_i

                def gain(c: int) -> float:
                    return (links.get(c, 0.0) - tot[c] * k_i / self.two_w) / w_total

                stay = gain(ci)
                best, best_gain = ci, stay
                # ascending ids: strict > keeps the lowest id among ties
                for c in sorted(set(links) | {ci}):
                    g = gain(c)
                    if g > best_gain or (g == best_gain and c < best):
                        best, best_gain = c, g
                if best != ci and best_gain - stay <= tolerance:
                    best = ci
                tot[best] += k_i
                if best != ci:
                    community[i] = best
                    moved = True
                    moves += 1
            if not moved:
                return list(_first_appearance(community)), moves

    def aggregate(self, community: list[int]) -> "_Level":
        size = max(community) + 1
        adjacency: list[dict[int, float]] = [defaultdict(float) for _ in range(size)]
        for i, row in enumerate(self.adjacency):
            ci = community[i]
            for j, w in row.items():
                adjacency[ci][community[j]] += w
        return _Level([dict(row) for row in adjacency])


def louvain(graph: ProjectedGraph, seed: SeedLike, use_weights: bool = True,
            tolerance: float = TOLERANCE) -> LouvainResult:
    """Multi-level modularity optimisation; deterministic for a given seed."""
    nodes = graph.nodes
    if graph.n_edges == 0:
        return LouvainResult(Partition.singletons(nodes), None, 0)

    rng = make_rng(seed)
    level = _Level(graph.adjacency(use_weights))
    membership = list(range(graph.n_nodes))
    history: list[float] = []
    previous = level.quality(membership)

    while True:
        community, moves = level.move_nodes(rng, tolerance)
        if moves == 0:
            break
        q = level.quality(community)
        if q - previous <= tolerance:
            break
        membership = [community[c] for c in membership]
        history.append(q)
        previous = q
        logger.debug(kv("louvain level", level=len(history), communities=max(community) + 1, q=q))
        if max(community) + 1 == level.n:
            break
        level = level.aggregate(community)

    partition = Partition.from_labels(nodes, membership)
    q = modularity(graph, partition, use_weights)
    return LouvainResult(partition, q, len(history), tuple(history))
