# core/graph.py
"""Bipartite user-object graphs and their one-mode projections.

Node labels are interned into dense indices; every algorithm in the package
works on the index arrays. Edges are stored as three aligned arrays sorted by
(user, object), which doubles as the per-user adjacency. The per-object
adjacency is a permutation of the same arrays.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Literal, NamedTuple

import numpy as np
from scipy import sparse

from core.errors import InvalidArgumentError, NodeNotFoundError, UndefinedStatisticError

Side = Literal["users", "objects"]
SIDES: tuple[str, str] = ("users", "objects")


class NodeRef(NamedTuple):
    side: Side
    label: str


def check_side(side: str) -> Side:
    if side not in SIDES:
        raise InvalidArgumentError(f"side must be one of {SIDES}, got {side!r}")
    return side  # type: ignore[return-value]


def _offsets(sorted_keys: np.ndarray, size: int) -> np.ndarray:
    counts = np.bincount(sorted_keys, minlength=size)
    ptr = np.zeros(size + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return ptr


@dataclass(frozen=True, eq=False)
class TfidfWeights:
    """Bookkeeping kept next to a reweighted graph.

    ``original`` and ``tf`` are aligned with the graph's edge arrays;
    ``user_max`` is indexed by user, ``object_idf`` by object.
    """

    original: np.ndarray
    tf: np.ndarray
    user_max: np.ndarray
    object_idf: np.ndarray
    log_base: float
    normalizer: str = "max"

    def subset(self, edge_mask: np.ndarray, kept_users: np.ndarray, kept_objects: np.ndarray) -> "TfidfWeights":
        return TfidfWeights(
            original=self.original[edge_mask],
            tf=self.tf[edge_mask],
            user_max=self.user_max[kept_users],
            object_idf=self.object_idf[kept_objects],
            log_base=self.log_base,
            normalizer=self.normalizer,
        )


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    users: tuple[str, ...]
    objects: tuple[str, ...]
    user_idx: np.ndarray
    object_idx: np.ndarray
    weights: np.ndarray
    tfidf: TfidfWeights | None = None

    _user_lookup: dict = field(init=False, repr=False)
    _object_lookup: dict = field(init=False, repr=False)
    _user_ptr: np.ndarray = field(init=False, repr=False)
    _object_order: np.ndarray = field(init=False, repr=False)
    _object_ptr: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        user_idx = np.asarray(self.user_idx, dtype=np.int64)
        object_idx = np.asarray(self.object_idx, dtype=np.int64)
        weights = np.asarray(self.weights, dtype=np.float64)
        if not (len(user_idx) == len(object_idx) == len(weights)):
            raise InvalidArgumentError("edge arrays must have equal length")
        n_u, n_o = len(self.users), len(self.objects)
        if len(user_idx):
            if user_idx.min() < 0 or user_idx.max() >= n_u:
                raise InvalidArgumentError("user index out of range")
            if object_idx.min() < 0 or object_idx.max() >= n_o:
                raise InvalidArgumentError("object index out of range")
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise InvalidArgumentError("edge weights must be finite and non-negative")

        keys = user_idx * max(n_o, 1) + object_idx
        if len(keys) > 1:
            step = np.diff(keys)
            if np.any(step == 0):
                raise InvalidArgumentError("duplicate (user, object) pair")
            if np.any(step < 0):
                raise InvalidArgumentError("edges must be sorted by (user, object); use BipartiteGraph.build")
        if len(set(self.users)) != n_u or len(set(self.objects)) != n_o:
            raise InvalidArgumentError("node labels must be unique per side")

        for name, value in (("user_idx", user_idx), ("object_idx", object_idx), ("weights", weights)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

        object_order = np.argsort(object_idx, kind="stable")
        object.__setattr__(self, "_user_lookup", {label: i for i, label in enumerate(self.users)})
        object.__setattr__(self, "_object_lookup", {label: i for i, label in enumerate(self.objects)})
        object.__setattr__(self, "_user_ptr", _offsets(user_idx, n_u))
        object.__setattr__(self, "_object_order", object_order)
        object.__setattr__(self, "_object_ptr", _offsets(object_idx[object_order], n_o))

    @classmethod
    def build(
        cls,
        users: Iterable[str],
        objects: Iterable[str],
        user_idx,
        object_idx,
        weights,
        tfidf: TfidfWeights | None = None,
    ) -> "BipartiteGraph":
        """Construct from unsorted (but duplicate-free) edge arrays."""
        user_idx = np.asarray(user_idx, dtype=np.int64)
        object_idx = np.asarray(object_idx, dtype=np.int64)
        weights = np.asarray(weights, dtype=np.float64)
        order = np.lexsort((object_idx, user_idx))
        if tfidf is not None:
            tfidf = TfidfWeights(
                original=np.asarray(tfidf.original)[order],
                tf=np.asarray(tfidf.tf)[order],
                user_max=tfidf.user_max,
                object_idf=tfidf.object_idf,
                log_base=tfidf.log_base,
                normalizer=tfidf.normalizer,
            )
        return cls(tuple(users), tuple(objects), user_idx[order], object_idx[order], weights[order], tfidf)

    @classmethod
    def from_triples(cls, triples: Iterable[tuple[str, str, float]]) -> "BipartiteGraph":
        """Intern labels by first appearance; repeated pairs are summed."""
        users: dict[str, int] = {}
        objects: dict[str, int] = {}
        merged: dict[tuple[int, int], float] = {}
        for user, obj, weight in triples:
            u = users.setdefault(user, len(users))
            o = objects.setdefault(obj, len(objects))
            merged[(u, o)] = merged.get((u, o), 0.0) + float(weight)
        pairs = np.array(list(merged.keys()), dtype=np.int64).reshape(-1, 2)
        return cls.build(users, objects, pairs[:, 0], pairs[:, 1], list(merged.values()))

    # sizes
    @property
    def n_users(self) -> int:
        return len(self.users)

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_edges(self) -> int:
        return len(self.weights)

    def is_empty(self) -> bool:
        return self.n_edges == 0

    def side_size(self, side: Side) -> int:
        return self.n_users if check_side(side) == "users" else self.n_objects

    def labels(self, side: Side) -> tuple[str, ...]:
        return self.users if check_side(side) == "users" else self.objects

    # lookups
    def index_of(self, node: NodeRef) -> int:
        lookup = self._user_lookup if check_side(node.side) == "users" else self._object_lookup
        try:
            return lookup[node.label]
        except KeyError:
            raise NodeNotFoundError(f"unknown {node.side[:-1]} {node.label!r}") from None

    def user_degrees(self) -> np.ndarray:
        return np.diff(self._user_ptr)

    def object_degrees(self) -> np.ndarray:
        return np.diff(self._object_ptr)

    def user_edges(self, u: int) -> slice:
        return slice(int(self._user_ptr[u]), int(self._user_ptr[u + 1]))

    def object_edges(self, o: int) -> np.ndarray:
        return self._object_order[self._object_ptr[o]:self._object_ptr[o + 1]]

    def user_neighbors(self, u: int) -> np.ndarray:
        return self.object_idx[self.user_edges(u)]

    def object_neighbors(self, o: int) -> np.ndarray:
        return self.user_idx[self.object_edges(o)]

    def neighbors(self, node: NodeRef) -> np.ndarray:
        i = self.index_of(node)
        return self.user_neighbors(i) if node.side == "users" else self.object_neighbors(i)

    def edge_position(self, u: int, o: int) -> int | None:
        span = self.user_edges(u)
        row = self.object_idx[span]
        at = int(np.searchsorted(row, o))
        if at < len(row) and row[at] == o:
            return span.start + at
        return None

    def incidence_matrix(self) -> sparse.csr_matrix:
        """Binary users x objects matrix (weights are ignored)."""
        data = np.ones(self.n_edges, dtype=np.float64)
        return sparse.csr_matrix(
            (data, (self.user_idx, self.object_idx)), shape=(self.n_users, self.n_objects)
        )

    def subgraph(self, edge_mask: np.ndarray, prune: bool = True) -> "BipartiteGraph":
        """Keep the masked edges; with ``prune`` drop nodes left without edges."""
        edge_mask = np.asarray(edge_mask, dtype=bool)
        if edge_mask.shape != (self.n_edges,):
            raise InvalidArgumentError("edge mask must match the edge count")
        user_idx = self.user_idx[edge_mask]
        object_idx = self.object_idx[edge_mask]
        if prune:
            kept_users = np.flatnonzero(np.bincount(user_idx, minlength=self.n_users))
            kept_objects = np.flatnonzero(np.bincount(object_idx, minlength=self.n_objects))
        else:
            kept_users = np.arange(self.n_users)
            kept_objects = np.arange(self.n_objects)
        user_map = np.full(self.n_users, -1, dtype=np.int64)
        user_map[kept_users] = np.arange(len(kept_users))
        object_map = np.full(self.n_objects, -1, dtype=np.int64)
        object_map[kept_objects] = np.arange(len(kept_objects))
        tfidf = self.tfidf.subset(edge_mask, kept_users, kept_objects) if self.tfidf is not None else None
        # relative order is preserved, so the arrays stay sorted
        return BipartiteGraph(
            tuple(self.users[i] for i in kept_users),
            tuple(self.objects[i] for i in kept_objects),
            user_map[user_idx],
            object_map[object_idx],
            self.weights[edge_mask],
            tfidf,
        )

    def with_weights(self, weights: np.ndarray, tfidf: TfidfWeights | None = None) -> "BipartiteGraph":
        return BipartiteGraph(self.users, self.objects, self.user_idx, self.object_idx, weights, tfidf)

    def triples(self) -> Iterator[tuple[str, str, float]]:
        for u, o, w in zip(self.user_idx.tolist(), self.object_idx.tolist(), self.weights.tolist()):
            yield self.users[u], self.objects[o], w


@dataclass(frozen=True, eq=False)
class ProjectedGraph:
    """Undirected weighted one-mode graph; edges stored once with source < target."""

    nodes: tuple[str, ...]
    side: Side
    source: np.ndarray
    target: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        source = np.asarray(self.source, dtype=np.int64)
        target = np.asarray(self.target, dtype=np.int64)
        weights = np.asarray(self.weights, dtype=np.float64)
        if not (len(source) == len(target) == len(weights)):
            raise InvalidArgumentError("edge arrays must have equal length")
        if len(source):
            if np.any(source >= target):
                raise InvalidArgumentError("projected edges need source < target (no self-loops)")
            if source.min() < 0 or target.max() >= len(self.nodes):
                raise InvalidArgumentError("node index out of range")
            keys = source * len(self.nodes) + target
            if np.any(np.diff(keys) <= 0):
                raise InvalidArgumentError("projected edges must be sorted and unique")
            if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
                raise InvalidArgumentError("projected edge weights must be positive")
        for name, value in (("source", source), ("target", target), ("weights", weights)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @classmethod
    def from_edges(cls, nodes: Iterable[str], side: Side, edges: Iterable[tuple[int, int, float]]) -> "ProjectedGraph":
        """Build from index triples in any orientation and order."""
        nodes = tuple(nodes)
        rows = [(min(a, b), max(a, b), float(w)) for a, b, w in edges]
        if any(a == b for a, b, _ in rows):
            raise InvalidArgumentError("projected graphs have no self-loops")
        rows.sort()
        if not rows:
            empty = np.zeros(0, dtype=np.int64)
            return cls(nodes, side, empty, empty, np.zeros(0))
        source, target, weights = zip(*rows)
        return cls(nodes, side, np.array(source), np.array(target), np.array(weights))

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.weights)

    def edge_weights(self, use_weights: bool = True) -> np.ndarray:
        return self.weights if use_weights else np.ones(self.n_edges)

    def strengths(self, use_weights: bool = True) -> np.ndarray:
        w = self.edge_weights(use_weights)
        k = np.bincount(self.source, weights=w, minlength=self.n_nodes)
        k += np.bincount(self.target, weights=w, minlength=self.n_nodes)
        return k

    def adjacency(self, use_weights: bool = True) -> list[dict[int, float]]:
        adj: list[dict[int, float]] = [{} for _ in range(self.n_nodes)]
        for a, b, w in zip(self.source.tolist(), self.target.tolist(), self.edge_weights(use_weights).tolist()):
            adj[a][b] = w
            adj[b][a] = w
        return adj

    def edges(self) -> Iterator[tuple[str, str, float]]:
        for a, b, w in zip(self.source.tolist(), self.target.tolist(), self.weights.tolist()):
            yield self.nodes[a], self.nodes[b], w

    def to_networkx(self, use_weights: bool = True):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(self.nodes)
        for (a, b, _), w in zip(self.edges(), self.edge_weights(use_weights).tolist()):
            g.add_edge(a, b, weight=w)
        return g


# statistics

def degree(graph: BipartiteGraph, node: NodeRef) -> int:
    i = graph.index_of(node)
    degrees = graph.user_degrees() if node.side == "users" else graph.object_degrees()
    return int(degrees[i])


def density(graph: BipartiteGraph) -> float:
    if graph.n_users == 0 or graph.n_objects == 0:
        raise UndefinedStatisticError("density is undefined when a side is empty")
    return graph.n_edges / (graph.n_users * graph.n_objects)


def projected_density(graph: ProjectedGraph) -> float:
    n = graph.n_nodes
    if n < 2:
        raise UndefinedStatisticError("projected density needs at least two nodes")
    return 2.0 * graph.n_edges / (n * (n - 1))


def average_degrees(graph: BipartiteGraph) -> tuple[float, float]:
    if graph.n_users == 0 or graph.n_objects == 0:
        raise UndefinedStatisticError("average degree is undefined when a side is empty")
    m = graph.n_edges
    return m / graph.n_users, m / graph.n_objects


def top_objects(graph: BipartiteGraph, k: int) -> list[tuple[str, int, float]]:
    if k < 1:
        raise InvalidArgumentError("k must be at least 1")
    degrees = graph.object_degrees()
    ranked = sorted(range(graph.n_objects), key=lambda o: (-int(degrees[o]), graph.objects[o]))
    n_u = graph.n_users
    return [(graph.objects[o], int(degrees[o]), int(degrees[o]) / n_u) for o in ranked[:k]]


def degree_sequence(graph: BipartiteGraph, side: Side) -> list[int]:
    degrees = graph.user_degrees() if check_side(side) == "users" else graph.object_degrees()
    return [int(d) for d in degrees]


def stats_row(graph: BipartiteGraph, projections: bool = False) -> dict[str, float | int | None]:
    k_u, k_o = average_degrees(graph)
    row: dict[str, float | int | None] = {
        "n_u": graph.n_users,
        "n_o": graph.n_objects,
        "m": graph.n_edges,
        "k_u": k_u,
        "k_o": k_o,
        "density": density(graph),
    }
    if projections:
        from core.projection import project

        for side, tag in (("users", "U"), ("objects", "O")):
            projected = project(graph, side)
            row[f"m_{tag}"] = projected.n_edges
            row[f"density_{tag}"] = projected_density(projected) if projected.n_nodes >= 2 else None
    return row


def content_hash(graph: BipartiteGraph) -> str:
    """sha256 of the sorted (user, object, weight) lines; independent of label interning order."""
    digest = hashlib.sha256()
    for line in sorted(f"{user}\t{obj}\t{weight!r}\n" for user, obj, weight in graph.triples()):
        digest.update(line.encode("utf-8"))
    return digest.hexdigest()
