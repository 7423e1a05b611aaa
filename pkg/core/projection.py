# core/projection.py
"""One-mode projections.

Two nodes of the chosen side are linked when they share at least one
neighbour; the edge weight is the number of shared neighbours. Bipartite edge
weights never enter the count.
"""
from __future__ import annotations

from collections import Counter
from itertools import combinations
from typing import Callable, Literal

import numpy as np
from scipy import sparse

from core.errors import EmptyGraphError, InvalidArgumentError
from core.graph import BipartiteGraph, NodeRef, ProjectedGraph, Side, check_side
from logs.logger import get_logger, kv

logger = get_logger(__name__)

Method = Literal["sparse", "pairs"]


def _project_sparse(graph: BipartiteGraph, side: Side) -> ProjectedGraph:
    incidence = graph.incidence_matrix()
    if side == "objects":
        incidence = incidence.T.tocsr()
    counts = sparse.triu(incidence @ incidence.T, k=1).tocoo()
    return ProjectedGraph.from_edges(
        graph.labels(side), side,
        zip(counts.row.tolist(), counts.col.tolist(), counts.data.tolist()),
    )


def _project_pairs(graph: BipartiteGraph, side: Side) -> ProjectedGraph:
    counter: Counter[tuple[int, int]] = Counter()
    # pivots are the nodes of the other side
    n_pivots = graph.n_objects if side == "users" else graph.n_users
    members = graph.object_neighbors if side == "users" else graph.user_neighbors
    for pivot in range(n_pivots):
        counter.update(combinations(sorted(members(pivot).tolist()), 2))
    return ProjectedGraph.from_edges(
        graph.labels(side), side, ((a, b, float(c)) for (a, b), c in counter.items())
    )


METHODS: dict[str, Callable[[BipartiteGraph, Side], ProjectedGraph]] = {
    "sparse": _project_sparse,
    "pairs": _project_pairs,
}


def project(graph: BipartiteGraph, side: Side, method: Method = "sparse") -> ProjectedGraph:
    """Project onto ``side``. Every node of that side is kept, isolated or not."""
    side = check_side(side)
    if graph.is_empty():
        raise EmptyGraphError("cannot project an empty graph")
    try:
        build = METHODS[method]
    except KeyError:
        raise InvalidArgumentError(f"unknown projection method {method!r}; known: {sorted(METHODS)}") from None
    projected = build(graph, side)
    logger.debug(kv("project", side=side, method=method, nodes=projected.n_nodes, edges=projected.n_edges))
    return projected


def co_neighbor_count(graph: BipartiteGraph, a: NodeRef, b: NodeRef) -> int:
    if a.side != b.side:
        raise InvalidArgumentError("co-neighbour count needs two nodes on the same side")
    if a.label == b.label:
        raise InvalidArgumentError("co-neighbour count needs two distinct nodes")
    return int(np.intersect1d(graph.neighbors(a), graph.neighbors(b), assume_unique=True).size)


def inflation_bound(graph: BipartiteGraph, side: Side) -> int:
    """Upper bound sum C(d, 2) over the pivot side's degrees on projected edges."""
    degrees = graph.object_degrees() if check_side(side) == "users" else graph.user_degrees()
    return int(np.sum(degrees * (degrees - 1) // 2))
