# core/weighting.py
"""tf-idf reweighting of user-object edges and threshold filtering.

    w_new(u, o) = f(u, o) * log(|U| / d(o))
    f(u, o)     = w(u, o) / max{ w(u, p) : p in N(u) }

Users play the role of documents and objects the role of terms: an edge is
strong when the user interacts with the object often (relative to the user's
own maximum) and few other users touch the object.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from core.errors import EmptyGraphError, InvalidArgumentError, NodeNotFoundError, UndefinedStatisticError
from core.graph import BipartiteGraph, NodeRef, TfidfWeights
from logs.logger import get_logger, kv

logger = get_logger(__name__)

Normalizer = Callable[[BipartiteGraph], tuple[np.ndarray, np.ndarray]]


def max_normalizer(graph: BipartiteGraph) -> tuple[np.ndarray, np.ndarray]:
    """Per-edge f = w / (user's max weight), plus the per-user maxima."""
    user_max = np.zeros(graph.n_users)
    np.maximum.at(user_max, graph.user_idx, graph.weights)
    denominators = user_max[graph.user_idx]
    if np.any(denominators <= 0):
        raise UndefinedStatisticError("a user has no positive edge weight; term frequency is undefined")
    return graph.weights / denominators, user_max


NORMALIZERS: dict[str, Normalizer] = {"max": max_normalizer}


def _log(values: np.ndarray | float, base: float):
    if base == math.e:
        return np.log(values)
    return np.log(values) / math.log(base)


def _check_base(base: float) -> float:
    if not math.isfinite(base) or base <= 1.0:
        raise InvalidArgumentError(f"log base must be a finite number > 1, got {base}")
    return base


def _edge(graph: BipartiteGraph, user: str, obj: str) -> tuple[int, int, int]:
    u = graph.index_of(NodeRef("users", user))
    o = graph.index_of(NodeRef("objects", obj))
    position = graph.edge_position(u, o)
    if position is None:
        raise NodeNotFoundError(f"no edge between user {user!r} and object {obj!r}")
    return u, o, position


def term_frequency(graph: BipartiteGraph, user: str, obj: str) -> float:
    u, _, position = _edge(graph, user, obj)
    row = graph.weights[graph.user_edges(u)]
    top = float(row.max())
    if top <= 0:
        raise UndefinedStatisticError(f"user {user!r} has no positive edge weight")
    return float(graph.weights[position]) / top


def inverse_user_frequency(graph: BipartiteGraph, obj: str, log_base: float = math.e) -> float:
    o = graph.index_of(NodeRef("objects", obj))
    d = int(graph.object_degrees()[o])
    if d == 0:
        raise UndefinedStatisticError(f"object {obj!r} has no users; idf is undefined")
    return float(_log(graph.n_users / d, _check_base(log_base)))


def tfidf_reweight(graph: BipartiteGraph, log_base: float = math.e, normalizer: str = "max") -> BipartiteGraph:
    """New graph with every weight replaced by f * idf; the input is untouched."""
    if graph.is_empty():
        raise EmptyGraphError("cannot reweight an empty graph")
    _check_base(log_base)
    try:
        normalize = NORMALIZERS[normalizer]
    except KeyError:
        raise InvalidArgumentError(f"unknown normalizer {normalizer!r}; known: {sorted(NORMALIZERS)}") from None

    tf, user_max = normalize(graph)
    degrees = graph.object_degrees()
    if np.any(degrees == 0):
        raise UndefinedStatisticError("object without users in graph; idf is undefined")
    object_idf = _log(graph.n_users / degrees.astype(np.float64), log_base)
    w_new = tf * object_idf[graph.object_idx]

    original = graph.tfidf.original if graph.tfidf is not None else graph.weights
    tfidf = TfidfWeights(
        original=np.array(original, dtype=np.float64),
        tf=tf,
        user_max=user_max,
        object_idf=object_idf,
        log_base=log_base,
        normalizer=normalizer,
    )
    logger.debug(kv("tfidf", edges=graph.n_edges, log_base=log_base, max_weight=float(w_new.max())))
    return graph.with_weights(w_new, tfidf)


@dataclass(frozen=True)
class FilterResult:
    graph: BipartiteGraph
    tau: float
    edges_removed: int
    users_remaining: int
    objects_remaining: int

    @property
    def empty(self) -> bool:
        return self.graph.is_empty()


def check_tau(tau: float) -> float:
    tau = float(tau)
    if not math.isfinite(tau) or tau < 0:
        raise InvalidArgumentError(f"threshold must be finite and >= 0, got {tau}")
    return tau


def filter_by_threshold(graph: BipartiteGraph, tau: float) -> FilterResult:
    """Drop edges with weight < tau (edges equal to tau stay), then isolated nodes."""
    tau = check_tau(tau)
    if graph.tfidf is None:
        logger.debug("filtering a graph without tf-idf bookkeeping; using its weights as given")
    keep = graph.weights >= tau
    filtered = graph.subgraph(keep)
    result = FilterResult(
        graph=filtered,
        tau=tau,
        edges_removed=graph.n_edges - filtered.n_edges,
        users_remaining=filtered.n_users,
        objects_remaining=filtered.n_objects,
    )
    log = logger.warning if result.empty else logger.info
    log(kv("filter", tau=tau, edges_removed=result.edges_removed,
           users_remaining=result.users_remaining, objects_remaining=result.objects_remaining,
           empty=result.empty))
    return result
