# core/planted.py
"""Planted-partition user-object networks with known user blocks.

Each block owns a pool of private objects; ``popular_objects`` global objects
are attached to every user so that the raw projection is one dense blob.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from core.community import Partition
from core.errors import InvalidArgumentError
from core.graph import BipartiteGraph
from core.rng import SeedLike, make_rng
from logs.logger import get_logger, kv

logger = get_logger(__name__)


@dataclass(frozen=True)
class PlantedBipartite:
    graph: BipartiteGraph
    blocks: Partition

    def block_of(self, user: str) -> int:
        return self.blocks.community_of(user)


def make_planted_bipartite(
    blocks: int = 2,
    users_per_block: int = 50,
    objects_per_block: int = 40,
    popular_objects: int = 3,
    seed: SeedLike = 0,
    users_per_object: int = 15,
    max_weight: int = 5,
) -> PlantedBipartite:
    """Random planted network.

    Every private object is linked to ``users_per_object`` distinct users of
    its block with weights uniform on 1..max_weight; a user left without a
    private object gets one. Popular objects link to every user with weight 1.
    """
    if min(blocks, users_per_block, objects_per_block, users_per_object, max_weight) < 1:
        raise InvalidArgumentError("block, user, object and weight counts must be >= 1")
    if popular_objects < 0:
        raise InvalidArgumentError("popular_objects must be >= 0")
    if users_per_object > users_per_block:
        raise InvalidArgumentError("users_per_object cannot exceed users_per_block")

    rng = make_rng(seed)
    n_users = blocks * users_per_block
    users = [f"u{i}" for i in range(n_users)]
    objects = [f"b{b}o{j}" for b in range(blocks) for j in range(objects_per_block)]
    objects += [f"pop{j}" for j in range(popular_objects)]

    rows: list[int] = []
    cols: list[int] = []
    weights: list[float] = []
    for b in range(blocks):
        first_user = b * users_per_block
        first_object = b * objects_per_block
        covered = np.zeros(users_per_block, dtype=bool)
        for j in range(objects_per_block):
            members = rng.choice(users_per_block, size=users_per_object, replace=False)
            covered[members] = True
            rows.extend((first_user + members).tolist())
            cols.extend([first_object + j] * users_per_object)
            weights.extend(rng.integers(1, max_weight + 1, size=users_per_object).astype(float).tolist())
        for member in np.flatnonzero(~covered).tolist():
            rows.append(first_user + member)
            cols.append(first_object + int(rng.integers(objects_per_block)))
            weights.append(float(rng.integers(1, max_weight + 1)))

    popular_base = blocks * objects_per_block
    for j in range(popular_objects):
        rows.extend(range(n_users))
        cols.extend([popular_base + j] * n_users)
        weights.extend([1.0] * n_users)

    graph = BipartiteGraph.build(users, objects, rows, cols, weights)
    truth = Partition.from_labels(users, (i // users_per_block for i in range(n_users)))
    logger.debug(kv("planted", users=graph.n_users, objects=graph.n_objects, edges=graph.n_edges))
    return PlantedBipartite(graph, truth)
