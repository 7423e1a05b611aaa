import itertools

import numpy as np
import pytest

from conftest import random_bipartite
from core.errors import EmptyGraphError, InvalidArgumentError
from core.graph import BipartiteGraph, NodeRef
from core.projection import co_neighbor_count, inflation_bound, project
from core.rng import make_rng


def brute_force(graph: BipartiteGraph, side: str) -> dict[tuple[str, str], float]:
    labels = graph.labels(side)
    neighbours = {label: set(graph.neighbors(NodeRef(side, label)).tolist()) for label in labels}
    counts = {}
    for a, b in itertools.combinations(labels, 2):
        shared = len(neighbours[a] & neighbours[b])
        if shared:
            counts[(a, b)] = float(shared)
    return counts


def test_toy_user_projection(toy):
    projected = project(toy, "users")
    weights = {(a, b): w for a, b, w in projected.edges()}
    assert weights[("1", "2")] == 3.0
    assert weights[("3", "4")] == 2.0
    assert ("1", "5") not in weights
    assert projected.nodes == toy.users
    assert co_neighbor_count(toy, NodeRef("users", "1"), NodeRef("users", "2")) == 3
    assert co_neighbor_count(toy, NodeRef("users", "1"), NodeRef("users", "5")) == 0


def test_projection_keeps_every_node_of_the_side():
    graph = BipartiteGraph.from_triples([("u", "x", 1.0), ("v", "y", 1.0), ("w", "y", 1.0)])
    projected = project(graph, "users")
    assert projected.nodes == ("u", "v", "w")
    assert list(projected.edges()) == [("v", "w", 1.0)]


@pytest.mark.parametrize("method", ["sparse", "pairs"])
def test_projection_matches_brute_force(method):
    rng = make_rng(31)
    for _ in range(500):
        graph = random_bipartite(rng, max_users=10, max_objects=10)
        for side in ("users", "objects"):
            projected = project(graph, side, method=method)
            assert {(a, b): w for a, b, w in projected.edges()} == brute_force(graph, side)


def test_methods_agree_exactly():
    rng = make_rng(5)
    for _ in range(50):
        graph = random_bipartite(rng, 20, 20)
        sparse_edges = project(graph, "users", "sparse")
        pair_edges = project(graph, "users", "pairs")
        np.testing.assert_array_equal(sparse_edges.source, pair_edges.source)
        np.testing.assert_array_equal(sparse_edges.target, pair_edges.target)
        np.testing.assert_array_equal(sparse_edges.weights, pair_edges.weights)


def test_projection_ignores_bipartite_weights(toy):
    heavier = toy.with_weights(toy.weights * 10)
    assert list(project(heavier, "objects").edges()) == list(project(toy, "objects").edges())


def test_edge_inflation_bound():
    rng = make_rng(8)
    for _ in range(100):
        graph = random_bipartite(rng, 15, 15)
        assert project(graph, "users").n_edges <= inflation_bound(graph, "users")
        assert project(graph, "objects").n_edges <= inflation_bound(graph, "objects")


def test_removing_a_popular_object_costs_at_most_its_pairs(toy):
    d = toy.object_degrees()[toy.objects.index("d")]
    without = toy.subgraph(np.array([o != "d" for _, o, _ in toy.triples()]), prune=False)
    lost = project(toy, "users").n_edges - project(without, "users").n_edges
    assert 0 < lost <= d * (d - 1) // 2


def test_symmetric_and_loop_free(toy):
    projected = project(toy, "objects")
    assert np.all(projected.source < projected.target)
    adjacency = projected.adjacency()
    for i, row in enumerate(adjacency):
        assert i not in row
        for j, w in row.items():
            assert adjacency[j][i] == w


def test_bad_arguments(toy):
    with pytest.raises(InvalidArgumentError):
        co_neighbor_count(toy, NodeRef("users", "1"), NodeRef("objects", "a"))
    with pytest.raises(InvalidArgumentError):
        project(toy, "users", method="dense")  # type: ignore[arg-type]
    with pytest.raises(InvalidArgumentError):
        project(toy, "rows")  # type: ignore[arg-type]
    with pytest.raises(EmptyGraphError):
        project(BipartiteGraph((), (), [], [], []), "users")
