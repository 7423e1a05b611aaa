import math

import numpy as np
import pytest

from conftest import random_bipartite
from core.errors import EmptyGraphError, InvalidArgumentError, NodeNotFoundError
from core.graph import BipartiteGraph
from core.rng import make_rng
from core.weighting import filter_by_threshold, inverse_user_frequency, term_frequency, tfidf_reweight


def test_term_frequency_is_relative_to_the_users_maximum():
    graph = BipartiteGraph.from_triples([("u", "x", 4.0), ("u", "y", 2.0), ("v", "x", 7.0)])
    assert term_frequency(graph, "u", "x") == 1.0
    assert term_frequency(graph, "u", "y") == 0.5
    assert term_frequency(graph, "v", "x") == 1.0
    with pytest.raises(NodeNotFoundError):
        term_frequency(graph, "v", "y")


def test_inverse_user_frequency(toy):
    assert inverse_user_frequency(toy, "f") == pytest.approx(math.log(5))
    assert inverse_user_frequency(toy, "d") == pytest.approx(math.log(5 / 4))
    assert inverse_user_frequency(toy, "f", log_base=2) == pytest.approx(math.log2(5))
    with pytest.raises(InvalidArgumentError):
        inverse_user_frequency(toy, "f", log_base=1.0)


def test_inverse_user_frequency_on_a_popular_object():
    triples = [(f"u{i}", "filler", 1.0) for i in range(1892)]
    triples += [(f"u{i}", "rock", 1.0) for i in range(673)]
    graph = BipartiteGraph.from_triples(triples)
    assert inverse_user_frequency(graph, "rock") == pytest.approx(1.033, abs=1e-3)
    assert inverse_user_frequency(graph, "filler") == 0.0


def test_reweight_matches_direct_evaluation_on_random_graphs():
    rng = make_rng(2024)
    for _ in range(1000):
        graph = random_bipartite(rng, integer_weights=bool(rng.integers(2)))
        weighted = tfidf_reweight(graph)
        n_u = graph.n_users
        object_degree = {o: 0 for o in graph.objects}
        user_max = {u: 0.0 for u in graph.users}
        for u, o, w in graph.triples():
            object_degree[o] += 1
            user_max[u] = max(user_max[u], w)
        for (u, o, w), (_, _, w_new) in zip(graph.triples(), weighted.triples()):
            expected = (w / user_max[u]) * math.log(n_u / object_degree[o])
            assert w_new == pytest.approx(expected, rel=1e-12, abs=1e-12)
            if object_degree[o] == n_u:
                assert w_new == 0.0
            assert 0.0 <= w_new <= math.log(n_u) + 1e-12


def test_rescaling_one_user_leaves_weights_unchanged():
    rng = make_rng(7)
    for _ in range(200):
        graph = random_bipartite(rng, integer_weights=False)
        user = int(rng.integers(graph.n_users))
        scale = np.where(graph.user_idx == user, rng.uniform(0.01, 100.0), 1.0)
        before = tfidf_reweight(graph).weights
        after = tfidf_reweight(graph.with_weights(graph.weights * scale)).weights
        np.testing.assert_allclose(after, before, rtol=1e-12, atol=1e-12)


def test_reweight_is_pure_and_keeps_the_originals(toy):
    weighted = tfidf_reweight(toy)
    np.testing.assert_array_equal(toy.weights, weighted.tfidf.original)
    assert toy.tfidf is None
    assert weighted.users == toy.users and weighted.objects == toy.objects
    # user 1: a=3 is the max, b=2 -> 2:3 against objects of equal degree
    positions = {(u, o): i for i, (u, o, _) in enumerate(weighted.triples())}
    assert weighted.weights[positions[("1", "b")]] / weighted.weights[positions[("1", "a")]] == pytest.approx(2 / 3)


def test_unpopular_objects_weigh_more(toy):
    weighted = dict(((u, o), w) for u, o, w in tfidf_reweight(toy).triples())
    # user 3 has f = 0.5 on both d (degree 4) and e (degree 2)
    assert weighted[("3", "e")] > weighted[("3", "d")]


def test_every_user_keeps_a_unit_term_frequency(toy):
    tfidf = tfidf_reweight(toy).tfidf
    for u in range(toy.n_users):
        assert tfidf.tf[toy.user_edges(u)].max() == 1.0


def test_reweight_rejects_empty_graph_and_unknown_normalizer(toy):
    with pytest.raises(EmptyGraphError):
        tfidf_reweight(BipartiteGraph((), (), [], [], []))
    with pytest.raises(InvalidArgumentError):
        tfidf_reweight(toy, normalizer="sum")


def test_filter_at_zero_keeps_everything(toy):
    weighted = tfidf_reweight(BipartiteGraph.from_triples([("u", "x", 1.0), ("v", "x", 1.0), ("v", "y", 1.0)]))
    result = filter_by_threshold(weighted, 0.0)
    assert result.edges_removed == 0
    assert list(result.graph.triples()) == list(weighted.triples())


def test_filter_keeps_edges_equal_to_tau(toy):
    weighted = tfidf_reweight(toy)
    tau = float(np.sort(weighted.weights)[5])
    result = filter_by_threshold(weighted, tau)
    assert result.graph.weights.min() == tau
    assert result.edges_removed == int(np.count_nonzero(weighted.weights < tau))


def test_filter_above_the_maximum_empties_the_graph(toy):
    weighted = tfidf_reweight(toy)
    result = filter_by_threshold(weighted, float(weighted.weights.max()) + 1.0)
    assert result.empty
    assert (result.users_remaining, result.objects_remaining) == (0, 0)
    assert result.edges_removed == toy.n_edges


def test_filter_rejects_bad_thresholds(toy):
    for tau in (-0.1, float("nan"), float("inf")):
        with pytest.raises(InvalidArgumentError):
            filter_by_threshold(toy, tau)


def test_filter_is_monotone_in_tau():
    rng = make_rng(99)
    for _ in range(100):
        weighted = tfidf_reweight(random_bipartite(rng, 12, 12))
        previous = None
        for tau in (0.0, 0.1, 0.3, 0.6, 1.0, 1.5, 2.5):
            result = filter_by_threshold(weighted, tau)
            edges = {(u, o) for u, o, _ in result.graph.triples()}
            if previous is not None:
                prev_result, prev_edges = previous
                assert edges <= prev_edges
                assert set(result.graph.users) <= set(prev_result.graph.users)
                assert set(result.graph.objects) <= set(prev_result.graph.objects)
                assert result.edges_removed >= prev_result.edges_removed
            previous = (result, edges)


def test_filter_carries_tfidf_bookkeeping(toy):
    weighted = tfidf_reweight(toy)
    result = filter_by_threshold(weighted, 0.5)
    kept = result.graph
    assert kept.tfidf is not None
    np.testing.assert_allclose(kept.weights, kept.tfidf.tf * kept.tfidf.object_idf[kept.object_idx])


def test_southern_women_filter_drops_popular_events(women):
    result = filter_by_threshold(tfidf_reweight(women, log_base=2), 1.0)
    assert "16" not in result.graph.users
    assert result.users_remaining == 17
    assert {"E7", "E8", "E9"}.isdisjoint(result.graph.objects)
    assert result.objects_remaining == 11
