import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import star, undirected
from paradoxlab.graph import (
    build_undirected,
    filter_min_degree,
    load_snapshot,
    neighbor_stats,
    neighbor_table,
    save_snapshot,
)


def edge_sets(max_nodes=30):
    return st.integers(1, max_nodes).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=4 * n),
        )
    )


def test_reciprocal_keeps_only_mutual_edges():
    g = build_undirected([("a", "b"), ("b", "a"), ("a", "c")], mode="reciprocal")
    assert g.ids.tolist() == ["a", "b"]
    assert g.edges().tolist() == [[0, 1]]


def test_symmetrize_keeps_either_direction():
    g = build_undirected([("a", "b"), ("b", "a"), ("a", "c")], mode="symmetrize")
    assert g.ids.tolist() == ["a", "b", "c"]
    assert g.edges().tolist() == [[0, 1], [0, 2]]


def test_empty_edge_set():
    g = build_undirected([])
    assert g.n == 0 and g.m == 0


def test_self_edges_skipped_and_counted():
    g = build_undirected([(1, 1), (1, 2), (2, 1)])
    assert g.m == 1
    assert g.meta["self_loops"] == 1


def test_declared_isolated_nodes_retained():
    g = build_undirected([(1, 2), (2, 1)], nodes=[5])
    assert g.ids.tolist() == [1, 2, 5]
    assert g.degree.tolist() == [1, 1, 0]


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        build_undirected([(1, 2)], mode="directed")


def test_filter_single_pass_on_path():
    g = undirected([("a", "b"), ("b", "c")])
    f = filter_min_degree(g, 2)
    assert f.ids.tolist() == ["b"]
    assert f.m == 0


def test_filter_iterated_is_kcore():
    g = undirected([("a", "b"), ("b", "c")])
    assert filter_min_degree(g, 2, iterate=True).n == 0


def test_filter_zero_is_identity(rng):
    g = undirected(rng.integers(0, 40, size=(80, 2)).tolist())
    assert filter_min_degree(g, 0) == g


def test_filter_rejects_negative_k():
    with pytest.raises(ValueError):
        filter_min_degree(star(3), -1)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_kcore_matches_networkx(rng, k):
    edges = rng.integers(0, 60, size=(200, 2))
    edges = edges[edges[:, 0] != edges[:, 1]].tolist()
    g = undirected(edges)
    core = filter_min_degree(g, k, iterate=True)
    G = nx.Graph(edges)
    assert sorted(core.ids.tolist()) == sorted(nx.k_core(G, k).nodes())


def test_neighbor_stats_star():
    g = star(4)
    leaf = neighbor_stats(g, 1)
    hub = neighbor_stats(g, 0)
    assert (leaf.degree, leaf.mean_neighbor_degree) == (1, 4.0)
    assert (hub.degree, hub.mean_neighbor_degree) == (4, 1.0)


def test_neighbor_stats_path_attribute(path_graph):
    s = neighbor_stats(path_graph, path_graph.index_of("b"))
    # (0.1 + 0.2) / 2
    assert s.mean_neighbor_attribute == pytest.approx(0.15, abs=1e-15)
    assert s.attributed_neighbors == 2


def test_neighbor_stats_undefined_cases():
    g = build_undirected([(1, 2), (2, 1)], nodes=[3]).with_attributes({1: 0.3})
    iso = neighbor_stats(g, g.index_of(3))
    assert not iso.has_degree_mean and math.isnan(iso.mean_neighbor_degree)
    one = neighbor_stats(g, g.index_of(1))
    assert not one.has_attribute_mean and math.isnan(one.mean_neighbor_attribute)


def test_attributes_validated():
    g = star(2)
    with pytest.raises(ValueError):
        g.with_attributes({0: 1.5})
    with pytest.raises(ValueError):
        g.with_attribute_array(np.array([0.0, np.inf, 0.0]))


def test_attributes_unmatched_ids_counted():
    g = star(2).with_attributes({0: 0.1, 99: 0.2, "x": 0.3})
    assert g.meta["unmatched_attributes"] == 2
    assert g.has_attribute.tolist() == [True, False, False]


def test_snapshot_header_and_string_ids(tmp_path, path_graph):
    p = tmp_path / "g.pdxg"
    save_snapshot(path_graph, p)
    raw = p.read_bytes()
    assert raw[:4] == b"PDXG"
    back = load_snapshot(p)
    assert back == path_graph
    assert back.ids.tolist() == ["a", "b", "c"]


def test_snapshot_bit_exact(tmp_path, rng):
    g = undirected(rng.integers(0, 100, size=(300, 2)).tolist())
    g = g.with_attribute_array(np.where(rng.random(g.n) < 0.8, rng.uniform(-1, 1, g.n), np.nan))
    save_snapshot(g, tmp_path / "a.pdxg")
    save_snapshot(load_snapshot(tmp_path / "a.pdxg"), tmp_path / "b.pdxg")
    assert (tmp_path / "a.pdxg").read_bytes() == (tmp_path / "b.pdxg").read_bytes()


def test_snapshot_rejects_bad_magic(tmp_path):
    p = tmp_path / "bad"
    p.write_bytes(b"NOPE" + bytes(40))
    with pytest.raises(ValueError):
        load_snapshot(p)


@settings(max_examples=60, deadline=None)
@given(edge_sets())
def test_canonical_invariants(data):
    n, edges = data
    g = undirected(edges, n)
    # handshake identity
    assert g.degree.sum() == 2 * g.m
    for u in range(g.n):
        nbrs = g.neighbors(u)
        assert np.all(np.diff(nbrs) > 0)
        assert u not in nbrs
        for v in nbrs:
            assert u in g.neighbors(v)


@settings(max_examples=40, deadline=None)
@given(edge_sets(), st.data())
def test_snapshot_round_trip_identity(tmp_path_factory, data, draw):
    n, edges = data
    g = undirected(edges, n)
    vals = draw.draw(st.lists(st.one_of(st.none(), st.floats(-1, 1)), min_size=g.n, max_size=g.n))
    g = g.with_attribute_array(np.array([np.nan if v is None else v for v in vals], dtype=float))
    p = tmp_path_factory.mktemp("snap") / "g.pdxg"
    save_snapshot(g, p)
    assert load_snapshot(p) == g


@settings(max_examples=60, deadline=None)
@given(edge_sets())
def test_mean_neighbor_degree_brute_force(data):
    n, edges = data
    g = undirected(edges, n)
    t = neighbor_table(g)
    for u in range(g.n):
        nbrs = g.neighbors(u).tolist()
        if nbrs:
            expected = sum(len(g.neighbors(w)) for w in nbrs) / len(nbrs)
            assert t.mean_neighbor_degree[u] == pytest.approx(expected, rel=1e-15)
            assert t.mean_neighbor_degree[u] >= 1.0
            assert neighbor_stats(g, u).mean_neighbor_degree == pytest.approx(expected, rel=1e-15)


@settings(max_examples=60, deadline=None)
@given(edge_sets())
def test_feld_inequality(data):
    n, edges = data
    g = undirected(edges, n)
    if g.m == 0:
        return
    t = neighbor_table(g)
    has = g.degree > 0
    assert t.mean_neighbor_degree[has].mean() >= g.degree[has].mean() - 1e-12
