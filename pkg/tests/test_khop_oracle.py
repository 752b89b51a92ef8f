import numpy as np
import pytest
from conftest import graph_from_edges
from hypothesis import given, settings
from hypothesis import strategies as st

from matgraph.bench import RmatParams, bfs_oracle, build_graph, rmat_generate
from matgraph.bench.oracle import adjacency_from_edges, adjacency_from_graph
from matgraph.khop import KHopQuery, k_hop_count
from matgraph.store import ANY


@pytest.mark.parametrize("scale, rng_seed", [(6, 1), (8, 2), (10, 3), (12, 4)])
def test_rmat_khop_matches_bfs(scale, rng_seed):
    edges = rmat_generate(RmatParams(scale=scale, edge_factor=8, rng_seed=rng_seed))
    g = build_graph(edges, 1 << scale, with_ids=False)
    adj = adjacency_from_edges(edges)
    rng = np.random.default_rng(rng_seed)
    seeds = rng.choice(1 << scale, size=12, replace=False).tolist()
    for seed in seeds:
        for k in range(1, 9):
            for mode in ("exact", "cumulative"):
                assert k_hop_count(g, KHopQuery(seed, k, ANY, mode)) == bfs_oracle(adj, seed, k, mode), (seed, k, mode)


def test_oracle_hand_examples():
    path = graph_from_edges(4, [(0, 1), (1, 2), (2, 3)])
    assert bfs_oracle(path, 0, 2) == 1
    assert bfs_oracle(graph_from_edges(1, []), 0, 1) == 0
    assert bfs_oracle(graph_from_edges(3, [(0, 1), (1, 2), (2, 0)]), 0, 3) == 0
    assert bfs_oracle(path, 0, 6, "cumulative") == 3
    with pytest.raises(ValueError):
        bfs_oracle(path, 0, 1, "bogus")


def test_oracle_relation_filter():
    g = graph_from_edges(3, [(0, 1)], relation="A")
    g.create_edge(1, "B", 2)
    assert adjacency_from_graph(g, "A") == {0: {1}}
    assert adjacency_from_graph(g) == {0: {1}, 1: {2}}


@settings(max_examples=200, deadline=None)
@given(
    st.integers(1, 12).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=40),
            st.integers(0, n - 1),
        )
    ),
    st.integers(1, 8),
    st.sampled_from(["exact", "cumulative"]),
)
def test_random_graphs_match_bfs(case, k, mode):
    n, edges, seed = case
    g = graph_from_edges(n, edges)
    assert k_hop_count(g, KHopQuery(seed, k, ANY, mode)) == bfs_oracle(adjacency_from_edges(edges), seed, k, mode)
