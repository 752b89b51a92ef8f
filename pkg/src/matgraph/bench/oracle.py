"""Reference k-hop counts by plain queue-based BFS.

Deliberately shares nothing with the matrix kernel or the executor: the
adjacency is a dict of Python sets built from edge tuples.
"""

from __future__ import annotations

from collections import deque


def adjacency_from_edges(edges) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {}
    for s, d in edges:
        adj.setdefault(int(s), set()).add(int(d))
    return adj


def adjacency_from_graph(graph, relation: str | None = None) -> dict[int, set[int]]:
    """Out-adjacency from the store's edge records (all relations unless one is named)."""
    adj: dict[int, set[int]] = {}
    for s, rel, d, _ in graph.edge_records():
        if relation is None or rel == relation:
            adj.setdefault(s, set()).add(d)
    return adj


def bfs_distances(adj: dict[int, set[int]], seed: int, max_depth: int) -> dict[int, int]:
    dist = {seed: 0}
    queue = deque([seed])
    while queue:
        u = queue.popleft()
        du = dist[u]
        if du == max_depth:
            continue
        for v in adj.get(u, ()):
            if v not in dist:
                dist[v] = du + 1
                queue.append(v)
    return dist


def bfs_oracle(graph_or_adj, seed: int, k: int, mode: str = "exact") -> int:
    """Vertices at shortest distance exactly k (or 1..k for ``cumulative``) from seed."""
    adj = graph_or_adj if isinstance(graph_or_adj, dict) else adjacency_from_graph(graph_or_adj)
    dist = bfs_distances(adj, seed, k)
    if mode == "exact":
        return sum(1 for d in dist.values() if d == k)
    if mode == "cumulative":
        return sum(1 for d in dist.values() if 1 <= d <= k)
    raise ValueError(f"unknown mode {mode!r}")
