"""k-hop neighbourhood kernel: masked vxm expansion from a single seed."""

from __future__ import annotations

from dataclasses import dataclass

from .sparse import BitVector, ContractError, SparseMatrix, apply_mask, ewise_union, vxm
from .store import ANY, PropertyGraph

MAX_K = 32
MODES = ("exact", "cumulative")


@dataclass(frozen=True)
class KHopQuery:
    seed: int
    k: int
    relation: str = ANY
    mode: str = "exact"

    def __post_init__(self):
        if not 1 <= self.k <= MAX_K:
            raise ContractError(f"k must be in [1, {MAX_K}], got {self.k}")
        if self.mode not in MODES:
            raise ContractError(f"mode must be one of {MODES}, got {self.mode!r}")


def bfs_levels(A: SparseMatrix, seed: int, max_k: int) -> list[BitVector]:
    """Frontiers at shortest distance 1, 2, ... up to max_k; stops at the first empty one.

    Each step is ``frontier <- frontier (lor.land) A`` under the complement of
    the visited set, so the frontiers are pairwise disjoint and never contain
    the seed.
    """
    frontier = BitVector(A.nrows, [seed])
    visited = frontier
    levels = []
    for _ in range(max_k):
        frontier = vxm(frontier, A, mask=visited, complement_mask=True)
        if frontier.nvals == 0:
            break
        levels.append(frontier)
        visited = ewise_union(visited, frontier)
    return levels


def _check_seed(graph: PropertyGraph, seed: int) -> None:
    if not (0 <= seed < graph.node_count):
        raise ContractError(f"unknown seed node {seed}")


def k_hop_frontier(graph: PropertyGraph, q: KHopQuery) -> BitVector:
    _check_seed(graph, q.seed)
    A = graph.relation_matrix(q.relation)
    seed_vec = BitVector(A.nrows, [q.seed])
    frontier = seed_vec
    visited = seed_vec
    for _ in range(q.k):
        frontier = vxm(frontier, A, mask=visited, complement_mask=True)
        if frontier.nvals == 0:
            break
        visited = ewise_union(visited, frontier)
    if q.mode == "exact":
        return frontier
    return apply_mask(visited, seed_vec, complement=True)


def k_hop_count(graph: PropertyGraph, q: KHopQuery) -> int:
    return k_hop_frontier(graph, q).nvals
