import numpy as np
import pytest

from matgraph.sparse import BitVector, SparseMatrix, matrix_build, matrix_from_coo
from matgraph.store import PropertyGraph

DENSITIES = (0.01, 0.1, 0.3)


def random_dense(rng, nrows, ncols, density):
    return rng.random((nrows, ncols)) < density


def from_dense(d: np.ndarray) -> SparseMatrix:
    r, c = np.nonzero(d)
    return matrix_from_coo(d.shape[0], d.shape[1], r, c)


def random_vector(rng, n, density):
    return BitVector(n, np.flatnonzero(rng.random(n) < density))


def dense_vec(v: BitVector) -> np.ndarray:
    out = np.zeros(v.dimension, dtype=bool)
    out[v.indices] = True
    return out


def path_matrix(n=4) -> SparseMatrix:
    return matrix_build(n, n, [(i, i + 1) for i in range(n - 1)])


def graph_from_edges(n, edges, relation="R", ids=False) -> PropertyGraph:
    g = PropertyGraph()
    for i in range(n):
        g.create_node((), {"id": i} if ids else None)
    for s, d in edges:
        g.create_edge(s, relation, d)
    return g


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ALPHABET = "ab Z9_%;:\t\n,'é漢🙂"
_LABELS = ("Person", "City", "Tag", "_x")
_RELS = ("KNOWS", "LIVES_IN", "R", "r2")


def _random_value(rng):
    kind = int(rng.integers(0, 4))
    if kind == 0:
        return int(rng.integers(-(2**63), 2**63 - 1, dtype=np.int64, endpoint=True))
    if kind == 1:
        return float(rng.choice([0.1, -0.0, 1e300, 5e-324, float(rng.normal()), float("inf"), 3.0]))
    if kind == 2:
        return bool(rng.integers(0, 2))
    return "".join(rng.choice(list(_ALPHABET), size=int(rng.integers(0, 8))))


def _random_props(rng, max_keys=3):
    keys = rng.choice(["name", "age", "w", "k_1", "Id"], size=int(rng.integers(0, max_keys + 1)), replace=False)
    return {str(k): _random_value(rng) for k in keys}


def random_graph(seed: int) -> PropertyGraph:
    """Mixed-size property graph with awkward strings, used by round-trip properties."""
    from matgraph.bench import RmatParams, rmat_generate

    rng = np.random.default_rng(seed)
    g = PropertyGraph(capacity=int(rng.integers(1, 20)))
    big = seed % 10 == 0
    n = 256 if big else int(rng.integers(0, 40))
    for _ in range(n):
        labels = list(rng.choice(_LABELS, size=int(rng.integers(0, 3)), replace=False))
        g.create_node(labels, _random_props(rng))
    if big:
        edges = rmat_generate(RmatParams(scale=8, edge_factor=4, rng_seed=seed))
        g.add_edges("R", edges[:, 0], edges[:, 1])
    if n:
        for _ in range(int(rng.integers(0, 3 * n + 1))):
            s, d = (int(x) for x in rng.integers(0, n, 2))
            g.create_edge(s, str(rng.choice(_RELS)), d, _random_props(rng, 2))
    return g


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
