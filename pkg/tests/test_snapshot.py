import pytest
from conftest import random_graph

from matgraph.snapshot import (
    MAGIC,
    SnapshotError,
    dumps,
    loads,
    snapshot_load,
    snapshot_save,
)
from matgraph.store import PropertyGraph


def two_node_graph():
    g = PropertyGraph()
    g.create_node(["Person"], {"name": "ann b", "age": 41})
    g.create_node(["Person", "Admin"])
    g.create_edge(0, "KNOWS", 1, {"since": 2001.5})
    return g


def test_empty_round_trip(tmp_path):
    p = tmp_path / "g.graphsnap"
    snapshot_save(PropertyGraph(), p)
    assert p.read_text() == f"{MAGIC}\nNODES 0\nEDGES 0\n"
    assert snapshot_load(p) == PropertyGraph()


def test_exact_text():
    assert dumps(two_node_graph()) == (
        "GRAPHSNAP1\n"
        "NODES 2\n"
        "0\tPerson\tage:i:41;name:s:ann%20b\n"
        "1\tPerson,Admin\t\n"
        "EDGES 1\n"
        "0\tKNOWS\t1\tsince:f:2001.5\n"
    )


def test_resave_is_bit_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    snapshot_save(two_node_graph(), a)
    snapshot_save(snapshot_load(a), b)
    assert a.read_bytes() == b.read_bytes()
    assert not list(tmp_path.glob("*.tmp"))


@pytest.mark.parametrize("seed", range(100))
def test_random_round_trip(seed):
    g = random_graph(seed)
    text = dumps(g)
    h = loads(text)
    assert h == g
    assert dumps(h) == text
    h.check_invariants()
    for nid in range(g.node_count):
        got = sorted((k, type(v)) for k, v in h.node_props(nid).items())
        assert got == sorted((k, type(v)) for k, v in g.node_props(nid).items())


GOOD = "GRAPHSNAP1\nNODES 2\n0\tA\t\n1\t\tx:i:1\nEDGES 1\n0\tR\t1\t\n"


@pytest.mark.parametrize(
    "text, lineno",
    [
        ("", 1),
        ("GRAPHSNAP2\nNODES 0\nEDGES 0\n", 1),
        ("GRAPHSNAP1\nNODES x\nEDGES 0\n", 2),
        ("GRAPHSNAP1\nNODES 2\n0\tA\t\n", 4),
        ("GRAPHSNAP1\nNODES 2\n0\tA\t\n2\t\t\nEDGES 0\n", 4),
        ("GRAPHSNAP1\nNODES 2\n0\tA\t\n1\t\tx:q:1\nEDGES 0\n", 4),
        ("GRAPHSNAP1\nNODES 2\n0\tA\t\n1\t\tx:i:1\nEDGES 1\n0\tR\t7\t\n", 6),
        ("GRAPHSNAP1\nNODES 2\n0\tA\t\n1\t\tx:i:1\nEDGES 1\n0\tR\t1\n", 6),
        ("GRAPHSNAP1\nNODES 2\n0\tA\t\n1\t\tx:i:1\nEDGES 2\n0\tR\t1\t\n", 7),
        ("GRAPHSNAP1\nNODES 2\n0\tbad label\t\n1\t\t\nEDGES 0\n", 3),
        ("GRAPHSNAP1\nNODES 0\nEDGES 0", 3),
        ("GRAPHSNAP1\nNODES 1\n0\t\tb:b:yes\nEDGES 0\n", 3),
        ("GRAPHSNAP1\nNODES 1\n0\t\tn:i:99999999999999999999\nEDGES 0\n", 3),
    ],
)
def test_malformed_reports_line(text, lineno):
    with pytest.raises(SnapshotError) as ei:
        loads(text)
    assert ei.value.lineno == lineno
    assert str(ei.value).startswith(f"line {lineno}: ")


def test_good_sample_loads():
    g = loads(GOOD)
    assert g.node_count == 2 and g.edge_count() == 1
    assert g.node_props(1) == {"x": 1}


def test_equality_sees_value_kinds():
    a, b = PropertyGraph(), PropertyGraph()
    a.create_node((), {"x": 1})
    b.create_node((), {"x": 1.0})
    assert a != b


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        snapshot_load(tmp_path / "absent")
