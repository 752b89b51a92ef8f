"""GRAPHSNAP1 text snapshots.

Layout (UTF-8, LF)::

    GRAPHSNAP1
    NODES <n>
    <id>\t<label,label,...>\t<props>        (n lines, ids 0..n-1 in order)
    EDGES <m>
    <src>\t<relation>\t<dst>\t<props>       (m lines)

``<props>`` is ``key:type:value`` items joined by ';' (type in i/f/b/s,
strings percent-encoded).
"""

from __future__ import annotations

import io
import os
from collections import defaultdict
from pathlib import Path

import numpy as np

from .encoding import decode_props, encode_props
from .store import IDENT_RE, PropertyGraph

MAGIC = "GRAPHSNAP1"


class SnapshotError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def dumps(graph: PropertyGraph) -> str:
    graph.flush()
    out = io.StringIO()
    out.write(f"{MAGIC}\nNODES {graph.node_count}\n")
    for nid in range(graph.node_count):
        labels = ",".join(graph.node_labels(nid))
        out.write(f"{nid}\t{labels}\t{encode_props(graph.node_props(nid))}\n")
    records = list(graph.edge_records())
    out.write(f"EDGES {len(records)}\n")
    for src, rel, dst, props in records:
        out.write(f"{src}\t{rel}\t{dst}\t{encode_props(props)}\n")
    return out.getvalue()


def _count_line(line: str, word: str, lineno: int) -> int:
    parts = line.split(" ")
    if len(parts) != 2 or parts[0] != word or not parts[1].isdigit():
        raise SnapshotError(lineno, f"expected '{word} <count>', got {line!r}")
    return int(parts[1])


def loads(text: str) -> PropertyGraph:
    if text and not text.endswith("\n"):
        raise SnapshotError(text.count("\n") + 1, "missing final newline")
    lines = text.split("\n")[:-1] if text else []
    if not lines or lines[0] != MAGIC:
        raise SnapshotError(1, f"expected {MAGIC} header")
    if len(lines) < 2:
        raise SnapshotError(2, "missing NODES line")
    n = _count_line(lines[1], "NODES", 2)
    graph = PropertyGraph()
    pos = 2
    for nid in range(n):
        lineno = pos + 1
        if pos >= len(lines):
            raise SnapshotError(lineno, "unexpected end of file in node section")
        fields = lines[pos].split("\t")
        if len(fields) != 3:
            raise SnapshotError(lineno, "node line needs 3 tab-separated fields")
        if fields[0] != str(nid):
            raise SnapshotError(lineno, f"expected node id {nid}, got {fields[0]!r}")
        labels = fields[1].split(",") if fields[1] else []
        if any(not IDENT_RE.match(lab) for lab in labels):
            raise SnapshotError(lineno, f"bad label list {fields[1]!r}")
        try:
            props = decode_props(fields[2])
        except ValueError as exc:
            raise SnapshotError(lineno, f"bad properties: {exc}") from None
        graph.create_node(labels, props)
        pos += 1
    if pos >= len(lines):
        raise SnapshotError(pos + 1, "missing EDGES line")
    m = _count_line(lines[pos], "EDGES", pos + 1)
    pos += 1
    if len(lines) - pos != m:
        raise SnapshotError(min(len(lines), pos + m) + 1, f"expected {m} edge lines, found {len(lines) - pos}")
    srcs: dict[str, list[int]] = defaultdict(list)
    dsts: dict[str, list[int]] = defaultdict(list)
    for off in range(m):
        lineno = pos + off + 1
        fields = lines[pos + off].split("\t")
        if len(fields) != 4:
            raise SnapshotError(lineno, "edge line needs 4 tab-separated fields")
        s, rel, d, raw = fields
        if not (s.isdigit() and d.isdigit()):
            raise SnapshotError(lineno, "edge endpoints must be node ids")
        src, dst = int(s), int(d)
        if src >= n or dst >= n:
            raise SnapshotError(lineno, f"edge endpoint out of range [0, {n})")
        if not IDENT_RE.match(rel):
            raise SnapshotError(lineno, f"bad relation type {rel!r}")
        try:
            props = decode_props(raw)
        except ValueError as exc:
            raise SnapshotError(lineno, f"bad properties: {exc}") from None
        srcs[rel].append(src)
        dsts[rel].append(dst)
        if props:
            graph.set_edge_props(src, rel, dst, props)
    for rel in srcs:
        graph.add_edges(rel, np.asarray(srcs[rel]), np.asarray(dsts[rel]))
    graph.flush()
    return graph


def snapshot_save(graph: PropertyGraph, path) -> None:
    """Write atomically: temp file in the same directory, then rename."""
    path = Path(path)
    text = dumps(graph)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    os.replace(tmp, path)


def snapshot_load(path) -> PropertyGraph:
    with open(path, encoding="utf-8", newline="") as f:
        text = f.read()
    return loads(text)
