"""Property graph backed by one boolean adjacency matrix per relation type.

Not internally synchronised: callers must provide many-readers-or-one-writer
exclusion (the server's per-graph guard does this). Reads flush the pending
edge buffer, so a reader running while a writer still has unflushed edges is
a contract violation; the server flushes at the end of every write query.
"""

from __future__ import annotations

import re
from collections import defaultdict

import numpy as np

from .encoding import INT64_MAX, INT64_MIN, value_kind
from .sparse import (
    INDEX,
    BitVector,
    ContractError,
    SparseMatrix,
    matrix_from_coo,
    transpose,
)

ANY = "*"
"""Relation name meaning "any relation type"; not a legal identifier, so it cannot collide."""

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
DEFAULT_CAPACITY = 16


def _checked_props(props) -> dict:
    """Copy of ``props`` after validating keys and values."""
    out = {}
    for k, v in (props or {}).items():
        if not isinstance(k, str) or not IDENT_RE.match(k):
            raise ContractError(f"invalid property key {k!r}")
        kind = value_kind(v)
        if kind == "i" and not INT64_MIN <= v <= INT64_MAX:
            raise ContractError(f"property {k!r} out of int64 range")
        out[k] = v
    return out


def _typed(props: dict) -> dict:
    # 1, 1.0 and True compare equal in Python; graph equality must not
    return {k: (value_kind(v), v) for k, v in props.items()}


class PropertyGraph:
    def __init__(self, capacity: int = DEFAULT_CAPACITY):
        self.capacity = max(1, int(capacity))
        self.node_count = 0
        self._node_labels: list[tuple[str, ...]] = []
        self._node_props: list[dict] = []
        self._label_members: dict[str, list[int]] = defaultdict(list)
        self._label_cache: dict[str, BitVector] = {}
        self._relations: dict[str, SparseMatrix] = {}
        self._any = SparseMatrix.empty(self.capacity, self.capacity)
        self._pending: dict[str, list[tuple[np.ndarray, np.ndarray]]] = defaultdict(list)
        self._transposed: dict[str, SparseMatrix] = {}
        self._edge_props: dict[tuple[int, str, int], dict] = {}
        self._prop_kinds: dict[str, set[str]] = defaultdict(set)

    # -- writes -------------------------------------------------------------

    def create_node(self, labels=(), props=None) -> int:
        labels = tuple(dict.fromkeys(labels))
        for lab in labels:
            if not IDENT_RE.match(lab):
                raise ContractError(f"invalid label {lab!r}")
        nid = self.node_count
        if nid == self.capacity:
            self._grow(self.capacity * 2)
        self.node_count += 1
        self._node_labels.append(labels)
        props = _checked_props(props)
        self._node_props.append(props)
        for k, v in props.items():
            self._prop_kinds[k].add(value_kind(v))
        for lab in labels:
            self._label_members[lab].append(nid)
            self._label_cache.pop(lab, None)
        return nid

    def create_nodes(self, count: int) -> range:
        """Bulk-allocate ``count`` unlabelled, property-less nodes."""
        first = self.node_count
        need = first + count
        if need > self.capacity:
            cap = self.capacity
            while cap < need:
                cap *= 2
            self._grow(cap)
        self.node_count = need
        self._node_labels.extend([()] * count)
        self._node_props.extend({} for _ in range(count))
        return range(first, need)

    def set_node_property(self, nid: int, key: str, value) -> None:
        self._require_node(nid)
        value = _checked_props({key: value})[key]
        self._node_props[nid][key] = value
        self._prop_kinds[key].add(value_kind(value))

    def create_edge(self, src: int, relation: str, dst: int, props=None) -> None:
        self._require_node(src)
        self._require_node(dst)
        if not IDENT_RE.match(relation):
            raise ContractError(f"invalid relation type {relation!r}")
        props = _checked_props(props)
        self._pending[relation].append((np.array([src], dtype=INDEX), np.array([dst], dtype=INDEX)))
        self.set_edge_props(src, relation, dst, props)

    def set_edge_props(self, src: int, relation: str, dst: int, props: dict) -> None:
        """Attach properties to an edge record; the edge itself is added separately."""
        key = (int(src), relation, int(dst))
        if props:
            self._edge_props[key] = _checked_props(props)
        else:
            self._edge_props.pop(key, None)

    def add_edges(self, relation: str, src, dst) -> None:
        """Bulk edge insert without properties. Duplicates collapse on flush."""
        if not IDENT_RE.match(relation):
            raise ContractError(f"invalid relation type {relation!r}")
        src = np.asarray(src, dtype=INDEX).reshape(-1)
        dst = np.asarray(dst, dtype=INDEX).reshape(-1)
        if src.size != dst.size:
            raise ContractError("src and dst arrays differ in length")
        if src.size:
            lo = min(src.min(), dst.min())
            hi = max(src.max(), dst.max())
            if lo < 0 or hi >= self.node_count:
                raise ContractError(f"edge endpoint out of range [0, {self.node_count})")
            self._pending[relation].append((src, dst))

    def _require_node(self, nid: int) -> None:
        if not (isinstance(nid, (int, np.integer)) and 0 <= nid < self.node_count):
            raise ContractError(f"unknown node id {nid}")

    def _grow(self, capacity: int) -> None:
        self.capacity = capacity
        self._relations = {k: m.resized(capacity, capacity) for k, m in self._relations.items()}
        self._any = self._any.resized(capacity, capacity)
        self._transposed.clear()
        self._label_cache.clear()

    def flush(self) -> None:
        """Merge pending edges into the relation matrices and the any-relation matrix."""
        if not self._pending:
            return
        n = self.capacity
        any_rows = [self._any.row_ids()]
        any_cols = [self._any.col_idx]
        for rel, chunks in self._pending.items():
            old = self._relations.get(rel)
            rows = [c[0] for c in chunks]
            cols = [c[1] for c in chunks]
            any_rows.extend(rows)
            any_cols.extend(cols)
            if old is not None:
                rows.append(old.row_ids())
                cols.append(old.col_idx)
            self._relations[rel] = matrix_from_coo(n, n, np.concatenate(rows), np.concatenate(cols))
            self._transposed.pop(rel, None)
        self._any = matrix_from_coo(n, n, np.concatenate(any_rows), np.concatenate(any_cols))
        self._transposed.pop(ANY, None)
        self._pending.clear()

    # -- reads --------------------------------------------------------------

    def relation_matrix(self, name: str = ANY) -> SparseMatrix:
        self.flush()
        if name == ANY:
            return self._any
        m = self._relations.get(name)
        if m is None:
            return SparseMatrix.empty(self.capacity, self.capacity)
        return m

    def transposed_matrix(self, name: str = ANY) -> SparseMatrix:
        """Transpose of ``relation_matrix(name)``, cached until the next write."""
        self.flush()
        t = self._transposed.get(name)
        if t is None:
            t = transpose(self.relation_matrix(name))
            self._transposed[name] = t
        return t

    def label_vector(self, name: str) -> BitVector:
        v = self._label_cache.get(name)
        if v is None:
            members = self._label_members.get(name, ())
            v = BitVector(self.capacity, np.asarray(members, dtype=INDEX), _trusted=True)
            self._label_cache[name] = v
        return v

    def all_nodes(self) -> BitVector:
        return BitVector(self.capacity, np.arange(self.node_count, dtype=INDEX), _trusted=True)

    def node_labels(self, nid: int) -> tuple[str, ...]:
        return self._node_labels[nid]

    def node_props(self, nid: int) -> dict:
        return self._node_props[nid]

    def edge_props(self, src: int, relation: str, dst: int) -> dict:
        return self._edge_props.get((src, relation, dst), {})

    def prop_kinds(self, key: str) -> set[str]:
        """Value kinds ('i', 'f', 'b', 's') seen for a node property key."""
        return self._prop_kinds.get(key, set())

    @property
    def relation_types(self) -> list[str]:
        self.flush()
        return sorted(self._relations)

    @property
    def label_names(self) -> list[str]:
        return sorted(k for k, v in self._label_members.items() if v)

    def out_degree(self) -> np.ndarray:
        return self.relation_matrix(ANY).out_degree()[: self.node_count]

    def edge_records(self):
        """Yield ``(src, relation, dst, props)`` sorted by (src, relation, dst)."""
        self.flush()
        rels = sorted(self._relations)
        if not rels:
            return
        srcs, dsts, codes = [], [], []
        for code, rel in enumerate(rels):
            m = self._relations[rel]
            srcs.append(m.row_ids())
            dsts.append(m.col_idx)
            codes.append(np.full(m.nvals, code, dtype=INDEX))
        src = np.concatenate(srcs)
        dst = np.concatenate(dsts)
        code = np.concatenate(codes)
        order = np.lexsort((dst, code, src))
        for s, c, d in zip(src[order].tolist(), code[order].tolist(), dst[order].tolist()):
            rel = rels[c]
            yield s, rel, d, self._edge_props.get((s, rel, d), {})

    def edge_count(self) -> int:
        self.flush()
        return sum(m.nvals for m in self._relations.values())

    # -- checks -------------------------------------------------------------

    def check_invariants(self) -> None:
        self.flush()
        n = self.capacity
        assert self.node_count <= n
        for m in list(self._relations.values()) + [self._any]:
            assert m.shape == (n, n)
            m.check()
            if m.nvals:
                assert m.row_ids().max() < self.node_count
                assert m.col_idx.max() < self.node_count
        for lab in self._label_members:
            v = self.label_vector(lab)
            assert v.dimension == n
            v.check()
        if self._relations:
            rows = np.concatenate([m.row_ids() for m in self._relations.values()])
            cols = np.concatenate([m.col_idx for m in self._relations.values()])
            union = matrix_from_coo(n, n, rows, cols)
        else:
            union = SparseMatrix.empty(n, n)
        assert union.same_pattern(self._any), "any-relation matrix differs from union of relations"

    def __eq__(self, other) -> bool:
        """Graph equality: same node ids, labels, properties, edges and edge properties."""
        if not isinstance(other, PropertyGraph):
            return NotImplemented
        if self.node_count != other.node_count:
            return False
        if self._node_labels != other._node_labels:
            return False
        if [_typed(p) for p in self._node_props] != [_typed(p) for p in other._node_props]:
            return False
        mine = [(s, r, d, _typed(p)) for s, r, d, p in self.edge_records()]
        return mine == [(s, r, d, _typed(p)) for s, r, d, p in other.edge_records()]

    __hash__ = None

    def __repr__(self) -> str:
        return f"PropertyGraph(nodes={self.node_count}, edges={self.edge_count()}, capacity={self.capacity})"
