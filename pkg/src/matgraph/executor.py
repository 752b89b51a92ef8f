"""Run a plan against a graph.

Rows are tuples of node ids, one slot per bound variable in binding order.
Every operator keeps rows in ascending lexicographic order, so results come
out sorted by the binding tuple without an explicit sort.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .cypher.ast import IN, Literal, Variable, expr_text
from .khop import bfs_levels
from .planner import (
    Aggregate,
    CreateOp,
    Filter,
    HasLabel,
    Limit,
    NodeScan,
    Project,
    Traverse,
    VarLenTraverse,
    operators,
)
from .sparse import INDEX, BitVector, apply_mask, vxm
from .store import PropertyGraph


@dataclass(frozen=True)
class NodeRef:
    id: int

    def __repr__(self) -> str:
        return f"#{self.id}"


@dataclass
class ResultTable:
    columns: list[str] = field(default_factory=list)
    rows: list[tuple] = field(default_factory=list)


def _compare(a, op: str, b) -> bool:
    if a is None or b is None:
        return False
    a_bool, b_bool = isinstance(a, bool), isinstance(b, bool)
    if a_bool != b_bool:
        return False
    if a_bool:
        if op == "=":
            return a == b
        if op == "<>":
            return a != b
        return False
    a_str, b_str = isinstance(a, str), isinstance(b, str)
    if a_str != b_str:
        return False
    if op == "=":
        return a == b
    if op == "<>":
        return a != b
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    return a >= b


class _Context:
    def __init__(self, graph: PropertyGraph, trace: list | None):
        self.graph = graph
        self.trace = trace
        self.slots: dict[str, int] = {}

    def mark(self) -> None:
        if self.trace is not None:
            self.trace.append(threading.get_ident())

    def matrix(self, relation: str, direction: str):
        if direction == IN:
            return self.graph.transposed_matrix(relation)
        return self.graph.relation_matrix(relation)

    def value(self, row: tuple, operand):
        if isinstance(operand, Literal):
            return operand.value
        return self.graph.node_props(row[self.slots[operand.var]]).get(operand.key)


def _scan(ctx: _Context, op: NodeScan, rows):
    g = ctx.graph
    if op.label:
        cand = g.label_vector(op.label).indices.tolist()
    else:
        cand = range(g.node_count)
    ctx.slots[op.var] = len(ctx.slots)
    if rows is None:
        return [(i,) for i in cand]
    cand = list(cand)
    return [r + (i,) for r in rows for i in cand]


def _expand(ctx: _Context, op, rows, reach):
    """Shared tail of Traverse/VarLenTraverse. ``reach(src) -> sorted id array``."""
    si = ctx.slots[op.src]
    mask = ctx.graph.label_vector(op.dst_label) if op.dst_label else None
    out = []
    if op.dst in ctx.slots:
        di = ctx.slots[op.dst]
        for r in rows:
            hits = reach(r[si], mask)
            pos = np.searchsorted(hits, r[di])
            if pos < hits.size and hits[pos] == r[di]:
                out.append(r)
        return out
    ctx.slots[op.dst] = len(ctx.slots)
    for r in rows:
        for d in reach(r[si], mask).tolist():
            out.append(r + (d,))
    return out


def _traverse(ctx: _Context, op: Traverse, rows):
    A = ctx.matrix(op.relation, op.direction)

    def reach(src, mask):
        return vxm(BitVector(A.nrows, np.array([src], dtype=INDEX), _trusted=True), A, mask=mask).indices

    return _expand(ctx, op, rows, reach)


def _varlen(ctx: _Context, op: VarLenTraverse, rows):
    A = ctx.matrix(op.relation, op.direction)

    def reach(src, mask):
        levels = bfs_levels(A, src, op.max_hops)[op.min_hops - 1 :]
        if not levels:
            return np.empty(0, dtype=INDEX)
        hit = np.sort(np.concatenate([lv.indices for lv in levels])) if len(levels) > 1 else levels[0].indices
        if mask is not None:
            hit = apply_mask(BitVector(A.ncols, hit, _trusted=True), mask).indices
        return hit

    return _expand(ctx, op, rows, reach)


def _filter(ctx: _Context, op: Filter, rows):
    g = ctx.graph
    preds = op.predicates

    def ok(row) -> bool:
        for p in preds:
            if isinstance(p, HasLabel):
                if p.label not in g.node_labels(row[ctx.slots[p.var]]):
                    return False
            elif not _compare(ctx.value(row, p.left), p.op, ctx.value(row, p.right)):
                return False
        return True

    return [r for r in rows if ok(r)]


def _cell(ctx: _Context, row: tuple, item):
    if isinstance(item, Variable):
        return NodeRef(row[ctx.slots[item.name]])
    return ctx.value(row, item)


def _create(graph: PropertyGraph, op: CreateOp) -> None:
    ids: dict[str, int] = {}

    def node_id(n) -> int:
        if n.var is not None and n.var in ids:
            return ids[n.var]
        nid = graph.create_node([n.label] if n.label else [], {k: v.value for k, v in n.props})
        if n.var is not None:
            ids[n.var] = nid
        return nid

    for p in op.paths:
        nids = [node_id(n) for n in p.nodes]
        for i, e in enumerate(p.edges):
            a, b = nids[i], nids[i + 1]
            if e.direction == IN:
                a, b = b, a
            graph.create_edge(a, e.rel_type, b, {k: v.value for k, v in e.props})
    graph.flush()


def execute(plan, graph: PropertyGraph, trace: list | None = None) -> ResultTable:
    """Evaluate ``plan``. When ``trace`` is a list, each operator appends the id of its thread."""
    ctx = _Context(graph, trace)
    rows = None
    table = ResultTable()
    for op in operators(plan):
        ctx.mark()
        if isinstance(op, CreateOp):
            _create(graph, op)
            rows = []
        elif isinstance(op, NodeScan):
            rows = _scan(ctx, op, rows)
        elif isinstance(op, Traverse):
            rows = _traverse(ctx, op, rows)
        elif isinstance(op, VarLenTraverse):
            rows = _varlen(ctx, op, rows)
        elif isinstance(op, Filter):
            rows = _filter(ctx, op, rows)
        elif isinstance(op, Project):
            table.columns = [expr_text(i) for i in op.items]
            table.rows = [tuple(_cell(ctx, r, i) for i in op.items) for r in rows]
        elif isinstance(op, Aggregate):
            table.columns = [expr_text(i) for i in op.items]
            counts = []
            for item in op.items:
                arg = item.arg
                if isinstance(arg, Variable):
                    counts.append(len(rows))
                else:
                    counts.append(sum(1 for r in rows if ctx.value(r, arg) is not None))
            table.rows = [tuple(counts)]
        elif isinstance(op, Limit):
            table.rows = table.rows[: op.n]
        else:
            raise TypeError(f"unknown operator {op!r}")
    return table
