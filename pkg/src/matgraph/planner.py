"""Compile a parsed query into a chain of algebraic operators.

Plans are linear: every operator has at most one child and the leaf is a
NodeScan or CreateOp. Path elements are planned left to right; a predicate
is attached directly above the first operator after which all of its
variables are bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .cypher.ast import (
    IN,
    Comparison,
    CountAgg,
    CreateClause,
    Literal,
    PatternPath,
    PropertyAccess,
    Query,
    Variable,
    expr_text,
)
from .cypher.errors import PlanError
from .store import ANY, PropertyGraph

ORDERING_OPS = ("<", "<=", ">", ">=")
KIND_NAMES = {"i": "int", "f": "float", "b": "boolean", "s": "string"}
_KIND_CLASS = {"i": "num", "f": "num", "b": "bool", "s": "str"}


@dataclass(frozen=True)
class HasLabel:
    var: str
    label: str


Predicate = Union[Comparison, HasLabel]


@dataclass(frozen=True)
class NodeScan:
    var: str
    label: str | None = None
    child: object = None


@dataclass(frozen=True)
class Traverse:
    src: str
    relation: str
    direction: str
    dst: str
    dst_label: str | None = None
    child: object = None


@dataclass(frozen=True)
class VarLenTraverse:
    src: str
    relation: str
    direction: str
    min_hops: int
    max_hops: int
    dst: str
    mode: str
    dst_label: str | None = None
    child: object = None


@dataclass(frozen=True)
class Filter:
    predicates: tuple
    child: object = None


@dataclass(frozen=True)
class Project:
    items: tuple
    child: object = None


@dataclass(frozen=True)
class Aggregate:
    items: tuple
    child: object = None


@dataclass(frozen=True)
class Limit:
    n: int
    child: object = None


@dataclass(frozen=True)
class CreateOp:
    paths: tuple[PatternPath, ...]
    child: object = None


def _anon(i: int) -> str:
    # '@' cannot start an identifier, so these never clash with user names
    return f"@{i}"


def _hops_mode(lo: int, hi: int) -> str:
    if lo == hi:
        return "exact"
    return "cumulative" if lo == 1 else "range"


def _rel_text(rel: str) -> str:
    return "ANY" if rel == ANY else rel


def _pred_vars(p: Predicate) -> set[str]:
    if isinstance(p, HasLabel):
        return {p.var}
    return {s.var for s in (p.left, p.right) if isinstance(s, PropertyAccess)}


def _kinds(graph: PropertyGraph, operand) -> set[str]:
    if isinstance(operand, Literal):
        return {operand.kind}
    return set(graph.prop_kinds(operand.key))


def _describe(graph: PropertyGraph, operand) -> str:
    kinds = _kinds(graph, operand)
    names = "/".join(KIND_NAMES[k] for k in sorted(kinds)) or "unknown"
    return f"{expr_text(operand)} ({names})"


def _type_check(c: Comparison, graph: PropertyGraph) -> None:
    left = {_KIND_CLASS[k] for k in _kinds(graph, c.left)}
    right = {_KIND_CLASS[k] for k in _kinds(graph, c.right)}
    if not left or not right:
        return
    common = left & right
    if not common:
        raise PlanError(f"cannot compare {_describe(graph, c.left)} with {_describe(graph, c.right)}", c.offset)
    if c.op in ORDERING_OPS and common == {"bool"}:
        raise PlanError(f"cannot order booleans: {expr_text(c.left)} {c.op} {expr_text(c.right)}", c.offset)


def plan(ast: Query, graph: PropertyGraph):
    first = ast.clauses[0]
    if isinstance(first, CreateClause):
        return CreateOp(first.paths)

    edge_vars = {e.var for p in first.paths for e in p.edges if e.var is not None}
    for c in first.where:
        for side in (c.left, c.right):
            if isinstance(side, PropertyAccess) and side.var in edge_vars:
                raise PlanError(f"relationship variable '{side.var}' cannot be used in expressions", side.offset)
        _type_check(c, graph)
    ret = ast.clauses[1]
    for item in ret.items:
        ref = item.arg if isinstance(item, CountAgg) else item
        name = ref.name if isinstance(ref, Variable) else ref.var
        if name in edge_vars:
            raise PlanError(f"relationship variable '{name}' cannot be projected", ref.offset)

    pending: list[Predicate] = []
    for p in first.paths:
        for n in p.nodes:
            if n.var is not None:
                for key, lit in n.props:
                    c = Comparison(PropertyAccess(n.var, key, offset=n.offset), "=", lit, offset=n.offset)
                    _type_check(c, graph)
                    pending.append(c)
        for e in p.edges:
            if e.props:
                raise PlanError("property maps on relationships are not supported in MATCH", e.offset)
    pending.extend(first.where)

    bound: set[str] = set()
    node: object = None
    counter = 0

    def attach(op):
        nonlocal node
        if op is not None:
            node = op
        ready = [pr for pr in pending if _pred_vars(pr) <= bound]
        if ready:
            for pr in ready:
                pending.remove(pr)
            node = Filter(tuple(ready), node)

    for p in first.paths:
        names = []
        for n in p.nodes:
            if n.var is None:
                names.append(_anon(counter))
                counter += 1
                if n.props:
                    for key, lit in n.props:
                        c = Comparison(PropertyAccess(names[-1], key, offset=n.offset), "=", lit, offset=n.offset)
                        _type_check(c, graph)
                        pending.append(c)
            else:
                names.append(n.var)
        head = p.nodes[0]
        if names[0] in bound:
            if head.label:
                pending.append(HasLabel(names[0], head.label))
        else:
            bound.add(names[0])
            attach(NodeScan(names[0], head.label, node))
        for i, e in enumerate(p.edges):
            src, dst = names[i], names[i + 1]
            dnode = p.nodes[i + 1]
            rel = e.rel_type or ANY
            dst_label = None
            if dst in bound:
                if dnode.label:
                    pending.append(HasLabel(dst, dnode.label))
            else:
                dst_label = dnode.label
            bound.add(dst)
            if e.var_length:
                op = VarLenTraverse(src, rel, e.direction, e.min_hops, e.max_hops, dst,
                                    _hops_mode(e.min_hops, e.max_hops), dst_label, node)
            else:
                op = Traverse(src, rel, e.direction, dst, dst_label, node)
            attach(op)
        # a path that only re-mentions a bound node adds no operator, only predicates
        attach(None)
    assert not pending, pending

    if any(isinstance(i, CountAgg) for i in ret.items):
        node = Aggregate(ret.items, node)
    else:
        node = Project(ret.items, node)
    if ret.limit is not None:
        node = Limit(ret.limit, node)
    return node


# ---------------------------------------------------------------------------
# Inspection
# ---------------------------------------------------------------------------


def operators(root) -> list:
    """Operators from leaf to root."""
    out = []
    while root is not None:
        out.append(root)
        root = root.child
    return out[::-1]


def _op_text(op) -> str:
    if isinstance(op, NodeScan):
        return f"NodeScan({op.var}{',' + op.label if op.label else ''})"
    if isinstance(op, Traverse):
        arrow = "<-" if op.direction == IN else "->"
        lab = f",{op.dst_label}" if op.dst_label else ""
        return f"Traverse({op.src},{_rel_text(op.relation)},{arrow},{op.dst}{lab})"
    if isinstance(op, VarLenTraverse):
        arrow = "<-" if op.direction == IN else "->"
        lab = f",{op.dst_label}" if op.dst_label else ""
        return (f"VarLenTraverse({op.src},{_rel_text(op.relation)},{arrow},{op.min_hops},{op.max_hops},"
                f"{op.dst},{op.mode}{lab})")
    if isinstance(op, Filter):
        parts = []
        for pr in op.predicates:
            if isinstance(pr, HasLabel):
                parts.append(f"{pr.var}:{pr.label}")
            else:
                parts.append(f"{expr_text(pr.left)} {pr.op} {expr_text(pr.right)}")
        return f"Filter({' AND '.join(parts)})"
    if isinstance(op, Project):
        return f"Project({', '.join(expr_text(i) for i in op.items)})"
    if isinstance(op, Aggregate):
        return f"Aggregate({', '.join(expr_text(i) for i in op.items)})"
    if isinstance(op, Limit):
        return f"Limit({op.n})"
    if isinstance(op, CreateOp):
        return f"CreateOp({len(op.paths)} paths)"
    raise TypeError(op)


def explain(root) -> str:
    """One-line plan, leaf first: ``NodeScan(a) -> Traverse(a,R,->,b) -> Project(b)``."""
    return " -> ".join(_op_text(op) for op in operators(root))


def check_plan(root) -> None:
    """Assert the plan invariants: proper leaf, inputs produced below their consumer."""
    ops = operators(root)
    assert isinstance(ops[0], (NodeScan, CreateOp)), f"bad leaf {ops[0]!r}"
    bound: set[str] = set()
    for op in ops:
        if isinstance(op, NodeScan):
            bound.add(op.var)
        elif isinstance(op, (Traverse, VarLenTraverse)):
            assert op.src in bound, f"{op.src} not bound below {_op_text(op)}"
            bound.add(op.dst)
        elif isinstance(op, Filter):
            for pr in op.predicates:
                assert _pred_vars(pr) <= bound, f"unbound input in {_op_text(op)}"
        elif isinstance(op, (Project, Aggregate)):
            for item in op.items:
                ref = item.arg if isinstance(item, CountAgg) else item
                name = ref.name if isinstance(ref, Variable) else ref.var
                assert name in bound, f"{name} not bound below {_op_text(op)}"
        elif isinstance(op, CreateOp):
            assert op is ops[0]
