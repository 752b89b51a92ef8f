"""Canonical query text. ``parse(pretty_print(q)) == q`` for every valid AST."""

from __future__ import annotations

import numpy as np

from .ast import (
    IN,
    Comparison,
    CreateClause,
    EdgePattern,
    Literal,
    MatchClause,
    NodePattern,
    PatternPath,
    Query,
    expr_text,
)


def format_literal(lit: Literal) -> str:
    v = lit.value
    if lit.kind == "s":
        return "'" + v.replace("'", "''") + "'"
    if lit.kind == "b":
        return "true" if v else "false"
    if lit.kind == "f":
        # the lexer only accepts plain decimals, so no exponent form
        return np.format_float_positional(v, unique=True, trim="0")
    return str(v)


def _props(props) -> str:
    if not props:
        return ""
    return "{" + ", ".join(f"{k}: {format_literal(v)}" for k, v in props) + "}"


def _node(n: NodePattern) -> str:
    inner = n.var or ""
    if n.label:
        inner += f":{n.label}"
    if n.props:
        inner += (" " if inner else "") + _props(n.props)
    return f"({inner})"


def _edge(e: EdgePattern) -> str:
    inner = e.var or ""
    if e.rel_type:
        inner += f":{e.rel_type}"
    if e.var_length:
        inner += f"*{e.min_hops}..{e.max_hops}"
    if e.props:
        inner += (" " if inner else "") + _props(e.props)
    if e.direction == IN:
        return f"<-[{inner}]-"
    return f"-[{inner}]->"


def _path(p: PatternPath) -> str:
    parts = [_node(p.nodes[0])]
    for e, n in zip(p.edges, p.nodes[1:]):
        parts.append(_edge(e))
        parts.append(_node(n))
    return "".join(parts)


def _comparison(c: Comparison) -> str:
    return f"{expr_text(c.left)} {c.op} {expr_text(c.right)}"


def pretty_print(q: Query) -> str:
    first = q.clauses[0]
    paths = ", ".join(_path(p) for p in first.paths)
    if isinstance(first, CreateClause):
        return f"CREATE {paths}"
    assert isinstance(first, MatchClause)
    out = f"MATCH {paths}"
    if first.where:
        out += " WHERE " + " AND ".join(_comparison(c) for c in first.where)
    ret = q.clauses[1]
    out += " RETURN " + ", ".join(expr_text(i) for i in ret.items)
    if ret.limit is not None:
        out += f" LIMIT {ret.limit}"
    return out
