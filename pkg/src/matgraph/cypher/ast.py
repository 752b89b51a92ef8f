"""Query AST. Source offsets are carried for error messages but excluded from equality."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from ..encoding import value_kind

OUT = "->"
IN = "<-"
MAX_HOPS = 32


@dataclass(frozen=True)
class Literal:
    value: object
    kind: str = ""
    offset: int = field(default=-1, compare=False, repr=False)

    def __post_init__(self):
        # kind is part of equality so that 1, 1.0 and true stay distinct
        if not self.kind:
            object.__setattr__(self, "kind", value_kind(self.value))


@dataclass(frozen=True)
class Variable:
    name: str
    offset: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class PropertyAccess:
    var: str
    key: str
    offset: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class CountAgg:
    arg: Union[Variable, PropertyAccess]
    offset: int = field(default=-1, compare=False, repr=False)


Operand = Union[Literal, PropertyAccess]
Projection = Union[Variable, PropertyAccess, CountAgg]


@dataclass(frozen=True)
class Comparison:
    left: Operand
    op: str
    right: Operand
    offset: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class NodePattern:
    var: str | None = None
    label: str | None = None
    props: tuple[tuple[str, Literal], ...] = ()
    offset: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class EdgePattern:
    var: str | None = None
    rel_type: str | None = None
    direction: str = OUT
    min_hops: int | None = None
    max_hops: int | None = None
    props: tuple[tuple[str, Literal], ...] = ()
    offset: int = field(default=-1, compare=False, repr=False)

    @property
    def var_length(self) -> bool:
        return self.min_hops is not None


@dataclass(frozen=True)
class PatternPath:
    nodes: tuple[NodePattern, ...]
    edges: tuple[EdgePattern, ...] = ()

    def __post_init__(self):
        assert len(self.nodes) == len(self.edges) + 1


@dataclass(frozen=True)
class CreateClause:
    paths: tuple[PatternPath, ...]


@dataclass(frozen=True)
class MatchClause:
    paths: tuple[PatternPath, ...]
    where: tuple[Comparison, ...] = ()


@dataclass(frozen=True)
class ReturnClause:
    items: tuple[Projection, ...]
    limit: int | None = None


@dataclass(frozen=True)
class Query:
    clauses: tuple

    @property
    def is_write(self) -> bool:
        return isinstance(self.clauses[0], CreateClause)

    @property
    def match(self) -> MatchClause | None:
        c = self.clauses[0]
        return c if isinstance(c, MatchClause) else None

    @property
    def returns(self) -> ReturnClause | None:
        return self.clauses[1] if len(self.clauses) > 1 else None


def expr_text(e) -> str:
    """Column name / canonical text of a projection or operand."""
    from .printer import format_literal

    if isinstance(e, Variable):
        return e.name
    if isinstance(e, PropertyAccess):
        return f"{e.var}.{e.key}"
    if isinstance(e, CountAgg):
        return f"count({expr_text(e.arg)})"
    if isinstance(e, Literal):
        return format_literal(e)
    raise TypeError(e)


def to_data(node):
    """Plain nested-list/dict form of an AST (offsets dropped); used for golden files."""
    if isinstance(node, (Query, CreateClause, MatchClause, ReturnClause, PatternPath, NodePattern,
                         EdgePattern, Comparison, CountAgg, Variable, PropertyAccess, Literal)):
        out = {"type": type(node).__name__}
        for name, f in node.__dataclass_fields__.items():
            if f.compare:
                out[name] = to_data(getattr(node, name))
        return out
    if isinstance(node, tuple):
        return [to_data(x) for x in node]
    return node
