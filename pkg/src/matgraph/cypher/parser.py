"""Recursive-descent parser for the supported Cypher fragment.

Grammar::

    query      := create | match
    create     := CREATE paths EOF
    match      := MATCH paths [WHERE cmp (AND cmp)*] RETURN proj (',' proj)* [LIMIT INT] EOF
    paths      := path (',' path)*
    path       := node (edge node)*
    node       := '(' [IDENT] [':' IDENT] [props] ')'
    edge       := '-' '[' body ']' '-' '>' | '<' '-' '[' body ']' '-' | '-' '-' '>' | '<' '-' '-'
    body       := [IDENT] [':' IDENT] ['*' INT ['..' INT]] [props]
    props      := '{' [IDENT ':' literal (',' IDENT ':' literal)*] '}'
    cmp        := operand ('=' | '<>' | '<' | '<=' | '>' | '>=') operand
    operand    := IDENT '.' IDENT | literal
    proj       := 'count' '(' IDENT ['.' IDENT] ')' | IDENT ['.' IDENT]
    literal    := ['-'] (INT | FLOAT) | STRING | TRUE | FALSE
"""

from __future__ import annotations

from .ast import (
    IN,
    MAX_HOPS,
    OUT,
    Comparison,
    CountAgg,
    CreateClause,
    EdgePattern,
    Literal,
    MatchClause,
    NodePattern,
    PatternPath,
    PropertyAccess,
    Query,
    ReturnClause,
    Variable,
)
from .errors import CypherSemanticError, CypherSyntaxError, UnboundVariableError
from .lexer import Token, tokenize

INT64_MAX = 2**63 - 1

COMPARISON_OPS = {"EQ": "=", "NE": "<>", "LT": "<", "LE": "<=", "GT": ">", "GE": ">="}

_DISPLAY = {
    "LPAREN": "'('",
    "RPAREN": "')'",
    "LBRACKET": "'['",
    "RBRACKET": "']'",
    "LBRACE": "'{'",
    "RBRACE": "'}'",
    "COLON": "':'",
    "COMMA": "','",
    "DOT": "'.'",
    "DOTDOT": "'..'",
    "STAR": "'*'",
    "DASH": "'-'",
    "LT": "'<'",
    "GT": "'>'",
    "EQ": "'='",
    "IDENT": "identifier",
    "INT": "integer",
    "EOF": "end of input",
}


def _display(kind: str) -> str:
    return _DISPLAY.get(kind, kind)


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def at(self, *kinds: str) -> bool:
        return self.tok.kind in kinds

    def accept(self, kind: str) -> Token | None:
        if self.tok.kind == kind:
            t = self.tok
            self.pos += 1
            return t
        return None

    def expect(self, kind: str, optional: tuple[str, ...] = ()) -> Token:
        """Consume ``kind`` or fail. ``optional`` names tokens that were also acceptable here."""
        t = self.accept(kind)
        if t is None:
            self.fail(_display(kind), optional + (kind,))
        return t

    def fail(self, what: str, expected: tuple[str, ...] = ()):
        raise CypherSyntaxError(f"expected {what}", self.tok.offset, tuple(_display(k) for k in expected))

    # -- grammar ------------------------------------------------------------

    def query(self) -> Query:
        if self.accept("CREATE"):
            paths = self.paths(create=True)
            self.expect("EOF", ("COMMA",))
            return Query((CreateClause(paths),))
        if self.accept("MATCH"):
            paths = self.paths(create=False)
            where = ()
            if self.accept("WHERE"):
                where = self.conjunction()
            self.expect("RETURN", ("WHERE", "COMMA") if not where else ("AND",))
            items = [self.projection()]
            while self.accept("COMMA"):
                items.append(self.projection())
            limit = None
            if self.accept("LIMIT"):
                t = self.expect("INT")
                limit = self.int_value(t)
            self.expect("EOF", () if limit is not None else ("LIMIT", "COMMA"))
            return Query((MatchClause(paths, where), ReturnClause(tuple(items), limit)))
        self.fail("MATCH or CREATE", ("MATCH", "CREATE"))

    def paths(self, create: bool) -> tuple[PatternPath, ...]:
        out = [self.path(create)]
        while self.accept("COMMA"):
            out.append(self.path(create))
        return tuple(out)

    def path(self, create: bool) -> PatternPath:
        nodes = [self.node()]
        edges = []
        while self.at("DASH", "LT"):
            edges.append(self.edge(create))
            nodes.append(self.node())
        return PatternPath(tuple(nodes), tuple(edges))

    def node(self) -> NodePattern:
        start = self.expect("LPAREN")
        var = label = None
        props = ()
        t = self.accept("IDENT")
        if t:
            var = t.text
        if self.accept("COLON"):
            label = self.expect("IDENT").text
        if self.at("LBRACE"):
            props = self.props()
        optional = (() if var or label else ("IDENT",)) + (() if label else ("COLON",)) + (() if props else ("LBRACE",))
        self.expect("RPAREN", optional)
        return NodePattern(var, label, props, offset=start.offset)

    def edge(self, create: bool) -> EdgePattern:
        start = self.tok
        if self.accept("LT"):
            self.expect("DASH")
            direction = IN
        else:
            self.expect("DASH")
            direction = OUT
        body = (None, None, None, None, ())
        if self.accept("LBRACKET"):
            body = self.edge_body()
            self.expect("RBRACKET")
            self.expect("DASH")
        else:
            self.expect("DASH", ("LBRACKET",))
        if direction == OUT:
            self.expect("GT")
        var, rel, lo, hi, props = body
        e = EdgePattern(var, rel, direction, lo, hi, props, offset=start.offset)
        if create:
            if rel is None:
                raise CypherSemanticError("CREATE needs a relationship type", start.offset)
            if lo is not None:
                raise CypherSemanticError("CREATE cannot use variable-length relationships", start.offset)
        return e

    def edge_body(self):
        var = rel = lo = hi = None
        props = ()
        t = self.accept("IDENT")
        if t:
            var = t.text
        if self.accept("COLON"):
            rel = self.expect("IDENT").text
        star = self.accept("STAR")
        if star:
            lo = self.int_value(self.expect("INT"))
            hi = lo
            if self.accept("DOTDOT"):
                hi = self.int_value(self.expect("INT"))
            if lo < 1 or hi < lo or hi > MAX_HOPS:
                raise CypherSemanticError(f"invalid hop range *{lo}..{hi} (need 1 <= min <= max <= {MAX_HOPS})", star.offset)
        if self.at("LBRACE"):
            props = self.props()
        return var, rel, lo, hi, props

    def props(self) -> tuple[tuple[str, Literal], ...]:
        self.expect("LBRACE")
        items = []
        seen = set()
        if not self.at("RBRACE"):
            while True:
                key = self.expect("IDENT", ("RBRACE",) if not items else ())
                if key.text in seen:
                    raise CypherSemanticError(f"duplicate property key '{key.text}'", key.offset)
                seen.add(key.text)
                self.expect("COLON")
                items.append((key.text, self.literal()))
                if not self.accept("COMMA"):
                    break
        self.expect("RBRACE", ("COMMA",) if items else ("IDENT",))
        return tuple(items)

    def int_value(self, t: Token, negative: bool = False) -> int:
        v = int(t.text)
        if v > INT64_MAX + (1 if negative else 0):
            raise CypherSyntaxError("integer literal out of range", t.offset)
        return -v if negative else v

    def literal(self) -> Literal:
        t = self.tok
        neg = self.accept("DASH")
        if self.at("INT"):
            self.pos += 1
            return Literal(self.int_value(self.tokens[self.pos - 1], bool(neg)), offset=t.offset)
        if self.at("FLOAT"):
            self.pos += 1
            v = float(self.tokens[self.pos - 1].text)
            return Literal(-v if neg else v, offset=t.offset)
        if neg:
            self.fail("number after '-'", ("INT", "FLOAT"))
        if self.accept("STRING"):
            return Literal(t.text, offset=t.offset)
        if self.accept("TRUE"):
            return Literal(True, offset=t.offset)
        if self.accept("FALSE"):
            return Literal(False, offset=t.offset)
        self.fail("literal", ("INT", "FLOAT", "STRING", "TRUE", "FALSE"))

    def operand(self):
        if self.at("IDENT"):
            t = self.tok
            self.pos += 1
            self.expect("DOT")
            key = self.expect("IDENT")
            return PropertyAccess(t.text, key.text, offset=t.offset)
        if self.at("DASH", "INT", "FLOAT", "STRING", "TRUE", "FALSE"):
            return self.literal()
        self.fail("property access or literal", ("IDENT", "INT", "FLOAT", "STRING", "TRUE", "FALSE"))

    def comparison(self) -> Comparison:
        start = self.tok
        left = self.operand()
        op = COMPARISON_OPS.get(self.tok.kind)
        if op is None:
            self.fail("comparison operator", tuple(COMPARISON_OPS))
        self.pos += 1
        right = self.operand()
        return Comparison(left, op, right, offset=start.offset)

    def conjunction(self) -> tuple[Comparison, ...]:
        out = [self.comparison()]
        while self.accept("AND"):
            out.append(self.comparison())
        return tuple(out)

    def projection(self):
        t = self.expect("IDENT")
        if t.text.lower() == "count" and self.at("LPAREN"):
            self.pos += 1
            inner = self.expect("IDENT")
            arg = Variable(inner.text, offset=inner.offset)
            if self.accept("DOT"):
                arg = PropertyAccess(inner.text, self.expect("IDENT").text, offset=inner.offset)
            self.expect("RPAREN", ("DOT",) if isinstance(arg, Variable) else ())
            return CountAgg(arg, offset=t.offset)
        if self.accept("DOT"):
            return PropertyAccess(t.text, self.expect("IDENT").text, offset=t.offset)
        return Variable(t.text, offset=t.offset)


# ---------------------------------------------------------------------------
# Semantic checks
# ---------------------------------------------------------------------------


def _check_bindings(q: Query) -> None:
    first = q.clauses[0]
    node_vars: set[str] = set()
    edge_vars: set[str] = set()
    for p in first.paths:
        for n in p.nodes:
            if n.var is None:
                continue
            # in CREATE a bare (a) reuses the node; decorating it again would redeclare it
            if isinstance(first, CreateClause) and n.var in node_vars and (n.label is not None or n.props):
                raise CypherSemanticError(f"variable '{n.var}' already declared", n.offset)
            node_vars.add(n.var)
    for p in first.paths:
        for e in p.edges:
            if e.var is not None:
                if e.var in edge_vars or e.var in node_vars:
                    raise CypherSemanticError(f"variable '{e.var}' already declared", e.offset)
                edge_vars.add(e.var)
    if isinstance(first, CreateClause):
        return
    bound = node_vars | edge_vars
    refs = []
    for c in first.where:
        for side in (c.left, c.right):
            if isinstance(side, PropertyAccess):
                refs.append(side)
    ret = q.clauses[1]
    for item in ret.items:
        refs.append(item.arg if isinstance(item, CountAgg) else item)
    for r in refs:
        name = r.name if isinstance(r, Variable) else r.var
        if name not in bound:
            raise UnboundVariableError(name, r.offset)
    aggs = [i for i in ret.items if isinstance(i, CountAgg)]
    if aggs and len(aggs) != len(ret.items):
        plain = next(i for i in ret.items if not isinstance(i, CountAgg))
        raise CypherSemanticError("count() cannot be mixed with non-aggregate projections", plain.offset)


def parse(text: str) -> Query:
    q = _Parser(text).query()
    _check_bindings(q)
    return q
