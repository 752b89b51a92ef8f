from __future__ import annotations


class CypherError(Exception):
    """Query error positioned at a byte offset into the UTF-8 query text."""

    category = "error"

    def __init__(self, detail: str, offset: int):
        self.detail = detail
        self.offset = offset
        super().__init__(f"{self.category} at byte {offset}: {detail}")


class CypherSyntaxError(CypherError):
    category = "syntax error"

    def __init__(self, detail: str, offset: int, expected: tuple[str, ...] = ()):
        super().__init__(detail, offset)
        self.expected = expected


class CypherSemanticError(CypherError):
    category = "semantic error"


class UnboundVariableError(CypherSemanticError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unbound variable '{name}'", offset)
        self.name = name


class PlanError(CypherError):
    category = "type error"
