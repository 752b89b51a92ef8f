"""Line protocol framing.

Requests (one LF-terminated UTF-8 line each)::

    PING
    QUERY <graph> <cypher...>
    SAVE <graph> <path>
    LOAD <graph> <path>
    SHUTDOWN

Responses are ``PONG``, ``ERR <message>``, or a result block::

    OK <nrows>
    <header, tab-separated>     (when nrows > 0 or the query projects columns)
    <row>                       (nrows lines, tab-separated cells)
    END
"""

from __future__ import annotations

import socket

from .encoding import encode_value
from .executor import NodeRef, ResultTable

NULL = "null"


def format_cell(v) -> str:
    if v is None:
        return NULL
    if isinstance(v, NodeRef):
        return f"#{v.id}"
    return encode_value(v)


def format_result(table: ResultTable) -> str:
    lines = [f"OK {len(table.rows)}"]
    if table.rows or table.columns:
        lines.append("\t".join(table.columns))
    for row in table.rows:
        lines.append("\t".join(format_cell(c) for c in row))
    lines.append("END")
    return "\n".join(lines) + "\n"


def format_ok_empty() -> str:
    return "OK 0\nEND\n"


def format_error(message: str) -> str:
    return "ERR " + " ".join(str(message).split()) + "\n"


class Client:
    """Blocking client that reads one full response per request."""

    def __init__(self, host: str = "127.0.0.1", port: int = 6380, timeout: float | None = 30.0):
        self.sock = socket.create_connection((host, port), timeout=timeout)
        self.sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        self._rfile = self.sock.makefile("rb")

    def _readline(self) -> str:
        raw = self._rfile.readline()
        if not raw:
            raise ConnectionError("server closed the connection")
        return raw.decode("utf-8")

    def read_response(self) -> str:
        first = self._readline()
        if not first.startswith("OK "):
            return first
        n = int(first[3:])
        parts = [first]
        if n > 0:
            parts.extend(self._readline() for _ in range(n + 2))
            return "".join(parts)
        line = self._readline()
        parts.append(line)
        if line != "END\n":
            parts.append(self._readline())
        return "".join(parts)

    def send(self, line: str) -> None:
        self.sock.sendall(line.encode("utf-8") + b"\n")

    def request(self, line: str) -> str:
        self.send(line)
        return self.read_response()

    def close(self) -> None:
        try:
            self._rfile.close()
        finally:
            self.sock.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def parse_result(response: str) -> tuple[list[str], list[list[str]]]:
    """Split a result block into (header, rows) of raw cell strings."""
    lines = response.rstrip("\n").split("\n")
    if not lines[0].startswith("OK "):
        raise ValueError(f"not a result block: {lines[0]!r}")
    n = int(lines[0][3:])
    body = lines[1:-1]
    if not body:
        return [], []
    header = body[0].split("\t")
    rows = [r.split("\t") for r in body[1 : 1 + n]]
    return header, rows
