"""Time k-hop counts through a running server instead of in-process."""

from __future__ import annotations

import os
import tempfile

from ..protocol import Client, parse_result
from ..snapshot import snapshot_save
from ..store import PropertyGraph
from .harness import HarnessError


def khop_cypher(seed: int, k: int, mode: str) -> str:
    lo = 1 if mode == "cumulative" else k
    return f"MATCH (a)-[*{lo}..{k}]->(b) WHERE a.id = {seed} RETURN count(b)"


class WireCounter:
    """Callable ``(seed, k, mode) -> count`` backed by one loopback connection.

    The graph is shipped to the server with a snapshot file and LOAD, so the
    server must be able to read this machine's temp directory.
    """

    def __init__(self, host: str, port: int, graph_name: str = "bench"):
        self.client = Client(host, port)
        self.graph_name = graph_name

    def load(self, graph: PropertyGraph) -> None:
        fd, path = tempfile.mkstemp(suffix=".graphsnap")
        os.close(fd)
        try:
            snapshot_save(graph, path)
            resp = self.client.request(f"LOAD {self.graph_name} {os.path.abspath(path)}")
        finally:
            os.unlink(path)
        if not resp.startswith("OK"):
            raise HarnessError(f"LOAD failed: {resp.strip()}")

    def __call__(self, seed: int, k: int, mode: str) -> int:
        resp = self.client.request(f"QUERY {self.graph_name} {khop_cypher(seed, k, mode)}")
        if not resp.startswith("OK"):
            raise HarnessError(resp.strip())
        _, rows = parse_result(resp)
        return int(rows[0][0])

    def close(self) -> None:
        self.client.close()


def parse_hostport(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise ValueError(f"expected host:port, got {text!r}")
    return host or "127.0.0.1", int(port)
