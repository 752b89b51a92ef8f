"""Named-graph service: pure request handler, dispatcher + worker pool, REPL.

One dispatcher thread accepts connections and reads request lines; each
line is handed whole to one of ``workers`` threads, which runs the query to
completion and writes the response. Each connection has at most one request
in flight, so responses come back in request order. Graph access goes
through a per-graph reader-writer lock: MATCH takes it shared, CREATE and
LOAD take it exclusively.
"""

from __future__ import annotations

import logging
import os
import queue
import re
import selectors
import socket
import sys
import threading
from collections import deque
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from .cypher import CypherError, parse
from .executor import execute
from .planner import plan
from .protocol import format_error, format_ok_empty, format_result
from .snapshot import SnapshotError, snapshot_load, snapshot_save
from .sparse import ContractError
from .store import PropertyGraph

log = logging.getLogger(__name__)

GRAPH_NAME_RE = re.compile(r"[A-Za-z0-9_-]{1,64}\Z")
SNAPSHOT_SUFFIX = ".graphsnap"
DEFAULT_PORT = 6380
DEFAULT_WORKERS = 4
DEFAULT_MAX_LINE = 1 << 20


@dataclass
class ServerConfig:
    port: int = DEFAULT_PORT
    workers: int = DEFAULT_WORKERS
    snapshot_dir: str | None = None
    max_line: int = DEFAULT_MAX_LINE
    host: str = "127.0.0.1"

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.max_line < 1:
            raise ValueError("max_line must be >= 1")


class RWLock:
    """Many readers or one writer. Waiting writers block new readers."""

    def __init__(self):
        self._cond = threading.Condition(threading.Lock())
        self._readers = 0
        self._writer = False
        self._waiting_writers = 0

    def acquire_read(self) -> None:
        with self._cond:
            while self._writer or self._waiting_writers:
                self._cond.wait()
            self._readers += 1

    def release_read(self) -> None:
        with self._cond:
            self._readers -= 1
            if self._readers == 0:
                self._cond.notify_all()

    def acquire_write(self) -> None:
        with self._cond:
            self._waiting_writers += 1
            while self._writer or self._readers:
                self._cond.wait()
            self._waiting_writers -= 1
            self._writer = True

    def release_write(self) -> None:
        with self._cond:
            self._writer = False
            self._cond.notify_all()

    @contextmanager
    def read(self):
        self.acquire_read()
        try:
            yield
        finally:
            self.release_read()

    @contextmanager
    def write(self):
        self.acquire_write()
        try:
            yield
        finally:
            self.release_write()


@dataclass
class GraphEntry:
    graph: PropertyGraph
    lock: RWLock = field(default_factory=RWLock)


@dataclass(frozen=True)
class QueryTrace:
    """Which threads ran a query's operators. ``threads`` should be ``{worker}``."""

    worker: int
    threads: frozenset


class GraphRegistry:
    def __init__(self, snapshot_dir: str | None = None, audit: bool = False):
        self.snapshot_dir = snapshot_dir
        self._graphs: dict[str, GraphEntry] = {}
        self._lock = threading.Lock()
        self.audit = audit
        self.traces: list[QueryTrace] = []
        self._trace_lock = threading.Lock()
        self.shutdown_requested = threading.Event()

    def get(self, name: str, create: bool = False) -> GraphEntry | None:
        with self._lock:
            entry = self._graphs.get(name)
            if entry is None and create:
                entry = self._graphs[name] = GraphEntry(PropertyGraph())
            return entry

    def names(self) -> list[str]:
        with self._lock:
            return sorted(self._graphs)

    def resolve(self, path: str) -> Path:
        p = Path(path)
        if not p.is_absolute() and self.snapshot_dir:
            p = Path(self.snapshot_dir) / p
        return p

    def record(self, trace: QueryTrace) -> None:
        with self._trace_lock:
            self.traces.append(trace)

    def load_snapshot_dir(self) -> list[str]:
        """Load every ``<name>.graphsnap`` found in snapshot_dir."""
        loaded = []
        if not self.snapshot_dir or not os.path.isdir(self.snapshot_dir):
            return loaded
        for p in sorted(Path(self.snapshot_dir).glob("*" + SNAPSHOT_SUFFIX)):
            name = p.name[: -len(SNAPSHOT_SUFFIX)]
            if GRAPH_NAME_RE.match(name):
                self.get(name, create=True).graph = snapshot_load(p)
                loaded.append(name)
        return loaded

    def save_all(self) -> None:
        if not self.snapshot_dir:
            return
        os.makedirs(self.snapshot_dir, exist_ok=True)
        for name in self.names():
            entry = self.get(name)
            with entry.lock.read():
                snapshot_save(entry.graph, Path(self.snapshot_dir) / (name + SNAPSHOT_SUFFIX))


# ---------------------------------------------------------------------------
# Request handling
# ---------------------------------------------------------------------------


def _run_query(registry: GraphRegistry, name: str, text: str) -> str:
    ast = parse(text)
    entry = registry.get(name, create=True)
    trace = [] if registry.audit else None
    guard = entry.lock.write() if ast.is_write else entry.lock.read()
    with guard:
        graph = entry.graph
        table = execute(plan(ast, graph), graph, trace)
    if trace is not None:
        registry.record(QueryTrace(threading.get_ident(), frozenset(trace)))
    if ast.is_write:
        return format_ok_empty()
    return format_result(table)


def handle_request(line: str, registry: GraphRegistry) -> str:
    """Response text (LF-terminated) for one request line."""
    line = line.rstrip("\r\n")
    cmd, _, rest = line.partition(" ")
    cmd = cmd.upper()
    try:
        if cmd == "PING" and not rest:
            return "PONG\n"
        if cmd == "QUERY":
            name, _, text = rest.partition(" ")
            if not name or not text.strip():
                return format_error("usage: QUERY <graph> <cypher>")
            if not GRAPH_NAME_RE.match(name):
                return format_error(f"invalid graph name '{name}'")
            return _run_query(registry, name, text)
        if cmd in ("SAVE", "LOAD"):
            name, _, path = rest.partition(" ")
            if not name or not path:
                return format_error(f"usage: {cmd} <graph> <path>")
            if not GRAPH_NAME_RE.match(name):
                return format_error(f"invalid graph name '{name}'")
            target = registry.resolve(path)
            if cmd == "SAVE":
                entry = registry.get(name)
                if entry is None:
                    return format_error(f"unknown graph '{name}'")
                with entry.lock.read():
                    snapshot_save(entry.graph, target)
            else:
                graph = snapshot_load(target)
                entry = registry.get(name, create=True)
                with entry.lock.write():
                    entry.graph = graph
            return format_ok_empty()
        if cmd == "SHUTDOWN" and not rest:
            registry.save_all()
            registry.shutdown_requested.set()
            return format_ok_empty()
        return format_error("unknown command")
    except CypherError as exc:
        return format_error(str(exc))
    except SnapshotError as exc:
        return format_error(f"snapshot {exc}")
    except (OSError, ContractError) as exc:
        return format_error(exc)


def repl(registry: GraphRegistry, stdin=None, stdout=None) -> None:
    """Read requests from stdin, write responses to stdout, until EOF or SHUTDOWN."""
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    interactive = stdin.isatty()
    while True:
        if interactive:
            stdout.write("matgraph> ")
            stdout.flush()
        line = stdin.readline()
        if not line:
            break
        if not line.strip() and interactive:
            continue
        stdout.write(handle_request(line, registry))
        stdout.flush()
        if registry.shutdown_requested.is_set():
            break


# ---------------------------------------------------------------------------
# Socket server
# ---------------------------------------------------------------------------

_TOO_LONG = object()


class _Connection:
    def __init__(self, sock: socket.socket):
        self.sock = sock
        self.buf = bytearray()
        self.pending: deque = deque()
        self.busy = False
        self.eof = False
        self.registered = True
        self.closed = False
        self.lock = threading.Lock()

    def close(self) -> None:
        if not self.closed:
            self.closed = True
            try:
                self.sock.close()
            except OSError:
                pass


class Server:
    def __init__(self, config: ServerConfig, registry: GraphRegistry | None = None):
        self.config = config
        self.registry = registry or GraphRegistry(config.snapshot_dir)
        self._jobs: queue.Queue = queue.Queue()
        self._stop = threading.Event()
        self._sel = selectors.DefaultSelector()
        self._listener: socket.socket | None = None
        self._threads: list[threading.Thread] = []
        self._conns: set[_Connection] = set()
        self._closing: queue.SimpleQueue = queue.SimpleQueue()
        self.address: tuple[str, int] | None = None

    def start(self) -> tuple[str, int]:
        """Bind, start the dispatcher and workers, return the bound address."""
        self.registry.load_snapshot_dir()
        lst = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        lst.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            lst.bind((self.config.host, self.config.port))
        except OSError:
            lst.close()
            raise
        lst.listen(128)
        lst.setblocking(False)
        self._listener = lst
        self.address = lst.getsockname()[:2]
        self._sel.register(lst, selectors.EVENT_READ, None)
        for i in range(self.config.workers):
            t = threading.Thread(target=self._worker, name=f"matgraph-worker-{i}", daemon=True)
            t.start()
            self._threads.append(t)
        d = threading.Thread(target=self._dispatch, name="matgraph-dispatcher", daemon=True)
        d.start()
        self._threads.append(d)
        log.info("listening on %s:%d with %d workers", *self.address, self.config.workers)
        return self.address

    def serve_forever(self) -> None:
        self.start()
        self.wait()

    def wait(self) -> None:
        """Block until SHUTDOWN, stop() or Ctrl-C, then join the threads."""
        try:
            while not self._stop.wait(0.2):
                pass
        except KeyboardInterrupt:
            self.stop()
        self.join()

    def stop(self) -> None:
        self._stop.set()

    def join(self, timeout: float | None = 10.0) -> None:
        for t in self._threads:
            t.join(timeout)

    # -- dispatcher ---------------------------------------------------------

    def _dispatch(self) -> None:
        try:
            while not self._stop.is_set():
                for key, _ in self._sel.select(timeout=0.05):
                    if key.data is None:
                        self._accept()
                    else:
                        self._read(key.data)
                while not self._closing.empty():
                    conn = self._closing.get()
                    self._unregister(conn)
                    self._conns.discard(conn)
                    conn.close()
        finally:
            for _ in range(self.config.workers):
                self._jobs.put(None)
            self._sel.close()
            if self._listener is not None:
                self._listener.close()
            for conn in list(self._conns):
                conn.close()

    def _accept(self) -> None:
        try:
            sock, _ = self._listener.accept()
        except BlockingIOError:
            return
        sock.setblocking(True)
        sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        conn = _Connection(sock)
        self._conns.add(conn)
        self._sel.register(sock, selectors.EVENT_READ, conn)

    def _read(self, conn: _Connection) -> None:
        try:
            data = conn.sock.recv(65536)
        except OSError:
            data = b""
        if not data:
            self._unregister(conn)
            with conn.lock:
                conn.eof = True
                if not conn.busy:
                    self._conns.discard(conn)
                    conn.close()
            return
        conn.buf += data
        max_line = self.config.max_line
        while True:
            nl = conn.buf.find(b"\n")
            if nl < 0:
                if len(conn.buf) > max_line:
                    self._too_long(conn)
                return
            raw = bytes(conn.buf[:nl])
            del conn.buf[: nl + 1]
            if raw.endswith(b"\r"):
                raw = raw[:-1]
            if len(raw) > max_line:
                self._too_long(conn)
                return
            self._submit(conn, raw)

    def _unregister(self, conn: _Connection) -> None:
        with conn.lock:
            if not conn.registered:
                return
            conn.registered = False
        self._sel.unregister(conn.sock)

    def _too_long(self, conn: _Connection) -> None:
        self._unregister(conn)
        conn.buf.clear()
        self._submit(conn, _TOO_LONG)

    def _submit(self, conn: _Connection, item) -> None:
        with conn.lock:
            if conn.busy:
                conn.pending.append(item)
                return
            conn.busy = True
        self._jobs.put((conn, item))

    # -- workers ------------------------------------------------------------

    def _worker(self) -> None:
        while True:
            job = self._jobs.get()
            if job is None:
                return
            conn, item = job
            close_after = False
            if item is _TOO_LONG:
                response = format_error("line too long")
                close_after = True
            else:
                try:
                    line = item.decode("utf-8")
                except UnicodeDecodeError:
                    response = format_error("request is not valid UTF-8")
                else:
                    try:
                        response = handle_request(line, self.registry)
                    except Exception as exc:  # keep the worker alive
                        log.exception("request failed")
                        response = format_error(f"internal error: {exc}")
            try:
                conn.sock.sendall(response.encode("utf-8"))
            except OSError:
                close_after = True
            if self.registry.shutdown_requested.is_set():
                self._stop.set()
            done = via_dispatcher = False
            with conn.lock:
                if close_after:
                    conn.pending.clear()
                    conn.eof = True
                nxt = conn.pending.popleft() if conn.pending else None
                if nxt is None:
                    conn.busy = False
                    done = conn.eof
                    via_dispatcher = conn.registered
            if nxt is not None:
                self._jobs.put((conn, nxt))
            elif done:
                # the selector belongs to the dispatcher thread
                if via_dispatcher:
                    self._closing.put(conn)
                else:
                    self._conns.discard(conn)
                    conn.close()


def serve(config: ServerConfig) -> None:
    Server(config).serve_forever()
