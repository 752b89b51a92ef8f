"""``matgraph`` command line: serve, repl, bench."""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

from .server import (
    DEFAULT_PORT,
    DEFAULT_WORKERS,
    GraphRegistry,
    Server,
    ServerConfig,
    repl,
)

WORKERS_ENV = "MATGRAPH_WORKERS"


def default_workers(env=None) -> int:
    env = os.environ if env is None else env
    raw = env.get(WORKERS_ENV)
    if raw is None or raw == "":
        return DEFAULT_WORKERS
    try:
        n = int(raw)
    except ValueError:
        raise SystemExit(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise SystemExit(f"{WORKERS_ENV} must be >= 1, got {n}")
    return n


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="matgraph", description="Sparse-matrix property graph server and k-hop benchmark.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("serve", help="run the TCP server")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=DEFAULT_PORT)
    s.add_argument("--workers", type=_positive, default=None, help=f"worker threads (default ${WORKERS_ENV} or {DEFAULT_WORKERS})")
    s.add_argument("--snapshot-dir")
    s.add_argument("--max-line", type=_positive, default=None)

    r = sub.add_parser("repl", help="read requests from stdin")
    r.add_argument("--snapshot-dir")

    b = sub.add_parser("bench", help="time k-hop counts from random seeds")
    b.add_argument("--scale", type=int, default=14)
    b.add_argument("--edge-factor", type=int, default=16)
    b.add_argument("--ks", type=_int_list, default=[1, 2, 3, 6])
    b.add_argument("--seeds", type=_int_list, default=[300, 300, 10, 10], help="seed count per k, same order as --ks")
    b.add_argument("--mode", choices=("exact", "cumulative"), default="exact")
    b.add_argument("--rng-seed", type=int, default=1)
    b.add_argument("--out", default="report.csv")
    b.add_argument("--over-wire", metavar="HOST:PORT")
    b.add_argument("--edge-list", metavar="FILE")
    b.add_argument("--no-plot", action="store_true", help="skip the PNG next to the CSV")
    b.add_argument("--check-oracle", action="store_true", help="verify every count against plain BFS")
    return p


def cmd_serve(args) -> int:
    workers = args.workers if args.workers is not None else default_workers()
    config = ServerConfig(port=args.port, workers=workers, snapshot_dir=args.snapshot_dir, host=args.host)
    if args.max_line:
        config.max_line = args.max_line
    server = Server(config)
    try:
        host, port = server.start()
    except OSError as exc:
        print(f"matgraph: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return 1
    print(f"listening on {host}:{port} ({workers} workers)", file=sys.stderr, flush=True)
    server.wait()
    return 0


def cmd_repl(args) -> int:
    registry = GraphRegistry(args.snapshot_dir)
    registry.load_snapshot_dir()
    repl(registry)
    return 0


def cmd_bench(args) -> int:
    from .bench import (
        HarnessError,
        RmatParams,
        build_graph,
        load_edge_list,
        report_csv,
        rmat_generate,
        run_khop_benchmark,
    )
    from .bench.oracle import adjacency_from_edges, bfs_oracle

    if len(args.ks) != len(args.seeds):
        print("matgraph: --ks and --seeds must have the same length", file=sys.stderr)
        return 2
    t0 = time.perf_counter()
    if args.edge_list:
        edges, n = load_edge_list(args.edge_list)
        source = args.edge_list
    else:
        params = RmatParams(scale=args.scale, edge_factor=args.edge_factor, rng_seed=args.rng_seed)
        edges, n = rmat_generate(params), params.n_vertices
        source = f"rmat scale={args.scale} ef={args.edge_factor} seed={args.rng_seed}"
    graph = build_graph(edges, n, with_ids=bool(args.over_wire))
    print(f"graph: {source}: {graph.node_count} nodes, {graph.edge_count()} edges ({time.perf_counter() - t0:.2f}s)", file=sys.stderr)

    counter = None
    if args.over_wire:
        from .bench.wire import WireCounter, parse_hostport

        counter = WireCounter(*parse_hostport(args.over_wire))
        counter.load(graph)
    try:
        report = run_khop_benchmark(graph, args.ks, dict(zip(args.ks, args.seeds)), args.mode, args.rng_seed, count_fn=counter)
    except HarnessError as exc:
        print(f"matgraph: {exc}", file=sys.stderr)
        return 1
    finally:
        if counter is not None:
            counter.close()

    out = Path(args.out)
    report_csv(report, out)
    print(f"wrote {out}", file=sys.stderr)
    if not args.no_plot:
        from .bench.plotting import plot_report

        print(f"wrote {plot_report(report, out.with_suffix('.png'))}", file=sys.stderr)
    for row in report.summary_rows():
        print("k={} n={} mean={}us median={}us p99={}us mean_count={}".format(*row))

    if args.check_oracle:
        adj = adjacency_from_edges(edges)
        bad = [
            (r.k, t.seed)
            for r in report.records
            for t in r.timings
            if bfs_oracle(adj, t.seed, r.k, args.mode) != t.count
        ]
        if bad:
            print(f"matgraph: oracle mismatch at (k, seed) {bad[:10]}", file=sys.stderr)
            return 1
        print("oracle: all counts agree", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    handler = {"serve": cmd_serve, "repl": cmd_repl, "bench": cmd_bench}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
