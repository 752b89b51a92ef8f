"""Sequential k-hop timing over a set of seeds, and the CSV report format."""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from ..khop import KHopQuery, k_hop_count
from ..store import ANY, PropertyGraph

DETAIL_HEADER = ["k", "seed", "count", "elapsed_us"]
SUMMARY_HEADER = ["k", "n_seeds", "mean_us", "median_us", "p99_us", "mean_count"]
EDGE_RELATION = "EDGE"


class HarnessError(RuntimeError):
    pass


def build_graph(edges: np.ndarray, n_vertices: int, relation: str = EDGE_RELATION, with_ids: bool = True) -> PropertyGraph:
    """Load an edge array into a fresh store; duplicates and self-loops collapse in the matrix."""
    g = PropertyGraph(capacity=max(1, n_vertices))
    g.create_nodes(n_vertices)
    if with_ids:
        for i in range(n_vertices):
            g.set_node_property(i, "id", i)
    if len(edges):
        g.add_edges(relation, edges[:, 0], edges[:, 1])
    g.flush()
    return g


def pick_seeds(graph: PropertyGraph, n: int, rng_seed: int) -> list[int]:
    """``n`` distinct vertices with out-degree >= 1, in a seed-determined random order."""
    eligible = np.flatnonzero(graph.out_degree() > 0)
    if eligible.size < n:
        raise HarnessError(f"need {n} seeds but only {eligible.size} vertices have out-degree >= 1")
    rng = np.random.default_rng(rng_seed)
    return [int(x) for x in rng.choice(eligible, size=n, replace=False)]


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------


def _fmt(x: Fraction) -> str:
    """Exact rational rounded half-even to 3 decimals."""
    d = Decimal(x.numerator) / Decimal(x.denominator) if x.denominator != 1 else Decimal(x.numerator)
    return str(d.quantize(Decimal("0.001"), rounding=ROUND_HALF_EVEN))


@dataclass(frozen=True)
class SeedTiming:
    seed: int
    count: int
    elapsed_ns: int

    @property
    def elapsed_us(self) -> Fraction:
        return Fraction(self.elapsed_ns, 1000)


@dataclass
class KHopRecord:
    k: int
    timings: list[SeedTiming] = field(default_factory=list)

    @property
    def n_seeds(self) -> int:
        return len(self.timings)

    def mean_us(self) -> Fraction:
        return Fraction(sum(t.elapsed_ns for t in self.timings), 1000 * len(self.timings))

    def median_us(self) -> Fraction:
        ns = sorted(t.elapsed_ns for t in self.timings)
        mid = len(ns) // 2
        if len(ns) % 2:
            return Fraction(ns[mid], 1000)
        return Fraction(ns[mid - 1] + ns[mid], 2000)

    def p99_us(self) -> Fraction:
        """Nearest-rank 99th percentile."""
        ns = sorted(t.elapsed_ns for t in self.timings)
        rank = max(1, math.ceil(0.99 * len(ns)))
        return Fraction(ns[rank - 1], 1000)

    def mean_count(self) -> Fraction:
        return Fraction(sum(t.count for t in self.timings), len(self.timings))


@dataclass
class KHopReport:
    mode: str = "exact"
    records: list[KHopRecord] = field(default_factory=list)

    def detail_rows(self) -> list[list[str]]:
        return [
            [str(r.k), str(t.seed), str(t.count), _fmt(t.elapsed_us)]
            for r in self.records
            for t in r.timings
        ]

    def summary_rows(self) -> list[list[str]]:
        return [
            [str(r.k), str(r.n_seeds), _fmt(r.mean_us()), _fmt(r.median_us()), _fmt(r.p99_us()), _fmt(r.mean_count())]
            for r in self.records
            if r.timings
        ]


def report_csv(report: KHopReport, path) -> None:
    """Detail section then summary section, each with its own header; LF line endings."""
    with open(Path(path), "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(DETAIL_HEADER)
        w.writerows(report.detail_rows())
        w.writerow(SUMMARY_HEADER)
        w.writerows(report.summary_rows())


def read_report_csv(path) -> tuple[list[list[str]], list[list[str]]]:
    """Inverse of report_csv: (detail rows, summary rows) as strings, headers checked."""
    with open(Path(path), encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0] != DETAIL_HEADER:
        raise ValueError("missing detail header")
    try:
        split = rows.index(SUMMARY_HEADER)
    except ValueError:
        raise ValueError("missing summary header") from None
    return rows[1:split], rows[split + 1 :]


def summarize_detail(detail: Sequence[Sequence[str]]) -> list[list[str]]:
    """Recompute summary rows from detail rows, for consistency checks."""
    groups: dict[int, list[SeedTiming]] = {}
    order = []
    for k, seed, count, us in detail:
        k = int(k)
        if k not in groups:
            groups[k] = []
            order.append(k)
        ns = int((Decimal(us) * 1000).to_integral_exact())
        groups[k].append(SeedTiming(int(seed), int(count), ns))
    return KHopReport(records=[KHopRecord(k, groups[k]) for k in order]).summary_rows()


# ---------------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------------

CountFn = Callable[[int, int, str], int]


def in_process_counter(graph: PropertyGraph, relation: str = ANY) -> CountFn:
    def count(seed: int, k: int, mode: str) -> int:
        return k_hop_count(graph, KHopQuery(seed, k, relation, mode))

    return count


def run_khop_benchmark(
    graph: PropertyGraph,
    ks: Sequence[int],
    seeds_per_k: dict[int, int],
    mode: str = "exact",
    rng_seed: int = 1,
    seeds: Sequence[int] | None = None,
    count_fn: CountFn | None = None,
) -> KHopReport:
    """Time one k-hop count per (k, seed), strictly one after another.

    Seeds for each k are the first ``seeds_per_k[k]`` of a single draw, so
    smaller schedules reuse the larger ones' seeds.
    """
    report = KHopReport(mode=mode)
    if not ks:
        return report
    need = max(seeds_per_k[k] for k in ks)
    pool = list(seeds) if seeds is not None else pick_seeds(graph, need, rng_seed)
    if len(pool) < need:
        raise HarnessError(f"need {need} seeds, got {len(pool)}")
    count_fn = count_fn or in_process_counter(graph)
    clock = time.perf_counter_ns
    for k in ks:
        rec = KHopRecord(k)
        for seed in pool[: seeds_per_k[k]]:
            t0 = clock()
            try:
                c = count_fn(seed, k, mode)
            except Exception as exc:
                raise HarnessError(f"k-hop failed for k={k} seed={seed}: {exc}") from exc
            rec.timings.append(SeedTiming(seed, c, clock() - t0))
        report.records.append(rec)
    return report
