from .harness import (
    DETAIL_HEADER,
    SUMMARY_HEADER,
    HarnessError,
    KHopRecord,
    KHopReport,
    SeedTiming,
    build_graph,
    pick_seeds,
    read_report_csv,
    report_csv,
    run_khop_benchmark,
    summarize_detail,
)
from .oracle import bfs_oracle
from .rmat import RmatParams, load_edge_list, rmat_generate

SCHEDULE_KS = (1, 2, 3, 6)
SCHEDULE_SEEDS = {1: 300, 2: 300, 3: 10, 6: 10}

__all__ = [
    "DETAIL_HEADER",
    "SUMMARY_HEADER",
    "HarnessError",
    "KHopRecord",
    "KHopReport",
    "SeedTiming",
    "build_graph",
    "pick_seeds",
    "read_report_csv",
    "report_csv",
    "run_khop_benchmark",
    "summarize_detail",
    "bfs_oracle",
    "RmatParams",
    "load_edge_list",
    "rmat_generate",
    "SCHEDULE_KS",
    "SCHEDULE_SEEDS",
]
