"""Recursive-matrix (Graph500-style) edge generator."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAX_SCALE = 24


@dataclass(frozen=True)
class RmatParams:
    scale: int = 14
    edge_factor: int = 16
    a: float = 0.57
    b: float = 0.19
    c: float = 0.19
    d: float = 0.05
    rng_seed: int = 1

    def __post_init__(self):
        if not 1 <= self.scale <= MAX_SCALE:
            raise ValueError(f"scale must be in [1, {MAX_SCALE}], got {self.scale}")
        if self.edge_factor < 1:
            raise ValueError("edge_factor must be >= 1")
        probs = (self.a, self.b, self.c, self.d)
        if min(probs) < 0 or abs(sum(probs) - 1.0) > 1e-9:
            raise ValueError(f"quadrant probabilities must be >= 0 and sum to 1, got {probs}")

    @property
    def n_vertices(self) -> int:
        return 1 << self.scale

    @property
    def n_edges(self) -> int:
        return self.edge_factor << self.scale


def rmat_generate(p: RmatParams) -> np.ndarray:
    """``(edge_factor * 2**scale, 2)`` int64 array of (src, dst); duplicates and self-loops kept.

    Level 0 picks the most significant bit of both endpoints: quadrant a is
    (0, 0), b is (0, 1), c is (1, 0), d is (1, 1).
    """
    rng = np.random.default_rng(p.rng_seed)
    m = p.n_edges
    src = np.zeros(m, dtype=np.int64)
    dst = np.zeros(m, dtype=np.int64)
    ab = p.a + p.b
    abc = ab + p.c
    for level in range(p.scale):
        bit = np.int64(1) << np.int64(p.scale - 1 - level)
        r = rng.random(m)
        src_bit = r >= ab
        dst_bit = ((r >= p.a) & (r < ab)) | (r >= abc)
        src |= src_bit * bit
        dst |= dst_bit * bit
    return np.stack([src, dst], axis=1)


def load_edge_list(path) -> tuple[np.ndarray, int]:
    """Read a ``src<TAB>dst`` file (any whitespace; '#' comments). Returns (edges, vertex count)."""
    rows = []
    with open(Path(path), encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) < 2:
                raise ValueError(f"{path}:{lineno}: expected 'src dst'")
            s, d = int(parts[0]), int(parts[1])
            if s < 0 or d < 0:
                raise ValueError(f"{path}:{lineno}: negative vertex id")
            rows.append((s, d))
    if not rows:
        return np.empty((0, 2), dtype=np.int64), 0
    edges = np.asarray(rows, dtype=np.int64)
    return edges, int(edges.max()) + 1
