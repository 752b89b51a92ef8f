"""Sparse boolean / int64 kernel: CSR matrices, sparse vectors, semiring products.

Everything here is immutable once built. Index arrays are int64 numpy arrays
flagged read-only so accidental in-place edits fail loudly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

INDEX = np.int64
INT64_MAX = int(np.iinfo(np.int64).max)


class ContractError(ValueError):
    """Raised when operands have incompatible shapes or out-of-range ids."""


class BuildError(ValueError):
    """Raised by matrix_build for an out-of-bounds tuple."""


def _frozen(a, dtype=INDEX) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True).reshape(-1)
    arr.flags.writeable = False
    return arr


# ---------------------------------------------------------------------------
# Semirings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Semiring:
    name: str
    add: np.ufunc
    mul: np.ufunc
    identity: object
    structural: bool = False

    def __repr__(self) -> str:
        return f"Semiring({self.name})"


BOOLEAN = Semiring("lor_land", np.logical_or, np.logical_and, False, structural=True)
PLUS_TIMES = Semiring("plus_times", np.add, np.multiply, 0)
MIN_PLUS = Semiring("min_plus", np.minimum, np.add, INT64_MAX)

SEMIRINGS = {s.name: s for s in (BOOLEAN, PLUS_TIMES, MIN_PLUS)}


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


class BitVector:
    """Sorted set of positions in ``[0, dimension)``."""

    __slots__ = ("dimension", "indices")

    def __init__(self, dimension: int, indices: Iterable[int] = (), *, _trusted: bool = False):
        self.dimension = int(dimension)
        if _trusted:
            idx = indices
            if idx.flags.writeable:
                idx.flags.writeable = False
        else:
            idx = np.unique(np.asarray(list(indices) if not isinstance(indices, np.ndarray) else indices, dtype=INDEX))
            if idx.size and (idx[0] < 0 or idx[-1] >= self.dimension):
                raise ContractError(f"index out of range for dimension {self.dimension}")
            idx.flags.writeable = False
        self.indices = idx

    @classmethod
    def empty(cls, dimension: int) -> BitVector:
        return cls(dimension, np.empty(0, dtype=INDEX), _trusted=True)

    @property
    def nvals(self) -> int:
        return int(self.indices.size)

    def __len__(self) -> int:
        return int(self.indices.size)

    def __iter__(self):
        return iter(self.indices.tolist())

    def __contains__(self, i: int) -> bool:
        pos = np.searchsorted(self.indices, i)
        return bool(pos < self.indices.size and self.indices[pos] == i)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self.dimension == other.dimension and np.array_equal(self.indices, other.indices)

    def __hash__(self):
        return hash((self.dimension, self.indices.tobytes()))

    def __repr__(self) -> str:
        shown = self.indices[:8].tolist()
        tail = ", ..." if self.indices.size > 8 else ""
        return f"BitVector({self.dimension}, {shown}{tail})"

    def to_set(self) -> set[int]:
        return set(self.indices.tolist())

    def resized(self, dimension: int) -> BitVector:
        if dimension < self.dimension:
            raise ContractError("BitVector can only grow")
        return BitVector(dimension, self.indices, _trusted=True)

    def check(self) -> None:
        idx = self.indices
        assert idx.dtype == INDEX
        if idx.size:
            assert idx[0] >= 0 and idx[-1] < self.dimension
            assert np.all(np.diff(idx) > 0)


class SparseMatrix:
    """CSR matrix. ``vals`` is None for structural (boolean) matrices."""

    __slots__ = ("nrows", "ncols", "row_ptr", "col_idx", "vals")

    def __init__(self, nrows, ncols, row_ptr, col_idx, vals=None):
        self.nrows = int(nrows)
        self.ncols = int(ncols)
        self.row_ptr = row_ptr if not row_ptr.flags.writeable else _frozen(row_ptr)
        self.col_idx = col_idx if not col_idx.flags.writeable else _frozen(col_idx)
        if vals is not None and vals.flags.writeable:
            vals = _frozen(vals)
        self.vals = vals

    @classmethod
    def empty(cls, nrows: int, ncols: int, valued: bool = False) -> SparseMatrix:
        return cls(
            nrows,
            ncols,
            np.zeros(nrows + 1, dtype=INDEX),
            np.empty(0, dtype=INDEX),
            np.empty(0, dtype=INDEX) if valued else None,
        )

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def nvals(self) -> int:
        return int(self.col_idx.size)

    @property
    def is_structural(self) -> bool:
        return self.vals is None

    def row(self, i: int) -> np.ndarray:
        return self.col_idx[self.row_ptr[i] : self.row_ptr[i + 1]]

    def row_ids(self) -> np.ndarray:
        """Row index of every stored entry, parallel to col_idx."""
        return np.repeat(np.arange(self.nrows, dtype=INDEX), np.diff(self.row_ptr))

    def out_degree(self) -> np.ndarray:
        return np.diff(self.row_ptr)

    def resized(self, nrows: int, ncols: int) -> SparseMatrix:
        """Pad with empty rows/columns."""
        if nrows < self.nrows or ncols < self.ncols:
            raise ContractError("SparseMatrix can only grow")
        pad = np.full(nrows - self.nrows, self.row_ptr[-1], dtype=INDEX)
        return SparseMatrix(nrows, ncols, np.concatenate([self.row_ptr, pad]), self.col_idx, self.vals)

    def same_pattern(self, other: SparseMatrix) -> bool:
        return (
            self.shape == other.shape
            and np.array_equal(self.row_ptr, other.row_ptr)
            and np.array_equal(self.col_idx, other.col_idx)
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        if not self.same_pattern(other):
            return False
        if (self.vals is None) != (other.vals is None):
            return False
        return self.vals is None or np.array_equal(self.vals, other.vals)

    __hash__ = None

    def __repr__(self) -> str:
        kind = "bool" if self.vals is None else "int64"
        return f"SparseMatrix({self.nrows}x{self.ncols}, nvals={self.nvals}, {kind})"

    def to_dense(self) -> np.ndarray:
        """Dense copy; bool for structural matrices, int64 otherwise. Test helper."""
        if self.vals is None:
            out = np.zeros(self.shape, dtype=bool)
            out[self.row_ids(), self.col_idx] = True
        else:
            out = np.zeros(self.shape, dtype=INDEX)
            out[self.row_ids(), self.col_idx] = self.vals
        return out

    def check(self) -> None:
        """Assert the structural CSR invariants."""
        rp, ci = self.row_ptr, self.col_idx
        assert rp.size == self.nrows + 1
        assert rp[0] == 0 and rp[-1] == ci.size
        assert np.all(np.diff(rp) >= 0)
        if ci.size:
            assert ci.min() >= 0 and ci.max() < self.ncols
            # strictly increasing within each row
            d = np.diff(ci)
            row_start = np.zeros(ci.size, dtype=bool)
            starts = rp[:-1][np.diff(rp) > 0]
            row_start[starts] = True
            assert np.all((d > 0) | row_start[1:])
        if self.vals is not None:
            assert self.vals.size == ci.size


# ---------------------------------------------------------------------------
# Build / extract
# ---------------------------------------------------------------------------


def matrix_from_coo(
    nrows: int,
    ncols: int,
    rows,
    cols,
    vals=None,
    dup: Semiring | None = None,
) -> SparseMatrix:
    """Vectorised build from parallel row/col(/value) arrays.

    Duplicates combine with ``dup.add`` (default: OR for structural input,
    plus for valued input).
    """
    rows = np.asarray(rows, dtype=INDEX).reshape(-1)
    cols = np.asarray(cols, dtype=INDEX).reshape(-1)
    if rows.size != cols.size:
        raise BuildError("row and column arrays differ in length")
    bad = (rows < 0) | (rows >= nrows) | (cols < 0) | (cols >= ncols)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        tup = (int(rows[k]), int(cols[k])) + ((int(vals[k]),) if vals is not None else ())
        raise BuildError(f"tuple {tup} out of bounds for {nrows}x{ncols} matrix")
    keys = rows * ncols + cols
    if vals is None:
        ukeys = np.unique(keys)
        uvals = None
    else:
        vals = np.asarray(vals, dtype=INDEX).reshape(-1)
        if vals.size != keys.size:
            raise BuildError("value array differs in length")
        op = (dup or PLUS_TIMES).add
        order = np.argsort(keys, kind="stable")
        skeys = keys[order]
        svals = vals[order]
        first = np.ones(skeys.size, dtype=bool)
        first[1:] = skeys[1:] != skeys[:-1]
        starts = np.flatnonzero(first)
        ukeys = skeys[starts]
        uvals = op.reduceat(svals, starts) if svals.size else svals
        uvals = uvals.astype(INDEX)
    urows = ukeys // ncols if ncols else ukeys
    ucols = ukeys - urows * ncols
    counts = np.bincount(urows, minlength=nrows) if urows.size else np.zeros(nrows, dtype=INDEX)
    row_ptr = np.zeros(nrows + 1, dtype=INDEX)
    np.cumsum(counts, out=row_ptr[1:])
    return SparseMatrix(nrows, ncols, row_ptr, ucols, uvals)


def matrix_build(
    nrows: int,
    ncols: int,
    tuples: Sequence[tuple] = (),
    dup: Semiring | None = None,
) -> SparseMatrix:
    """Build from ``(row, col)`` or ``(row, col, value)`` tuples."""
    tuples = list(tuples)
    if not tuples:
        return SparseMatrix.empty(nrows, ncols)
    width = len(tuples[0])
    if width not in (2, 3) or any(len(t) != width for t in tuples):
        raise BuildError("tuples must all be (row, col) or all (row, col, value)")
    for t in tuples:
        r, c = t[0], t[1]
        if not (0 <= r < nrows and 0 <= c < ncols):
            raise BuildError(f"tuple {tuple(t)} out of bounds for {nrows}x{ncols} matrix")
    arr = np.array(tuples, dtype=INDEX)
    vals = arr[:, 2] if width == 3 else None
    return matrix_from_coo(nrows, ncols, arr[:, 0], arr[:, 1], vals, dup)


def extract_tuples(M: SparseMatrix) -> list[tuple]:
    rows = M.row_ids().tolist()
    cols = M.col_idx.tolist()
    if M.vals is None:
        return list(zip(rows, cols))
    return list(zip(rows, cols, M.vals.tolist()))


def nvals(x: SparseMatrix | BitVector) -> int:
    return x.nvals


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def _gather_rows(M: SparseMatrix, rows: np.ndarray) -> np.ndarray:
    """Positions in col_idx of every entry in the given rows, row order kept."""
    starts = M.row_ptr[rows]
    lens = M.row_ptr[rows + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return np.empty(0, dtype=INDEX)
    offsets = np.repeat(starts - np.concatenate(([0], np.cumsum(lens)[:-1])), lens)
    return offsets + np.arange(total, dtype=INDEX)


def apply_mask(v: BitVector, mask: BitVector, complement: bool = False) -> BitVector:
    """Keep entries of v inside mask (or outside it when complemented)."""
    if v.dimension != mask.dimension:
        raise ContractError(f"mask dimension {mask.dimension} != vector dimension {v.dimension}")
    keep = np.isin(v.indices, mask.indices, assume_unique=True, invert=complement)
    return BitVector(v.dimension, v.indices[keep], _trusted=True)


def vxm(
    v: BitVector,
    M: SparseMatrix,
    mask: BitVector | None = None,
    complement_mask: bool = False,
) -> BitVector:
    """Boolean row-vector times matrix: the set of out-neighbours of ``v``."""
    if v.dimension != M.nrows:
        raise ContractError(f"vector dimension {v.dimension} != matrix rows {M.nrows}")
    if mask is not None and mask.dimension != M.ncols:
        raise ContractError(f"mask dimension {mask.dimension} != matrix cols {M.ncols}")
    n = M.ncols
    if v.indices.size == 1:
        i = int(v.indices[0])
        cols = M.col_idx[M.row_ptr[i] : M.row_ptr[i + 1]]
        out = cols.copy()
    else:
        cols = M.col_idx[_gather_rows(M, v.indices)]
        if cols.size * 8 < n:
            out = np.unique(cols)
        else:
            # dense scratch beats sorting once the gather is a sizeable share of n
            mark = np.zeros(n, dtype=bool)
            mark[cols] = True
            if mask is not None:
                if complement_mask:
                    mark[mask.indices] = False
                else:
                    keep = np.zeros(n, dtype=bool)
                    keep[mask.indices] = True
                    mark &= keep
            return BitVector(n, np.flatnonzero(mark).astype(INDEX), _trusted=True)
    if mask is not None and out.size:
        out = out[np.isin(out, mask.indices, assume_unique=True, invert=complement_mask)]
    return BitVector(n, out, _trusted=True)


def mxm(
    A: SparseMatrix,
    B: SparseMatrix,
    semiring: Semiring = BOOLEAN,
    mask: SparseMatrix | None = None,
) -> SparseMatrix:
    """Semiring product ``A (+.*) B``; stored entries of a structural operand count as 1."""
    if A.ncols != B.nrows:
        raise ContractError(f"cannot multiply {A.nrows}x{A.ncols} by {B.nrows}x{B.ncols}")
    if mask is not None and mask.shape != (A.nrows, B.ncols):
        raise ContractError(f"mask shape {mask.shape} != result shape {(A.nrows, B.ncols)}")
    ncols = B.ncols
    a_rows = A.row_ids()
    # every (i, k) in A pairs with every (k, j) in B
    b_pos = _gather_rows(B, A.col_idx)
    per_a = B.row_ptr[A.col_idx + 1] - B.row_ptr[A.col_idx]
    i_idx = np.repeat(a_rows, per_a)
    j_idx = B.col_idx[b_pos]
    keys = i_idx * ncols + j_idx
    if mask is not None:
        mkeys = mask.row_ids() * ncols + mask.col_idx
        keep = np.isin(keys, mkeys)
        keys = keys[keep]
    if semiring.structural:
        ukeys = np.unique(keys)
        uvals = None
    else:
        a_vals = A.vals if A.vals is not None else np.ones(A.nvals, dtype=INDEX)
        b_vals = B.vals if B.vals is not None else np.ones(B.nvals, dtype=INDEX)
        prod = semiring.mul(np.repeat(a_vals, per_a), b_vals[b_pos]).astype(INDEX)
        if mask is not None:
            prod = prod[keep]
        order = np.argsort(keys, kind="stable")
        skeys, sprod = keys[order], prod[order]
        first = np.ones(skeys.size, dtype=bool)
        first[1:] = skeys[1:] != skeys[:-1]
        starts = np.flatnonzero(first)
        ukeys = skeys[starts]
        uvals = semiring.add.reduceat(sprod, starts).astype(INDEX) if sprod.size else sprod
    urows = ukeys // ncols if ncols else ukeys
    ucols = ukeys - urows * ncols
    row_ptr = np.zeros(A.nrows + 1, dtype=INDEX)
    if urows.size:
        np.cumsum(np.bincount(urows, minlength=A.nrows), out=row_ptr[1:])
    return SparseMatrix(A.nrows, ncols, row_ptr, ucols, uvals)


def ewise_union(a: BitVector, b: BitVector) -> BitVector:
    if a.dimension != b.dimension:
        raise ContractError(f"dimension mismatch: {a.dimension} vs {b.dimension}")
    if not a.indices.size:
        return b
    if not b.indices.size:
        return a
    return BitVector(a.dimension, np.union1d(a.indices, b.indices).astype(INDEX), _trusted=True)


def transpose(M: SparseMatrix) -> SparseMatrix:
    rows = M.row_ids()
    # stable sort on column keeps rows ascending within each new row
    order = np.argsort(M.col_idx, kind="stable")
    new_cols = rows[order]
    counts = np.bincount(M.col_idx, minlength=M.ncols) if M.nvals else np.zeros(M.ncols, dtype=INDEX)
    row_ptr = np.zeros(M.ncols + 1, dtype=INDEX)
    np.cumsum(counts, out=row_ptr[1:])
    vals = M.vals[order] if M.vals is not None else None
    return SparseMatrix(M.ncols, M.nrows, row_ptr, new_cols, vals)


def identity_pattern(n: int) -> SparseMatrix:
    idx = np.arange(n, dtype=INDEX)
    return SparseMatrix(n, n, np.arange(n + 1, dtype=INDEX), idx)
