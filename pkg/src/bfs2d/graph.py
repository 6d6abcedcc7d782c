"""Edge lists and the two local sparse-matrix layouts (CSR and DCSC).

Both layouts read an edge ``(src, dst)`` as the matrix entry ``A[src, dst]``
after the optional ``row_map`` / ``col_map`` relabelling. CSR compresses the
row axis and DCSC compresses the column axis; ``adjacency(j)`` returns the
nonzeros along the compressed axis (a row for CSR, a column for DCSC).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConstructionError, ContractViolation

VERTEX = np.int64
EMPTY = np.empty(0, dtype=VERTEX)


@dataclass(frozen=True, eq=False)
class EdgeList:
    src: np.ndarray
    dst: np.ndarray
    n: int
    directed: bool = True

    def __post_init__(self):
        src = np.ascontiguousarray(self.src, dtype=VERTEX)
        dst = np.ascontiguousarray(self.dst, dtype=VERTEX)
        if src.shape != dst.shape or src.ndim != 1:
            raise ContractViolation("src and dst must be 1-d arrays of equal length")
        if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= self.n):
            raise ContractViolation(f"edge ids must lie in [0, {self.n})")
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "dst", dst)

    @classmethod
    def from_pairs(cls, pairs, n=None, directed=True):
        arr = np.asarray(list(pairs), dtype=VERTEX).reshape(-1, 2)
        if n is None:
            n = int(arr.max()) + 1 if arr.size else 0
        return cls(arr[:, 0], arr[:, 1], n, directed)

    def __len__(self):
        return int(self.src.size)

    def pairs(self):
        return list(zip(self.src.tolist(), self.dst.tolist()))

    def out_degrees(self):
        return np.bincount(self.src, minlength=self.n).astype(VERTEX)

    def non_isolated(self):
        """Vertices touching at least one edge (eligible BFS sources)."""
        touched = np.zeros(self.n, dtype=bool)
        touched[self.src] = True
        touched[self.dst] = True
        return np.flatnonzero(touched).astype(VERTEX)

    @property
    def num_input_edges(self):
        """Edge count used for TEPS: undirected edges are counted once."""
        if self.directed:
            return len(self)
        return int(np.count_nonzero(self.src < self.dst) + np.count_nonzero(self.src == self.dst))

    def reversed(self):
        return EdgeList(self.dst, self.src, self.n, self.directed)


def _check_extent(idx, extent, axis):
    if idx.size and (idx.min() < 0 or idx.max() >= extent):
        bad = idx[(idx < 0) | (idx >= extent)][0]
        raise ConstructionError(f"{axis} index {int(bad)} outside [0, {extent})")


def _coords(e, rows, cols, row_map, col_map):
    r = e.src if row_map is None else np.asarray(row_map(e.src), dtype=VERTEX)
    c = e.dst if col_map is None else np.asarray(col_map(e.dst), dtype=VERTEX)
    _check_extent(r, rows, "row")
    _check_extent(c, cols, "column")
    return r, c


def _ranges(starts, lengths):
    """Concatenated ``arange(s, s + l)`` for every pair, vectorized."""
    total = int(lengths.sum())
    if total == 0:
        return EMPTY
    offs = np.cumsum(lengths) - lengths
    out = np.arange(total, dtype=VERTEX)
    out -= np.repeat(offs - starts, lengths)
    return out


@dataclass(frozen=True, eq=False)
class CSRMatrix:
    row_ptr: np.ndarray
    col_ids: np.ndarray
    local_rows: int
    local_cols: int

    @classmethod
    def from_coo(cls, r, c, rows, cols):
        r = np.asarray(r, dtype=VERTEX)
        c = np.asarray(c, dtype=VERTEX)
        _check_extent(r, rows, "row")
        _check_extent(c, cols, "column")
        order = np.lexsort((c, r))
        row_ptr = np.zeros(rows + 1, dtype=VERTEX)
        np.cumsum(np.bincount(r, minlength=rows), out=row_ptr[1:])
        return cls(row_ptr, c[order], rows, cols)

    @property
    def nnz(self):
        return int(self.col_ids.size)

    @property
    def extent(self):
        return self.local_rows

    @property
    def target_len(self):
        return self.local_cols

    @property
    def index_words(self):
        return self.nnz + self.local_rows + 1

    def lengths(self, js):
        js = np.asarray(js, dtype=VERTEX)
        return self.row_ptr[js + 1] - self.row_ptr[js]

    def adjacency(self, j):
        if not 0 <= j < self.local_rows:
            raise ContractViolation(f"row {j} outside [0, {self.local_rows})")
        return self.col_ids[self.row_ptr[j]:self.row_ptr[j + 1]]

    def gather(self, js):
        """Lengths and concatenated contents of rows ``js``."""
        js = np.asarray(js, dtype=VERTEX)
        starts = self.row_ptr[js]
        lengths = self.row_ptr[js + 1] - starts
        return lengths, self.col_ids[_ranges(starts, lengths)]

    def to_coo(self):
        r = np.repeat(np.arange(self.local_rows, dtype=VERTEX), np.diff(self.row_ptr))
        return r, self.col_ids.copy()


@dataclass(frozen=True, eq=False)
class DCSCMatrix:
    IR: np.ndarray
    CP: np.ndarray
    JC: np.ndarray
    local_rows: int
    local_cols: int
    nzc: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "nzc", int(self.JC.size))

    @classmethod
    def from_coo(cls, r, c, rows, cols):
        r = np.asarray(r, dtype=VERTEX)
        c = np.asarray(c, dtype=VERTEX)
        _check_extent(r, rows, "row")
        _check_extent(c, cols, "column")
        order = np.lexsort((r, c))
        c_sorted = c[order]
        JC, counts = np.unique(c_sorted, return_counts=True)
        CP = np.zeros(JC.size + 1, dtype=VERTEX)
        np.cumsum(counts, out=CP[1:])
        return cls(r[order], CP, JC.astype(VERTEX), rows, cols)

    @property
    def nnz(self):
        return int(self.IR.size)

    @property
    def extent(self):
        return self.local_cols

    @property
    def target_len(self):
        return self.local_rows

    @property
    def index_words(self):
        return self.nnz + 2 * self.nzc + 1

    def lengths(self, js):
        js = np.asarray(js, dtype=VERTEX)
        k, hit = self._slot(js)
        out = np.zeros(js.size, dtype=VERTEX)
        out[hit] = self.CP[k[hit] + 1] - self.CP[k[hit]]
        return out

    def _slot(self, js):
        k = np.searchsorted(self.JC, js)
        hit = k < self.nzc
        hit[hit] = self.JC[k[hit]] == js[hit]
        return k, hit

    def adjacency(self, j):
        if not 0 <= j < self.local_cols:
            raise ContractViolation(f"column {j} outside [0, {self.local_cols})")
        k = int(np.searchsorted(self.JC, j))
        if k == self.nzc or self.JC[k] != j:
            return EMPTY
        return self.IR[self.CP[k]:self.CP[k + 1]]

    def gather(self, js):
        """Lengths and concatenated contents of columns ``js``; absent columns are empty."""
        js = np.asarray(js, dtype=VERTEX)
        k, hit = self._slot(js)
        starts = np.zeros(js.size, dtype=VERTEX)
        lengths = np.zeros(js.size, dtype=VERTEX)
        starts[hit] = self.CP[k[hit]]
        lengths[hit] = self.CP[k[hit] + 1] - starts[hit]
        return lengths, self.IR[_ranges(starts, lengths)]

    def to_coo(self):
        c = np.repeat(self.JC, np.diff(self.CP))
        return self.IR.copy(), c


def csr_from_edges(e, rows, cols, row_map=None, col_map=None):
    r, c = _coords(e, rows, cols, row_map, col_map)
    return CSRMatrix.from_coo(r, c, rows, cols)


def dcsc_from_edges(e, rows, cols, row_map=None, col_map=None):
    r, c = _coords(e, rows, cols, row_map, col_map)
    return DCSCMatrix.from_coo(r, c, rows, cols)


def column_adjacency(m, j):
    """Nonzeros along the compressed axis of ``m`` at local index ``j``."""
    return m.adjacency(j)
