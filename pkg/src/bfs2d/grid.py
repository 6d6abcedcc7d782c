"""2D checkerboard decomposition of the adjacency matrix over a p_r x p_c grid.

Block ``(i, j)`` stores the edges whose destination lies in row block ``i``
and whose source lies in column block ``j``: columns are frontier sources and
rows are discovered vertices. Rank ``(i, j)`` owns vector segment ``j`` of
its row block. After a vector transpose, rank ``(k, j)`` holds piece ``k`` of
column block ``j``, so an allgather along ``P(:, j)`` assembles column block
``j``.

Ranges of length ``L`` are cut into ``k`` contiguous pieces; piece ``b`` has
``ceil(L/k)`` ids when ``b < L % k`` and ``floor(L/k)`` otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ConfigurationError, ContractViolation
from .graph import VERTEX, CSRMatrix, DCSCMatrix

FORMATS = ("csr", "dcsc")


def split_bounds(lo, hi, k):
    """Boundaries of ``k`` contiguous pieces of ``[lo, hi)``."""
    length = hi - lo
    q, r = divmod(length, k)
    sizes = np.full(k, q, dtype=VERTEX)
    sizes[:r] += 1
    out = np.empty(k + 1, dtype=VERTEX)
    out[0] = lo
    np.cumsum(sizes, out=out[1:])
    out[1:] += lo
    return out


@dataclass(frozen=True)
class ProcGrid:
    p_r: int
    p_c: int

    def __post_init__(self):
        if self.p_r < 1 or self.p_c < 1:
            raise ConfigurationError(f"grid extents must be >= 1, got {self.p_r}x{self.p_c}")

    @property
    def p(self):
        return self.p_r * self.p_c

    def coords(self):
        return [(i, j) for i in range(self.p_r) for j in range(self.p_c)]

    def rank_of(self, i, j):
        return i * self.p_c + j

    def coords_of(self, rank):
        return divmod(rank, self.p_c)

    def row(self, i):
        return tuple((i, j) for j in range(self.p_c))

    def col(self, j):
        return tuple((i, j) for i in range(self.p_r))


@dataclass(frozen=True, eq=False)
class VertexOwnership:
    n: int
    grid: ProcGrid
    row_bounds: np.ndarray = field(init=False)
    col_bounds: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.n < 0:
            raise ConfigurationError("vertex count must be non-negative")
        object.__setattr__(self, "row_bounds", split_bounds(0, self.n, self.grid.p_r))
        object.__setattr__(self, "col_bounds", split_bounds(0, self.n, self.grid.p_c))

    # ranges -------------------------------------------------------------

    def row_range(self, i):
        return int(self.row_bounds[i]), int(self.row_bounds[i + 1])

    def col_range(self, j):
        return int(self.col_bounds[j]), int(self.col_bounds[j + 1])

    @cached_property
    def segment_bounds(self):
        """``segment_bounds[i]`` cuts row block ``i`` into the p_c segments."""
        return [split_bounds(*self.row_range(i), self.grid.p_c) for i in range(self.grid.p_r)]

    @cached_property
    def piece_bounds(self):
        """``piece_bounds[j]`` cuts column block ``j`` into the p_r transposed pieces."""
        return [split_bounds(*self.col_range(j), self.grid.p_r) for j in range(self.grid.p_c)]

    def segment_range(self, i, j):
        b = self.segment_bounds[i]
        return int(b[j]), int(b[j + 1])

    def piece_range(self, k, j):
        b = self.piece_bounds[j]
        return int(b[k]), int(b[k + 1])

    def _range(self, axis, i, j):
        if axis == "row":
            return self.row_range(i)
        if axis == "column":
            return self.col_range(j)
        if axis == "segment":
            return self.segment_range(i, j)
        if axis == "piece":
            return self.piece_range(i, j)
        raise ContractViolation(f"unknown axis {axis!r}")

    # lookups ------------------------------------------------------------

    def _check(self, ids):
        ids = np.asarray(ids, dtype=VERTEX)
        if ids.size and (ids.min() < 0 or ids.max() >= self.n):
            raise ContractViolation(f"vertex id outside [0, {self.n})")
        return ids

    def row_block(self, ids):
        return np.searchsorted(self.row_bounds, self._check(ids), side="right") - 1

    def col_block(self, ids):
        return np.searchsorted(self.col_bounds, self._check(ids), side="right") - 1

    def block_of_edge(self, src, dst):
        i = int(self.row_block(dst))
        j = int(self.col_block(src))
        return i, j

    def local_index(self, gid, axis, coords):
        lo, hi = self._range(axis, *coords)
        if not lo <= gid < hi:
            raise ContractViolation(f"id {gid} outside {axis} range [{lo}, {hi}) of rank {coords}")
        return gid - lo

    def global_index(self, offset, axis, coords):
        lo, hi = self._range(axis, *coords)
        if not 0 <= offset < hi - lo:
            raise ContractViolation(f"offset {offset} outside {axis} range of rank {coords}")
        return lo + offset

    def segment_owner(self, gid):
        self._check(gid)
        i = int(self.row_block(gid))
        b = self.segment_bounds[i]
        j = int(np.searchsorted(b, gid, side="right") - 1)
        return i, j

    def segment_sizes(self):
        return {c: self.segment_range(*c)[1] - self.segment_range(*c)[0] for c in self.grid.coords()}

    # transpose ----------------------------------------------------------

    @cached_property
    def _transpose_pieces(self):
        segs = [((i, j), *self.segment_range(i, j)) for i in range(self.grid.p_r) for j in range(self.grid.p_c)]
        pieces = [((k, j), *self.piece_range(k, j)) for j in range(self.grid.p_c) for k in range(self.grid.p_r)]
        out = []
        a = b = 0
        while a < len(segs) and b < len(pieces):
            (src, s_lo, s_hi), (dst, t_lo, t_hi) = segs[a], pieces[b]
            lo, hi = max(s_lo, t_lo), min(s_hi, t_hi)
            if lo < hi:
                out.append((src, dst, lo, hi))
            if s_hi <= t_hi:
                a += 1
            else:
                b += 1
        return out

    def transpose_sends(self, i, j):
        """``(dest, lo, hi)`` pieces of segment ``(i, j)`` in global order."""
        return [(d, lo, hi) for s, d, lo, hi in self._transpose_pieces if s == (i, j)]

    def transpose_recvs(self, k, j):
        """``(src, lo, hi)`` pieces making up transposed piece ``(k, j)`` in global order."""
        return [(s, lo, hi) for s, d, lo, hi in self._transpose_pieces if d == (k, j)]

    def transpose_pieces(self):
        return list(self._transpose_pieces)


@dataclass(frozen=True, eq=False)
class LocalBlock:
    """One rank's slice of the graph in the chosen format.

    ``td`` is indexed by source (local to the column block) and lists
    destinations; ``bu`` is indexed by destination (local to the row block)
    and lists sources. ``stored`` is the canonical copy (``td`` for DCSC,
    ``bu`` for CSR); the other is its transpose, kept for the opposite
    traversal direction.
    """

    coords: tuple
    fmt: str
    td: object
    bu: object

    @property
    def stored(self):
        return self.td if self.fmt == "dcsc" else self.bu

    @property
    def companion(self):
        return self.bu if self.fmt == "dcsc" else self.td

    @property
    def nnz(self):
        return self.td.nnz


@dataclass(frozen=True, eq=False)
class DistributedGraph:
    ownership: VertexOwnership
    fmt: str
    blocks: dict
    degrees: np.ndarray
    eligible: np.ndarray
    num_input_edges: int
    directed: bool

    @property
    def grid(self):
        return self.ownership.grid

    @property
    def n(self):
        return self.ownership.n

    @property
    def nnz(self):
        return sum(b.nnz for b in self.blocks.values())

    def degree_segment(self, i, j):
        lo, hi = self.ownership.segment_range(i, j)
        return self.degrees[lo:hi]


def _build(cls, r, c, rows, cols, what):
    try:
        return cls.from_coo(r, c, rows, cols)
    except MemoryError as exc:
        raise MemoryError(f"out of memory while building {what}") from exc


def distribute(e, grid, fmt="dcsc"):
    """Split a (canonical) edge list into per-rank local blocks."""
    if fmt not in FORMATS:
        raise ConfigurationError(f"unknown local format {fmt!r}; expected one of {FORMATS}")
    own = VertexOwnership(e.n, grid)
    bi = own.row_block(e.dst)
    bj = own.col_block(e.src)
    key = bi * grid.p_c + bj
    order = np.argsort(key, kind="stable")
    splits = np.cumsum(np.bincount(key, minlength=grid.p))[:-1]
    cls = CSRMatrix if fmt == "csr" else DCSCMatrix
    blocks = {}
    for rank, idx in enumerate(np.split(order, splits)):
        i, j = grid.coords_of(rank)
        r_lo, r_hi = own.row_range(i)
        c_lo, c_hi = own.col_range(j)
        dst_loc = e.dst[idx] - r_lo
        src_loc = e.src[idx] - c_lo
        what = f"{fmt.upper()} block ({i},{j}) with {idx.size} nonzeros"
        td = _build(cls, dst_loc, src_loc, r_hi - r_lo, c_hi - c_lo, what) if fmt == "dcsc" else \
            _build(cls, src_loc, dst_loc, c_hi - c_lo, r_hi - r_lo, what)
        bu = _build(cls, src_loc, dst_loc, c_hi - c_lo, r_hi - r_lo, what) if fmt == "dcsc" else \
            _build(cls, dst_loc, src_loc, r_hi - r_lo, c_hi - c_lo, what)
        blocks[(i, j)] = LocalBlock((i, j), fmt, td, bu)
    eligible = np.zeros(e.n, dtype=bool)
    eligible[e.non_isolated()] = True
    return DistributedGraph(own, fmt, blocks, e.out_degrees(), eligible, e.num_input_edges, e.directed)
