"""2D-distributed top-down, bottom-up and direction-optimizing BFS.

Each rank runs the same generator program over its own segment of the
parent vector and its local block; all cross-rank traffic goes through
:mod:`bfs2d.netsim`. Traffic tags name the component each word belongs to:

    td.transpose, td.expand, td.fold            top-down levels
    bu.transpose, bu.gather, bu.parents,
    bu.rotate                                    bottom-up levels
    ctl.nf, ctl.mf, ctl.mu                       per-level allreduces
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError, ContractViolation
from ..graph import VERTEX
from ..netsim import KINDS, Simulator, TrafficCounters, transpose_vector
from ..vectors import SPA, DenseBitmap, SparseVector, spmsv
from .direction import BOTTOM_UP, DEFAULT_ALPHA, DEFAULT_BETA, TOP_DOWN, choose_direction

MODES = ("td", "bu", "dir")
EMPTY = np.empty(0, dtype=VERTEX)


@dataclass
class LevelStats:
    depth: int
    direction: str
    n_f: int
    m_f: int
    m_u: int
    edges_examined: int = 0
    discovered: int = 0
    words: dict = field(default_factory=dict)
    rounds: dict = field(default_factory=dict)


@dataclass
class SearchStats:
    source: int
    mode: str
    fmt: str
    levels: list = field(default_factory=list)
    seconds: float = 0.0
    counters: TrafficCounters | None = None

    @property
    def depth_levels(self):
        return len(self.levels)

    @property
    def sb(self):
        return sum(1 for lv in self.levels if lv.direction == BOTTOM_UP)

    @property
    def edges_examined(self):
        return sum(lv.edges_examined for lv in self.levels)

    @property
    def bottomup_discovered(self):
        return sum(lv.discovered for lv in self.levels if lv.direction == BOTTOM_UP)

    def words(self, kind):
        return self.counters.words(kind) if self.counters else 0

    def tag_words(self, tag):
        return self.counters.tag_words(tag) if self.counters else 0

    def to_dict(self):
        return {
            "source": self.source,
            "mode": self.mode,
            "datastructure": self.fmt,
            "depth_levels": self.depth_levels,
            "sb": self.sb,
            "edges_examined": self.edges_examined,
            "words": {k: self.words(k) for k in KINDS},
            "size_words": {k: self.counters.size_words(k) for k in KINDS} if self.counters else {},
            "component_words": self.counters.snapshot()["tags"] if self.counters else {},
            "seconds": self.seconds,
            "levels": [
                {
                    "depth": lv.depth, "direction": lv.direction, "n_f": lv.n_f, "m_f": lv.m_f,
                    "m_u": lv.m_u, "edges_examined": lv.edges_examined, "discovered": lv.discovered,
                    "words": lv.words, "rounds": lv.rounds,
                }
                for lv in self.levels
            ],
        }


class RankState:
    """Per-rank BFS state: the owned parent segment plus local scratch."""

    def __init__(self, dg, coords, parent_segment=None):
        own = dg.ownership
        self.dg = dg
        self.own = own
        self.coords = coords
        i, j = coords
        self.block = dg.blocks[coords]
        self.seg_lo, self.seg_hi = own.segment_range(i, j)
        self.r_lo, self.r_hi = own.row_range(i)
        self.c_lo, self.c_hi = own.col_range(j)
        self.degrees = dg.degree_segment(i, j)
        if parent_segment is None:
            parent_segment = np.full(self.seg_hi - self.seg_lo, -1, dtype=VERTEX)
        self.parent = np.array(parent_segment, dtype=VERTEX)
        self.spa = SPA(self.r_hi - self.r_lo)

    def owns(self, v):
        return self.seg_lo <= v < self.seg_hi


def _as_ids(state, frontier):
    if isinstance(frontier, DenseBitmap):
        return frontier.indices() + state.seg_lo
    return frontier


def _as_bitmap(state, frontier):
    if isinstance(frontier, DenseBitmap):
        return frontier
    return DenseBitmap.from_indices(frontier - state.seg_lo, state.seg_hi - state.seg_lo)


def par_topdown_level(rank, state, frontier):
    """One top-down level: expand, local SpMSV, fold, parent update.

    ``frontier`` holds the global ids of this rank's segment in the current
    frontier. Returns ``(next_frontier_ids, edges_examined)``.
    """
    own = state.own
    i, _ = state.coords
    ids = _as_ids(state, frontier)
    piece = yield from transpose_vector(rank, own, ids, tag="td.transpose")
    fcol = yield rank.allgatherv(rank.col, piece, tag="td.expand")
    f = SparseVector(fcol - state.c_lo, fcol, state.c_hi - state.c_lo)
    examined = int(state.block.td.lengths(f.indices).sum())
    t = spmsv(state.block.td, f, state.spa)

    gidx = t.indices + state.r_lo
    cuts = np.searchsorted(gidx, own.segment_bounds[i])
    n = own.n
    payloads = [SparseVector(gidx[a:b], t.values[a:b], n) for a, b in zip(cuts[:-1], cuts[1:])]
    inbox = yield rank.alltoallv(rank.row, payloads, tag="td.fold")

    idx = np.concatenate([sv.indices for sv in inbox])
    val = np.concatenate([sv.values for sv in inbox])
    if not idx.size:
        return EMPTY, examined
    order = np.lexsort((val, idx))
    idx, val = idx[order], val[order]
    first = np.ones(idx.size, dtype=bool)
    first[1:] = idx[1:] != idx[:-1]
    idx, val = idx[first], val[first]
    loc = idx - state.seg_lo
    new = state.parent[loc] == -1
    state.parent[loc[new]] = val[new]
    return idx[new], examined


def _first_hits(lengths, hits):
    """Per run of ``hits`` (cut by ``lengths``): found flag, flat offset of the first hit, probes."""
    starts = np.cumsum(lengths) - lengths
    hitpos = np.flatnonzero(hits)
    if not hitpos.size:
        return np.zeros(lengths.size, dtype=bool), starts, int(lengths.sum())
    k = np.searchsorted(hitpos, starts)
    pos = hitpos[np.minimum(k, hitpos.size - 1)]
    found = (k < hitpos.size) & (pos < starts + lengths)
    probes = np.where(found, pos - starts + 1, lengths)
    return found, pos, int(probes.sum())


def par_bottomup_level(rank, state, frontier):
    """One bottom-up level: gather the frontier bitmap, then p_c sub-steps.

    In sub-step ``s`` rank ``(i, j)`` holds the completed bitmap of segment
    ``(i, j - s)``, probes those vertices' in-edges in its block, sends the
    (child, parent) pairs to the segment owner and passes the bitmap right.
    Returns ``(next_frontier_bitmap, edges_examined)``.
    """
    own = state.own
    i, j = state.coords
    p_c = own.grid.p_c
    fb = _as_bitmap(state, frontier)
    piece = yield from transpose_vector(rank, own, fb, tag="bu.transpose")
    fcol = yield rank.allgatherv(rank.col, piece, tag="bu.gather")
    fmask = fcol.to_bool()

    held = DenseBitmap.from_bool(state.parent != -1)
    next_mask = np.zeros(state.seg_hi - state.seg_lo, dtype=bool)
    examined = 0
    for s in range(p_c):
        x = (j - s) % p_c
        x_lo, _ = own.segment_range(i, x)
        done = held.to_bool()
        todo = np.flatnonzero(~done)
        lengths, nbrs = state.block.bu.gather(todo + (x_lo - state.r_lo))
        found, pos, probes = _first_hits(lengths, fmask[nbrs])
        examined += probes
        child = todo[found]
        done[child] = True
        updates = SparseVector(child + x_lo, nbrs[pos[found]] + state.c_lo, own.n)
        got = yield rank.sendrecv((i, x), (i, (j + s) % p_c), updates, tag="bu.parents")
        loc = got.indices - state.seg_lo
        state.parent[loc] = got.values
        next_mask[loc] = True
        held = yield rank.sendrecv((i, (j + 1) % p_c), (i, (j - 1) % p_c),
                                   DenseBitmap.from_bool(done), tag="bu.rotate")
    return DenseBitmap.from_bool(next_mask), examined


def _search_program(rank, dg, source, mode, alpha, beta):
    state = RankState(dg, rank.coords)
    frontier = EMPTY
    m_u_local = int(state.degrees.sum())
    if state.owns(source):
        state.parent[source - state.seg_lo] = source
        frontier = np.array([source], dtype=VERTEX)
        m_u_local -= int(state.degrees[source - state.seg_lo])
    direction = BOTTOM_UP if mode == "bu" else TOP_DOWN
    log = []
    depth = 0
    while True:
        rank.level = depth
        if isinstance(frontier, DenseBitmap):
            mask = frontier.to_bool()
            local_nf, local_mf = int(mask.sum()), int(state.degrees[mask].sum())
        else:
            local_nf, local_mf = int(frontier.size), int(state.degrees[frontier - state.seg_lo].sum())
        n_f = yield rank.allreduce_sum(rank.world, local_nf, tag="ctl.nf")
        if n_f == 0:
            break
        m_f = yield rank.allreduce_sum(rank.world, local_mf, tag="ctl.mf")
        m_u = yield rank.allreduce_sum(rank.world, m_u_local, tag="ctl.mu")
        if mode == "dir":
            direction = choose_direction(direction, n_f, m_f, m_u, dg.n, alpha, beta)
        if direction == TOP_DOWN:
            frontier, examined = yield from par_topdown_level(rank, state, frontier)
            new_loc = frontier - state.seg_lo
        else:
            frontier, examined = yield from par_bottomup_level(rank, state, frontier)
            new_loc = np.flatnonzero(frontier.to_bool())
        m_u_local -= int(state.degrees[new_loc].sum())
        log.append((depth, direction, n_f, m_f, m_u, examined, int(new_loc.size)))
        depth += 1
    return state.parent, log


def _check_search_args(dg, source, mode):
    if mode not in MODES:
        raise ConfigurationError(f"unknown mode {mode!r}; expected one of {MODES}")
    if not 0 <= source < dg.n:
        raise ContractViolation(f"source {source} outside [0, {dg.n})")
    if not dg.eligible[source]:
        raise ConfigurationError(f"source {source} is isolated")


def _assemble(dg, segments):
    own = dg.ownership
    parent = np.empty(dg.n, dtype=VERTEX)
    for c, seg in segments.items():
        lo, hi = own.segment_range(*c)
        parent[lo:hi] = seg
    return parent


def run_search(dg, source, mode="dir", backend="sequential", alpha=DEFAULT_ALPHA,
               beta=DEFAULT_BETA, clock=time.perf_counter):
    """Distributed BFS from ``source``; returns ``(parent, SearchStats)``."""
    _check_search_args(dg, source, mode)
    sim = Simulator(dg.grid, backend)
    t0 = clock()
    results = sim.run(_search_program, dg, source, mode, alpha, beta)
    seconds = clock() - t0

    parent = _assemble(dg, {c: seg for c, (seg, _) in results.items()})
    logs = [log for _, log in results.values()]
    ctr = sim.counters
    levels = []
    for rows in zip(*logs):
        depth, direction, n_f, m_f, m_u = rows[0][:5]
        lv = LevelStats(depth, direction, n_f, m_f, m_u,
                        edges_examined=sum(r[5] for r in rows),
                        discovered=sum(r[6] for r in rows))
        per_kind = ctr.by_level.get(depth)
        lv.words = {k: int(per_kind[n]) if per_kind is not None else 0 for n, k in enumerate(KINDS)}
        lv.rounds = {k: ctr.rounds(depth, k) for k in KINDS}
        levels.append(lv)
    stats = SearchStats(int(source), mode, dg.fmt, levels, seconds, ctr)
    return parent, stats


def _level_program(rank, dg, parent, frontier, direction):
    i, j = rank.coords
    lo, hi = dg.ownership.segment_range(i, j)
    state = RankState(dg, rank.coords, parent[lo:hi])
    rank.level = 0
    ids = frontier[(frontier >= lo) & (frontier < hi)]
    if direction == TOP_DOWN:
        nxt, examined = yield from par_topdown_level(rank, state, ids)
    else:
        nxt, examined = yield from par_bottomup_level(rank, state, ids)
        nxt = nxt.indices() + lo
    return state.parent, nxt, examined


def run_single_level(dg, parent, frontier, direction, backend="sequential"):
    """Run one distributed level from a global ``parent`` array and frontier id list.

    Returns ``(parent, next_frontier_ids, edges_examined, counters)``.
    """
    parent = np.asarray(parent, dtype=VERTEX)
    frontier = np.unique(np.asarray(frontier, dtype=VERTEX))
    sim = Simulator(dg.grid, backend)
    results = sim.run(_level_program, dg, parent, frontier, direction)
    new_parent = _assemble(dg, {c: r[0] for c, r in results.items()})
    nxt = np.sort(np.concatenate([r[1] for r in results.values()]))
    return new_parent, nxt, sum(r[2] for r in results.values()), sim.counters
