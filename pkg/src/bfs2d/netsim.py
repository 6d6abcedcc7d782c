"""Deterministic simulation of p communicating ranks.

A rank program is a generator function taking a :class:`Rank`. It talks to
other ranks only by yielding operation requests and receives the result as
the value of the ``yield``::

    def program(rank):
        total = yield rank.allreduce_sum(rank.world, 1)
        return total

The scheduler advances every runnable rank until it blocks on an operation,
then completes whatever operations are fully matched. Collectives complete
once every member of the group has posted the same operation; ``sendrecv``
sends are buffered and the receive completes when a matching message is in
the mailbox. A pass with blocked ranks and nothing runnable is a deadlock.

Every delivered payload is charged to :class:`TrafficCounters` in 64-bit
words, including deliveries a rank makes to itself: an allgather hands
each member the whole concatenation, its own piece included.
"""
from __future__ import annotations

import json
from collections import defaultdict, deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from numbers import Number

import numpy as np

from .errors import ConfigurationError, DeadlockError
from .vectors import DenseBitmap, SparseVector, concat_bitmaps

KINDS = ("p2p", "allgather", "alltoall", "allreduce")
BACKENDS = ("sequential", "threads")

SENT, RECV, SIZE_SENT, SIZE_RECV = range(4)


def payload_words(payload):
    """``(payload_words, size_words)`` for one delivered message."""
    if payload is None:
        return 0, 0
    if isinstance(payload, DenseBitmap):
        return payload.num_words, 0
    if isinstance(payload, SparseVector):
        return 2 * payload.nnz, 1
    if isinstance(payload, np.ndarray):
        return int(payload.size), 1
    if isinstance(payload, (Number, np.number)):
        return 1, 0
    if isinstance(payload, (list, tuple)):
        return len(payload), 1
    raise TypeError(f"cannot size payload of type {type(payload).__name__}")


class TrafficCounters:
    def __init__(self, grid):
        self.grid = grid
        self.reset()

    def reset(self):
        self.table = np.zeros((self.grid.p, len(KINDS), 4), dtype=np.int64)
        self.by_tag = defaultdict(lambda: np.zeros(3, dtype=np.int64))  # words, size words, messages
        self.by_level = defaultdict(lambda: np.zeros(len(KINDS), dtype=np.int64))
        self.calls = defaultdict(int)

    def charge(self, src, dst, kind, payload, tag=None, level=None):
        words, size = payload_words(payload)
        k = KINDS.index(kind)
        s, d = self.grid.rank_of(*src), self.grid.rank_of(*dst)
        self.table[s, k, SENT] += words
        self.table[d, k, RECV] += words
        self.table[s, k, SIZE_SENT] += size
        self.table[d, k, SIZE_RECV] += size
        if tag is not None:
            self.by_tag[tag] += (words, size, 1)
        if level is not None:
            self.by_level[level][k] += words

    def count_call(self, kind, level, ranks):
        self.calls[(level, kind)] += ranks

    def words(self, kind=None, which=RECV):
        if kind is None:
            return int(self.table[:, :, which].sum())
        return int(self.table[:, KINDS.index(kind), which].sum())

    def size_words(self, kind=None):
        return self.words(kind, SIZE_RECV)

    def tag_words(self, tag):
        return int(self.by_tag[tag][0]) if tag in self.by_tag else 0

    def rounds(self, level, kind):
        """Communication rounds of ``kind`` issued at ``level`` (per rank)."""
        return self.calls.get((level, kind), 0) // self.grid.p

    def snapshot(self):
        return {
            "words": {k: self.words(k) for k in KINDS},
            "size_words": {k: self.size_words(k) for k in KINDS},
            "tags": {t: int(v[0]) for t, v in sorted(self.by_tag.items())},
        }

    def to_dict(self):
        out = {}
        for (i, j) in self.grid.coords():
            r = self.grid.rank_of(i, j)
            out[f"{i},{j}"] = {
                kind: {
                    "sent": int(self.table[r, k, SENT]),
                    "received": int(self.table[r, k, RECV]),
                    "size_sent": int(self.table[r, k, SIZE_SENT]),
                    "size_received": int(self.table[r, k, SIZE_RECV]),
                }
                for k, kind in enumerate(KINDS)
            }
        return out

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    def merge(self, other):
        self.table += other.table
        for t, v in other.by_tag.items():
            self.by_tag[t] += v
        for lv, v in other.by_level.items():
            self.by_level[lv] += v
        for key, v in other.calls.items():
            self.calls[key] += v


# operation requests -------------------------------------------------------

@dataclass
class _Op:
    origin: tuple
    tag: str | None
    level: int | None


@dataclass
class _Collective(_Op):
    group: tuple = ()

    @property
    def signature(self):
        return type(self).__name__, self.group, self.tag


@dataclass
class Allgatherv(_Collective):
    payload: object = None


@dataclass
class Alltoallv(_Collective):
    payloads: list = field(default_factory=list)


@dataclass
class Exchange(_Collective):
    sends: dict = field(default_factory=dict)
    kind: str = "p2p"


@dataclass
class AllreduceSum(_Collective):
    value: Number = 0


@dataclass
class Sendrecv(_Op):
    dest: tuple = ()
    src: tuple = ()
    payload: object = None


def concat_payloads(parts):
    if not parts:
        return None
    first = parts[0]
    if isinstance(first, DenseBitmap):
        return concat_bitmaps(parts)
    if isinstance(first, np.ndarray):
        return np.concatenate(parts)
    if isinstance(first, (list, tuple)):
        return [x for p in parts for x in p]
    return list(parts)


class Rank:
    """Handle a rank program uses to build its communication requests."""

    def __init__(self, coords, grid):
        self.coords = coords
        self.grid = grid
        self.row = grid.row(coords[0])
        self.col = grid.col(coords[1])
        self.world = tuple(grid.coords())
        self.level = None

    def __repr__(self):
        return f"Rank{self.coords}"

    def allgatherv(self, group, payload, tag=None):
        return Allgatherv(self.coords, tag, self.level, tuple(group), payload)

    def alltoallv(self, group, payloads, tag=None):
        group = tuple(group)
        if len(payloads) != len(group):
            raise ConfigurationError("alltoallv needs one payload per group member")
        return Alltoallv(self.coords, tag, self.level, group, list(payloads))

    def exchange(self, sends, tag=None, kind="p2p"):
        return Exchange(self.coords, tag, self.level, self.world, dict(sends), kind)

    def allreduce_sum(self, group, value, tag=None):
        return AllreduceSum(self.coords, tag, self.level, tuple(group), value)

    def sendrecv(self, dest, src, payload, tag=None):
        return Sendrecv(self.coords, tag, self.level, tuple(dest), tuple(src), payload)


def transpose_vector(rank, ownership, payload, tag=None):
    """Move segment ``(i, j)`` to the ranks that gather it along ``P(:, j)``.

    ``payload`` is a :class:`DenseBitmap` over the segment, an array of
    global ids inside it, or (when every segment maps onto exactly one
    transposed piece, as on square grids) any payload. Used as
    ``piece = yield from transpose_vector(rank, own, payload)``.
    """
    i, j = rank.coords
    s_lo, s_hi = ownership.segment_range(i, j)
    sends = {}
    for dest, lo, hi in ownership.transpose_sends(i, j):
        sends[dest] = _slice(payload, lo, hi, s_lo, s_hi)
    got = yield rank.exchange(sends, tag=tag)
    recvs = ownership.transpose_recvs(i, j)
    if len(recvs) == 1:
        return got[recvs[0][0]]
    if not recvs:
        if isinstance(payload, DenseBitmap):
            return DenseBitmap.zeros(0)
        return payload[:0] if isinstance(payload, np.ndarray) else None
    return concat_payloads([got[src] for src, _, _ in recvs])


def _slice(payload, lo, hi, s_lo, s_hi):
    if (lo, hi) == (s_lo, s_hi):
        return payload
    if isinstance(payload, DenseBitmap):
        return DenseBitmap.from_bool(payload.to_bool()[lo - s_lo:hi - s_lo])
    if isinstance(payload, np.ndarray):
        return payload[(payload >= lo) & (payload < hi)]
    raise TypeError("only bitmaps and id arrays can be split across transposed pieces")


# scheduler -----------------------------------------------------------------

class Simulator:
    def __init__(self, grid, backend="sequential", counters=None):
        if backend not in BACKENDS:
            raise ConfigurationError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
        self.grid = grid
        self.backend = backend
        self.counters = counters if counters is not None else TrafficCounters(grid)

    def run(self, program, *args, **kwargs):
        """Run ``program(rank, *args, **kwargs)`` on every rank; results by coords."""
        coords = self.grid.coords()
        gens = {c: program(Rank(c, self.grid), *args, **kwargs) for c in coords}
        ready = {c: None for c in coords}
        waiting = {}
        results = {}
        mailbox = defaultdict(deque)
        pool = ThreadPoolExecutor(max_workers=len(coords)) if self.backend == "threads" else None
        try:
            while ready:
                stepped = self._advance(gens, ready, pool)
                ready = {}
                for c in sorted(stepped):
                    done, val = stepped[c]
                    if done:
                        results[c] = val
                        continue
                    if isinstance(val, Sendrecv):
                        self._post_send(val, mailbox)
                    elif not isinstance(val, _Collective):
                        raise TypeError(f"rank {c} yielded {val!r}, not a communication request")
                    waiting[c] = val
                self._resolve(waiting, ready, mailbox)
                if not ready and waiting:
                    blocked = sorted(waiting)
                    detail = "; ".join(f"{c}: {self._describe(waiting[c])}" for c in blocked)
                    raise DeadlockError(f"no rank can progress; blocked {detail}", blocked)
        finally:
            if pool is not None:
                pool.shutdown()
        return results

    @staticmethod
    def _describe(op):
        if isinstance(op, Sendrecv):
            return f"sendrecv(dest={op.dest}, src={op.src}, tag={op.tag})"
        return f"{type(op).__name__}(group={op.group}, tag={op.tag})"

    @staticmethod
    def _step(gen, value):
        try:
            return False, gen.send(value)
        except StopIteration as stop:
            return True, stop.value

    def _advance(self, gens, ready, pool):
        if pool is None or len(ready) == 1:
            return {c: self._step(gens[c], v) for c, v in sorted(ready.items())}
        order = sorted(ready)
        futures = [pool.submit(self._step, gens[c], ready[c]) for c in order]
        return {c: f.result() for c, f in zip(order, futures)}

    def _post_send(self, op, mailbox):
        if op.dest not in self.grid.coords() or op.src not in self.grid.coords():
            raise ConfigurationError(f"sendrecv partner outside the grid: {op}")
        mailbox[(op.origin, op.dest)].append(op.payload)
        self.counters.charge(op.origin, op.dest, "p2p", op.payload, op.tag, op.level)
        self.counters.count_call("p2p", op.level, 1)

    def _resolve(self, waiting, ready, mailbox):
        for c in sorted(waiting):
            op = waiting[c]
            if isinstance(op, Sendrecv) and mailbox[(op.src, c)]:
                ready[c] = mailbox[(op.src, c)].popleft()
                del waiting[c]
        groups = defaultdict(list)
        for c in sorted(waiting):
            op = waiting[c]
            if isinstance(op, _Collective):
                groups[op.group].append(c)
        for group, members in sorted(groups.items()):
            if len(members) != len(group):
                continue
            ops = [waiting[c] for c in group]
            sigs = {op.signature for op in ops}
            if len(sigs) != 1:
                detail = ", ".join(f"{c}: {self._describe(waiting[c])}" for c in group)
                raise DeadlockError(f"mismatched collective on group {group}: {detail}", group)
            for c, out in zip(group, self._execute(group, ops)):
                ready[c] = out
                del waiting[c]

    def _execute(self, group, ops):
        ctr = self.counters
        tag, level = ops[0].tag, ops[0].level
        if isinstance(ops[0], Allgatherv):
            ctr.count_call("allgather", level, len(group))
            for s, op in zip(group, ops):
                for r in group:
                    ctr.charge(s, r, "allgather", op.payload, tag, level)
            parts = [op.payload for op in ops]
            return [concat_payloads(parts) for _ in group]
        if isinstance(ops[0], Alltoallv):
            ctr.count_call("alltoall", level, len(group))
            inbox = [[None] * len(group) for _ in group]
            for a, (s, op) in enumerate(zip(group, ops)):
                for b, r in enumerate(group):
                    ctr.charge(s, r, "alltoall", op.payloads[b], tag, level)
                    inbox[b][a] = op.payloads[b]
            return inbox
        if isinstance(ops[0], Exchange):
            kind = ops[0].kind
            ctr.count_call(kind, level, len(group))
            inbox = {r: {} for r in group}
            for s, op in zip(group, ops):
                for r, payload in sorted(op.sends.items()):
                    if r not in inbox:
                        raise ConfigurationError(f"exchange destination {r} outside the group")
                    ctr.charge(s, r, kind, payload, tag, level)
                    inbox[r][s] = payload
            return [inbox[r] for r in group]
        if isinstance(ops[0], AllreduceSum):
            ctr.count_call("allreduce", level, len(group))
            total = 0
            for s, op in zip(group, ops):
                for r in group:
                    ctr.charge(s, r, "allreduce", op.value, tag, level)
                total = total + op.value
            return [total for _ in group]
        raise TypeError(f"unknown collective {ops[0]!r}")


def run_ranks(grid, program, *args, backend="sequential", counters=None, **kwargs):
    sim = Simulator(grid, backend, counters)
    return sim.run(program, *args, **kwargs), sim.counters
