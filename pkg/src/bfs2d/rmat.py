"""R-MAT generation, edge-list canonicalization and edge-list file I/O.

Random streams come from NumPy's ``Philox`` (4x64, counter based). Edge ``e``
is drawn from the stream keyed by the seed with counter word 1 set to
``e // CHUNK_EDGES``, at offset ``(e % CHUNK_EDGES) * scale`` within it, so any
edge range can be regenerated independently of how the work is split.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ConfigurationError, EdgeListParseError
from .graph import VERTEX, EdgeList

CHUNK_EDGES = 1 << 16
MAX_SCALE = 62
MAX_ID = (1 << 63) - 1


@dataclass(frozen=True)
class RmatParams:
    scale: int
    degree: int = 16
    a: float = 0.57
    b: float = 0.19
    c: float = 0.19
    d: float = 0.05
    seed: int = 1
    permute: bool = False

    def __post_init__(self):
        if abs(self.a + self.b + self.c + self.d - 1.0) > 1e-9:
            raise ConfigurationError("R-MAT probabilities must sum to 1")
        if min(self.a, self.b, self.c, self.d) < 0:
            raise ConfigurationError("R-MAT probabilities must be non-negative")
        if self.scale < 1 or self.degree < 1:
            raise ConfigurationError("scale and degree must be >= 1")

    @property
    def n(self):
        return 1 << self.scale

    @property
    def num_edges(self):
        return self.degree << self.scale


def _chunk_uniforms(seed, chunk, count, scale):
    bitgen = np.random.Philox(key=seed & ((1 << 64) - 1), counter=[0, chunk, 0, 0])
    return np.random.Generator(bitgen).random((count, scale))


def generate(p, start=0, stop=None):
    """Raw directed R-MAT tuples ``start <= e < stop`` (all of them by default).

    Each edge descends ``scale`` levels; at level ``l`` a draw below ``a``
    keeps both bits 0, below ``a+b`` sets the destination bit, below
    ``a+b+c`` sets the source bit, otherwise both. Level 0 fixes the most
    significant bit.
    """
    if p.scale > MAX_SCALE:
        raise CapacityError(f"scale {p.scale} exceeds the 64-bit vertex id space (max {MAX_SCALE})")
    total = p.num_edges
    if total > MAX_ID:
        raise CapacityError(f"{total} edges exceed the 64-bit edge index space")
    stop = total if stop is None else stop
    if not 0 <= start <= stop <= total:
        raise ConfigurationError(f"edge range [{start}, {stop}) outside [0, {total})")
    src = np.zeros(stop - start, dtype=VERTEX)
    dst = np.zeros(stop - start, dtype=VERTEX)
    t_ab, t_abc = p.a + p.b, p.a + p.b + p.c
    pos = 0
    e = start
    while e < stop:
        chunk, off = divmod(e, CHUNK_EDGES)
        take = min(stop - e, CHUNK_EDGES - off)
        u = _chunk_uniforms(p.seed, chunk, off + take, p.scale)[off:]
        src_bits = (u >= t_ab).astype(VERTEX)
        dst_bits = ((u >= p.a) & (u < t_ab)) | (u >= t_abc)
        weights = np.left_shift(1, np.arange(p.scale - 1, -1, -1, dtype=VERTEX))
        src[pos:pos + take] = src_bits @ weights
        dst[pos:pos + take] = dst_bits.astype(VERTEX) @ weights
        pos += take
        e += take
    if p.permute:
        perm = np.random.Generator(np.random.Philox(key=p.seed, counter=[0, 0, 1, 0])).permutation(p.n)
        src, dst = perm[src], perm[dst]
    return EdgeList(src, dst, p.n, directed=True)


def canonicalize(e, undirected=True):
    """Drop self-loops and duplicates; symmetrize when ``undirected``.

    Vertex ids are kept as-is; isolated vertices stay in ``[0, n)`` and are
    excluded later through ``EdgeList.non_isolated``. Output is sorted by
    ``(src, dst)``.
    """
    keep = e.src != e.dst
    src, dst = e.src[keep], e.dst[keep]
    if undirected:
        src, dst = np.concatenate([src, dst]), np.concatenate([dst, src])
    if src.size:
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        first = np.ones(src.size, dtype=bool)
        first[1:] = (src[1:] != src[:-1]) | (dst[1:] != dst[:-1])
        src, dst = src[first], dst[first]
    return EdgeList(src, dst, e.n, directed=not undirected)


_HEADER = re.compile(r"^%n\s+(\d+)\s*$")


def ingest_edge_list(path, format="text", n=None, directed=True):
    """Read an edge list; ``n`` is ``1 + max id`` unless a header or ``n`` says otherwise."""
    if format == "binary":
        raw = np.fromfile(path, dtype="<u8")
        if raw.size % 2:
            raise EdgeListParseError(path, 1, "binary edge list has an odd number of 64-bit words")
        if raw.size and raw.max() > MAX_ID:
            raise EdgeListParseError(path, 1, "vertex id overflows a signed 64-bit integer")
        pairs = raw.astype(VERTEX).reshape(-1, 2)
        src, dst = pairs[:, 0], pairs[:, 1]
    elif format == "text":
        src_l, dst_l = [], []
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                text = line.strip()
                if not text or text.startswith("#"):
                    continue
                m = _HEADER.match(text)
                if m:
                    n = int(m.group(1)) if n is None else n
                    continue
                parts = text.split()
                if len(parts) != 2 or not all(p.isdigit() for p in parts):
                    raise EdgeListParseError(path, lineno, f"expected 'src dst', got {text!r}")
                s, d = int(parts[0]), int(parts[1])
                if max(s, d) > MAX_ID:
                    raise EdgeListParseError(path, lineno, "vertex id overflows a signed 64-bit integer")
                src_l.append(s)
                dst_l.append(d)
        src = np.asarray(src_l, dtype=VERTEX)
        dst = np.asarray(dst_l, dtype=VERTEX)
    else:
        raise ConfigurationError(f"unknown edge list format {format!r}")
    top = int(max(src.max(), dst.max())) + 1 if src.size else 0
    if n is None:
        n = top
    elif n < top:
        raise EdgeListParseError(path, 1, f"header declares {n} vertices but ids reach {top - 1}")
    return EdgeList(src, dst, n, directed)


def export_edge_list(e, path, format="text", header=False):
    if format == "binary":
        np.stack([e.src, e.dst], axis=1).astype("<u8").tofile(path)
    elif format == "text":
        with open(path, "w") as fh:
            if header:
                fh.write(f"%n {e.n}\n")
            fh.writelines(f"{s} {d}\n" for s, d in zip(e.src.tolist(), e.dst.tolist()))
    else:
        raise ConfigurationError(f"unknown edge list format {format!r}")
