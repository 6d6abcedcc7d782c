"""Graph500-style checks of a BFS parent vector."""
from dataclasses import dataclass

import numpy as np

from ..graph import VERTEX


@dataclass(frozen=True)
class Verdict:
    ok: bool
    clause: str = ""
    vertex: int = -1
    detail: str = ""

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "OK"
        return f"{self.clause} violated at vertex {self.vertex}: {self.detail}"


OK = Verdict(True)


def tree_levels(parent, s):
    """Depth of every vertex in the tree encoded by ``parent`` (-1 if not hanging off ``s``)."""
    parent = np.asarray(parent, dtype=VERTEX)
    level = np.full(parent.size, -1, dtype=VERTEX)
    if not 0 <= s < parent.size or parent[s] != s:
        return level
    level[s] = 0
    todo = np.flatnonzero((parent >= 0) & (level < 0))
    depth = 0
    while todo.size:
        p = parent[todo]
        ready = level[p] == depth
        if not ready.any():
            break
        level[todo[ready]] = depth + 1
        todo = todo[~ready]
        depth += 1
    return level


def _has_edges(g, src, dst):
    if g.n < (1 << 31):
        codes = np.sort(g.src * g.n + g.dst)
        want = src * g.n + dst
        pos = np.minimum(np.searchsorted(codes, want), max(codes.size - 1, 0))
        return codes[pos] == want if codes.size else np.zeros(want.size, dtype=bool)
    order = np.lexsort((g.dst, g.src))
    e_src, e_dst = g.src[order], g.dst[order]
    lo = np.searchsorted(e_src, src, side="left")
    hi = np.searchsorted(e_src, src, side="right")
    has = np.zeros(src.size, dtype=bool)
    for k in np.flatnonzero(hi > lo):
        j = lo[k] + np.searchsorted(e_dst[lo[k]:hi[k]], dst[k])
        has[k] = j < hi[k] and e_dst[j] == dst[k]
    return has


def validate_tree(g, s, parent):
    """Check ``parent`` is a BFS tree of ``g`` rooted at ``s``.

    Clauses, in order: ``root`` (parent[s] == s), ``range`` (entries are -1 or
    vertex ids), ``parent_edge`` ((parent[v], v) is an edge), ``tree`` (every
    parented vertex hangs off ``s`` without cycles), ``level`` (no edge spans
    more than one tree level, so tree depth equals BFS distance) and
    ``reachability`` (no edge leads from the tree to an unparented vertex).
    """
    parent = np.asarray(parent, dtype=VERTEX)
    n = g.n
    if parent.size != n:
        return Verdict(False, "range", -1, f"parent vector has {parent.size} entries, graph has {n}")
    if not 0 <= s < n or parent[s] != s:
        return Verdict(False, "root", int(s), f"parent[s] = {parent[s] if 0 <= s < n else None}")
    bad = np.flatnonzero((parent < -1) | (parent >= n))
    if bad.size:
        return Verdict(False, "range", int(bad[0]), f"parent = {int(parent[bad[0]])}")

    children = np.flatnonzero(parent >= 0)
    children = children[children != s]
    has = _has_edges(g, parent[children], children)
    if not has.all():
        v = int(children[~has][0])
        return Verdict(False, "parent_edge", v, f"no edge ({int(parent[v])}, {v})")

    level = tree_levels(parent, s)
    lost = np.flatnonzero((parent >= 0) & (level < 0))
    if lost.size:
        return Verdict(False, "tree", int(lost[0]), "parent chain does not reach the source")

    lu, lv = level[g.src], level[g.dst]
    in_tree = lu >= 0
    span = in_tree & (lv >= 0) & (lv > lu + 1)
    if span.any():
        k = int(np.flatnonzero(span)[0])
        v = int(g.dst[k])
        return Verdict(False, "level", v, f"edge ({int(g.src[k])}, {v}) spans levels {int(lu[k])} -> {int(lv[k])}")
    escape = in_tree & (lv < 0)
    if escape.any():
        k = int(np.flatnonzero(escape)[0])
        v = int(g.dst[k])
        return Verdict(False, "reachability", v, f"reachable from {int(g.src[k])} but unparented")
    return OK
