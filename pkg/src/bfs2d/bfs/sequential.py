"""Single-process top-down and bottom-up BFS."""
from collections import deque

import numpy as np

from ..errors import ContractViolation
from ..graph import VERTEX, CSRMatrix, EdgeList, csr_from_edges


def _out_csr(g):
    if isinstance(g, CSRMatrix):
        return g
    return csr_from_edges(g, g.n, g.n)


def _in_csr(g):
    if isinstance(g, CSRMatrix):
        r, c = g.to_coo()
        return CSRMatrix.from_coo(c, r, g.local_cols, g.local_rows)
    return csr_from_edges(g.reversed(), g.n, g.n)


def _check_source(n, s):
    if not 0 <= s < n:
        raise ContractViolation(f"source {s} outside [0, {n})")


def seq_topdown(g, s):
    """Queue-based BFS from ``s``; ``parent[v] == -1`` for unreachable ``v``.

    ``g`` is an :class:`EdgeList` or a :class:`CSRMatrix` of out-adjacencies.
    """
    A = _out_csr(g)
    n = A.local_rows
    _check_source(n, s)
    ptr = A.row_ptr.tolist()
    adj = A.col_ids.tolist()
    parent = [-1] * n
    parent[s] = s
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for k in range(ptr[u], ptr[u + 1]):
            v = adj[k]
            if parent[v] == -1:
                parent[v] = u
                queue.append(v)
    return np.asarray(parent, dtype=VERTEX)


def seq_bottomup(g, s):
    """Level-synchronous bottom-up BFS: unvisited vertices look for a parent
    among their in-neighbours and stop at the first frontier member."""
    A = _in_csr(g)
    n = A.local_rows
    _check_source(n, s)
    ptr = A.row_ptr.tolist()
    adj = A.col_ids.tolist()
    parent = [-1] * n
    parent[s] = s
    frontier = [False] * n
    frontier[s] = True
    while True:
        nxt = [False] * n
        found = False
        for u in range(n):
            if parent[u] != -1:
                continue
            for k in range(ptr[u], ptr[u + 1]):
                v = adj[k]
                if frontier[v]:
                    parent[u] = v
                    nxt[u] = True
                    found = True
                    break
        if not found:
            break
        frontier = nxt
    return np.asarray(parent, dtype=VERTEX)
