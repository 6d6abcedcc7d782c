import numpy as np
import pytest
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import shortest_path

from bfs2d import EdgeList, RmatParams, canonicalize, generate

GRIDS = [(r, c) for r in (1, 2, 4) for c in (1, 2, 4)]


def random_graph(n, density, seed, directed=False):
    """Erdos-Renyi-style edge list, canonicalized."""
    rng = np.random.default_rng(seed)
    k = int(density * n * n)
    src = rng.integers(0, n, k)
    dst = rng.integers(0, n, k)
    return canonicalize(EdgeList(src, dst, n, directed=True), undirected=not directed)


def connected_graph(n, extra, seed):
    """Random recursive tree plus ``extra`` random chords."""
    rng = np.random.default_rng(seed)
    child = np.arange(1, n)
    par = np.array([rng.integers(0, v) for v in child], dtype=np.int64)
    a, b = rng.integers(0, n, extra), rng.integers(0, n, extra)
    src = np.concatenate([child, a])
    dst = np.concatenate([par, b])
    return canonicalize(EdgeList(src, dst, n, directed=True))


def oracle_levels(e, s):
    """Unit-weight shortest-path distances from scipy; -1 when unreachable."""
    a = coo_matrix((np.ones(len(e)), (e.src, e.dst)), shape=(e.n, e.n)).tocsr()
    d = shortest_path(a, directed=True, unweighted=True, indices=s)
    return np.where(np.isinf(d), -1, d).astype(np.int64)


@pytest.fixture(scope="session")
def rmat10():
    return canonicalize(generate(RmatParams(10)))


@pytest.fixture(scope="session")
def rmat14():
    return canonicalize(generate(RmatParams(14)))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
