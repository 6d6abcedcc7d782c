import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bfs2d import EdgeList, ProcGrid, distribute
from bfs2d.bfs import run_search
from bfs2d.costmodel import (
    ModelParams, bottomup_breakdown, breakeven_sb, compare_measured, dense_exact, ratio,
    topdown_cost_expressions, words_bottomup, words_topdown,
)
from bfs2d.errors import ConfigurationError

from conftest import connected_graph


def test_topdown_words():
    assert words_topdown(ModelParams(16, 128, p_r=4)) == 576
    assert words_topdown(ModelParams(100, 0)) == 100
    n = 1 << 10
    assert words_topdown(ModelParams.square(16, 128, 0, n=n)) == n * 192


def test_bottomup_words():
    assert words_bottomup(ModelParams(4096, 1, 4, 4, s_b=2)) == 9344
    assert words_bottomup(ModelParams(500, 10, 3, 7, s_b=0)) == 1000


@given(st.integers(1, 1 << 20), st.integers(1, 64), st.integers(1, 64), st.integers(0, 60))
def test_breakdown_sums_to_total(n, p_r, p_c, s_b):
    p = ModelParams(n, n, p_r, p_c, s_b)
    assert math.isclose(sum(bottomup_breakdown(p).values()), words_bottomup(p), rel_tol=1e-12)


def test_breakeven_and_ratio():
    assert abs(breakeven_sb(16, 128) - 47.6) <= 1
    assert ratio(ModelParams.square(16, 128, 4)) > 10
    assert math.isclose(ratio(ModelParams.square(16, 128, breakeven_sb(16, 128))), 1.0)
    assert 0 < breakeven_sb(0.5, 1) < 64
    assert ratio(ModelParams.square(16, 128, 1e9)) < 1e-3
    with pytest.raises(ConfigurationError):
        ratio(ModelParams(100, 100, 2, 4, 3))


@given(st.sampled_from([3, 4]), st.integers(1, 64), st.integers(1, 1024))
def test_ratio_above_one_for_few_bottom_up_steps(s_b, k, p_c):
    assert ratio(ModelParams.square(k, p_c, s_b)) > 1


@given(st.integers(1, 63), st.integers(1, 512), st.integers(1, 20))
def test_ratio_increases_with_degree(k, p_c, s_b):
    assert ratio(ModelParams.square(k + 1, p_c, s_b)) > ratio(ModelParams.square(k, p_c, s_b))


@given(st.integers(1, 30), st.integers(1, 30), st.integers(1, 30))
def test_bottomup_words_monotone(p_r, p_c, s_b):
    base = words_bottomup(ModelParams(4096, 1, p_r, p_c, s_b))
    assert words_bottomup(ModelParams(4096, 1, p_r + 1, p_c, s_b)) > base
    assert words_bottomup(ModelParams(4096, 1, p_r, p_c + 1, s_b)) > base
    assert words_bottomup(ModelParams(4096, 1, p_r, p_c, s_b + 1)) > base


def test_params_validation():
    with pytest.raises(ConfigurationError):
        ModelParams(0, 1)
    with pytest.raises(ConfigurationError):
        ModelParams(100, 1600, k=3)
    assert ModelParams(100, 1600).k == 16


def _consts(**over):
    base = dict(alpha_L=0.0, beta_L=0.0, alpha_N=0.0, beta_N=0.0)
    base.update(over)
    return base


def test_cost_expressions():
    zero = topdown_cost_expressions(ModelParams(1000, 16000, 4, 4, **_consts()))
    assert zero == {"local": 0.0, "expand": 0.0, "fold": 0.0}
    with pytest.raises(ConfigurationError):
        topdown_cost_expressions(ModelParams(1000, 16000, 4, 4))
    beta = _consts(beta_L=1.0, beta_N=lambda coll, group: 2.0 if coll == "a2a" else 1.0)
    a = topdown_cost_expressions(ModelParams(1000, 16000, 4, 4, **beta))
    b = topdown_cost_expressions(ModelParams(1000, 32000, 4, 4, **beta))
    assert b["local"] == 2 * a["local"] and b["fold"] == 2 * a["fold"]
    assert a["fold"] == 16000 / 16 * 2.0


def test_skew_sweep_trades_expand_against_fold():
    """With fixed p, a taller grid makes the expand group bigger and the fold group smaller."""
    consts = _consts(alpha_N=1.0, beta_N=lambda coll, group: float(group))
    rows = []
    for p_r in (1, 2, 4, 8, 16, 32, 64):
        t = topdown_cost_expressions(ModelParams(1 << 20, 16 << 20, p_r, 64 // p_r, **consts))
        rows.append((t["expand"], t["fold"]))
    expands, folds = zip(*rows)
    assert all(a < b for a, b in zip(expands, expands[1:]))
    assert all(a > b for a, b in zip(folds, folds[1:]))


@given(st.integers(2, 200), st.sampled_from([(1, 1), (1, 2), (2, 2), (3, 2), (4, 4)]))
def test_star_fold_by_hand(leaves, shape):
    # level 0: centre 0 offers itself to every leaf (one pair each);
    # level 1: every column block holding a leaf sends one merged pair for 0
    n = leaves + 1
    e = EdgeList.from_pairs([(0, v) for v in range(1, n)] + [(v, 0) for v in range(1, n)], n, directed=False)
    dg = distribute(e, ProcGrid(*shape))
    _, st_ = run_search(dg, 0, "td")
    own = dg.ownership
    blocks_with_leaves = 0
    for j in range(shape[1]):
        lo, hi = own.col_range(j)
        blocks_with_leaves += max(lo, 1) < hi
    assert st_.tag_words("td.fold") == 2 * leaves + 2 * blocks_with_leaves


def test_all_topdown_has_no_bottomup_traffic():
    e = connected_graph(80, 40, 2)
    dg = distribute(e, ProcGrid(2, 2))
    _, s = run_search(dg, 0, "td")
    rep = compare_measured(ModelParams(e.n, e.num_input_edges, 2, 2), s.counters, s.sb,
                           s.bottomup_discovered, dg.ownership)
    for tag in ("bu.transpose", "bu.gather", "bu.rotate", "bu.parents"):
        assert rep.row(tag).measured == 0 and rep.row(tag).reference == 0
    assert rep.ok


@pytest.mark.parametrize("shape", [(1, 1), (2, 2), (2, 3), (3, 2), (1, 4), (4, 4)])
@pytest.mark.parametrize("mode", ["bu", "dir"])
def test_dense_components_exact(shape, mode):
    e = connected_graph(300, 900, 7)
    dg = distribute(e, ProcGrid(*shape))
    _, s = run_search(dg, 0, mode)
    rep = compare_measured(ModelParams(e.n, e.num_input_edges, *shape), s.counters, s.sb,
                           s.bottomup_discovered, dg.ownership)
    assert rep.ok, rep.to_table()
    exact = dense_exact(dg.ownership, s.sb, s.bottomup_discovered)
    assert s.tag_words("bu.parents") == exact["bu.parents"] == 2 * s.bottomup_discovered


def test_report_formats():
    e = connected_graph(60, 20, 1)
    dg = distribute(e, ProcGrid(2, 2))
    _, s = run_search(dg, 0, "dir")
    rep = compare_measured(ModelParams(e.n, e.num_input_edges, 2, 2), s.counters, s.sb,
                           s.bottomup_discovered, dg.ownership)
    table = rep.to_table().splitlines()
    assert table[0].split()[:3] == ["component", "regime", "measured"]
    assert len(table) == 2 + len(rep.rows)
    d = rep.to_dict()
    assert {r["regime"] for r in d["rows"]} == {"exact", "bound"}
    assert '"component"' in rep.to_json()
