import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bfs2d import EdgeList, ProcGrid, canonicalize, distribute
from bfs2d.bench import (
    CSV_COLUMNS, RunConfig, harmonic_mean_teps, logical_clock, memory_report, run_experiment,
    sample_sources,
)
from bfs2d.bfs import tree_levels
from bfs2d.errors import ConfigurationError, ContractViolation, ValidationFailure


def test_harmonic_mean():
    assert harmonic_mean_teps([2, 2]) == 2
    assert harmonic_mean_teps([1, 3]) == 1.5
    with pytest.raises(ContractViolation):
        harmonic_mean_teps([1, 0])
    with pytest.raises(ContractViolation):
        harmonic_mean_teps([-1])


@given(st.lists(st.floats(1e-3, 1e9), min_size=1, max_size=30))
def test_harmonic_mean_matches_formula(xs):
    want = len(xs) / sum(1 / x for x in xs)
    assert harmonic_mean_teps(xs) == pytest.approx(want, rel=1e-9)


def test_sample_sources():
    e = canonicalize(EdgeList.from_pairs([(2, 5)], 8))
    assert sample_sources(e, 1, 0)[0] in (2, 5)
    with pytest.raises(ConfigurationError):
        sample_sources(e, 3, 0)
    g = canonicalize(EdgeList.from_pairs([(v, v + 1) for v in range(0, 100, 2)], 200))
    eligible = set(g.non_isolated().tolist())
    for seed in range(1000):
        got = sample_sources(g, 16, seed)
        assert len(set(got)) == 16 and set(got) <= eligible
    assert sample_sources(g, 16, 5) == sample_sources(g, 16, 5)


def test_config_errors():
    with pytest.raises(ConfigurationError):
        RunConfig(pr=2, pc=2, ranks=3)
    with pytest.raises(ConfigurationError):
        RunConfig(num_sources=0)
    with pytest.raises(ConfigurationError):
        RunConfig(mode="sideways")
    with pytest.raises(ConfigurationError):
        RunConfig(scale=None)


def test_scale10_run():
    rep = run_experiment(RunConfig(scale=10, pr=2, pc=2, mode="dir", ds="dcsc", compare_model=True))
    assert len(rep.searches) == 16 and all(rep.verdicts)
    assert all(r.ok for r in rep.model)
    assert rep.hmean_teps > 0
    # TEPS counts input edges, not the (smaller) examined count
    for st_, t in zip(rep.searches, rep.teps):
        assert t == pytest.approx(rep.m / st_.seconds)


def test_triangle_file(tmp_path):
    path = tmp_path / "tri.txt"
    path.write_text("0 1\n1 2\n2 0\n")
    rep = run_experiment(RunConfig(graph=str(path), num_sources=1, seed=3))
    assert rep.m == 3 and np.isfinite(rep.hmean_teps)
    st_ = rep.searches[0]
    assert st_.depth_levels == 2
    assert rep.to_dict()["searches"][0]["verdict"] == "OK"


def test_validation_failure_aborts(monkeypatch):
    import bfs2d.bench as bench

    def broken(dg, s, *a, **k):
        parent, stats = real(dg, s, *a, **k)
        parent[parent != s] = -1
        return parent, stats

    real = bench.run_search
    monkeypatch.setattr(bench, "run_search", broken)
    with pytest.raises(ValidationFailure):
        run_experiment(RunConfig(scale=8, num_sources=2))


def test_outputs_deterministic_and_well_formed(tmp_path):
    out = tmp_path / "r.csv"
    cfg = RunConfig(scale=9, pr=2, pc=2, num_sources=4, emit="csv", out=str(out))
    a = run_experiment(cfg, clock=logical_clock()).render()
    b = run_experiment(cfg, clock=logical_clock()).render()
    assert a == b == out.read_text()
    rows = list(csv.DictReader(io.StringIO(a)))
    assert tuple(rows[0]) == CSV_COLUMNS and len(rows) == 4
    js = run_experiment(RunConfig(scale=9, num_sources=2, memory_report=True), clock=logical_clock()).to_json()
    assert json.loads(js)["memory"]["datastructure"] == "dcsc"


def test_memory_report_small_cases():
    e = canonicalize(EdgeList.from_pairs([(0, 1), (1, 2), (3, 4)], 6))
    m = len(e)
    csr = memory_report(None, distribute(e, ProcGrid(1, 1), "csr"))
    assert csr["aggregate"] == m + e.n + 1
    assert csr["formats"]["csr"] == csr["aggregate"]
    empty = EdgeList.from_pairs([], 10)
    for shape in [(1, 1), (2, 3)]:
        r = memory_report(None, distribute(empty, ProcGrid(*shape), "dcsc"))
        assert r["aggregate"] == shape[0] * shape[1]


def test_memory_report_both_formats_agree():
    e = canonicalize(EdgeList.from_pairs([(v, (3 * v + 1) % 40) for v in range(40)], 40))
    a = memory_report(None, distribute(e, ProcGrid(2, 3), "csr"))
    b = memory_report(None, distribute(e, ProcGrid(2, 3), "dcsc"))
    assert a["formats"] == b["formats"]
    assert a["aggregate"] == b["formats"]["csr"] and b["aggregate"] == a["formats"]["dcsc"]
