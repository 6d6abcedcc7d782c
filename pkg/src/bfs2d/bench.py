"""Experiment driver: build a graph, run sampled searches, validate, report."""
from __future__ import annotations

import csv
import io
import itertools
import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .bfs import DEFAULT_ALPHA, DEFAULT_BETA, MODES, run_search, validate_tree
from .costmodel import ModelParams, compare_measured
from .errors import ConfigurationError, ContractViolation, ValidationFailure
from .graph import CSRMatrix, DCSCMatrix, EdgeList
from .grid import FORMATS, ProcGrid, distribute
from .netsim import BACKENDS
from .rmat import RmatParams, canonicalize, generate, ingest_edge_list

CSV_COLUMNS = ("source", "mode", "depth_levels", "sb", "edges_examined",
               "words_p2p", "words_ag", "words_a2a", "seconds", "teps")
EMITS = ("json", "csv")


@dataclass
class RunConfig:
    scale: int | None = 10
    degree: int = 16
    graph: str | None = None
    format: str = "text"
    pr: int = 1
    pc: int = 1
    mode: str = "dir"
    ds: str = "dcsc"
    num_sources: int = 16
    seed: int = 1
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    backend: str = "sequential"
    ranks: int | None = None
    out: str | None = None
    emit: str = "json"
    compare_model: bool = False
    memory_report: bool = False

    def __post_init__(self):
        if self.graph is None and self.scale is None:
            raise ConfigurationError("either an R-MAT scale or a graph file is required")
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}")
        if self.ds not in FORMATS:
            raise ConfigurationError(f"datastructure must be one of {FORMATS}")
        if self.emit not in EMITS:
            raise ConfigurationError(f"emit must be one of {EMITS}")
        if self.backend not in BACKENDS:
            raise ConfigurationError(f"backend must be one of {BACKENDS}")
        if self.num_sources < 1:
            raise ConfigurationError("num_sources must be >= 1")
        if self.pr < 1 or self.pc < 1:
            raise ConfigurationError("grid extents must be >= 1")
        if self.ranks is not None and self.ranks != self.pr * self.pc:
            raise ConfigurationError(f"grid {self.pr}x{self.pc} has {self.pr * self.pc} ranks, "
                                     f"but {self.ranks} were requested")

    @property
    def grid(self):
        return ProcGrid(self.pr, self.pc)


@dataclass
class RunReport:
    config: RunConfig
    n: int
    m: int
    searches: list
    verdicts: list
    teps: list
    hmean_teps: float
    model: list = field(default_factory=list)
    memory: dict | None = None

    def rows(self):
        for st, teps in zip(self.searches, self.teps):
            yield {
                "source": st.source, "mode": st.mode, "depth_levels": st.depth_levels, "sb": st.sb,
                "edges_examined": st.edges_examined, "words_p2p": st.words("p2p"),
                "words_ag": st.words("allgather"), "words_a2a": st.words("alltoall"),
                "seconds": st.seconds, "teps": teps,
            }

    def to_dict(self):
        cfg = asdict(self.config)
        cfg.pop("out")
        return {
            "config": cfg,
            "graph": {"n": self.n, "m": self.m},
            "hmean_teps": self.hmean_teps,
            "searches": [dict(st.to_dict(), teps=t, verdict=str(v))
                         for st, t, v in zip(self.searches, self.teps, self.verdicts)],
            "model": [r.to_dict() for r in self.model],
            "memory": self.memory,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in self.rows():
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
        return buf.getvalue()

    def render(self):
        return self.to_json() if self.config.emit == "json" else self.to_csv()


def _source_rng(seed):
    # counter word 2 keeps this stream apart from the generator's edge streams
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 2, 0]))


def sample_sources(g, count, seed):
    """``count`` distinct non-isolated vertices of ``g`` (EdgeList or DistributedGraph)."""
    eligible = g.non_isolated() if isinstance(g, EdgeList) else np.flatnonzero(g.eligible)
    if count > eligible.size:
        raise ConfigurationError(f"asked for {count} sources but only {eligible.size} vertices have edges")
    return [int(v) for v in _source_rng(seed).choice(eligible, size=count, replace=False)]


def harmonic_mean_teps(values):
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ContractViolation("harmonic mean of an empty list")
    if not np.all(values > 0):
        raise ContractViolation("TEPS values must be positive")
    return float(values.size / np.sum(1.0 / values))


def load_graph(cfg):
    """Canonical undirected edge list for ``cfg``."""
    if cfg.graph is not None:
        raw = ingest_edge_list(cfg.graph, cfg.format)
    else:
        raw = generate(RmatParams(cfg.scale, cfg.degree, seed=cfg.seed))
    return canonicalize(raw, undirected=True)


def _block_words(block, fmt):
    if fmt == block.fmt:
        return block.stored.index_words
    # both stored forms hold A[dst, src] over (row block, column block)
    r, c = block.stored.to_coo()
    cls = CSRMatrix if fmt == "csr" else DCSCMatrix
    return cls.from_coo(r, c, block.stored.local_rows, block.stored.local_cols).index_words


def memory_report(cfg, dg, both=True):
    """Index-array words per rank for the canonical copy of each local block.

    ``companion`` counts the transposed copy kept for the opposite traversal
    direction. With ``both`` the aggregate for the other format is included.
    """
    per_rank = {f"{i},{j}": dg.blocks[(i, j)].stored.index_words for i, j in dg.grid.coords()}
    out = {
        "datastructure": dg.fmt,
        "per_rank": per_rank,
        "aggregate": sum(per_rank.values()),
        "companion_aggregate": sum(b.companion.index_words for b in dg.blocks.values()),
    }
    if both:
        out["formats"] = {fmt: sum(_block_words(b, fmt) for b in dg.blocks.values()) for fmt in FORMATS}
    return out


def run_experiment(cfg, clock=time.perf_counter):
    """Run ``cfg.num_sources`` validated searches and collect the report.

    Raises :class:`ValidationFailure` on the first invalid tree, so a report
    never averages an unvalidated search.
    """
    e = load_graph(cfg)
    dg = distribute(e, cfg.grid, cfg.ds)
    m = e.num_input_edges
    sources = sample_sources(dg, cfg.num_sources, cfg.seed)
    searches, verdicts, teps, model = [], [], [], []
    for s in sources:
        parent, st = run_search(dg, s, cfg.mode, cfg.backend, cfg.alpha, cfg.beta, clock=clock)
        verdict = validate_tree(e, s, parent)
        if not verdict:
            raise ValidationFailure(verdict, s)
        if st.seconds <= 0:
            raise ContractViolation(f"search from {s} reported non-positive time {st.seconds}")
        searches.append(st)
        verdicts.append(verdict)
        teps.append(m / st.seconds)
        if cfg.compare_model:
            params = ModelParams(e.n, max(m, 1), cfg.pr, cfg.pc)
            model.append(compare_measured(params, st.counters, st.sb, st.bottomup_discovered,
                                          dg.ownership, nnz=len(e)))
    mem = memory_report(cfg, dg) if cfg.memory_report else None
    report = RunReport(cfg, e.n, m, searches, verdicts, teps, harmonic_mean_teps(teps), model, mem)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(report.render())
    return report


def logical_clock(step=1.0):
    """A clock that advances by ``step`` per reading, for reproducible timings."""
    ticks = itertools.count()
    return lambda: step * next(ticks)
