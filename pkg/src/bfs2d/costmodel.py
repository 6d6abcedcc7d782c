"""Closed-form communication model for the 2D top-down and bottom-up searches.

Word counts are 64-bit words. The closed forms assume every vertex and edge
lies in the traversed component and round bitmap sizes to ``n/64``; the
bottom-up rotate row also uses ``(p_c - 1)/p_c ~ 1``. The measured side makes
no such simplifications: :func:`dense_exact` recomputes the bitmap components
from the actual segment lengths, and :func:`compare_measured` checks those
exactly while treating the sparse, data-dependent components as bounds.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

from .errors import ConfigurationError

WORD_BITS = 64


@dataclass(frozen=True)
class ModelParams:
    n: float
    m: float
    p_r: int = 1
    p_c: int = 1
    s_b: float = 0
    k: float | None = None
    alpha_L: object = None
    beta_L: object = None
    alpha_N: object = None
    beta_N: object = None

    def __post_init__(self):
        if self.n <= 0:
            raise ConfigurationError("n must be positive")
        if self.m < 0 or self.s_b < 0:
            raise ConfigurationError("m and s_b must be non-negative")
        if self.p_r < 1 or self.p_c < 1:
            raise ConfigurationError("grid extents must be >= 1")
        if self.k is None:
            object.__setattr__(self, "k", self.m / self.n)
        elif abs(self.k * self.n - self.m) > max(1.0, 0.5 * self.n):
            raise ConfigurationError(f"k={self.k} inconsistent with m/n={self.m / self.n:.3f}")

    @classmethod
    def square(cls, k, p_c, s_b, n=1 << 20):
        """Parameters for a ``p_c x p_c`` grid with average degree ``k``."""
        return cls(n=n, m=k * n, p_r=p_c, p_c=p_c, s_b=s_b, k=k)

    @property
    def p(self):
        return self.p_r * self.p_c


def words_topdown(p):
    return 4 * p.m + p.n * p.p_r


def bottomup_breakdown(p):
    """Per-component words of a bottom-up search, keyed by traffic tag."""
    n, s = p.n, p.s_b
    return {
        "bu.transpose": s * n / WORD_BITS,
        "bu.gather": s * n * p.p_r / WORD_BITS,
        "bu.parents": 2 * n,
        "bu.rotate": s * n * p.p_c / WORD_BITS,
    }


def words_bottomup(p):
    return p.n * (p.s_b * (p.p_r + p.p_c + 1) / WORD_BITS + 2)


def ratio(p):
    """Top-down over bottom-up words on a square grid."""
    if p.p_r != p.p_c:
        raise ConfigurationError("the word ratio is defined for square grids (p_r == p_c)")
    return (p.p_c + 4 * p.k) / (p.s_b * (2 * p.p_c + 1) / WORD_BITS + 2)


def breakeven_sb(k, p_c):
    """Bottom-up steps at which both directions move the same volume."""
    if k <= 0 or p_c <= 0:
        raise ConfigurationError("k and p_c must be positive")
    return WORD_BITS * (p_c + 4 * k - 2) / (2 * p_c + 1)


def _const(value, name, *args):
    if value is None:
        raise ConfigurationError(f"cost constant {name} is required")
    return value(*args) if callable(value) else value


def topdown_cost_expressions(p):
    """Latency/bandwidth terms of one top-down search.

    ``alpha_L(size)`` and ``beta_L`` are the local memory latency (for a
    working set of ``size`` words) and streaming cost; ``alpha_N`` is the
    network latency and ``beta_N(collective, group)`` the per-word cost of
    ``"ag"`` or ``"a2a"`` over ``group`` ranks. Each may be a number or a
    callable taking those arguments.
    """
    n, m, q = p.n, p.m, p.p
    local = (m / q) * _const(p.beta_L, "beta_L") \
        + (n / q) * _const(p.alpha_L, "alpha_L", n / p.p_c) \
        + (m / q) * _const(p.alpha_L, "alpha_L", n / p.p_r)
    expand = p.p_r * _const(p.alpha_N, "alpha_N") + (n / p.p_c) * _const(p.beta_N, "beta_N", "ag", p.p_r)
    fold = p.p_c * _const(p.alpha_N, "alpha_N") + (m / q) * _const(p.beta_N, "beta_N", "a2a", p.p_c)
    return {"local": local, "expand": expand, "fold": fold}


def _words(bits):
    return -(-int(bits) // WORD_BITS)


def dense_exact(ownership, s_b, bu_discovered):
    """Exact bottom-up words given the real segment and piece lengths.

    A transposed segment travels as its intersections with the transposed
    pieces; each piece is delivered to all ``p_r`` members of its processor
    column; each completed-bitmap segment visits all ``p_c`` ranks of its row.
    """
    g = ownership.grid
    transpose = sum(_words(hi - lo) for _, _, lo, hi in ownership.transpose_pieces())
    pieces = sum(_words(hi - lo) for j in range(g.p_c) for k in range(g.p_r)
                 for lo, hi in [ownership.piece_range(k, j)])
    segments = sum(_words(hi - lo) for c in g.coords() for lo, hi in [ownership.segment_range(*c)])
    return {
        "bu.transpose": s_b * transpose,
        "bu.gather": s_b * g.p_r * pieces,
        "bu.parents": 2 * bu_discovered,
        "bu.rotate": s_b * g.p_c * segments,
    }


@dataclass
class ReportRow:
    component: str
    regime: str
    measured: int
    model: float
    reference: float
    ok: bool

    @property
    def ratio(self):
        return self.measured / self.model if self.model else math.nan


@dataclass
class ModelReport:
    params: ModelParams
    rows: list

    @property
    def ok(self):
        return all(r.ok for r in self.rows)

    def row(self, component):
        return next(r for r in self.rows if r.component == component)

    def to_dict(self):
        params = {k: v for k, v in asdict(self.params).items() if not callable(v)}
        return {
            "params": params,
            "ok": self.ok,
            "rows": [dict(asdict(r), ratio=None if math.isnan(r.ratio) else r.ratio) for r in self.rows],
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    def to_table(self):
        head = ("component", "regime", "measured", "model", "reference", "ratio", "ok")
        body = [
            (r.component, r.regime, str(r.measured), f"{r.model:.1f}", f"{r.reference:.1f}",
             "-" if math.isnan(r.ratio) else f"{r.ratio:.3f}", "yes" if r.ok else "NO")
            for r in self.rows
        ]
        widths = [max(len(x) for x in col) for col in zip(head, *body)]
        fmt = lambda cells: "  ".join(c.rjust(w) if i > 1 else c.ljust(w)
                                      for i, (c, w) in enumerate(zip(cells, widths)))
        return "\n".join([fmt(head), fmt(["-" * w for w in widths])] + [fmt(b) for b in body])


def compare_measured(params, counters, s_b, bu_discovered, ownership, nnz=None):
    """Line up measured traffic against the model.

    ``exact`` rows must equal the reference computed from real segment
    lengths. ``bound`` rows must not exceed it: the fold sends at most one
    (vertex, parent) pair per stored nonzero (``4m`` words for ``2m`` stored
    directions), the expand delivers each vertex to ``p_r`` ranks at most
    once, and the transpose moves each vertex at most once. The model column
    is the closed form evaluated at ``params`` with the actual ``s_b``.
    """
    nnz = 2 * params.m if nnz is None else nnz
    p = ModelParams(params.n, params.m, params.p_r, params.p_c, s_b, params.k)
    model = bottomup_breakdown(p)
    exact = dense_exact(ownership, s_b, bu_discovered)
    rows = []
    for tag in ("bu.transpose", "bu.gather", "bu.rotate", "bu.parents"):
        got = counters.tag_words(tag)
        rows.append(ReportRow(tag, "exact", got, model[tag], exact[tag], got == exact[tag]))
    bounds = {
        "td.transpose": (ownership.n, ownership.n),
        "td.expand": (params.n * params.p_r, ownership.n * params.p_r),
        "td.fold": (4 * params.m, 2 * nnz),
    }
    for tag, (mod, ref) in bounds.items():
        got = counters.tag_words(tag)
        rows.append(ReportRow(tag, "bound", got, mod, ref, got <= ref))
    return ModelReport(p, rows)
