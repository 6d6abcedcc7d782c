"""Command-line front end: ``bfs2d-bench`` / ``python3 -m bfs2d``."""
import argparse
import sys
import time

from .bench import EMITS, RunConfig, logical_clock, run_experiment
from .bfs import DEFAULT_ALPHA, DEFAULT_BETA, MODES
from .errors import ConfigurationError, ValidationFailure
from .grid import FORMATS
from .netsim import BACKENDS


def build_parser():
    ap = argparse.ArgumentParser(prog="bfs2d-bench", description="Run validated 2D BFS searches on a simulated grid.")
    g = ap.add_argument_group("graph")
    g.add_argument("--scale", type=int, default=10, help="R-MAT scale (log2 of vertex count)")
    g.add_argument("--degree", type=int, default=16, help="R-MAT edges per vertex")
    g.add_argument("--graph", help="edge-list file to ingest instead of generating R-MAT")
    g.add_argument("--format", choices=("text", "binary"), default="text")
    r = ap.add_argument_group("run")
    r.add_argument("--pr", type=int, default=1)
    r.add_argument("--pc", type=int, default=1)
    r.add_argument("--ranks", type=int, help="expected rank count; must equal pr*pc")
    r.add_argument("--mode", choices=MODES, default="dir")
    r.add_argument("--ds", choices=FORMATS, default="dcsc")
    r.add_argument("--sources", type=int, default=16)
    r.add_argument("--seed", type=int, default=1)
    r.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    r.add_argument("--beta", type=float, default=DEFAULT_BETA)
    r.add_argument("--backend", choices=BACKENDS, default="sequential")
    r.add_argument("--clock", choices=("wall", "logical"), default="wall",
                   help="'logical' counts one unit per search, making output byte-reproducible")
    o = ap.add_argument_group("output")
    o.add_argument("--out", help="write the report here instead of stdout")
    o.add_argument("--emit", choices=EMITS, default="json")
    o.add_argument("--compare-model", action="store_true")
    o.add_argument("--memory-report", action="store_true")
    return ap


def config_from_args(args):
    return RunConfig(
        scale=args.scale, degree=args.degree, graph=args.graph, format=args.format,
        pr=args.pr, pc=args.pc, mode=args.mode, ds=args.ds, num_sources=args.sources,
        seed=args.seed, alpha=args.alpha, beta=args.beta, backend=args.backend,
        ranks=args.ranks, out=args.out, emit=args.emit,
        compare_model=args.compare_model, memory_report=args.memory_report,
    )


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        clock = logical_clock() if args.clock == "logical" else time.perf_counter
        report = run_experiment(cfg, clock=clock)
    except ValidationFailure as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return 2
    except (ConfigurationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if cfg.out is None:
        sys.stdout.write(report.render())
    if cfg.compare_model:
        for st, rep in zip(report.searches, report.model):
            print(f"# source {st.source}, s_b={st.sb}", file=sys.stderr)
            print(rep.to_table(), file=sys.stderr)
    print(f"# harmonic-mean TEPS {report.hmean_teps:.4g} over {len(report.searches)} validated searches",
          file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
