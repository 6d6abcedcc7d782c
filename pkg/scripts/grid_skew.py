"""Sweep grid shapes at a fixed rank count and report traffic per component.

    python3 scripts/grid_skew.py --scale 12 --ranks 16 --mode dir
"""
import argparse

from bfs2d import ProcGrid, distribute
from bfs2d.bench import RunConfig, load_graph, sample_sources
from bfs2d.bfs import run_search
from bfs2d.netsim import KINDS


def shapes(p):
    return [(r, p // r) for r in range(1, p + 1) if p % r == 0]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--scale", type=int, default=12)
    ap.add_argument("--ranks", type=int, default=16)
    ap.add_argument("--mode", default="dir")
    ap.add_argument("--sources", type=int, default=4)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    e = load_graph(RunConfig(scale=args.scale, seed=args.seed))
    srcs = sample_sources(e, args.sources, args.seed)
    print("shape   " + "".join(f"{k:>12}" for k in KINDS) + f"{'examined':>12}")
    for pr, pc in shapes(args.ranks):
        dg = distribute(e, ProcGrid(pr, pc))
        tot = dict.fromkeys(KINDS, 0)
        examined = 0
        for s in srcs:
            _, st = run_search(dg, s, args.mode)
            for k in KINDS:
                tot[k] += st.words(k)
            examined += st.edges_examined
        print(f"{pr:>2}x{pc:<4} " + "".join(f"{tot[k] // len(srcs):>12}" for k in KINDS)
              + f"{examined // len(srcs):>12}")


if __name__ == "__main__":
    main()
