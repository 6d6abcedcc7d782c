"""Compare edges examined and words moved by td, bu and dir searches."""
import argparse

import numpy as np

from bfs2d import ProcGrid, distribute
from bfs2d.bench import RunConfig, load_graph, sample_sources
from bfs2d.bfs import run_search


def hmean(xs):
    return len(xs) / sum(1.0 / x for x in xs)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--scale", type=int, default=14)
    ap.add_argument("--pr", type=int, default=4)
    ap.add_argument("--pc", type=int, default=4)
    ap.add_argument("--sources", type=int, default=16)
    ap.add_argument("--ds", default="dcsc")
    args = ap.parse_args()

    e = load_graph(RunConfig(scale=args.scale))
    dg = distribute(e, ProcGrid(args.pr, args.pc), args.ds)
    srcs = sample_sources(dg, args.sources, 1)
    base = None
    for mode in ("td", "bu", "dir"):
        stats = [run_search(dg, s, mode)[1] for s in srcs]
        ex = hmean([st.edges_examined for st in stats])
        words = np.mean([st.counters.words() for st in stats])
        sb = np.mean([st.sb for st in stats])
        base = base or ex
        print(f"{mode:>3}: examined {ex:12.0f} ({ex / base:6.3f} of td)  words {words:12.0f}  mean s_b {sb:.2f}")


if __name__ == "__main__":
    main()
