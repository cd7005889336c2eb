"""Pipe versus Prim on large sparse random graphs.

Prim is costed by its exact cost row (sum of MST weights), which the test
suite checks against simulated Prim on smaller graphs; simulating Prim here
would replay roughly |V|^2 / 2 spikes.
"""

import argparse
import statistics

from neuromst.graph import classical_kruskal
from neuromst.graphio import gen_random_graph
from neuromst.mst import mst_pipe, mst_seq


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--vertices", type=int, default=10_000)
    ap.add_argument("--edges", type=int, default=25_000)
    ap.add_argument("--wmin", type=int, default=9)
    ap.add_argument("--wmax", type=int, default=10**6)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--radix", action="store_true", help="also simulate the radix-sequential variant")
    args = ap.parse_args()

    print("seed,prim_time,pipe_time,speedup" + (",radix_time,radix_over_pipe" if args.radix else ""))
    speedups = []
    for seed in range(args.seeds):
        g = gen_random_graph(args.vertices, args.edges, (args.wmin, args.wmax), seed)
        prim_time = classical_kruskal(g).total_weight
        pipe = mst_pipe(g)
        speedup = prim_time / pipe.charged_time
        speedups.append(speedup)
        row = f"{seed},{prim_time},{pipe.charged_time},{speedup:.2f}"
        if args.radix:
            radix = mst_seq(g, "radix")
            row += f",{radix.charged_time},{radix.charged_time / pipe.charged_time:.3f}"
        print(row, flush=True)
    print(f"# median speedup {statistics.median(speedups):.2f}x, min {min(speedups):.2f}x")


if __name__ == "__main__":
    main()
