"""Radix-sort time versus MST-enumeration time as one MST edge grows heavy.

A random graph gets a pendant vertex attached by a single bridge; raising the
bridge weight pushes t_last past b(2+|E|) and flips the faster Kruskal variant.
"""

import argparse

from neuromst.costmodel import bottleneck_advice
from neuromst.graph import Edge, Graph
from neuromst.graphio import gen_random_graph
from neuromst.mst import mst_pipe, mst_seq


def with_bridge(base: Graph, weight: int) -> Graph:
    n = base.num_vertices
    edges = list(base.edges) + [Edge(weight, 0, n, len(base.edges))]
    return Graph(n + 1, edges, f"{base.name}-bridge{weight}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--vertices", type=int, default=60)
    ap.add_argument("--edges", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    base = gen_random_graph(args.vertices, args.edges, (1, 100), args.seed)
    print("bridge,bits,radix_sort,t_last,margin,advice,pipe_time,seqradix_time,faster")
    for k in range(4, 21, 2):
        g = with_bridge(base, 1 << k)
        pipe, radix = mst_pipe(g), mst_seq(g, "radix")
        t_last = max(e.weight for e in pipe.edges)
        adv = bottleneck_advice(len(g.edges), radix.bits, t_last)
        faster = "pipe" if pipe.charged_time < radix.charged_time else "seq-radix"
        print(
            f"{1 << k},{radix.bits},{adv.radix_time},{t_last},{adv.margin},{adv.recommendation.value},"
            f"{pipe.charged_time},{radix.charged_time},{faster}"
        )


if __name__ == "__main__":
    main()
