"""Run the seeded random correctness suite and report mismatches and timing."""

import argparse
import random
import time

from neuromst.graphio import gen_random_graph
from neuromst.mst import run_algorithm, verify_mst

ALGOS = ("prim", "seq-neuro", "seq-radix", "pipe")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--graphs", type=int, default=1000)
    ap.add_argument("--max-vertices", type=int, default=200)
    ap.add_argument("--max-edges", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    spent = dict.fromkeys(ALGOS, 0.0)
    bad = 0
    start = time.perf_counter()
    for i in range(args.graphs):
        n = rng.randint(1, args.max_vertices)
        m = rng.randint(n - 1, min(args.max_edges, n * (n - 1) // 2))
        g = gen_random_graph(n, m, (0, 10**4), seed=i)
        for algo in ALGOS:
            t = time.perf_counter()
            report = run_algorithm(g, algo)
            spent[algo] += time.perf_counter() - t
            ok, why = verify_mst(g, report)
            if not ok or not report.prediction_match:
                bad += 1
                print(f"graph {i} {algo}: {why}; prediction_match={report.prediction_match}")
    total = time.perf_counter() - start
    print(f"{args.graphs} graphs, {bad} bad runs, {total:.1f}s total")
    print("  " + ", ".join(f"{a} {s:.1f}s" for a, s in spent.items()))


if __name__ == "__main__":
    main()
