"""Benchmark harness: ``neuromst gen | run | compare | analyze``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .costmodel import Algorithm, bottleneck_advice
from .graph import Graph
from .graphio import (
    GraphInputError,
    gen_random_graph,
    graph_stats,
    load_matrix_market,
    parse_quantize,
    parse_weight_spec,
    write_matrix_market,
)
from .mst import MstConfig, MstError, MstReport, run_algorithm, verify_mst
from .substrate import MAX_STEPS_ENV, NonTerminationError, SubstrateError

SCHEMA = 1
EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_GUARD = 0, 2, 3, 4
CSV_COLUMNS = [
    "graph",
    "algo",
    "time",
    "neurons",
    "synapses",
    "spikes",
    "E_proc",
    "speedup_vs_prim",
    "pipe_over_seqradix",
    "error",
]
SCHEMA_NOTES = {
    "time": "charged logical steps: run steps plus charged structural steps",
    "neurons": "neurons excluding spike sources",
    "speedups": "ratios of charged time, rounded to 2 decimal places",
    "wall_clock_s": "host simulation time, informational only",
}
ALGO_ORDER = [a.value for a in Algorithm]


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    bits: Optional[int] = None
    weights: str = "from-values"
    quantize: Optional[str] = None


def _load(path: str, cfg: RunConfig) -> Graph:
    spec = parse_weight_spec(cfg.weights, cfg.seed)
    return load_matrix_market(path, spec, parse_quantize(cfg.quantize))


def _ratio(num: Optional[int], den: Optional[int]) -> Optional[float]:
    if num is None or den is None or den == 0:
        return None
    return round(num / den, 2)


def build_report(
    graph: Graph,
    algo: str,
    cfg: RunConfig,
    report: MstReport,
    wall: float,
    speedup: Optional[float] = None,
) -> dict:
    """Assemble a run report; key order is part of the schema."""
    ok, why = verify_mst(graph, report)
    bits = report.bits if report.bits is not None else cfg.bits
    return {
        "schema": SCHEMA,
        "graph": {"name": graph.name, "stats": graph_stats(graph).as_dict(), "notes": graph.notes},
        "algo": algo,
        "config": {"seed": cfg.seed, "bits": bits, "weights": cfg.weights, "quantize": cfg.quantize},
        "mst": {
            "edges": [[e.weight, e.u, e.v] for e in report.edges],
            "total_weight": report.total_weight,
            "complete": report.complete,
            "edges_processed": report.edges_processed,
        },
        "meter": report.meter.as_dict(),
        "predicted": None if report.predicted is None else report.predicted.as_dict(),
        "predicted_literal": None if report.literal is None else report.literal.as_dict(),
        "prediction_match": report.prediction_match,
        "verified": ok,
        "verify_message": why,
        "speedup_vs_prim": speedup,
        "wall_clock_s": round(wall, 6),
        "schema_notes": SCHEMA_NOTES,
    }


def _run_one(graph: Graph, algo: str, cfg: RunConfig) -> tuple[MstReport, float]:
    start = time.perf_counter()
    report = run_algorithm(graph, algo, MstConfig(seed=cfg.seed, bits=cfg.bits))
    return report, time.perf_counter() - start


def _emit(payload, dest: Optional[str]) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if dest is None or dest == "-":
        sys.stdout.write(text)
    else:
        Path(dest).write_text(text)


# -- subcommands -----------------------------------------------------------------


def cmd_gen(args) -> int:
    graph = gen_random_graph(args.vertices, args.edges, (args.wmin, args.wmax), args.seed)
    try:
        write_matrix_market(graph, args.out)
    except OSError as exc:
        raise GraphInputError(f"cannot write {args.out}: {exc}") from exc
    return EXIT_OK


def _config(args) -> RunConfig:
    return RunConfig(seed=args.seed, bits=args.bits, weights=args.weights, quantize=args.quantize)


def cmd_run(args) -> int:
    cfg = _config(args)
    graph = _load(args.input, cfg)
    report, wall = _run_one(graph, args.algo, cfg)
    speedup = 1.0 if args.algo == Algorithm.PRIM.value else None
    _emit(build_report(graph, args.algo, cfg, report, wall, speedup), args.json)
    return EXIT_OK


def _parse_algos(text: str) -> list[str]:
    algos = [a.strip() for a in text.split(",") if a.strip()]
    for a in algos:
        if a not in ALGO_ORDER:
            raise GraphInputError(f"unknown algorithm {a!r}; choose from {', '.join(ALGO_ORDER)}")
    return algos


def compare(inputs: Sequence[str], algos: Sequence[str], cfg: RunConfig, jobs: int = 1) -> tuple[str, list[dict]]:
    """Run every algorithm on every input; returns CSV text and JSON rows."""
    graphs = [_load(p, cfg) for p in inputs]
    tasks = [(gi, algo) for gi in range(len(graphs)) for algo in algos]

    def work(task):
        gi, algo = task
        try:
            return _run_one(graphs[gi], algo, cfg)
        except (MstError, SubstrateError, NonTerminationError) as exc:
            return exc

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        results = list(pool.map(work, tasks))
    by_key = dict(zip(tasks, results))

    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    rows: list[dict] = []
    for gi, graph in enumerate(graphs):
        times = {
            a: r[0].charged_time for (g, a), r in by_key.items() if g == gi and not isinstance(r, Exception)
        }
        for algo in algos:
            result = by_key[(gi, algo)]
            if isinstance(result, Exception):
                msg = f"{type(result).__name__}: {result}"
                writer.writerow([graph.name, algo, "", "", "", "", "", "", "", msg])
                rows.append({"schema": SCHEMA, "graph": graph.name, "algo": algo, "error": msg})
                continue
            report, wall = result
            speedup = _ratio(times.get("prim"), report.charged_time)
            pipe_ratio = _ratio(times.get("seq-radix"), report.charged_time) if algo == "pipe" else None
            m = report.meter
            writer.writerow(
                [
                    graph.name,
                    algo,
                    m.charged_time,
                    m.compute_neurons,
                    m.synapse_count,
                    m.spike_count,
                    report.edges_processed,
                    "" if speedup is None else f"{speedup:.2f}",
                    "" if pipe_ratio is None else f"{pipe_ratio:.2f}",
                    "",
                ]
            )
            payload = build_report(graph, algo, cfg, report, wall, speedup)
            payload["pipe_over_seqradix"] = pipe_ratio
            rows.append(payload)
    return out.getvalue(), rows


def cmd_compare(args) -> int:
    cfg = _config(args)
    text, rows = compare(args.input, _parse_algos(args.algos), cfg, args.jobs)
    if args.csv:
        Path(args.csv).write_text(text)
    if args.json:
        _emit(rows, args.json)
    if not args.csv and not args.json:
        sys.stdout.write(text)
    return EXIT_OK


def analyze(graph: Graph) -> dict:
    """Radix-sort time versus MST-enumeration time, with a recommendation."""
    stats = graph_stats(graph)
    out = {
        "schema": SCHEMA,
        "graph": graph.name,
        "num_vertices": stats.num_vertices,
        "num_edges": stats.num_edges,
        "bits": stats.bits,
        "components": stats.components,
    }
    if stats.t_last is not None:
        adv = bottleneck_advice(stats.num_edges, stats.bits, stats.t_last)
        out.update(
            radix_time=adv.radix_time,
            enumeration_time=adv.enumeration_time,
            margin=adv.margin,
            recommendation=adv.recommendation.value,
            rationale=adv.rationale,
        )
        return out
    whole = bottleneck_advice(stats.num_edges, stats.bits, stats.max_weight or 0)
    out.update(
        warning="graph is disconnected; MST enumeration runs to the heaviest edge and results are per component",
        radix_time=whole.radix_time,
        enumeration_time=whole.enumeration_time,
        margin=whole.margin,
        recommendation=whole.recommendation.value,
        rationale=whole.rationale,
        per_component=[],
    )
    for edges, t_last in zip(stats.component_edges, stats.component_t_last):
        adv = bottleneck_advice(edges, stats.bits, t_last)
        out["per_component"].append(
            {
                "num_edges": edges,
                "radix_time": adv.radix_time,
                "enumeration_time": t_last,
                "margin": adv.margin,
                "recommendation": adv.recommendation.value,
            }
        )
    return out


def cmd_analyze(args) -> int:
    cfg = RunConfig(seed=args.seed, weights=args.weights, quantize=args.quantize)
    result = analyze(_load(args.input, cfg))
    if "warning" in result:
        print(f"warning: {result['warning']}", file=sys.stderr)
    _emit(result, args.json)
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------


def _add_input_flags(p: argparse.ArgumentParser, many: bool = False) -> None:
    if many:
        p.add_argument("--input", "-i", nargs="+", required=True, help="Matrix Market files")
    else:
        p.add_argument("--input", "-i", required=True, help="Matrix Market file")
    p.add_argument("--weights", default="from-values", help="'from-values' or 'uniform:LO:HI'")
    p.add_argument("--quantize", default=None, help="for real-valued files: 'round' or 'scale:10^k'")
    p.add_argument("--seed", type=int, default=0, help="seed for synthetic weights and Prim's start vertex")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="neuromst", description=__doc__)
    parser.add_argument("--max-steps", type=int, default=None, help=f"logical-time guard per run (or ${MAX_STEPS_ENV})")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a seeded random connected graph")
    g.add_argument("--vertices", "-v", type=int, required=True)
    g.add_argument("--edges", "-e", type=int, required=True)
    g.add_argument("--wmin", type=int, default=1)
    g.add_argument("--wmax", type=int, default=100)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", "-o", required=True)
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run one algorithm and print a JSON report")
    r.add_argument("--algo", required=True, choices=ALGO_ORDER)
    _add_input_flags(r)
    r.add_argument("--bits", type=int, default=None, help="radix width (default: width of the max weight)")
    r.add_argument("--json", default=None, help="output path (default stdout)")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compare", help="run several algorithms and tabulate meters")
    _add_input_flags(c, many=True)
    c.add_argument("--algos", default=",".join(ALGO_ORDER))
    c.add_argument("--bits", type=int, default=None)
    c.add_argument("--csv", default=None)
    c.add_argument("--json", default=None)
    c.add_argument("--jobs", type=int, default=1)
    c.set_defaults(func=cmd_compare)

    a = sub.add_parser("analyze", help="radix sort vs MST enumeration bottleneck report")
    _add_input_flags(a)
    a.add_argument("--json", default=None)
    a.set_defaults(func=cmd_analyze)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    saved = os.environ.get(MAX_STEPS_ENV)
    if args.max_steps is not None:
        os.environ[MAX_STEPS_ENV] = str(args.max_steps)
    try:
        return args.func(args)
    except GraphInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NonTerminationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (MstError, SubstrateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    finally:
        # in-process callers must not inherit the guard
        if saved is None:
            os.environ.pop(MAX_STEPS_ENV, None)
        else:
            os.environ[MAX_STEPS_ENV] = saved


if __name__ == "__main__":
    sys.exit(main())
