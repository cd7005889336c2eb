"""Spiking MST algorithms: Prim with offset deduplication, sequential Kruskal
(delay sort or radix sort, then union-find) and pipelined Kruskal.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Optional

from .costmodel import Algorithm, CostPrediction, MstInfo, Mode, predict
from .graph import DisjointSet, Edge, Graph, classical_kruskal, component_labels
from .sorters import neuro_radix_sort, neuro_sort
from .substrate import CostMeter, Mod, Network, SpikeEvent, SubstrateError, Tag
from .unionfind import UnionFindNet, query_energy_rule

__all__ = [
    "MstError",
    "MultigraphError",
    "Sorter",
    "MstConfig",
    "EffectiveWeight",
    "MstReport",
    "deduplicate",
    "mst_prim",
    "mst_seq",
    "mst_pipe",
    "run_algorithm",
    "verify_mst",
]


class MstError(ValueError):
    """An MST algorithm's precondition does not hold."""


class MultigraphError(MstError):
    pass


class Sorter(str, Enum):
    NEURO = "neuro"
    RADIX = "radix"


@dataclass(frozen=True)
class MstConfig:
    seed: int = 0  # Prim start vertex
    bits: Optional[int] = None  # radix width; defaults to the width of the max weight
    forest: bool = True  # Prim: restart in the next component instead of failing


class EffectiveWeight(NamedTuple):
    base: int
    offset: int  # position among equal base weights, by input index


@dataclass
class MstReport:
    algorithm: Algorithm
    edges: list[Edge]
    total_weight: int
    complete: bool
    edges_processed: int
    meter: CostMeter
    predicted: Optional[CostPrediction] = None
    literal: Optional[CostPrediction] = None
    prediction_match: Optional[bool] = None
    bits: Optional[int] = None
    extras: dict = field(default_factory=dict)

    @property
    def charged_time(self) -> int:
        return self.meter.charged_time


def deduplicate(edges: list[Edge]) -> list[tuple[Edge, EffectiveWeight]]:
    """Give equal weights distinct offsets in input order.

    ``(base, offset)`` orders exactly like ``base + offset / (|E| + 1)``.
    """
    seen: dict[int, int] = defaultdict(int)
    out = []
    for e in sorted(edges, key=lambda e: e.index):
        out.append((e, EffectiveWeight(e.weight, seen[e.weight])))
        seen[e.weight] += 1
    return out


def _require_vertices(graph: Graph) -> None:
    if graph.num_vertices < 1:
        raise MstError("graph has no vertices")


def _matches(pred: CostPrediction, meter: CostMeter) -> bool:
    return (
        pred.time_steps == meter.charged_time
        and pred.spikes == meter.spike_count
        and pred.neurons == meter.compute_neurons
        and pred.synapses == meter.synapse_count
    )


def _attach_predictions(report: MstReport, graph: Graph) -> MstReport:
    oracle = classical_kruskal(graph)
    if not oracle.complete and report.algorithm is Algorithm.PRIM:
        # the cost table describes spanning trees; no closed form for forests
        return report
    info = MstInfo(oracle.total_weight, oracle.t_last, oracle.edges_processed)
    args = (report.algorithm, graph.num_vertices, len(graph.edges), graph.max_weight, report.bits, info)
    report.predicted = predict(*args, mode=Mode.EXACT)
    report.literal = predict(*args, mode=Mode.LITERAL)
    report.prediction_match = _matches(report.predicted, report.meter)
    return report


# -- Prim ---------------------------------------------------------------------


def mst_prim(graph: Graph, config: MstConfig = MstConfig()) -> MstReport:
    """Prim by repeated restarts: all tree vertices fire, the first spike to
    reach a vertex outside the tree names the next edge, activity stops.

    One synapse per edge; when a vertex joins, its edges are turned to point
    away from the tree and edges that became internal are silenced (weight 0).
    That reorientation is not charged, matching the cost table, and shows up
    only in ``physical_mods``.
    """
    _require_vertices(graph)
    n = graph.num_vertices
    net = Network()
    vertex = net.add_neurons(n, 1, 0, Tag.VALUE)
    dedup = deduplicate(graph.edges)
    ends = [(min(e.u, e.v), max(e.u, e.v)) for e, _ in dedup]
    try:
        sids = net.add_synapses(
            (vertex[a], vertex[b], 1, eff.base, eff.offset) for (a, b), (_, eff) in zip(ends, dedup)
        )
    except SubstrateError as exc:
        raise MultigraphError(f"cannot operate on graphs with multiple edges: {exc}") from exc
    syn_edge: dict[int, Edge] = {}
    incident: list[list[int]] = [[] for _ in range(n)]
    for sid, (a, b), (e, _) in zip(sids, ends, dedup):
        syn_edge[sid] = e
        incident[a].append(sid)
        incident[b].append(sid)

    rng = random.Random(config.seed)
    start = rng.randrange(n)
    in_tree = [False] * n
    frontier = 0  # excitatory synapses leaving the tree
    chosen: list[Edge] = []
    order = sorted(range(n))

    outside = [True] * n  # indexed by neuron id; vertex neurons are 0..n-1

    def join(x: int) -> None:
        nonlocal frontier
        in_tree[x] = True
        outside[vertex[x]] = False
        mods = []
        for sid in incident[x]:
            e = syn_edge[sid]
            y = e.v if e.u == x else e.u
            if in_tree[y]:
                mods.append(Mod(sid, weight=0))
                frontier -= 1
            else:
                if net.pre[sid] != vertex[x]:
                    mods.append(Mod(sid, pre=vertex[x], post=vertex[y]))
                frontier += 1
        net.rewire(mods, charge=0)

    join(start)
    tree = [start]
    while len(tree) < n:
        if frontier == 0:
            if not config.forest:
                raise MstError("graph is disconnected; Prim cannot reach every vertex")
            nxt = next(x for x in order if not in_tree[x])
            join(nxt)
            tree.append(nxt)
            continue
        net.inject_many([vertex[x] for x in tree], net.clock, rank=0)
        ev = net.run(halt_on=outside)
        if ev is None:
            raise SubstrateError("Prim pass ended without reaching a new vertex")
        e = syn_edge[ev.synapse]
        chosen.append(e)
        net.reset_activity()
        join(ev.neuron)
        tree.append(ev.neuron)

    report = MstReport(
        Algorithm.PRIM,
        chosen,
        sum(e.weight for e in chosen),
        len(chosen) == n - 1,
        0,
        net.meter(),
        extras={"start_vertex": start},
    )
    return _attach_predictions(report, graph)


# -- sequential Kruskal ---------------------------------------------------------


def _default_bits(graph: Graph) -> int:
    return max(1, graph.max_weight.bit_length())


def mst_seq(graph: Graph, sorter: Sorter | str = Sorter.NEURO, config: MstConfig = MstConfig()) -> MstReport:
    """Sort every edge weight first, then feed edges to the union-find network."""
    _require_vertices(graph)
    sorter = Sorter(sorter)
    weights = [e.weight for e in graph.edges]
    bits = None
    if sorter is Sorter.NEURO:
        outcome = neuro_sort(weights)
        algorithm = Algorithm.SEQ_NEURO
    else:
        bits = config.bits if config.bits is not None else _default_bits(graph)
        outcome = neuro_radix_sort(weights, bits)
        algorithm = Algorithm.SEQ_RADIX

    uf = UnionFindNet(graph.num_vertices)
    need = graph.num_vertices - 1
    chosen: list[Edge] = []
    processed = 0
    for pos, i in enumerate(outcome.order, 1):
        if len(chosen) == need:
            break
        e = graph.edges[i]
        if uf.query_edge(e):
            chosen.append(e)
        processed = pos
    complete = len(chosen) == need
    report = MstReport(
        algorithm,
        chosen,
        sum(e.weight for e in chosen),
        complete,
        processed,
        outcome.meter + uf.net.meter(),
        bits=bits,
        extras={"sort_meter": outcome.meter.as_dict(), "union_find_meter": uf.net.meter().as_dict()},
    )
    return _attach_predictions(report, graph)


# -- pipelined Kruskal ----------------------------------------------------------


def mst_pipe(graph: Graph, config: MstConfig = MstConfig()) -> MstReport:
    """Sort kernel and union-find in one network, joined by per-edge pipes.

    Equal weights fire in successive sub-steps (offset ranks), so each firing
    kernel neuron configures its two pipes and submits one query before the
    next one fires.  The run stops as soon as the tree is complete.
    """
    _require_vertices(graph)
    n = graph.num_vertices
    pipes: set[int] = set()
    kernel_fire_spikes = 2  # one per pipe synapse driven
    uf_rule = query_energy_rule(pipes)

    def energy(net: Network, neuron: int, synapse: int, fired: bool) -> int:
        if fired and net.tags[neuron] is Tag.VALUE:
            return kernel_fire_spikes
        return uf_rule(net, neuron, synapse, fired)

    net = Network(energy_rule=energy)
    src = net.add_neuron(0, 0, Tag.SOURCE)
    dedup = deduplicate(graph.edges)
    kernel = net.add_neurons(len(dedup), 0, 0, Tag.VALUE)
    net.add_synapses((src, k, 1, eff.base, eff.offset) for k, (_, eff) in zip(kernel, dedup))
    uf = UnionFindNet(n, net=net, with_source=False)
    vertex = uf.vertex
    sids = net.add_synapses(
        spec for k, (e, _) in zip(kernel, dedup) for spec in ((k, vertex[e.u], 1, 0, 0), (k, vertex[e.v], 1, 0, 0))
    )
    pipes.update(sids)
    pipe_of = {k: (sids[2 * i], sids[2 * i + 1]) for i, k in enumerate(kernel)}
    edge_of = {k: e for k, (e, _) in zip(kernel, dedup)}

    need = n - 1
    chosen: list[Edge] = []
    submitted = 0
    valid_steps: list[list[int]] = []  # [t_j, s_j]

    def configure_pipes(ev: SpikeEvent):
        nonlocal submitted
        if ev.fired and ev.neuron in pipe_of:
            if valid_steps and valid_steps[-1][0] == ev.time:
                valid_steps[-1][1] += 1
            else:
                valid_steps.append([ev.time, 1])
            rank = valid_steps[-1][1] - 1
            a, b = pipe_of[ev.neuron]
            net.rewire([Mod(a, rank=rank), Mod(b, rank=rank)], charge=2)
            submitted += 1
        return False

    if need > 0:
        net.inject(src, 0)
    while need > 0 and net.pending:
        events = net.advance(configure_pipes)
        kernels = [ev for ev in events if ev.fired and ev.neuron in pipe_of]
        if not kernels:
            continue
        (kev,) = kernels
        e = edge_of[kev.neuron]
        if uf.settle(uf.resolve(events, (e.u, e.v))):
            chosen.append(e)
            if len(chosen) == need:
                net.reset_activity()
                break

    report = MstReport(
        Algorithm.PIPE,
        chosen,
        sum(e.weight for e in chosen),
        len(chosen) == need,
        submitted,
        net.meter(),
        extras={"valid_steps": [tuple(s) for s in valid_steps], "t_end": net.clock},
    )
    return _attach_predictions(report, graph)


def run_algorithm(graph: Graph, algorithm: Algorithm | str, config: MstConfig = MstConfig()) -> MstReport:
    algorithm = Algorithm(algorithm)
    if algorithm is Algorithm.PRIM:
        return mst_prim(graph, config)
    if algorithm is Algorithm.SEQ_NEURO:
        return mst_seq(graph, Sorter.NEURO, config)
    if algorithm is Algorithm.SEQ_RADIX:
        return mst_seq(graph, Sorter.RADIX, config)
    return mst_pipe(graph, config)


# -- verification -----------------------------------------------------------------


def verify_mst(graph: Graph, report: MstReport) -> tuple[bool, str]:
    """Check a report against classical Kruskal.

    Accepts any minimum spanning forest: edges must come from the graph, be
    acyclic, span every component, and share the oracle's weight multiset.
    """
    oracle = classical_kruskal(graph)
    known = set(graph.edges)
    dsu = DisjointSet(graph.num_vertices)
    for e in report.edges:
        if e not in known:
            return False, f"edge {e} is not in the graph"
        if not dsu.union(e.u, e.v):
            return False, f"edge {e} closes a cycle"
    labels = component_labels(graph)
    for x in range(graph.num_vertices):
        if dsu.find(x) != dsu.find(labels[x]):
            return False, f"vertex {x} is not connected to its component"
    total = sum(e.weight for e in report.edges)
    if total != report.total_weight:
        return False, f"reported weight {report.total_weight} != sum of edges {total}"
    if total != oracle.total_weight:
        return False, f"weight {total} != oracle weight {oracle.total_weight}"
    if sorted(e.weight for e in report.edges) != sorted(e.weight for e in oracle.edges):
        return False, "weight multiset differs from the oracle's"
    if report.complete != oracle.complete:
        return False, f"complete={report.complete} but the oracle says {oracle.complete}"
    return True, "ok"
