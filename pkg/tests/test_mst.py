import itertools
import random

import networkx as nx
import pytest

from neuromst.costmodel import Algorithm, inverse_ackermann
from neuromst.graph import Edge, Graph, classical_kruskal
from neuromst.graphio import gen_random_graph
from neuromst.mst import (
    MstConfig,
    MstError,
    MultigraphError,
    deduplicate,
    mst_pipe,
    mst_prim,
    mst_seq,
    run_algorithm,
    verify_mst,
)
from neuromst.substrate import Network, Tag
from small_graphs import all_small_graphs

ALGOS = [a.value for a in Algorithm]
TRIANGLE = Graph.from_triples(3, [(1, 0, 1), (2, 1, 2), (3, 0, 2)], "triangle")


def brute_force_mst_weight(graph):
    best = None
    n = graph.num_vertices
    for subset in itertools.combinations(graph.edges, n - 1):
        g = nx.Graph()
        g.add_nodes_from(range(n))
        g.add_edges_from((e.u, e.v) for e in subset)
        if nx.is_tree(g):
            w = sum(e.weight for e in subset)
            best = w if best is None else min(best, w)
    return best


def test_triangle_brute_force():
    assert brute_force_mst_weight(TRIANGLE) == 3


@pytest.mark.parametrize(
    "algo, time, spikes, e_proc",
    [("prim", 3, 5, 0), ("seq-neuro", 9, 11, 2), ("seq-radix", 16, 14, 2), ("pipe", 8, 12, 2)],
)
def test_triangle_meters(algo, time, spikes, e_proc):
    r = run_algorithm(TRIANGLE, algo, MstConfig(bits=2))
    assert r.total_weight == 3
    assert sorted(e.weight for e in r.edges) == [1, 2]
    assert r.charged_time == time
    assert r.meter.spike_count == spikes
    assert r.edges_processed == e_proc
    assert r.prediction_match
    assert verify_mst(TRIANGLE, r) == (True, "ok")


def test_triangle_prim_run_steps():
    assert mst_prim(TRIANGLE).meter.run_steps == 3


def test_triangle_pipe_valid_steps():
    r = mst_pipe(TRIANGLE)
    assert r.extras["valid_steps"] == [(1, 1), (2, 1)]


def test_literal_prediction_is_an_upper_bound():
    r = mst_seq(TRIANGLE, "neuro")
    assert r.literal.time_steps == 12
    assert r.predicted.time_steps == 9


def test_single_edge():
    g = Graph.from_triples(2, [(7, 0, 1)])
    r = mst_prim(g)
    assert r.meter.run_steps == 7
    assert [e.weight for e in r.edges] == [7]
    for algo in ALGOS:
        assert run_algorithm(g, algo).total_weight == 7


def test_single_vertex():
    g = Graph(1, [])
    for algo in ALGOS:
        r = run_algorithm(g, algo)
        assert r.edges == [] and r.complete


def test_no_vertices():
    with pytest.raises(MstError):
        mst_prim(Graph(0, []))


def test_parallel_edges_rejected_by_prim():
    g = Graph(2, [Edge(1, 0, 1, 0), Edge(2, 0, 1, 1)])
    with pytest.raises(MultigraphError, match="multiple edges"):
        mst_prim(g)


def test_dedup_offsets():
    edges = [Edge(5, 0, 1, 0), Edge(3, 1, 2, 1), Edge(5, 2, 3, 2), Edge(5, 3, 0, 3)]
    effective = [eff for _, eff in deduplicate(edges)]
    assert [(e.base, e.offset) for e in effective] == [(5, 0), (3, 0), (5, 1), (5, 2)]
    assert len(set(effective)) == len(effective)
    distinct = [Edge(w, 0, 1, i) for i, w in enumerate([4, 2, 9])]
    assert all(eff.offset == 0 for _, eff in deduplicate(distinct))


def test_dedup_single_first_fire():
    # three equal weights from one vertex: exactly one neighbour fires first
    g = Graph.from_triples(4, [(2, 0, 1), (2, 0, 2), (2, 0, 3)])
    net = Network()
    vs = net.add_neurons(4, 1, 0, Tag.VALUE)
    net.add_synapses((vs[e.u], vs[e.v], 1, eff.base, eff.offset) for e, eff in deduplicate(g.edges))
    events = []
    net.inject(vs[0], 0)
    net.run(events.append)
    firsts = [ev for ev in events if ev.fired and ev.synapse >= 0]
    keys = [(ev.time, ev.rank) for ev in firsts]
    assert len(set(keys)) == len(keys) == 3
    assert firsts[0].neuron == vs[1]


def test_star_equal_weights():
    g = Graph.from_triples(6, [(4, 0, k) for k in range(1, 6)])
    r = mst_pipe(g)
    assert r.extras["valid_steps"] == [(4, 5)]
    assert r.total_weight == 20


def test_path_graph_processes_every_edge():
    g = Graph.from_triples(3, [(4, 0, 1), (4, 1, 2)])
    for algo in ("seq-neuro", "seq-radix", "pipe"):
        assert run_algorithm(g, algo).edges_processed == 2


def test_zero_weights():
    g = Graph.from_triples(3, [(0, 0, 1), (0, 1, 2), (5, 0, 2)])
    for algo in ALGOS:
        r = run_algorithm(g, algo)
        assert r.total_weight == 0 and r.prediction_match


def test_disconnected_forest():
    g = Graph.from_triples(5, [(3, 0, 1), (1, 1, 2), (2, 0, 2), (6, 3, 4)])
    oracle = classical_kruskal(g)
    for algo in ALGOS:
        r = run_algorithm(g, algo)
        assert not r.complete
        assert r.total_weight == oracle.total_weight == 9
        assert verify_mst(g, r)[0]
    assert mst_seq(g).edges_processed == 4
    with pytest.raises(MstError, match="disconnected"):
        mst_prim(g, MstConfig(forest=False))


def test_verify_detects_tampering():
    r = mst_seq(TRIANGLE)
    r.edges = [TRIANGLE.edges[0], TRIANGLE.edges[2]]
    r.total_weight = 4
    ok, why = verify_mst(TRIANGLE, r)
    assert not ok and "4" in why


def test_verify_detects_cycle_and_foreign_edges():
    r = mst_seq(TRIANGLE)
    r.edges = list(TRIANGLE.edges)
    assert not verify_mst(TRIANGLE, r)[0]
    r.edges = [Edge(1, 0, 1, 0), Edge(0, 1, 2, 1)]
    assert "not in the graph" in verify_mst(TRIANGLE, r)[1]


def test_prim_start_vertex_is_seeded():
    g = gen_random_graph(30, 60, (1, 50), 3)
    a = mst_prim(g, MstConfig(seed=11))
    b = mst_prim(g, MstConfig(seed=11))
    assert a.extras == b.extras and a.meter == b.meter


def test_exhaustive_up_to_four_vertices():
    for g in all_small_graphs(4):
        want = brute_force_mst_weight(g)
        for algo in ALGOS:
            r = run_algorithm(g, algo)
            assert r.total_weight == want, (g.edges, algo)
            assert r.prediction_match


def test_pipe_and_seq_neuro_submit_the_same_edges():
    for seed in range(15):
        g = gen_random_graph(25, 60, (1, 20), seed)
        pipe, seq = mst_pipe(g), mst_seq(g, "neuro")
        assert pipe.edges_processed == seq.edges_processed
        assert pipe.edges == seq.edges


def test_random_graphs_against_networkx():
    rng = random.Random(5)
    for seed in range(25):
        n = rng.randint(2, 40)
        m = rng.randint(n - 1, min(120, n * (n - 1) // 2))
        g = gen_random_graph(n, m, (0, 300), seed)
        nxg = nx.Graph()
        nxg.add_weighted_edges_from((e.u, e.v, e.weight) for e in g.edges)
        want = sum(d["weight"] for _, _, d in nx.minimum_spanning_edges(nxg, data=True))
        alpha = inverse_ackermann(n)
        oracle = classical_kruskal(g)
        for algo in ALGOS:
            r = run_algorithm(g, algo)
            assert r.total_weight == want
            assert r.prediction_match
        assert mst_prim(g).meter.run_steps == want
        pipe = mst_pipe(g)
        assert pipe.charged_time == oracle.t_last + (2 + alpha) * oracle.edges_processed
        assert pipe.charged_time <= mst_seq(g, "neuro").charged_time
