"""Event-driven spiking-network simulator with cost metering for MST algorithms."""

from .costmodel import Algorithm, CostPrediction, bottleneck_advice, inverse_ackermann, predict
from .graph import Edge, Graph, classical_kruskal
from .graphio import gen_random_graph, graph_stats, load_matrix_market, write_matrix_market
from .mst import MstConfig, MstReport, deduplicate, mst_pipe, mst_prim, mst_seq, run_algorithm, verify_mst
from .sorters import get_max_bit_count, neuro_radix_sort, neuro_sort
from .substrate import CostMeter, Mod, Network, network_new
from .unionfind import UnionFindNet, uf_build

__version__ = "0.1.0"

__all__ = [
    "Algorithm",
    "CostMeter",
    "CostPrediction",
    "Edge",
    "Graph",
    "Mod",
    "MstConfig",
    "MstReport",
    "Network",
    "UnionFindNet",
    "bottleneck_advice",
    "classical_kruskal",
    "deduplicate",
    "gen_random_graph",
    "get_max_bit_count",
    "graph_stats",
    "inverse_ackermann",
    "load_matrix_market",
    "mst_pipe",
    "mst_prim",
    "mst_seq",
    "network_new",
    "neuro_radix_sort",
    "neuro_sort",
    "predict",
    "run_algorithm",
    "uf_build",
    "verify_mst",
    "write_matrix_market",
]
