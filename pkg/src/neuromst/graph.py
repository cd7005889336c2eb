"""Undirected weighted graphs and the classical (non-spiking) MST oracle."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

__all__ = ["Edge", "Graph", "ClassicalMst", "DisjointSet", "classical_kruskal", "component_labels"]


class Edge(NamedTuple):
    weight: int
    u: int
    v: int
    index: int = 0


@dataclass
class Graph:
    num_vertices: int
    edges: list[Edge] = field(default_factory=list)
    name: str = "graph"
    # ingestion notes (self-loops dropped, duplicates collapsed, weight provenance)
    notes: dict = field(default_factory=dict)

    @classmethod
    def from_triples(cls, num_vertices: int, triples, name: str = "graph") -> "Graph":
        """Build from ``(weight, u, v)`` triples; input position becomes the edge index."""
        edges = [Edge(int(w), int(u), int(v), i) for i, (w, u, v) in enumerate(triples)]
        g = cls(num_vertices, edges, name)
        g.validate()
        return g

    def validate(self) -> None:
        if self.num_vertices < 0:
            raise ValueError("vertex count must be non-negative")
        for i, e in enumerate(self.edges):
            if e.index != i:
                raise ValueError(f"edge {i} carries index {e.index}")
            if not (0 <= e.u < self.num_vertices and 0 <= e.v < self.num_vertices):
                raise ValueError(f"edge {e} has an endpoint outside 0..{self.num_vertices - 1}")
            if e.u == e.v:
                raise ValueError(f"self-loop {e} is not allowed")
            if isinstance(e.weight, bool) or not isinstance(e.weight, int) or e.weight < 0:
                raise ValueError(f"edge {e} needs a whole-number weight")

    @property
    def max_weight(self) -> int:
        return max((e.weight for e in self.edges), default=0)

    def is_simple(self) -> bool:
        seen = set()
        for e in self.edges:
            key = (min(e.u, e.v), max(e.u, e.v))
            if key in seen:
                return False
            seen.add(key)
        return True


class DisjointSet:
    """Array-based union-find with union by rank and full path compression."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        elif self.rank[ra] == self.rank[rb]:
            if rb < ra:
                ra, rb = rb, ra
            self.rank[ra] += 1
        self.parent[rb] = ra
        return True


class ClassicalMst(NamedTuple):
    edges: list[Edge]
    total_weight: int
    complete: bool
    edges_processed: int  # 1-based sorted position of the last accepted edge, |E| if incomplete
    t_last: int  # heaviest accepted weight (max weight overall when incomplete)
    components: int


def classical_kruskal(graph: Graph) -> ClassicalMst:
    """Kruskal over edges stably sorted by weight (ties by input index)."""
    n = graph.num_vertices
    order = sorted(graph.edges, key=lambda e: (e.weight, e.index))
    dsu = DisjointSet(n)
    need = max(n - 1, 0)
    chosen: list[Edge] = []
    processed = 0
    for pos, e in enumerate(order, 1):
        if len(chosen) == need:
            break
        if dsu.union(e.u, e.v):
            chosen.append(e)
            processed = pos
    complete = len(chosen) == need
    if not complete:
        processed = len(order)
        t_last = graph.max_weight
    else:
        t_last = max((e.weight for e in chosen), default=0)
    return ClassicalMst(chosen, sum(e.weight for e in chosen), complete, processed, t_last, n - len(chosen))


def component_labels(graph: Graph) -> list[int]:
    """Smallest vertex id of each vertex's component."""
    dsu = DisjointSet(graph.num_vertices)
    for e in graph.edges:
        dsu.union(e.u, e.v)
    smallest: dict[int, int] = {}
    for x in range(graph.num_vertices):
        r = dsu.find(x)
        smallest.setdefault(r, x)
    return [smallest[dsu.find(x)] for x in range(graph.num_vertices)]
