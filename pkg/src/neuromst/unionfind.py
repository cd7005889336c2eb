"""Union-find as a spiking network with suspension-based rewiring.

Each vertex neuron owns one zero-delay parent synapse; roots point at
themselves.  A query drives both endpoints at once.  Spikes climb the parent
chains inside a single sub-step, and a root is recognised when its own
self-loop delivers to it while it is still refractory (the echo).  Paths are
recovered from the observed firing causes, so union by rank and path
compression operate on what the spikes actually visited.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .costmodel import inverse_ackermann
from .graph import Edge
from .substrate import Mod, Network, SpikeEvent, SubstrateError, Tag

__all__ = ["FindResult", "UnionFindNet", "uf_build", "query_energy_rule"]


@dataclass
class FindResult:
    u: int
    v: int
    roots: tuple[int, ...]  # in echo order
    paths: tuple[tuple[int, ...], ...]  # vertex chains from each endpoint to its root

    @property
    def count(self) -> int:
        return len(self.roots)


def query_energy_rule(query_synapses: set[int]):
    """Two spikes per query delivery into a vertex: the endpoint and its parent hop.

    Deeper traversal is covered by the per-query union charge and is not
    billed as energy.
    """

    def rule(net: Network, neuron: int, synapse: int, fired: bool) -> int:
        return 2 if synapse in query_synapses and net.tags[neuron] is Tag.UF_VERTEX else 0

    return rule


class UnionFindNet:
    """Vertex neurons plus parent synapses inside ``net``.

    With ``with_source`` a source neuron and two query synapses are added and
    queries are driven through :meth:`find`.  Without it (pipelined use) the
    caller wires its own drivers and hands observed events to :meth:`resolve`.
    """

    def __init__(self, num_vertices: int, net: Optional[Network] = None, with_source: bool = True):
        if isinstance(num_vertices, bool) or not isinstance(num_vertices, int) or num_vertices < 1:
            raise SubstrateError(f"union-find needs at least one vertex, got {num_vertices!r}")
        self.query_synapses: set[int] = set()
        self.net = net if net is not None else Network(energy_rule=query_energy_rule(self.query_synapses))
        self.n = num_vertices
        self.alpha = inverse_ackermann(num_vertices)
        self.vertex = list(self.net.add_neurons(num_vertices, 1, 0, Tag.UF_VERTEX))
        self._index = {nid: i for i, nid in enumerate(self.vertex)}
        self.parent_syn = list(self.net.add_synapses((nid, nid, 1, 0, 0) for nid in self.vertex))
        self.rank = [0] * num_vertices
        self.accepted = 0
        self.source: Optional[int] = None
        self.query_syn: tuple[int, ...] = ()
        if with_source:
            self.source = self.net.add_neuron(0, 0, Tag.SOURCE)
            # the first query synapse parks on the source itself when idle
            q0 = self.net.add_synapse(self.source, self.source, 1, 0)
            q1 = self.net.add_synapse(self.source, self.vertex[0], 1, 0)
            self.query_syn = (q0, q1)
            self.query_synapses.update(self.query_syn)
        self._last: Optional[FindResult] = None

    # -- structure ----------------------------------------------------------

    def parent(self, x: int) -> int:
        return self._index[self.net.post[self.parent_syn[x]]]

    def parents(self) -> list[int]:
        return [self.parent(x) for x in range(self.n)]

    def root_of(self, x: int) -> int:
        """Follow parent synapses structurally (used for checks, not queries)."""
        seen = 0
        while (p := self.parent(x)) != x:
            x = p
            seen += 1
            if seen > self.n:
                raise SubstrateError("parent synapses contain a cycle")
        return x

    def _check_vertex(self, x: int) -> None:
        if isinstance(x, bool) or not isinstance(x, int) or not 0 <= x < self.n:
            raise SubstrateError(f"invalid vertex {x!r}")

    # -- queries ------------------------------------------------------------

    def resolve(self, events: Iterable[SpikeEvent], endpoints: Sequence[int]) -> FindResult:
        """Turn one query's events into roots and visited paths."""
        cause: dict[int, int] = {}
        roots: list[int] = []
        index, pre_of, post_of, parent_syn = self._index.get, self.net.pre, self.net.post, self.parent_syn
        for ev in events:
            nid = ev.neuron
            x = index(nid)
            if x is None:
                continue
            sid = ev.synapse
            if ev.fired:
                cause[x] = index(pre_of[sid], -1) if sid >= 0 else -1
            elif ev.refractory and sid == parent_syn[x] and post_of[sid] == nid:
                roots.append(x)
        u, v = endpoints
        paths = []
        for r in roots:
            chain = [r]
            step = cause.get(r, -1)
            while step != -1 and step != chain[-1]:
                chain.append(step)
                step = cause.get(step, -1)
            paths.append(tuple(reversed(chain)))
        return FindResult(u, v, tuple(roots), tuple(paths))

    def find(self, u: int, v: int) -> FindResult:
        """Point the source at ``u`` and ``v``, fire it, and collect root echoes."""
        self._check_vertex(u)
        self._check_vertex(v)
        if self.source is None:
            raise SubstrateError("this union-find is driven externally; use resolve()")
        q0, q1 = self.query_syn
        first = self.source if u == v else self.vertex[u]
        self.net.rewire([Mod(q0, post=first), Mod(q1, post=self.vertex[v])], charge=2)
        events: list[SpikeEvent] = []
        self.net.inject(self.source, self.net.clock)
        self.net.run(events.append)
        result = self.resolve(events, (u, v))
        self._last = result
        return result

    def union(self, u: int, v: int) -> None:
        """Merge the sets of ``u`` and ``v`` (they must differ).

        Reuses the walk of the immediately preceding ``find(u, v)``; otherwise
        a fresh find is issued and charged.
        """
        last = self._last
        if last is None or {last.u, last.v} != {u, v}:
            last = self.find(u, v)
        self.commit_union(last)

    def commit_union(self, found: FindResult) -> None:
        """Union by rank (ties: smaller id wins) plus compression of both paths."""
        if found.count != 2:
            raise SubstrateError(f"vertices {found.u} and {found.v} are already in the same set")
        a, b = found.roots
        if self.rank[a] < self.rank[b] or (self.rank[a] == self.rank[b] and b < a):
            a, b = b, a
        if self.rank[a] == self.rank[b]:
            self.rank[a] += 1
        winner = self.vertex[a]
        mods = []
        for path in found.paths:
            for x in path:
                if x != a and self.net.post[self.parent_syn[x]] != winner:
                    mods.append(Mod(self.parent_syn[x], post=winner))
        self.net.rewire(mods, charge=self.alpha)
        self.accepted += 1
        self._last = None

    def settle(self, found: FindResult) -> bool:
        """Union if two roots were found; the suspension is charged either way."""
        if found.count == 2:
            self.commit_union(found)
            return True
        self.net.rewire([], charge=self.alpha)
        return False

    def query_edge(self, edge: Edge) -> bool:
        """One Kruskal step: find, then union when the endpoints differ.

        Every query is charged ``2 + alpha``, self-loops included.
        """
        return self.settle(self.find(edge.u, edge.v))


def uf_build(num_vertices: int) -> UnionFindNet:
    return UnionFindNet(num_vertices)
