"""Matrix Market ingestion, weight synthesis, random graphs and graph stats."""

from __future__ import annotations

import random
import re
from dataclasses import asdict, dataclass
from decimal import ROUND_HALF_UP, Decimal, InvalidOperation
from pathlib import Path
from typing import Optional, Union

from .graph import Edge, Graph, classical_kruskal, component_labels

__all__ = [
    "GraphInputError",
    "WeightSpec",
    "Quantize",
    "GraphStats",
    "parse_weight_spec",
    "parse_quantize",
    "load_matrix_market",
    "write_matrix_market",
    "synthesize_weights",
    "gen_random_graph",
    "graph_stats",
]


class GraphInputError(ValueError):
    """Malformed or unsupported graph input."""


@dataclass(frozen=True)
class WeightSpec:
    """``from-values`` or seeded uniform synthesis over ``[low, high]``."""

    mode: str = "from-values"
    low: int = 1
    high: int = 1
    seed: int = 0

    def label(self) -> str:
        if self.mode == "from-values":
            return "from-values"
        return f"uniform:{self.low}:{self.high} (seed {self.seed})"


@dataclass(frozen=True)
class Quantize:
    mode: str = "round"  # or "scale"
    exponent: int = 0


def parse_weight_spec(text: str, seed: int = 0) -> WeightSpec:
    """``from-values`` or ``uniform:LO:HI``."""
    if text == "from-values":
        return WeightSpec()
    m = re.fullmatch(r"uniform:(\d+):(\d+)", text)
    if not m:
        raise GraphInputError(f"bad weight spec {text!r}; use 'from-values' or 'uniform:LO:HI'")
    low, high = int(m.group(1)), int(m.group(2))
    if low > high:
        raise GraphInputError(f"empty weight range {low}..{high}")
    return WeightSpec("uniform", low, high, seed)


def parse_quantize(text: Optional[str]) -> Optional[Quantize]:
    """``round``, ``scale:10^k`` or ``scale:1000``-style powers of ten."""
    if text is None:
        return None
    if text == "round":
        return Quantize("round", 0)
    m = re.fullmatch(r"scale:10\^(\d+)", text)
    if m:
        return Quantize("scale", int(m.group(1)))
    m = re.fullmatch(r"scale:1(0*)", text)
    if m:
        return Quantize("scale", len(m.group(1)))
    raise GraphInputError(f"bad quantization {text!r}; use 'round' or 'scale:10^k'")


def _quantized(token: str, q: Quantize) -> int:
    try:
        value = Decimal(token) * (Decimal(10) ** q.exponent)
    except InvalidOperation as exc:
        raise GraphInputError(f"not a number: {token!r}") from exc
    return int(value.quantize(Decimal(1), rounding=ROUND_HALF_UP))


_HEADER = re.compile(
    r"%%MatrixMarket\s+matrix\s+coordinate\s+(pattern|integer|real)\s+(symmetric|general)\s*$",
    re.IGNORECASE,
)


def load_matrix_market(
    path: Union[str, Path],
    weights: WeightSpec = WeightSpec(),
    quantize: Optional[Quantize] = None,
) -> Graph:
    """Read a coordinate Matrix Market file as a simple undirected graph.

    Self-loops are dropped and repeated vertex pairs keep their minimum
    weight; both are counted in ``graph.notes``.  In ``general`` files only
    the lower triangle is kept.
    """
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise GraphInputError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise GraphInputError(f"{path}: empty file")
    header = _HEADER.match(lines[0].strip())
    if not header:
        raise GraphInputError(f"{path}: unsupported header {lines[0]!r}")
    field, symmetry = header.group(1).lower(), header.group(2).lower()
    if weights.mode == "from-values" and field == "pattern":
        raise GraphInputError(f"{path}: pattern file has no values; synthesize weights instead")
    if weights.mode == "from-values" and field == "real" and quantize is None:
        raise GraphInputError(f"{path}: real-valued weights need a quantization flag (round | scale:10^k)")

    body = [ln for ln in lines[1:] if ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise GraphInputError(f"{path}: missing size line")
    try:
        rows, cols, nnz = (int(x) for x in body[0].split())
    except ValueError as exc:
        raise GraphInputError(f"{path}: bad size line {body[0]!r}") from exc
    if rows != cols:
        raise GraphInputError(f"{path}: adjacency matrix must be square, got {rows}x{cols}")
    if len(body) - 1 != nnz:
        raise GraphInputError(f"{path}: header promises {nnz} entries, found {len(body) - 1}")

    best: dict[tuple[int, int], int] = {}
    order: list[tuple[int, int]] = []
    self_loops = duplicates = upper_dropped = 0
    for ln in body[1:]:
        parts = ln.split()
        want = 2 if field == "pattern" else 3
        if len(parts) < want:
            raise GraphInputError(f"{path}: bad entry {ln!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise GraphInputError(f"{path}: bad indices in {ln!r}") from exc
        if not (1 <= i <= rows and 1 <= j <= cols):
            raise GraphInputError(f"{path}: index out of range in {ln!r}")
        w = 0
        if weights.mode == "from-values":
            token = parts[2]
            if field == "integer":
                try:
                    w = int(token)
                except ValueError as exc:
                    raise GraphInputError(f"{path}: non-integer weight in {ln!r}") from exc
            else:
                w = _quantized(token, quantize)
            if w < 0:
                raise GraphInputError(f"{path}: negative weight in {ln!r}")
        if i == j:
            self_loops += 1
            continue
        if i < j:
            if symmetry == "general":
                upper_dropped += 1
                continue
            i, j = j, i
        key = (j - 1, i - 1)
        if key in best:
            duplicates += 1
            best[key] = min(best[key], w)
        else:
            best[key] = w
            order.append(key)

    edges = [Edge(best[k], k[0], k[1], idx) for idx, k in enumerate(order)]
    graph = Graph(rows, edges, path.stem)
    if weights.mode != "from-values":
        graph = synthesize_weights(graph, weights)
    graph.notes.update(
        self_loops_dropped=self_loops,
        duplicates_collapsed=duplicates,
        upper_triangle_dropped=upper_dropped,
        weights=weights.label(),
        quantize=None if quantize is None else asdict(quantize),
    )
    return graph


def synthesize_weights(graph: Graph, spec: WeightSpec) -> Graph:
    """Replace weights by seeded uniform draws, in edge-index order."""
    rng = random.Random(spec.seed)
    edges = [e._replace(weight=rng.randint(spec.low, spec.high)) for e in graph.edges]
    return Graph(graph.num_vertices, edges, graph.name, dict(graph.notes, weights=spec.label()))


def write_matrix_market(graph: Graph, path: Union[str, Path]) -> None:
    """Write ``coordinate integer symmetric`` with one lower-triangle entry per edge."""
    lines = [
        "%%MatrixMarket matrix coordinate integer symmetric",
        f"{graph.num_vertices} {graph.num_vertices} {len(graph.edges)}",
    ]
    for e in graph.edges:
        hi, lo = max(e.u, e.v), min(e.u, e.v)
        lines.append(f"{hi + 1} {lo + 1} {e.weight}")
    Path(path).write_text("\n".join(lines) + "\n")


def gen_random_graph(n: int, m: int, weight_range: tuple[int, int] = (1, 100), seed: int = 0) -> Graph:
    """Connected simple graph: random spanning tree, then distinct extra edges."""
    if n < 1:
        raise GraphInputError(f"need at least one vertex, got {n}")
    max_m = n * (n - 1) // 2
    if not n - 1 <= m <= max_m:
        raise GraphInputError(f"{m} edges is infeasible for a connected simple graph on {n} vertices")
    low, high = weight_range
    if low < 0 or low > high:
        raise GraphInputError(f"bad weight range {weight_range}")
    rng = random.Random(seed)
    perm = list(range(n))
    rng.shuffle(perm)
    pairs: list[tuple[int, int]] = []
    used: set[tuple[int, int]] = set()
    for i in range(1, n):
        a, b = perm[i], perm[rng.randrange(i)]
        key = (min(a, b), max(a, b))
        used.add(key)
        pairs.append(key)
    extra = m - (n - 1)
    if extra > (max_m - (n - 1)) // 2:
        pool = [(a, b) for a in range(n) for b in range(a + 1, n) if (a, b) not in used]
        pairs.extend(rng.sample(pool, extra))
    else:
        while extra:
            a, b = rng.randrange(n), rng.randrange(n)
            key = (min(a, b), max(a, b))
            if a == b or key in used:
                continue
            used.add(key)
            pairs.append(key)
            extra -= 1
    rng.shuffle(pairs)
    edges = [Edge(rng.randint(low, high), a, b, i) for i, (a, b) in enumerate(pairs)]
    return Graph(n, edges, f"random-n{n}-m{m}-s{seed}", {"weights": f"uniform:{low}:{high} (seed {seed})"})


@dataclass(frozen=True)
class GraphStats:
    num_vertices: int
    num_edges: int
    min_weight: Optional[int]
    max_weight: Optional[int]
    bits: int
    components: int
    t_last: Optional[int]  # heaviest MST edge; None when disconnected
    mst_weight: Optional[int]
    edges_processed: int
    component_t_last: Optional[list[int]] = None  # per component, disconnected graphs only
    component_mst_weight: Optional[list[int]] = None
    component_edges: Optional[list[int]] = None

    def as_dict(self) -> dict:
        return asdict(self)


def graph_stats(graph: Graph) -> GraphStats:
    weights = [e.weight for e in graph.edges]
    oracle = classical_kruskal(graph)
    bits = max(1, max(weights, default=0).bit_length())
    common = dict(
        num_vertices=graph.num_vertices,
        num_edges=len(weights),
        min_weight=min(weights, default=None),
        max_weight=max(weights, default=None),
        bits=bits,
        components=oracle.components,
        edges_processed=oracle.edges_processed,
    )
    if oracle.complete:
        return GraphStats(t_last=oracle.t_last, mst_weight=oracle.total_weight, **common)
    labels = component_labels(graph)
    comps = sorted(set(labels))
    t_last = {c: 0 for c in comps}
    total = {c: 0 for c in comps}
    count = {c: 0 for c in comps}
    for e in oracle.edges:
        c = labels[e.u]
        t_last[c] = max(t_last[c], e.weight)
        total[c] += e.weight
    for e in graph.edges:
        count[labels[e.u]] += 1
    return GraphStats(
        t_last=None,
        mst_weight=None,
        component_t_last=[t_last[c] for c in comps],
        component_mst_weight=[total[c] for c in comps],
        component_edges=[count[c] for c in comps],
        **common,
    )
