"""Closed-form cost predictions for the four MST approaches.

Predictions are computed from graph statistics and the classical oracle
only, never from simulator state, so comparing them with measured meters is
a genuine cross-check.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from enum import Enum
from typing import Optional

__all__ = [
    "Algorithm",
    "Mode",
    "MstInfo",
    "CostPrediction",
    "Advice",
    "inverse_ackermann",
    "predict",
    "bottleneck_advice",
    "UNKNOWN_MAX_RATIONALE",
]

# tower-of-twos thresholds: alpha(n) = k for n <= _ALPHA_BOUNDS[k]
_ALPHA_BOUNDS = (2, 4, 16, 65536)

UNKNOWN_MAX_RATIONALE = (
    "the heaviest MST edge weight is unknown in advance, so the pipelined variant is the safe choice"
)


class Algorithm(str, Enum):
    PRIM = "prim"
    SEQ_NEURO = "seq-neuro"
    SEQ_RADIX = "seq-radix"
    PIPE = "pipe"


class Mode(str, Enum):
    LITERAL = "literal"  # union-find terms over all |E| edges
    EXACT = "exact"  # union-find terms over the edges actually submitted


def inverse_ackermann(n: int) -> int:
    """Fixed threshold table: 0, 1, 2, 3 up to 2, 4, 16, 65536; 4 beyond."""
    if n < 0:
        raise ValueError(f"inverse_ackermann needs n >= 0, got {n}")
    for k, bound in enumerate(_ALPHA_BOUNDS):
        if n <= bound:
            return k
    return len(_ALPHA_BOUNDS)


@dataclass(frozen=True)
class MstInfo:
    """Oracle facts an exact prediction needs."""

    mst_weight: int
    t_last: int
    edges_processed: int


@dataclass(frozen=True)
class CostPrediction:
    algorithm: Algorithm
    time_steps: int
    neurons: int
    synapses: int
    spikes: int
    bits: Optional[int]
    alpha: int
    mode: Mode

    def as_dict(self) -> dict:
        d = asdict(self)
        d["algorithm"] = self.algorithm.value
        d["mode"] = self.mode.value
        return d


def _prim_spikes(num_vertices: int, mode: Mode) -> int:
    # every pass re-fires the k tree vertices plus the one that joins
    if mode is Mode.LITERAL:
        return num_vertices * num_vertices
    return (num_vertices - 1) * (num_vertices + 2) // 2 if num_vertices > 0 else 0


def predict(
    algorithm: Algorithm | str,
    num_vertices: int,
    num_edges: int,
    max_weight: int,
    bits: Optional[int] = None,
    mst: Optional[MstInfo] = None,
    mode: Mode | str = Mode.EXACT,
) -> CostPrediction:
    """Evaluate one row of the cost table.

    ``mst`` is required for Prim and for exact-mode Kruskal predictions.
    ``bits`` is required for seq-radix.
    """
    algorithm = Algorithm(algorithm)
    mode = Mode(mode)
    alpha = inverse_ackermann(num_vertices)
    V, E = num_vertices, num_edges
    if algorithm is Algorithm.PRIM or mode is Mode.EXACT:
        if mst is None:
            raise ValueError(f"{algorithm.value} prediction in {mode.value} mode needs MST info")
    submitted = E if mode is Mode.LITERAL else mst.edges_processed
    uf_time = submitted * (2 + alpha)

    if algorithm is Algorithm.PRIM:
        return CostPrediction(algorithm, mst.mst_weight, V, E, _prim_spikes(V, mode), None, alpha, mode)
    if algorithm is Algorithm.SEQ_NEURO:
        return CostPrediction(algorithm, max_weight + uf_time, E + V, E + 2 + V, E + 4 * submitted, None, alpha, mode)
    if algorithm is Algorithm.SEQ_RADIX:
        if bits is None:
            raise ValueError("seq-radix prediction needs the bit width")
        return CostPrediction(
            algorithm, bits * (2 + E) + uf_time, E + V, E + 2 + V, bits * E + 4 * submitted, bits, alpha, mode
        )
    # pipelined: sum over valid steps of (gap + 2 s_j + alpha s_j) telescopes to t_last + (2 + alpha) * submitted
    t_end = max_weight if mode is Mode.LITERAL else mst.t_last
    return CostPrediction(algorithm, t_end + uf_time, E + V, E + 2 * E + V, 6 * submitted, None, alpha, mode)


@dataclass(frozen=True)
class Advice:
    recommendation: Algorithm
    margin: Optional[int]  # radix sort time minus MST enumeration time
    radix_time: int
    enumeration_time: Optional[int]
    rationale: str


def bottleneck_advice(num_edges: int, bits: int, t_last: Optional[int]) -> Advice:
    """Choose between the pipelined and radix-sequential variants.

    The pipeline pays ``t_last`` to enumerate MST edges where the radix
    variant pays ``bits * (2 + |E|)`` to sort; everything else is shared.
    """
    radix = bits * (2 + num_edges)
    if t_last is None:
        return Advice(Algorithm.PIPE, None, radix, None, UNKNOWN_MAX_RATIONALE)
    margin = radix - t_last
    if margin < 0:
        why = f"enumerating MST edges ({t_last} steps) outlasts radix sorting ({radix} steps)"
        return Advice(Algorithm.SEQ_RADIX, margin, radix, t_last, why)
    why = f"radix sorting ({radix} steps) outlasts enumerating MST edges ({t_last} steps)"
    if margin == 0:
        why = f"radix sorting and MST enumeration tie at {radix} steps; the pipeline needs no bit width"
    return Advice(Algorithm.PIPE, margin, radix, t_last, why)
