"""Sorting by synaptic delay, and binary radix sort by delay rewiring."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .substrate import CostMeter, Network, SubstrateError, Tag

__all__ = ["SortOutcome", "neuro_sort", "get_max_bit_count", "neuro_radix_sort", "DEFAULT_RADIX_BITS"]

DEFAULT_RADIX_BITS = 32


@dataclass(frozen=True)
class SortOutcome:
    values: list[int]
    order: list[int]  # input positions in output order
    meter: CostMeter


def _check_values(values: Sequence[int]) -> list[int]:
    out = []
    for x in values:
        if isinstance(x, bool) or not isinstance(x, int):
            raise SubstrateError(f"sort keys must be whole numbers, got {x!r}")
        if x < 0:
            raise SubstrateError(f"sort keys must be non-negative, got {x}")
        out.append(x)
    return out


def _build(values: list[int], delays: Sequence[int]) -> tuple[Network, int, list[int], dict[int, int]]:
    net = Network()
    src = net.add_neuron(0, 0, Tag.SOURCE)
    neurons = net.add_neurons(len(values), 0, 0, Tag.VALUE)
    syn = list(net.add_synapses((src, n, 1, d, 0) for n, d in zip(neurons, delays)))
    position = {n: i for i, n in enumerate(neurons)}
    return net, src, syn, position


def neuro_sort(values: Sequence[int]) -> SortOutcome:
    """Sort whole numbers by letting each one delay a spike by its own value.

    Run time equals ``max(values)``; ties come out in input order.
    """
    values = _check_values(values)
    if not values:
        return SortOutcome([], [], CostMeter())
    net, src, _, position = _build(values, values)
    fired: list[int] = []
    net.inject(src, 0)
    net.run(fires=fired)
    order = [position[n] for n in fired if n != src]
    return SortOutcome([values[i] for i in order], order, net.meter())


def get_max_bit_count(values: Sequence[int]) -> tuple[int, CostMeter]:
    """Bit width of ``max(values)``, found with :func:`neuro_sort`.

    Returns the width and the meter of the embedded sort.  All-zero input
    still needs one bit.
    """
    values = _check_values(values)
    if not values:
        raise SubstrateError("get_max_bit_count needs at least one value")
    outcome = neuro_sort(values)
    return max(1, outcome.values[-1].bit_length()), outcome.meter


def neuro_radix_sort(values: Sequence[int], bits: Optional[int] = None) -> SortOutcome:
    """Stable LSD binary radix sort with one delay-{0,1} sorting pass per bit.

    Value neuron j stands for output slot j.  Each pass sets the delay of
    slot j's synapse to the current bit of the value held there, charging
    one step per synapse, then runs a two-step window.  Same-step fires come
    out in synapse order, which keeps the pass stable.
    When ``bits`` is not given it is found with :func:`get_max_bit_count` and
    that sort's cost is included.
    """
    values = _check_values(values)
    extra = CostMeter()
    if bits is None:
        if not values:
            return SortOutcome([], [], CostMeter())
        bits, extra = get_max_bit_count(values)
    if isinstance(bits, bool) or not isinstance(bits, int) or bits < 1:
        raise SubstrateError(f"bit width must be a positive whole number, got {bits!r}")
    limit = 1 << bits
    for x in values:
        if x >= limit:
            raise SubstrateError(f"value {x} does not fit in {bits} bits")

    net, src, syn, position = _build(values, [0] * len(values))
    order = list(range(len(values)))
    for bit in range(bits):
        net.set_delays(syn, [(values[i] >> bit) & 1 for i in order], charge=len(values))
        fired: list[int] = []
        start = net.clock
        net.inject(src, start)
        net.run(horizon=start + 2, fires=fired)
        order = [order[position[n]] for n in fired if n != src]
    return SortOutcome([values[i] for i in order], order, net.meter() + extra)
