"""Deterministic event-driven SNN engine with explicit cost metering.

Neurons integrate whole-number inputs, fire on reaching threshold and reset.
Synapses carry an integer weight, a whole-number delay and a sub-step rank.
Deliveries are processed in ``(time, rank, synapse id)`` order; a delivery
through a zero-delay synapse inherits the rank of the firing that produced
it, otherwise it takes the synapse's own rank.  A neuron fires at most once
per ``(time, rank)`` sub-step; later input in the same sub-step is refractory.

Structural changes go through :meth:`Network.rewire`, which applies a batch
of modifications atomically and charges a caller-chosen number of steps.
"""

from __future__ import annotations

import heapq
import os
from dataclasses import dataclass, fields
from enum import Enum
from typing import Callable, Iterable, NamedTuple, Optional, Sequence

__all__ = [
    "Tag",
    "Mod",
    "SpikeEvent",
    "CostMeter",
    "Network",
    "SubstrateError",
    "NonTerminationError",
    "network_new",
    "default_energy_rule",
    "MAX_STEPS_ENV",
]

MAX_STEPS_ENV = "NEUROMST_MAX_STEPS"
# headroom per edge in the default guard: 2 query/pipe steps + alpha <= 4
_CHARGE_BOUND = 6


class SubstrateError(ValueError):
    """Invalid construction or modification of a network."""


class NonTerminationError(RuntimeError):
    """A run exceeded its logical-time guard."""


class Tag(str, Enum):
    VALUE = "value-neuron"
    SOURCE = "source"
    UF_VERTEX = "union-find-vertex"


class Mod(NamedTuple):
    """One synapse modification; ``None`` fields are left unchanged."""

    synapse: int
    pre: Optional[int] = None
    post: Optional[int] = None
    delay: Optional[int] = None
    weight: Optional[int] = None
    rank: Optional[int] = None


class SpikeEvent(NamedTuple):
    """A processed delivery (or injection when ``synapse == -1``)."""

    time: int
    rank: int
    neuron: int
    synapse: int
    fired: bool
    refractory: bool = False


@dataclass(frozen=True)
class CostMeter:
    setup_steps: int = 0
    run_steps: int = 0
    charged_structural_steps: int = 0
    physical_mods: int = 0
    neuron_count: int = 0
    synapse_count: int = 0
    spike_count: int = 0
    # not part of the charged model; kept for transparency
    control_neurons: int = 0
    physical_spikes: int = 0

    @property
    def charged_time(self) -> int:
        return self.run_steps + self.charged_structural_steps

    @property
    def compute_neurons(self) -> int:
        """Neurons excluding spike sources (the count the cost table uses)."""
        return self.neuron_count - self.control_neurons

    def __add__(self, other: "CostMeter") -> "CostMeter":
        return CostMeter(*(getattr(self, f.name) + getattr(other, f.name) for f in fields(self)))

    def __sub__(self, other: "CostMeter") -> "CostMeter":
        return CostMeter(*(getattr(self, f.name) - getattr(other, f.name) for f in fields(self)))

    def as_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["charged_time"] = self.charged_time
        return d


EnergyRule = Callable[["Network", int, int, bool], int]


def default_energy_rule(net: "Network", neuron: int, synapse: int, fired: bool) -> int:
    """One spike per firing of a non-control neuron."""
    return 1 if fired and net.tags[neuron] is not Tag.SOURCE else 0


def _env_max_steps() -> Optional[int]:
    raw = os.environ.get(MAX_STEPS_ENV)
    if raw is None or raw.strip() == "":
        return None
    value = int(raw)
    if value < 0:
        raise SubstrateError(f"{MAX_STEPS_ENV} must be non-negative, got {value}")
    return value


# heap keys pack (time, rank, synapse + 1) into one integer
_SHIFT = 32
_LOW = (1 << _SHIFT) - 1
_TIME_SHIFT = 2 * _SHIFT


def _rank(value) -> int:
    _whole("rank", value)
    if value > _LOW:
        raise SubstrateError(f"rank must be below 2**{_SHIFT}, got {value}")
    return value


def _whole(name: str, value) -> int:
    if type(value) is int and value >= 0:
        return value
    if isinstance(value, bool) or not isinstance(value, int):
        raise SubstrateError(f"{name} must be a whole number, got {value!r}")
    if value < 0:
        raise SubstrateError(f"{name} must be non-negative, got {value}")
    return value


class Network:
    """A single-threaded spiking network with a logical clock and cost meter."""

    def __init__(self, max_steps: Optional[int] = None, energy_rule: EnergyRule = default_energy_rule):
        # neuron state
        self.thresholds: list[int] = []
        self.leaks: list[int] = []
        self.potentials: list[int] = []
        self.tags: list[Tag] = []
        self._last_update: list[int] = []
        # synapse state
        self.pre: list[int] = []
        self.post: list[int] = []
        self.weights: list[int] = []
        self.delays: list[int] = []
        self.ranks: list[int] = []
        self._pairs: dict[tuple[int, int], int] = {}
        self._out: list[set[int]] = []
        self._snapshots: dict[int, tuple] = {}

        self.clock = 0
        self._queue: list[tuple] = []
        self._seq = 0
        self._last_key: Optional[tuple[int, int]] = None
        self._stamp = 0  # id of the current sub-step
        self._fired_in: list[int] = []  # per neuron, stamp of its last firing
        self._running = False

        self.max_steps = max_steps
        self._env_guard = _env_max_steps()
        self._max_delay = 0  # largest delay ever configured
        self.energy_rule = energy_rule

        self._setup = 0
        self._run = 0
        self._charged = 0
        self._mods = 0
        self._spikes = 0
        self._physical_spikes = 0
        self._controls = 0

    # -- construction -----------------------------------------------------

    @property
    def num_neurons(self) -> int:
        return len(self.thresholds)

    @property
    def num_synapses(self) -> int:
        return len(self.pre)

    def add_neuron(self, threshold: int, leak: int = 0, tag: Tag = Tag.VALUE) -> int:
        if self._running:
            raise SubstrateError("cannot add neurons while the network is running")
        _whole("threshold", threshold)
        _whole("leak", leak)
        if type(tag) is not Tag:
            tag = Tag(tag)
        nid = len(self.thresholds)
        self.thresholds.append(threshold)
        self.leaks.append(leak)
        self.potentials.append(0)
        self.tags.append(tag)
        self._last_update.append(0)
        self._fired_in.append(-1)
        self._out.append(set())
        self._snapshots[nid] = ()  # no outgoing synapses yet
        self._setup += 1
        if tag is Tag.SOURCE:
            self._controls += 1
        return nid

    def add_synapse(self, pre: int, post: int, weight: int = 1, delay: int = 0, rank: int = 0) -> int:
        if self._running:
            raise SubstrateError("cannot add synapses while the network is running")
        count = len(self.thresholds)
        if type(pre) is not int or not 0 <= pre < count:
            raise SubstrateError(f"unknown neuron {pre!r}")
        if type(post) is not int or not 0 <= post < count:
            raise SubstrateError(f"unknown neuron {post!r}")
        if type(weight) is not int:
            raise SubstrateError(f"weight must be an integer, got {weight!r}")
        _whole("delay", delay)
        _rank(rank)
        pair = (pre, post)
        if pair in self._pairs:
            raise SubstrateError(
                f"a synapse {pre}->{post} already exists; each neuron pair is linked by a single synapse"
            )
        sid = len(self.pre)
        self.pre.append(pre)
        self.post.append(post)
        self.weights.append(weight)
        self.delays.append(delay)
        self.ranks.append(rank)
        self._pairs[pair] = sid
        if delay > self._max_delay:
            self._max_delay = delay
        self._out[pre].add(sid)
        self._snapshots.pop(pre, None)
        self._setup += 1
        return sid

    def add_neurons(self, count: int, threshold: int, leak: int = 0, tag: Tag = Tag.VALUE) -> range:
        """Add ``count`` identical neurons; returns their ids."""
        if self._running:
            raise SubstrateError("cannot add neurons while the network is running")
        _whole("count", count)
        _whole("threshold", threshold)
        _whole("leak", leak)
        tag = Tag(tag)
        first = len(self.thresholds)
        self.thresholds.extend([threshold] * count)
        self.leaks.extend([leak] * count)
        self.potentials.extend([0] * count)
        self.tags.extend([tag] * count)
        self._last_update.extend([0] * count)
        self._fired_in.extend([-1] * count)
        self._out.extend(set() for _ in range(count))
        self._snapshots.update(dict.fromkeys(range(first, first + count), ()))
        self._setup += count
        if tag is Tag.SOURCE:
            self._controls += count
        return range(first, first + count)

    def add_synapses(self, specs: Iterable[tuple[int, int, int, int, int]]) -> range:
        """Add ``(pre, post, weight, delay, rank)`` synapses atomically; returns their ids."""
        if self._running:
            raise SubstrateError("cannot add synapses while the network is running")
        specs = list(specs)
        count = len(self.thresholds)
        pairs = self._pairs
        fresh: set[tuple[int, int]] = set()
        for pre, post, weight, delay, rank in specs:
            if type(pre) is not int or not 0 <= pre < count:
                raise SubstrateError(f"unknown neuron {pre!r}")
            if type(post) is not int or not 0 <= post < count:
                raise SubstrateError(f"unknown neuron {post!r}")
            if type(weight) is not int:
                raise SubstrateError(f"weight must be an integer, got {weight!r}")
            if type(delay) is not int or delay < 0:
                _whole("delay", delay)
            if type(rank) is not int or not 0 <= rank <= _LOW:
                _rank(rank)
            pair = (pre, post)
            if pair in pairs or pair in fresh:
                raise SubstrateError(
                    f"a synapse {pre}->{post} already exists; each neuron pair is linked by a single synapse"
                )
            fresh.add(pair)
        first = len(self.pre)
        out, snapshots = self._out, self._snapshots
        for sid, (pre, post, weight, delay, rank) in enumerate(specs, first):
            pairs[(pre, post)] = sid
            out[pre].add(sid)
            snapshots.pop(pre, None)
        self.pre.extend([x[0] for x in specs])
        self.post.extend([x[1] for x in specs])
        self.weights.extend([x[2] for x in specs])
        self.delays.extend([x[3] for x in specs])
        self.ranks.extend([x[4] for x in specs])
        if specs:
            self._max_delay = max(self._max_delay, max(x[3] for x in specs))
        self._setup += len(specs)
        return range(first, first + len(specs))

    def synapse_between(self, pre: int, post: int) -> Optional[int]:
        return self._pairs.get((pre, post))

    def _check_neuron(self, nid: int) -> None:
        if type(nid) is not int or not 0 <= nid < len(self.thresholds):
            raise SubstrateError(f"unknown neuron {nid!r}")

    # -- structural plasticity ---------------------------------------------

    def rewire(self, mods: Iterable[Mod], charge: int) -> None:
        """Apply ``mods`` atomically while activity is suspended.

        Pending deliveries already scheduled keep the parameters they were
        scheduled with.  ``charge`` is added to the charged structural steps;
        ``physical_mods`` grows by ``len(mods)``.
        """
        mods = list(mods)
        _whole("charge", charge)
        pres, posts = self.pre, self.post
        num_syn, num_neurons = len(pres), len(self.thresholds)
        # validate against the final configuration before touching anything
        final: dict[int, tuple[int, int]] = {}  # only synapses whose endpoints move
        for sid, pre, post, delay, weight, rank in mods:
            if type(sid) is not int or not 0 <= sid < num_syn:
                raise SubstrateError(f"unknown synapse {sid!r}")
            if delay is not None and (type(delay) is not int or delay < 0):
                _whole("delay", delay)
            if rank is not None and (type(rank) is not int or not 0 <= rank <= _LOW):
                _rank(rank)
            if weight is not None and type(weight) is not int:
                raise SubstrateError(f"weight must be an integer, got {weight!r}")
            if pre is None and post is None:
                continue
            cur = final.get(sid)
            if cur is None:
                cur = (pres[sid], posts[sid])
            if pre is None:
                pre = cur[0]
            elif type(pre) is not int or not 0 <= pre < num_neurons:
                raise SubstrateError(f"unknown neuron {pre!r}")
            if post is None:
                post = cur[1]
            elif type(post) is not int or not 0 <= post < num_neurons:
                raise SubstrateError(f"unknown neuron {post!r}")
            final[sid] = (pre, post)
        if final:
            pairs = self._pairs
            claimed: dict[tuple[int, int], int] = {}
            for sid, pair in final.items():
                owner = pairs.get(pair)
                if pair in claimed or (owner is not None and owner not in final):
                    other = claimed.get(pair, owner)
                    raise SubstrateError(
                        f"rewiring synapse {sid} to {pair[0]}->{pair[1]} would duplicate synapse {other}"
                    )
                claimed[pair] = sid
            for sid in final:
                del pairs[(pres[sid], posts[sid])]
            pairs.update(claimed)

        snapshots = self._snapshots
        for sid, pre, post, delay, weight, rank in mods:
            old_pre = pres[sid]
            if pre is not None and pre != old_pre:
                self._out[old_pre].discard(sid)
                self._out[pre].add(sid)
                pres[sid] = pre
                snapshots.pop(pre, None)
            if post is not None:
                posts[sid] = post
            if delay is not None:
                self.delays[sid] = delay
                if delay > self._max_delay:
                    self._max_delay = delay
            if weight is not None:
                self.weights[sid] = weight
            if rank is not None:
                self.ranks[sid] = rank
            snapshots.pop(old_pre, None)
        self._mods += len(mods)
        self._charged += charge

    # -- stimulus and execution --------------------------------------------

    def inject(self, neuron: int, time: int, rank: Optional[int] = None) -> None:
        """Schedule an external stimulus that makes ``neuron`` fire at ``time``.

        Without an explicit rank the injection opens a fresh sub-step after
        anything already processed at ``time``.
        """
        self._check_neuron(neuron)
        _whole("time", time)
        if time < self.clock:
            raise SubstrateError(f"cannot inject at t={time}, clock is already at {self.clock}")
        if rank is None:
            rank = self._last_key[1] + 1 if self._last_key is not None and self._last_key[0] == time else 0
        _rank(rank)
        self._seq += 1
        heapq.heappush(self._queue, ((time << _TIME_SHIFT) | (rank << _SHIFT), self._seq, -1, neuron, None, None))

    def set_delays(self, synapses: Sequence[int], delays: Sequence[int], charge: int) -> None:
        """Bulk form of ``rewire`` that only changes delays."""
        if len(synapses) != len(delays):
            raise SubstrateError("set_delays needs one delay per synapse")
        _whole("charge", charge)
        if synapses:
            if not set(map(type, synapses)) <= {int} or min(synapses) < 0 or max(synapses) >= len(self.pre):
                bad = next(x for x in synapses if type(x) is not int or not 0 <= x < len(self.pre))
                raise SubstrateError(f"unknown synapse {bad!r}")
            if not set(map(type, delays)) <= {int} or min(delays) < 0:
                for d in delays:
                    _whole("delay", d)
            table = self.delays
            for sid, d in zip(synapses, delays):
                table[sid] = d
            for pre in set(map(self.pre.__getitem__, synapses)):
                self._snapshots.pop(pre, None)
            self._max_delay = max(self._max_delay, max(delays))
        self._mods += len(synapses)
        self._charged += charge

    def inject_many(self, neurons: Iterable[int], time: int, rank: int = 0) -> None:
        """Inject several neurons into the same ``(time, rank)`` sub-step."""
        _whole("time", time)
        _rank(rank)
        if time < self.clock:
            raise SubstrateError(f"cannot inject at t={time}, clock is already at {self.clock}")
        count = len(self.thresholds)
        queue, seq = self._queue, self._seq
        key = (time << _TIME_SHIFT) | (rank << _SHIFT)
        entries = []
        for nid in neurons:
            if type(nid) is not int or not 0 <= nid < count:
                raise SubstrateError(f"unknown neuron {nid!r}")
            seq += 1
            entries.append((key, seq, -1, nid, None, None))
        self._seq = seq
        if queue:
            queue.extend(entries)
            heapq.heapify(queue)
        else:
            queue.extend(entries)  # increasing seq under one key is already a heap

    def reset_activity(self) -> None:
        """Stop all activity: drop pending deliveries, zero potentials, clear refractory state."""
        self._queue.clear()
        self._last_key = None  # the next sub-step gets a fresh stamp
        self.potentials[:] = [0] * len(self.potentials)

    @property
    def pending(self) -> int:
        return len(self._queue)

    def peek_key(self) -> Optional[tuple[int, int]]:
        if not self._queue:
            return None
        key = self._queue[0][0]
        return key >> _TIME_SHIFT, (key >> _SHIFT) & _LOW

    def _snapshot(self, nid: int) -> tuple:
        """Outgoing deliveries of ``nid`` sorted by ``(delay, rank, synapse)``."""
        snap = self._snapshots.get(nid)
        if snap is None:
            post_of, weights, delays, ranks = self.post, self.weights, self.delays, self.ranks
            thresholds, leaks = self.thresholds, self.leaks
            # a zero-weight input to a leak-free neuron with positive threshold changes nothing
            entries = [
                (delays[sid], (ranks[sid] << _SHIFT) | (sid + 1), sid, post_of[sid], weights[sid])
                for sid in self._out[nid]
                if weights[sid] or thresholds[post_of[sid]] <= 0 or leaks[post_of[sid]] > 1
            ]
            entries.sort()
            snap = tuple(entries)
            self._snapshots[nid] = snap
        return snap

    def _guard(self) -> int:
        if self.max_steps is not None:
            return self.max_steps
        if self._env_guard is not None:
            return self._env_guard
        return 2 * (self._max_delay + _CHARGE_BOUND)

    def run(
        self,
        observer: Optional[Callable[[SpikeEvent], Optional[bool]]] = None,
        until: Optional[Callable[["Network"], bool]] = None,
        horizon: Optional[int] = None,
        fires: Optional[list[int]] = None,
        halt_on: Optional[Sequence[bool]] = None,
    ) -> Optional[SpikeEvent]:
        """Process deliveries until quiescence, ``until(net)``, a halt, or ``horizon``.

        ``until`` is checked at sub-step boundaries.  An observer returning a
        true value halts the run right after the current event; pending
        deliveries are kept.  With ``horizon`` only events before that time are
        processed and the clock is then advanced to it.  ``fires``, when given,
        receives the id of every neuron that fires, in processing order.
        ``halt_on`` is indexed by neuron id; the run halts right after a
        synapse makes a flagged neuron fire.

        Returns the event that caused a halt, if any.
        """
        event = self._process(observer, until, horizon, fires, halt_on, single=False)
        if horizon is not None:
            if horizon < self.clock:
                raise SubstrateError(f"horizon {horizon} is before the clock {self.clock}")
            self._tick(horizon)
        return event

    def advance(self, observer: Optional[Callable[[SpikeEvent], Optional[bool]]] = None) -> list[SpikeEvent]:
        """Process exactly one sub-step and return its events."""
        events: list[SpikeEvent] = []

        def record(ev: SpikeEvent):
            events.append(ev)
            return observer(ev) if observer is not None else None

        self._process(record, None, None, None, None, single=True)
        return events

    def _tick(self, time: int) -> None:
        if time > self.clock:
            self._run += time - self.clock
            self.clock = time

    def _process(self, observer, until, horizon, fires, halt_on, single: bool) -> Optional[SpikeEvent]:
        """Deliver events sub-step by sub-step.  Returns the halting event, if any."""
        queue = self._queue
        if not queue:
            return None
        guard = self._guard()
        pop, push, replace = heapq.heappop, heapq.heappush, heapq.heapreplace
        fired_in = self._fired_in
        potentials, leaks, thresholds = self.potentials, self.leaks, self.thresholds
        tags = self.tags
        rule = self.energy_rule
        default_rule = rule is default_energy_rule
        snapshots = self._snapshots
        last_update = self._last_update
        source = Tag.SOURCE
        SHIFT, TSHIFT, LOW = _SHIFT, _TIME_SHIFT, _LOW
        first_time = queue[0][0] >> TSHIFT
        seq = self._seq
        spikes = physical = 0
        halt = None
        event = tuple.__new__
        try:
            while queue and not halt:
                step = queue[0][0] >> SHIFT
                time, rank = step >> SHIFT, step & LOW
                if horizon is not None and time >= horizon:
                    break
                if until is not None:
                    self._seq = seq
                    if until(self):
                        break
                if time - first_time > guard:
                    raise NonTerminationError(
                        f"run exceeded the guard of {guard} logical steps (t={time}); "
                        f"set {MAX_STEPS_ENV} to raise it"
                    )
                if time > self.clock:
                    self._run += time - self.clock
                    self.clock = time
                key = (time, rank)
                if key != self._last_key:
                    self._stamp += 1
                    self._last_key = key
                stamp = self._stamp
                base = time << TSHIFT
                rank_key = rank << SHIFT
                self._running = True
                while queue:
                    head = queue[0]
                    if head[0] >> SHIFT != step:
                        break
                    _, _, sid, target, weight, cursor = head
                    if cursor is None:
                        pop(queue)
                    else:
                        # fan-out lists are sorted, so only each list's head needs to be queued;
                        # the cursor is [snapshot, index, fire time bits, fire rank bits]
                        snap, idx, fire_base, fire_rank_key = cursor
                        idx += 1
                        if idx < len(snap):
                            cursor[1] = idx
                            nd, nrs, nsid, npost, nw = snap[idx]
                            seq += 1
                            if nd == 0:
                                if nrs < fire_rank_key:
                                    nrs = fire_rank_key | (nrs & LOW)
                                replace(queue, (fire_base | nrs, seq, nsid, npost, nw, cursor))
                            else:
                                replace(queue, (fire_base + ((nd << TSHIFT) | nrs), seq, nsid, npost, nw, cursor))
                        else:
                            pop(queue)

                    refractory = fired_in[target] == stamp
                    fired = False
                    if not refractory:
                        if weight is None:
                            fired = True
                        else:
                            v = potentials[target]
                            lam = leaks[target]
                            if lam >= 2 and v != 0:
                                steps = time - last_update[target]
                                if steps > 0:
                                    # repeated floor division; the exponent cap keeps the result exact
                                    v //= lam ** min(steps, abs(v).bit_length() + 1)
                            v += weight
                            last_update[target] = time
                            if v >= thresholds[target]:
                                fired = True
                                v = 0
                            potentials[target] = v
                    if fired:
                        potentials[target] = 0
                        fired_in[target] = stamp
                        physical += 1
                        if fires is not None:
                            fires.append(target)
                        if halt_on is not None and sid >= 0 and halt_on[target]:
                            halt = event(SpikeEvent, (time, rank, target, sid, True, False))
                        if default_rule:
                            if tags[target] is not source:
                                spikes += 1
                        else:
                            spikes += rule(self, target, sid, True)
                    elif not default_rule:
                        spikes += rule(self, target, sid, False)

                    if observer is not None:
                        self._seq = seq  # the observer may inject
                        ev = event(SpikeEvent, (time, rank, target, sid, fired, refractory))
                        if observer(ev):
                            halt = ev
                        seq = self._seq
                    if fired:
                        snap = snapshots.get(target)
                        if snap is None:
                            snap = self._snapshot(target)
                        if snap:
                            d, rs, s, post, w = snap[0]
                            seq += 1
                            if d == 0:
                                if rs < rank_key:
                                    rs = rank_key | (rs & LOW)
                                push(queue, (base | rs, seq, s, post, w, [snap, 0, base, rank_key]))
                            else:
                                push(queue, (base + ((d << TSHIFT) | rs), seq, s, post, w, [snap, 0, base, rank_key]))
                    if halt:
                        break
                self._running = False
                if single:
                    break
        finally:
            self._running = False
            self._seq = seq
            self._spikes += spikes
            self._physical_spikes += physical
        return halt

    def meter(self) -> CostMeter:
        return CostMeter(
            setup_steps=self._setup,
            run_steps=self._run,
            charged_structural_steps=self._charged,
            physical_mods=self._mods,
            neuron_count=len(self.thresholds),
            synapse_count=len(self.pre),
            spike_count=self._spikes,
            control_neurons=self._controls,
            physical_spikes=self._physical_spikes,
        )


def network_new(max_steps: Optional[int] = None) -> Network:
    return Network(max_steps=max_steps)
