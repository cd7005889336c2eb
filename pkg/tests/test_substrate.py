import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neuromst.substrate import (
    MAX_STEPS_ENV,
    CostMeter,
    Mod,
    Network,
    NonTerminationError,
    SubstrateError,
    Tag,
    network_new,
)


def sort_network(delays=(3, 1, 2)):
    net = network_new()
    src = net.add_neuron(0, 0, Tag.SOURCE)
    vals = [net.add_neuron(0, 0) for _ in delays]
    for n, d in zip(vals, delays):
        net.add_synapse(src, n, 1, d)
    return net, src, vals


def test_new_network_is_empty_and_independent():
    a, b = network_new(), network_new()
    assert a.meter() == CostMeter()
    a.add_neuron(0)
    assert b.meter().setup_steps == 0
    assert a.meter().neuron_count == 1


def test_add_neuron_ids_and_setup_cost():
    net = Network()
    assert [net.add_neuron(1) for _ in range(3)] == [0, 1, 2]
    assert net.meter().setup_steps == 3


@pytest.mark.parametrize("threshold,leak", [(-1, 0), (0, -1), (1.5, 0), (True, 0)])
def test_add_neuron_rejects_non_whole(threshold, leak):
    with pytest.raises(SubstrateError):
        Network().add_neuron(threshold, leak)


def test_zero_threshold_neuron_allowed():
    net = Network()
    net.add_neuron(0, 0)
    assert net.num_neurons == 1


def test_one_synapse_per_pair():
    net = Network()
    a, b = net.add_neuron(0), net.add_neuron(0)
    net.add_synapse(a, b, 1, 5)
    with pytest.raises(SubstrateError, match="single synapse"):
        net.add_synapse(a, b, 1, 2)
    # the reverse direction is a different pair
    net.add_synapse(b, a, 1, 2)


def test_negative_delay_rejected():
    net = Network()
    a, b = net.add_neuron(0), net.add_neuron(0)
    with pytest.raises(SubstrateError):
        net.add_synapse(a, b, 1, -2)


def test_bulk_construction_matches_single():
    one, bulk = Network(), Network()
    for _ in range(4):
        one.add_neuron(1, 0, Tag.UF_VERTEX)
    bulk.add_neurons(4, 1, 0, Tag.UF_VERTEX)
    specs = [(0, 1, 1, 2, 0), (1, 2, -1, 0, 3), (3, 3, 1, 0, 0)]
    for spec in specs:
        one.add_synapse(*spec)
    assert list(bulk.add_synapses(specs)) == [0, 1, 2]
    assert one.meter() == bulk.meter()
    assert (one.pre, one.post, one.delays, one.ranks) == (bulk.pre, bulk.post, bulk.delays, bulk.ranks)


def test_bulk_synapses_atomic_on_duplicate():
    net = Network()
    net.add_neurons(2, 0)
    with pytest.raises(SubstrateError):
        net.add_synapses([(0, 1, 1, 0, 0), (0, 1, 1, 1, 0)])
    assert net.num_synapses == 0


def test_three_value_sort_trace():
    net, src, vals = sort_network()
    seen = []
    net.inject(src, 0)
    net.run(lambda ev: seen.append((ev.time, ev.neuron)) if ev.fired and ev.neuron != src else None)
    assert seen == [(1, vals[1]), (2, vals[2]), (3, vals[0])]
    m = net.meter()
    assert m.run_steps == 3
    assert m.spike_count == 3  # the source is excluded
    assert m.physical_spikes == 4


def test_idle_run_is_quiescent():
    net, _, _ = sort_network()
    net.run()
    assert net.meter().run_steps == 0


def test_inject_in_future_waits():
    net = Network()
    n = net.add_neuron(0)
    seen = []
    net.inject(n, 5)
    net.run(lambda ev: seen.append(ev.time))
    assert seen == [5]
    assert net.clock == 5


def test_two_injections_in_clock_order():
    net = Network()
    n = net.add_neuron(0, 0, Tag.SOURCE)
    seen = []
    net.inject(n, 2)
    net.inject(n, 0)
    net.run(lambda ev: seen.append(ev.time))
    assert seen == [0, 2]


def test_inject_past_or_unknown_rejected():
    net = Network()
    n = net.add_neuron(0)
    net.inject(n, 3)
    net.run()
    with pytest.raises(SubstrateError):
        net.inject(n, 1)
    with pytest.raises(SubstrateError):
        net.inject(99, 4)


def test_same_time_ties_by_synapse_id():
    net = Network()
    src = net.add_neuron(0, 0, Tag.SOURCE)
    a, b = net.add_neuron(0), net.add_neuron(0)
    s_b = net.add_synapse(src, b, 1, 2)
    s_a = net.add_synapse(src, a, 1, 2)
    seen = []
    net.inject(src, 0)
    net.run(lambda ev: seen.append(ev.synapse) if ev.synapse >= 0 else None)
    assert seen == [s_b, s_a]


def test_rank_orders_before_synapse_id():
    net = Network()
    src = net.add_neuron(0, 0, Tag.SOURCE)
    a, b = net.add_neuron(0), net.add_neuron(0)
    net.add_synapse(src, a, 1, 2, rank=1)
    net.add_synapse(src, b, 1, 2, rank=0)
    seen = []
    net.inject(src, 0)
    net.run(lambda ev: seen.append((ev.neuron, ev.rank)) if ev.synapse >= 0 else None)
    assert seen == [(b, 0), (a, 1)]


def test_threshold_accumulates_within_step():
    net = Network()
    s1 = net.add_neuron(0, 0, Tag.SOURCE)
    target = net.add_neuron(2)
    net.add_synapse(s1, target, 1, 1)
    s2 = net.add_neuron(0, 0, Tag.SOURCE)
    net.add_synapse(s2, target, 1, 1)
    fired = []
    net.inject(s1, 0, rank=0)
    net.inject(s2, 0, rank=0)
    net.run(lambda ev: fired.append(ev.neuron) if ev.fired else None)
    assert fired.count(target) == 1
    assert net.potentials[target] == 0


def test_refractory_within_sub_step():
    net = Network()
    src = net.add_neuron(0, 0, Tag.SOURCE)
    x = net.add_neuron(1)
    net.add_synapse(src, x, 1, 0)
    net.add_synapse(x, x, 1, 0)
    events = []
    net.inject(src, 0)
    net.run(events.append)
    echo = [ev for ev in events if ev.neuron == x and not ev.fired]
    assert len(echo) == 1 and echo[0].refractory


def test_leak_floor_division():
    net = Network()
    src = net.add_neuron(0, 0, Tag.SOURCE)
    x = net.add_neuron(100, leak=2)
    net.add_synapse(src, x, 9, 1)
    net.inject(src, 0)
    net.inject(src, 3)
    net.run()
    # 9 at t=1, halved twice by t=3 -> 2, then +9 at t=4 after one more halving
    assert net.potentials[x] == 9 // 2 // 2 // 2 + 9


def test_leak_negative_potential_floors():
    net = Network()
    src = net.add_neuron(0, 0, Tag.SOURCE)
    x = net.add_neuron(100, leak=2)
    net.add_synapse(src, x, -5, 0)
    net.inject(src, 0)
    net.inject(src, 1)
    net.run()
    assert net.potentials[x] == (-5 // 2) - 5


@pytest.mark.parametrize("leak", [0, 1])
def test_no_leak_below_two(leak):
    net = Network()
    src = net.add_neuron(0, 0, Tag.SOURCE)
    x = net.add_neuron(100, leak=leak)
    net.add_synapse(src, x, 7, 0)
    for t in (0, 5, 9):
        net.inject(src, t)
    net.run()
    assert net.potentials[x] == 21


def test_rewire_charges_split():
    net = Network()
    src = net.add_neuron(0, 0, Tag.SOURCE)
    a, b, c = (net.add_neuron(1) for _ in range(3))
    q0 = net.add_synapse(src, a)
    q1 = net.add_synapse(src, b)
    net.rewire([Mod(q0, post=c), Mod(q1, post=a)], charge=2)
    m = net.meter()
    assert (m.charged_structural_steps, m.physical_mods) == (2, 2)
    assert net.synapse_between(src, c) == q0 and net.synapse_between(src, a) == q1


def test_rewire_one_delay_charge_two():
    net, _, _ = sort_network()
    net.rewire([Mod(0, delay=4)], charge=2)
    m = net.meter()
    assert (m.physical_mods, m.charged_structural_steps) == (1, 2)


def test_empty_rewire_is_noop():
    net, _, _ = sort_network()
    before = net.meter()
    net.rewire([], charge=0)
    assert net.meter() == before


def test_rewire_errors_leave_network_untouched():
    net = Network()
    src = net.add_neuron(0, 0, Tag.SOURCE)
    a, b = net.add_neuron(1), net.add_neuron(1)
    s0 = net.add_synapse(src, a)
    net.add_synapse(src, b)
    state = (list(net.post), list(net.delays), net.meter())
    for mods in ([Mod(s0, post=b)], [Mod(7, delay=1)], [Mod(s0, delay=-1)], [Mod(s0, delay=3), Mod(s0, post=b)]):
        with pytest.raises(SubstrateError):
            net.rewire(mods, charge=1)
        assert (list(net.post), list(net.delays), net.meter()) == state


def test_rewire_swap_is_valid():
    net = Network()
    src = net.add_neuron(0, 0, Tag.SOURCE)
    a, b = net.add_neuron(1), net.add_neuron(1)
    s0, s1 = net.add_synapse(src, a), net.add_synapse(src, b)
    net.rewire([Mod(s0, post=b), Mod(s1, post=a)], charge=0)
    assert net.synapse_between(src, b) == s0 and net.synapse_between(src, a) == s1


def test_pending_deliveries_keep_old_parameters():
    net = Network()
    src = net.add_neuron(0, 0, Tag.SOURCE)
    a, b = net.add_neuron(0), net.add_neuron(0)
    s = net.add_synapse(src, a, 1, 3)
    seen = []
    net.inject(src, 0)
    net.run(horizon=1)
    net.rewire([Mod(s, post=b)], charge=1)
    net.run(lambda ev: seen.append((ev.time, ev.neuron)) if ev.synapse >= 0 else None)
    assert seen == [(3, a)]


def test_observer_halts_and_resumes():
    net, src, vals = sort_network()
    seen = []

    def stop_first(ev):
        if ev.synapse >= 0:
            seen.append(ev.neuron)
            return True

    net.inject(src, 0)
    net.run(stop_first)
    assert seen == [vals[1]]
    net.run(lambda ev: seen.append(ev.neuron))
    assert seen == [vals[1], vals[2], vals[0]]


def test_halt_on_returns_event():
    net, src, vals = sort_network()
    flags = [False] * net.num_neurons
    flags[vals[2]] = True
    net.inject(src, 0)
    ev = net.run(halt_on=flags)
    assert ev.neuron == vals[2] and ev.time == 2 and ev.fired


def test_advance_processes_one_sub_step():
    net, src, _ = sort_network()
    net.inject(src, 0)
    assert [ev.time for ev in net.advance()] == [0]
    assert [ev.time for ev in net.advance()] == [1]
    assert net.peek_key() == (2, 0)


def test_set_delays_equals_rewire():
    a, _, _ = sort_network()
    b, _, _ = sort_network()
    a.rewire([Mod(0, delay=0), Mod(2, delay=1)], charge=2)
    b.set_delays([0, 2], [0, 1], charge=2)
    assert a.delays == b.delays and a.meter() == b.meter()
    with pytest.raises(SubstrateError):
        b.set_delays([0], [-1], charge=1)


def test_guard_trips(monkeypatch):
    net = Network(max_steps=3)
    x = net.add_neuron(0)
    net.add_synapse(x, x, 1, 1)  # self-sustaining oscillator
    net.inject(x, 0)
    with pytest.raises(NonTerminationError):
        net.run()
    monkeypatch.setenv(MAX_STEPS_ENV, "10")
    net2 = Network()
    y = net2.add_neuron(0)
    net2.add_synapse(y, y, 1, 1)
    net2.inject(y, 0)
    with pytest.raises(NonTerminationError, match="10"):
        net2.run()


def test_meter_snapshot_is_stable():
    net, src, _ = sort_network()
    net.inject(src, 0)
    net.run()
    assert net.meter() == net.meter()


def _random_network(draw_ops):
    net = Network()
    n = 6
    for i in range(n):
        net.add_neuron(1 + i % 2, 0, Tag.SOURCE if i == 0 else Tag.VALUE)
    for pre, post, w, d in draw_ops:
        if net.synapse_between(pre, post) is None:
            net.add_synapse(pre, post, w, d)
    return net


ops = st.lists(
    st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(-1, 2), st.integers(0, 4)), max_size=20
)


@settings(max_examples=60, deadline=None)
@given(ops, st.lists(st.integers(0, 6), min_size=1, max_size=4))
def test_determinism_and_energy_bound(spec, times):
    traces = []
    for _ in range(2):
        net = _random_network(spec)
        for t in sorted(times):
            net.inject(0, t, rank=0)
        trace = []
        try:
            net.run(trace.append)
        except NonTerminationError:
            pass
        traces.append((trace, net.meter()))
        m = net.meter()
        assert m.spike_count <= m.charged_time * (m.neuron_count + m.synapse_count) or m.spike_count == 0
        assert len(set(zip(net.pre, net.post))) == net.num_synapses
    assert traces[0] == traces[1]


def test_delay_semantics_exact():
    for d in range(6):
        net = Network()
        src = net.add_neuron(0, 0, Tag.SOURCE)
        x = net.add_neuron(0)
        net.add_synapse(src, x, 1, d)
        times = []
        net.inject(src, 4)
        net.run(lambda ev: times.append(ev.time) if ev.neuron == x else None)
        assert times == [4 + d]
