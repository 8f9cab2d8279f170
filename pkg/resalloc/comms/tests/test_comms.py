import numpy as np
import pytest

from resalloc.comms import (
    CommState, Regime, TriggerRecord, event_step, on_edge_change,
    refresh_continuous, sample_and_hold
)
from resalloc.dynamics import NodeState
from resalloc.graphs import WeightedDigraph, default_ten_node_schedule
from resalloc.util.exceptions import SchedulingError


@pytest.fixture
def pair():
    return WeightedDigraph([[0., 1.], [1., 0.]])


def test_regime():
    assert Regime("event") is Regime.EVENT
    assert Regime.PERIODIC.is_sampled
    assert not Regime.CONTINUOUS.is_sampled
    with pytest.raises(ValueError):
        Regime("sporadic")


def test_comm_state_initialize():
    lam0 = np.arange(6.).reshape(3, 2)
    comm = CommState.initialize("event", 0.5, lam0)
    assert comm.regime is Regime.EVENT
    assert comm.n == 3
    assert comm.views.shape == (3, 3, 2)
    for i in range(3):
        assert np.array_equal(comm.views[i], lam0)
    assert np.all(comm.held_u == 0.)
    assert np.array_equal(comm.trigger_counts(), [0, 0, 0])

    # Stored arrays are independent copies
    lam0[0, 0] = 100.
    assert comm.sampled[0, 0] == 0.
    assert comm.broadcast[0, 0] == 0.


def test_trigger_record():
    assert TriggerRecord(1, 2, 0.2, 0.5, 0.1).effective
    assert not TriggerRecord(1, 2, 0.2, 0., 0.).effective


def test_sample_and_hold(pair):
    comm = CommState.initialize("periodic", 0.5, [[0.], [0.]])
    states = [NodeState([0.]), NodeState([2.])]
    sample_and_hold(states, comm, pair, 0.1, k=1, t=0.5)
    assert np.allclose(comm.held_u, [[0.2], [-0.2]])
    assert np.allclose(comm.sampled, [[0.], [2.]])
    assert np.array_equal(comm.trigger_counts(), [1, 1])
    # Node 0 did not change its value: its broadcast is idempotent
    assert np.array_equal(comm.trigger_counts(effective_only=True), [0, 1])

    # Equal multipliers: no coupling
    sample_and_hold(np.ones((2, 1)), comm, pair, 0.1, k=2)
    assert np.all(comm.held_u == 0.)


def test_sample_and_hold_balanced_sum():
    g = WeightedDigraph.directed_cycle(range(5))
    lam = np.random.default_rng(0).normal(size=(5, 2))
    comm = CommState.initialize("periodic", 1., lam)
    sample_and_hold(lam, comm, g, 0.3, k=0)
    assert np.allclose(comm.held_u.sum(axis=0), 0., atol=1e-14)


def test_sample_and_hold_errors(pair):
    comm = CommState.initialize("periodic", 0.5, np.zeros((2, 1)))
    with pytest.raises(SchedulingError):
        sample_and_hold(np.zeros((2, 1)), comm, pair, 0.1, k=1, t=0.7)

    comm = CommState.initialize("event", 0.5, np.zeros((2, 1)))
    with pytest.raises(SchedulingError):
        sample_and_hold(np.zeros((2, 1)), comm, pair, 0.1, k=1)


def test_event_step_idempotent_tie(pair):
    # e = 0 and equal broadcasts: 0 >= 0 fires without changing anything
    comm = CommState.initialize("event", 0.1, [[1.], [1.]])
    comm, triggered = event_step(np.ones((2, 1)), comm, pair, beta=0.1,
                                 alpha=1., l=[1., 1.], ts=0.1, c=0.5, k=1)
    assert triggered == [0, 1]
    assert np.array_equal(comm.broadcast, [[1.], [1.]])
    assert np.all(comm.held_u == 0.)
    assert np.array_equal(comm.trigger_counts(effective_only=True), [0, 0])


def test_event_step_threshold():
    g = WeightedDigraph([[0., 1.], [1., 0.]])
    comm = CommState.initialize("event", 0.1, [[0.], [1.]])
    # sigma = 0.25: node 0 has e² = 0.01 < 0.25 and stays silent, node 1 has
    # e² = 0.25 >= 0.25 and broadcasts
    lam = np.array([[0.1], [1.5]])
    comm, triggered = event_step(lam, comm, g, beta=0.1, alpha=1., l=[1., 1.],
                                 ts=0.1, c=0.5, k=1, coefficient=0.25)
    assert triggered == [1]
    assert np.allclose(comm.broadcast, [[0.], [1.5]])
    assert np.allclose(comm.views[0, 1], [1.5])
    # Held inputs use post-update broadcasts
    assert np.allclose(comm.held_u, [[0.15], [-0.15]])
    assert comm.events[-1].threshold == pytest.approx(0.25)


def test_event_step_isolated_node():
    # Node 2 has no in-edges: it fires whenever its value moved
    g = WeightedDigraph([[0., 1., 0.], [1., 0., 0.], [0., 0., 0.]])
    comm = CommState.initialize("event", 0.1, np.zeros((3, 1)))
    lam = np.array([[0.], [0.], [1e-6]])
    comm, triggered = event_step(lam, comm, g, beta=0.1, alpha=1.,
                                 l=[1., 1., 1.], ts=0.1, c=0.5, k=1)
    assert 2 in triggered
    assert comm.broadcast[2, 0] == 1e-6
    # Nobody listens to node 2: other views are untouched
    assert comm.views[0, 2, 0] == 0.


def test_event_step_zero_coefficient_matches_periodic():
    schedule = default_ten_node_schedule(horizon=4.)
    rng = np.random.default_rng(1)
    lam0 = rng.normal(size=(10, 2))
    event = CommState.initialize("event", 0.5, lam0)
    periodic = CommState.initialize("periodic", 0.5, lam0)

    for k in range(8):
        lam = rng.normal(size=(10, 2))
        g = schedule.graph_at(k * 0.5)
        event, triggered = event_step(lam, event, g, 0.05, 1., np.ones(10),
                                      0.5, 0.5, k, coefficient=0.)
        sample_and_hold(lam, periodic, g, 0.05, k)
        assert len(triggered) == 10
        assert np.allclose(event.held_u, periodic.held_u, rtol=0., atol=1e-15)


def test_event_step_errors(pair):
    comm = CommState.initialize("event", 0.1, np.zeros((2, 1)))
    with pytest.raises(SchedulingError):
        event_step(np.zeros((2, 1)), comm, pair, 0.1, 1., [1., 1.], 0.1, 0.5,
                   k=3, t=0.35)


def test_on_edge_change():
    old = WeightedDigraph([[0., 1., 0.], [1., 0., 0.], [0., 0., 0.]])
    new = WeightedDigraph([[0., 1., 1.], [1., 0., 0.], [0., 0., 0.]])
    comm = CommState.initialize("event", 0.1, np.zeros((3, 1)))
    comm.broadcast[2] = 5.
    counts = comm.trigger_counts().copy()

    # Identical edge sets: nothing happens
    views = comm.views.copy()
    on_edge_change(comm, old, old)
    assert np.array_equal(comm.views, views)

    # New edge 2 → 0: node 0 receives node 2's last broadcast
    on_edge_change(comm, old, new)
    assert comm.views[0, 2, 0] == 5.
    assert comm.views[1, 2, 0] == 0.
    assert np.array_equal(comm.trigger_counts(), counts)


def test_refresh_continuous(pair):
    comm = CommState.initialize("continuous", 1., np.zeros((2, 1)))
    refresh_continuous([NodeState([0.]), NodeState([2.])], comm, pair, 0.1)
    assert np.allclose(comm.held_u, [[0.2], [-0.2]])
