import numpy as np
import pytest

from resalloc.comms import CommState, refresh_continuous
from resalloc.costs import LogExpTerm, QuadraticCost, SeparableLogExpCost
from resalloc.dynamics import NodeState, coupling_all
from resalloc.engine import (
    ScenarioConfig, initialize, metrics, run, solve_oracle, step
)
from resalloc.graphs import GraphSchedule, WeightedDigraph
from resalloc.engine.simulation import initial_allocations
from resalloc.util.exceptions import DomainError, SimulationAbort


@pytest.fixture
def cfg(scalar_quadratics, ring3_schedule):
    return ScenarioConfig(costs=scalar_quadratics, schedule=ring3_schedule,
                          beta=0.02, horizon=2., dt=1e-2, seed=3)


@pytest.fixture
def logistic_costs():
    # Dual domains (0, 1); the optimum is lambda* = 0.5 with x* = 0
    return [
        SeparableLogExpCost(coordinates=[LogExpTerm([1., 0.])], demand=[d],
                            lipschitz=0.25)
        for d in [20., -20., 0.]
    ]


def test_initialize(cfg):
    states = initialize(cfg)
    x0 = initial_allocations(cfg)
    assert len(states) == 3
    assert np.all(np.abs(x0) <= 2.)
    for state, a, x in zip(states, [1., 2., 4.], x0):
        assert np.allclose(state.lam, a * x)
        assert np.all(state.gamma == 0.)

    # Seeded draws
    assert np.array_equal(initial_allocations(cfg), x0)
    assert not np.array_equal(initial_allocations(cfg.evolve(seed=4)), x0)

    # Explicit initial allocations
    cfg = cfg.evolve(x0=[[1.], [1.], [-1.]])
    assert np.allclose([s.lam for s in initialize(cfg)], [[1.], [2.], [-4.]])


def test_step_fixed_point(cfg):
    oracle = solve_oracle(cfg.stack, alpha=cfg.alpha)
    states = [NodeState(oracle.lambda_star, g) for g in oracle.gamma_star]
    comm = CommState.initialize("continuous", cfg.dt_s,
                                [s.lam for s in states])
    new_states = step(states, comm, cfg, 0.)
    for old, new in zip(states, new_states):
        assert np.allclose(new.lam, old.lam, rtol=0., atol=1e-14)
        assert np.allclose(new.gamma, old.gamma, rtol=0., atol=1e-14)


def test_step_fourth_order(cfg):
    # Constant held inputs: the step error ratio between successive halvings
    # of dt tends to 2**4
    lam0 = np.array([[3.], [-1.], [2.]])
    gamma0 = np.array([[0.5], [-0.2], [-0.3]])
    u = np.array([[0.1], [-0.3], [0.2]])

    def terminal(dt):
        c = cfg.evolve(dt=dt)
        comm = CommState.initialize("continuous", c.dt_s, lam0)
        comm.held_u = u
        states = (lam0, gamma0)
        for n in range(int(round(1. / dt))):
            states = step(states, comm, c, n * dt)
        return states

    (l1, _), (l2, _), (l3, g3) = [terminal(dt) for dt in [0.1, 0.05, 0.025]]
    ratio = np.abs(l1 - l2).max() / np.abs(l2 - l3).max()
    assert 14. < ratio < 19.
    # Integral states are integrated exactly under constant inputs
    assert np.allclose(g3, gamma0 - u, rtol=0., atol=1e-14)


def test_step_layouts(cfg):
    states = initialize(cfg)
    lam = np.array([s.lam for s in states])
    gamma = np.array([s.gamma for s in states])
    comm = CommState.initialize("continuous", cfg.dt_s, lam)
    refresh_continuous(lam, comm, cfg.schedule.graph_at(0.), cfg.beta)

    new_states = step(states, comm, cfg, 0.)
    new_lam, new_gamma = step((lam, gamma), comm, cfg, 0.)
    assert all(isinstance(s, NodeState) for s in new_states)
    assert np.array_equal([s.lam for s in new_states], new_lam)
    assert np.array_equal([s.gamma for s in new_states], new_gamma)


def test_step_domain_error(logistic_costs, ring3_schedule):
    cfg = ScenarioConfig(costs=logistic_costs, schedule=ring3_schedule,
                         beta=0.02, horizon=2., dt=1e-2)
    states = [NodeState([0.5]), NodeState([0.999999], [-100.]),
              NodeState([0.5])]
    comm = CommState.initialize("continuous", cfg.dt_s,
                                [s.lam for s in states])
    with pytest.raises(DomainError) as e:
        step(states, comm, cfg, 0.5)
    assert e.value.node == 1
    assert e.value.time == 0.5
    assert "t = 0.5 s" in str(e.value)


def test_run_continuous(cfg):
    traj = run(cfg)
    assert traj.sizes["t"] == 201
    assert traj.t.values[-1] == 2.
    assert traj.sizes["event"] == 0
    assert not traj.attrs["aborted"]
    assert traj.attrs["regime"] == "continuous"
    assert traj.attrs["certificate_valid"] == 1

    # Integral states keep a zero sum and balanced couplings sum to zero
    assert np.allclose(traj["gamma"].sum("node"), 0., rtol=0., atol=1e-12)
    assert np.allclose(traj["u"].sum("node"), 0., rtol=0., atol=1e-12)

    # Recorded allocations and storages follow the multipliers
    x = traj["x"].values
    assert np.allclose(traj["lambda"].values,
                       x * np.array([1., 2., 4.])[np.newaxis, :, np.newaxis])
    assert np.all(traj["V"].values >= 0.)

    # Deterministic under a fixed seed
    assert np.array_equal(run(cfg)["lambda"].values, traj["lambda"].values)


def test_run_periodic_at_integrator_step_matches_continuous(cfg):
    ref = run(cfg)
    traj = run(cfg.evolve(regime="periodic", ts=cfg.dt_s))
    assert np.allclose(traj["lambda"].values, ref["lambda"].values,
                       rtol=0., atol=1e-12)
    # Every node transmits at every sample
    assert np.array_equal(traj["event_node"].values[:3], [0, 1, 2])
    assert traj.sizes["event"] == 3 * cfg.n_steps


def test_run_event_without_threshold_matches_periodic(cfg):
    periodic = run(cfg.evolve(regime="periodic", ts=0.1))
    event = run(cfg.evolve(regime="event", ts=0.1, trigger_coefficient=0.))
    assert np.allclose(event["lambda"].values, periodic["lambda"].values,
                       rtol=0., atol=1e-12)
    assert np.allclose(event["u"].values, periodic["u"].values,
                       rtol=0., atol=1e-12)


def test_run_event(cfg):
    traj = run(cfg.evolve(regime="event", ts=0.1, horizon=10.))
    assert traj.attrs["ts"] == 0.1
    t_events = traj["event_t"].values
    assert len(t_events) > 0

    # Broadcasts occur on the sampling grid, at most once per node and sample
    k = traj["event_k"].values
    assert np.allclose(t_events, 0.1 * k)
    assert np.all(k < 100)
    pairs = set(zip(traj["event_node"].values, k))
    assert len(pairs) == len(k)

    # Recorded thresholds are not larger than the transmitted errors
    assert np.all(traj["event_e_norm_sq"].values
                  >= traj["event_threshold"].values)
    assert np.allclose(traj["gamma"].sum("node"), 0., rtol=0., atol=1e-12)


@pytest.mark.parametrize("record_every, expected", [(5, 41), (10, 21)])
def test_run_record_every(cfg, record_every, expected):
    traj = run(cfg.evolve(record_every=record_every))
    assert traj.sizes["t"] == expected
    assert traj.t.values[-1] == 2.
    assert traj.attrs["record_every"] == record_every


def test_run_record_every_off_horizon(cfg):
    # 200 steps recorded every 3 steps, plus the terminal point
    traj = run(cfg.evolve(record_every=3))
    assert traj.sizes["t"] == 68
    assert np.isclose(traj.t.values[-2], 1.98)
    assert traj.t.values[-1] == 2.


def test_run_abort(logistic_costs, ring3_schedule):
    # Node 0 starts next to the upper bound of its dual domain and is pushed
    # outwards
    cfg = ScenarioConfig(costs=logistic_costs, schedule=ring3_schedule,
                         beta=0.02, horizon=2., dt=1e-2,
                         x0=[[15.], [0.], [0.]])
    with pytest.raises(SimulationAbort) as e:
        run(cfg)

    assert isinstance(e.value.__cause__, DomainError)
    assert e.value.__cause__.node == 0
    traj = e.value.trajectory
    assert traj.attrs["aborted"] == 1
    assert "node 0" in traj.attrs["abort_reason"]
    # The failure is located once, by the integrator step
    assert traj.attrs["abort_reason"].count("node 0, t = ") == 1
    assert traj.sizes["t"] == 1
    assert np.isclose(float(traj["lambda_star"][0]), 0.5)


def test_run_steps_through_step(cfg):
    # A hand-written continuous loop reproduces the recorded trajectory
    states = initialize(cfg)
    lam = np.array([s.lam for s in states])
    gamma = np.array([s.gamma for s in states])
    comm = CommState.initialize("continuous", cfg.dt_s, lam)
    for n in range(cfg.n_steps):
        t = n * cfg.dt_s
        refresh_continuous(lam, comm, cfg.schedule.graph_at(t), cfg.beta)
        lam, gamma = step((lam, gamma), comm, cfg, t)

    traj = run(cfg)
    assert np.allclose(traj["lambda"].values[-1], lam, rtol=0., atol=1e-14)
    assert np.allclose(traj["gamma"].values[-1], gamma, rtol=0., atol=1e-14)


def test_run_periodic_holds_sampled_graph(cfg, ring3):
    # Samples at multiples of 0.3 s, graph switches every second: the input
    # held over [0.9, 1.2) uses the graph seen at t = 0.9 s
    reverse = WeightedDigraph.directed_cycle([0, 2, 1])
    traj = run(cfg.evolve(regime="periodic", ts=0.3, horizon=3.,
                          record_every=10))
    lam, u = traj["lambda"].values, traj["u"].values
    assert np.allclose(traj.t.values[[9, 11, 12]], [0.9, 1.1, 1.2])

    assert np.allclose(u[9], coupling_all(lam[9], ring3, cfg.beta),
                       rtol=0., atol=1e-14)
    assert np.array_equal(u[11], u[9])
    assert np.allclose(u[12], coupling_all(lam[12], reverse, cfg.beta),
                       rtol=0., atol=1e-14)
    # Every sample is transmitted, switches included
    assert traj.sizes["event"] == 3 * 10


def test_run_oracle_independent_of_graph(ring3):
    costs = [QuadraticCost(q=[[1.]], demand=[d], lipschitz=1.)
             for d in [1., -0.5, 2.]]
    reverse = WeightedDigraph.directed_cycle([0, 2, 1])
    complete = WeightedDigraph([[0., .5, .5], [.5, 0., .5], [.5, .5, 0.]])
    schedules = [
        GraphSchedule.cycle([ring3, reverse], dwell=1., horizon=40.),
        GraphSchedule.from_segments([(0., complete)], horizon=40.),
    ]

    expected = solve_oracle(costs).lambda_star
    assert np.isclose(expected[0], 2.5 / 3., rtol=0., atol=1e-10)
    for schedule in schedules:
        cfg = ScenarioConfig(costs=costs, schedule=schedule, beta=0.2,
                             horizon=40., dt=1e-2, x0=[[3.], [-1.], [2.]])
        assert cfg.certificate().valid
        traj = run(cfg, oracle=None)
        assert np.array_equal(traj["lambda_star"].values, expected)
        assert metrics(traj)["terminal_dist_to_lstar"] <= 1e-6
