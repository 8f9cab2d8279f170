"""Initialisation and time stepping of the networked system."""

import logging

import numpy as np
from tqdm import tqdm

from .integrator import rk4_step
from .oracle import solve_oracle
from .trajectory import TrajectoryRecorder
from ..comms import (
    CommState, Regime, event_step, on_edge_change, refresh_continuous,
    sample_and_hold
)
from ..dynamics import NodeState
from ..util.exceptions import DomainError, SimulationAbort

logger = logging.getLogger(__name__)

#: Half-width of the box initial allocations are drawn from
X0_BOX = 2.


def initial_allocations(cfg):
    """Initial allocations: ``cfg.x0`` if set, otherwise drawn componentwise
    uniformly on :math:`[-2, 2]` from a generator seeded with ``cfg.seed``."""
    if cfg.x0 is not None:
        return np.array(cfg.x0, dtype=float)
    rng = np.random.default_rng(cfg.seed)
    return rng.uniform(-X0_BOX, X0_BOX, size=(cfg.n, cfg.dim))


def initialize(cfg):
    """Initial node states :math:`\\lambda_i(0) = \\nabla f_i(x_i(0))`,
    :math:`\\gamma_i(0) = 0`. The multipliers start inside their dual domains
    and the integral states sum to zero.

    Parameter ``cfg`` (:class:`.ScenarioConfig`):
        Simulated configuration.

    Returns → list[:class:`.NodeState`]
    """
    x0 = initial_allocations(cfg)
    return [NodeState(cost.gradient(x), np.zeros(cfg.dim))
            for cost, x in zip(cfg.costs, x0)]


def _stacked(states):
    return (np.array([s.lam for s in states]),
            np.array([s.gamma for s in states]))


def step(states, comm, cfg, t):
    """Advance all node states by one integrator step with the inputs held by
    ``comm``.

    Parameter ``states`` (list[:class:`.NodeState`] or tuple[array, array]):
        Node states at ``t``, either per node or stacked as ``(lam, gamma)``
        arrays of shape ``(N, m)``.

    Parameter ``comm`` (:class:`.CommState`):
        Communication state holding the inputs applied over
        :math:`[t, t + dt)`.

    Parameter ``cfg`` (:class:`.ScenarioConfig`):
        Simulated configuration.

    Parameter ``t`` (float):
        Current time [s].

    Returns → list[:class:`.NodeState`] or tuple[array, array]:
        Node states at :math:`t + dt`, in the layout of ``states``.

    Raises → :class:`.DomainError`:
        If a multiplier leaves its dual domain; the error is located at the
        offending node and ``t``.
    """
    stacked = isinstance(states, tuple)
    lam, gamma = states if stacked else _stacked(states)
    try:
        lam, gamma = rk4_step(lam, gamma, comm.held_u, cfg.stack, cfg.alpha,
                              cfg.dt_s)
    except DomainError as e:
        raise e.locate(e.node, t)
    if stacked:
        return lam, gamma
    return [NodeState(l, g) for l, g in zip(lam, gamma)]


def _segment_steps(cfg):
    # Integrator step index at which each schedule segment starts
    return [int(round(start / cfg.dt_s)) for start in cfg.schedule.start_times]


def run(cfg, oracle=None, progress=False):
    """Simulate a configuration over its horizon.

    The communication regime updates the held inputs before each integrator
    step: every step in the continuous regime, at every sampling instant in
    the periodic and event regimes. Sampled regimes hold the graph in force
    at the last sampling instant :math:`\\mathcal{G}(kT_s)`; a graph change
    at a sampling instant goes through the edge establishment protocol.

    Parameter ``cfg`` (:class:`.ScenarioConfig`):
        Simulated configuration.

    Parameter ``oracle`` (:class:`.OracleSolution` or None):
        Centralised optimum. Computed if unset.

    Parameter ``progress`` (bool):
        If ``True``, display a progress bar.

    Returns → :class:`~xarray.Dataset`:
        Recorded trajectory.

    Raises → :class:`.SimulationAbort`:
        If a multiplier leaves its dual domain. The partial trajectory is
        attached to the exception.
    """
    if oracle is None:
        oracle = solve_oracle(cfg.stack, alpha=cfg.alpha)
    certificate = cfg.certificate()

    lam, gamma = _stacked(initialize(cfg))
    stack, alpha, beta, dt = cfg.stack, cfg.alpha, cfg.beta, cfg.dt_s
    regime = cfg.regime
    comm = CommState.initialize(regime, cfg.ts_s if regime.is_sampled else dt,
                                lam)
    recorder = TrajectoryRecorder(cfg, oracle)
    every, per_sample = cfg.record_every, cfg.steps_per_sample

    graphs = cfg.schedule.graphs
    starts = _segment_steps(cfg) + [np.inf]
    segment = 0
    g = graphs[0]

    logger.info("running %d nodes, %s regime, %g s horizon (%d steps)",
                cfg.n, regime.value, cfg.horizon_s, cfg.n_steps)

    n = 0
    try:
        for n in tqdm(range(cfg.n_steps), disable=not progress, unit="step",
                      mininterval=0.5):
            t = n * dt

            while n >= starts[segment + 1]:
                segment += 1

            if regime is Regime.CONTINUOUS:
                g = graphs[segment]
                refresh_continuous(lam, comm, g, beta)
            elif n % per_sample == 0:
                k = n // per_sample
                g_prev, g = g, graphs[segment]
                if g is not g_prev:
                    on_edge_change(comm, g_prev, g)
                if regime is Regime.PERIODIC:
                    sample_and_hold(lam, comm, g, beta, k)
                else:
                    event_step(lam, comm, g, beta, alpha, stack.lipschitz,
                               cfg.ts_s, cfg.c, k,
                               coefficient=cfg.trigger_coefficient)

            if n % every == 0:
                recorder.record(t, lam, gamma, comm.held_u)

            lam, gamma = step((lam, gamma), comm, cfg, t)

    except DomainError as e:
        t = n * dt
        if e.time is None:
            e.locate(e.node, t)
        logger.error("run aborted: %s", e)
        if recorder.size == 0 or recorder.t[recorder.size - 1] != t:
            try:
                recorder.record(t, lam, gamma, comm.held_u)
            except DomainError:
                # The offending state cannot be mapped to allocations
                pass
        traj = recorder.to_dataset(comm, certificate, abort_reason=str(e))
        raise SimulationAbort(f"run aborted at t = {t:g} s: {e}",
                              trajectory=traj) from e

    recorder.record(cfg.horizon_s, lam, gamma, comm.held_u)
    traj = recorder.to_dataset(comm, certificate)
    logger.info("finished: %d broadcasts, terminal distance to optimum %.3e",
                len(comm.events), float(traj["dist_to_lstar"].values[-1]))
    return traj
