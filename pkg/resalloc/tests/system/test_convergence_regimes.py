"""Full-horizon reproduction runs on the built-in ten-node scenario."""

import numpy as np
import pytest

from resalloc.engine import (
    ScenarioConfig, gamma_drift, metrics, primal_feasibility, run,
    trigger_counts
)
from resalloc.engine.metrics import inter_event_grid_error, min_inter_event_time
from resalloc.graphs import default_ten_node_schedule
from resalloc.util.exceptions import ConfigWarning

HORIZON = 300.
SEED = 7


def ten_node_config(**kwargs):
    kwargs.setdefault("record_every", 100)
    return ScenarioConfig(
        costs="ten_node_default",
        schedule=default_ten_node_schedule(horizon=HORIZON),
        horizon=HORIZON,
        dt=1e-3,
        seed=SEED,
        **kwargs
    )


def node_distances(traj):
    terminal = traj.ra.terminal()
    return np.linalg.norm(terminal["lambda"].values
                          - traj["lambda_star"].values, axis=1)


@pytest.mark.slow
def test_continuous_convergence():
    r"""
    Continuous-regime convergence
    =============================

    Rationale
    ---------

        - Problem and graph: built-in ten-node scenario
        - Gains: :math:`\alpha = 1`, :math:`\beta = 0.05`
        - Integration: 300 s, :math:`dt = 10^{-3}` s, seeded initial
          allocations

    Expected behaviour
    ------------------

        - Every node ends within 2e-2 of :math:`\lambda^*`.
        - Terminal primal feasibility residual is at most 1e-2.
        - :math:`\sum_i \gamma_i` drifts by at most 1e-8.
    """
    traj = run(ten_node_config(beta=0.05))
    assert np.all(node_distances(traj) <= 2e-2)
    assert primal_feasibility(traj) <= 1e-2
    assert gamma_drift(traj) <= 1e-8


@pytest.mark.slow
def test_large_gain_divergence():
    r"""
    Large-gain divergence
    =====================

    Same run as the continuous convergence test with a coupling gain well
    above the admissible range.

    Rationale
    ---------

        - Gains: :math:`\alpha = 1`, :math:`\beta = 0.5`

    Expected behaviour
    ------------------

        - The run completes without leaving a dual domain.
        - The terminal consensus error stays above 0.1.
    """
    with pytest.warns(ConfigWarning, match="not admissible"):
        cfg = ten_node_config(beta=0.5)

    traj = run(cfg)
    assert traj.attrs["aborted"] == 0
    assert metrics(traj)["terminal_consensus_err"] > 0.1
    assert float(traj["consensus_err"].values[-1]) > 0.1


@pytest.mark.slow
@pytest.mark.parametrize("ts", [0.5, 1.5])
def test_periodic_convergence(ts):
    r"""
    Periodic-regime convergence
    ===========================

    Rationale
    ---------

        - Gains: :math:`\alpha = 1`, :math:`\beta = 0.05`
        - Sampling: :math:`T_s \in \{0.5, 1.5\}` s with zero-order hold
          of the inputs and of the graph seen at the sampling instants
        - Integration: 300 s, :math:`dt = 10^{-3}` s

    Expected behaviour
    ------------------

        - Every node ends within 5e-2 of :math:`\lambda^*`.
        - Every node transmits at every sampling instant.
        - :math:`\sum_i \gamma_i` drifts by at most 1e-8.
    """
    traj = run(ten_node_config(beta=0.05, regime="periodic", ts=ts))
    assert np.all(node_distances(traj) <= 5e-2)
    assert np.all(trigger_counts(traj) == int(round(HORIZON / ts)))
    assert gamma_drift(traj) <= 1e-8


@pytest.mark.slow
def test_event_triggered_behaviour():
    r"""
    Event-triggered behaviour
    =========================

    Rationale
    ---------

        - Gains: :math:`\alpha = 1`, :math:`\beta = 0.09`
        - Sampling: :math:`T_s = 0.1` s, trigger constant :math:`c = 0.5`
        - Integration: 300 s, :math:`dt = 10^{-3}` s

    Expected behaviour
    ------------------

        - Every node ends within 5e-2 of :math:`\lambda^*`.
        - Every node broadcasts fewer than 3000 times (the periodic count).
        - Fewer than half of the 30000 periodic broadcasts occur in total.
        - Trigger counts spread by a factor of at least 5 across nodes.
        - Broadcasts of a node lie on the sampling grid, at least
          :math:`T_s` apart.
        - :math:`\sum_i \gamma_i` drifts by at most 1e-8.
    """
    cfg = ten_node_config(beta=0.09, regime="event", ts=0.1, c=0.5)
    assert cfg.certificate().valid
    traj = run(cfg)
    summary = metrics(traj)

    assert np.all(node_distances(traj) <= 5e-2)

    counts = np.array(summary["trigger_counts"])
    assert np.all(counts < 3000)
    assert counts.sum() < 0.5 * 10 * 3000
    assert counts.max() / max(counts.min(), 1) >= 5

    assert inter_event_grid_error(traj) <= 1e-9
    assert min_inter_event_time(traj) >= 0.1 * (1. - 1e-9)
    assert gamma_drift(traj) <= 1e-8
