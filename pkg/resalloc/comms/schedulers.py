"""Sampling, zero-order hold and event-triggered broadcast."""

import logging

import numpy as np

from .state import Regime, TriggerRecord
from ..conditions import trigger_coefficients
from ..dynamics import NodeState, coupling_all, coupling_from_views
from ..util.exceptions import SchedulingError
from ..util.misc import is_grid_multiple

logger = logging.getLogger(__name__)


def _multipliers(states):
    if len(states) and isinstance(states[0], NodeState):
        return np.array([s.lam for s in states])
    return np.array(states, dtype=float)


def _check_instant(comm, regime, k, t):
    if comm.regime is not regime:
        raise SchedulingError(f"operation requires the {regime.value} regime, "
                              f"got {comm.regime.value}")
    if t is not None and is_grid_multiple(t, comm.ts) != k:
        raise SchedulingError(f"sampling step k = {k} requested at t = {t:g} s, "
                              f"off the sampling grid (ts = {comm.ts:g} s)")


def refresh_continuous(states, comm, g, beta):
    """Recompute the coupling inputs from the current multipliers. Used at
    every integrator step in the continuous regime."""
    comm.held_u = coupling_all(_multipliers(states), g, beta)
    return comm


def sample_and_hold(states, comm, g_k, beta, k, t=None):
    """Sample the multipliers at :math:`t = k T_s` and hold the resulting
    coupling inputs :math:`\\beta \\sum_j a_{ij}(k) (\\bar\\lambda_j(k) -
    \\bar\\lambda_i(k))` until :math:`(k + 1) T_s`. Every node transmits its
    sample.

    Parameter ``states`` (list[:class:`.NodeState`] or array[float]):
        Current node states or multipliers, shape ``(N, m)``.

    Parameter ``comm`` (:class:`.CommState`):
        Communication state (periodic regime). Updated in place.

    Parameter ``g_k`` (:class:`.WeightedDigraph`):
        Communication digraph at step ``k``.

    Parameter ``beta`` (float):
        Coupling gain.

    Parameter ``k`` (int):
        Sampling index.

    Parameter ``t`` (float or None):
        Current time [s]. If set, it is checked against :math:`k T_s`.

    Returns → :class:`.CommState`:
        Updated communication state.

    Raises → :class:`.SchedulingError`:
        If called off the sampling grid or outside the periodic regime.
    """
    _check_instant(comm, Regime.PERIODIC, k, t)
    lam = _multipliers(states)

    e_norm_sq = np.sum((lam - comm.broadcast) ** 2, axis=1)
    comm.sampled = lam.copy()
    comm.broadcast = lam.copy()
    comm.views[...] = lam[np.newaxis, :, :]
    comm.held_u = coupling_all(comm.sampled, g_k, beta)

    tk = k * comm.ts
    for i in range(comm.n):
        comm.log_trigger(TriggerRecord(i, k, tk, e_norm_sq[i], 0.))
    return comm


def event_step(states, comm, g_k, beta, alpha, l, ts, c, k, t=None,
               coefficient=None):
    """Evaluate the event trigger rule at :math:`t = k T_s`:

    .. math::

       \\|e_i(k)\\|^2 \\ge \\sigma_i(k) \\sum_j a_{ij}(k)
       \\|\\hat\\lambda_j(k) - \\hat\\lambda_i(k)\\|^2, \\quad
       e_i(k) = \\bar\\lambda_i(k) - \\hat\\lambda_i(k),

    where :math:`\\sigma_i(k)` is given by :func:`.trigger_coefficients`. All
    nodes evaluate the rule with the broadcast values held before the step;
    triggered nodes then broadcast their sample to their current
    out-neighbours and every node holds
    :math:`\\beta \\sum_j a_{ij}(k) (\\hat\\lambda_j - \\hat\\lambda_i)`.

    Parameter ``l`` (array[float]):
        Per-node Lipschitz bounds.

    Parameter ``c`` (float or array[float]):
        Trigger constants in :math:`(0, 1)`.

    Parameter ``coefficient`` (float or array[float] or None):
        If set, replaces :math:`\\sigma_i(k)`. A zero coefficient makes every
        node broadcast at every sampling instant.

    Returns → tuple[:class:`.CommState`, list[int]]:
        Updated communication state and indices of triggered nodes.

    Raises → :class:`.SchedulingError`:
        If called off the sampling grid or outside the event regime.
    """
    _check_instant(comm, Regime.EVENT, k, t)
    lam = _multipliers(states)
    weights = g_k.weights
    comm.sampled = lam.copy()

    if coefficient is None:
        sigma = trigger_coefficients(l, g_k.in_degree(), alpha, beta, ts, c)
    else:
        sigma = np.broadcast_to(np.asarray(coefficient, dtype=float), (comm.n,))

    e_norm_sq = np.sum((comm.sampled - comm.broadcast) ** 2, axis=1)
    disagreement = np.einsum(
        "ij,ij->i", weights,
        np.sum((comm.views - comm.broadcast[:, np.newaxis, :]) ** 2, axis=2)
    )
    threshold = sigma * disagreement
    triggered = np.flatnonzero(e_norm_sq >= threshold)

    tk = k * comm.ts
    for i in triggered:
        comm.broadcast[i] = comm.sampled[i]
        comm.views[i, i] = comm.sampled[i]
        receivers = np.flatnonzero(weights[:, i] > 0.)
        comm.views[receivers, i] = comm.sampled[i]
        comm.log_trigger(TriggerRecord(i, k, tk, e_norm_sq[i], threshold[i]))

    comm.held_u = coupling_from_views(comm.views, comm.broadcast, g_k, beta)
    return comm, [int(i) for i in triggered]


def on_edge_change(comm, old_g, new_g):
    """Apply the edge establishment protocol at a graph switch: for every
    edge present in ``new_g`` but not in ``old_g``, the sender transmits its
    last broadcast value to the new receiver. This resynchronisation is not a
    trigger and is not logged. Removed edges need no action.

    Returns → :class:`.CommState`:
        Updated communication state.
    """
    new_edges = new_g.edges() - old_g.edges()
    for sender, receiver in new_edges:
        comm.views[receiver, sender] = comm.broadcast[sender]
    if new_edges:
        logger.debug("resynchronised %d new edges", len(new_edges))
    return comm
