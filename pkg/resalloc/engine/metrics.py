"""Reductions of recorded trajectories."""

import numpy as np
import xarray as xr

from ..dynamics import (
    ifp_residual_continuous, ifp_residual_sampled, sample_indices,
    z_gain_check
)


def trigger_counts(traj, effective_only=False):
    """Per-node broadcast counts.

    Parameter ``effective_only`` (bool):
        If ``True``, only count broadcasts which changed the transmitted value.

    Returns → array[int]
    """
    nodes = traj["event_node"].values
    if effective_only:
        nodes = nodes[traj["event_e_norm_sq"].values > 0.]
    return np.bincount(nodes.astype(int), minlength=traj.sizes["node"])


def min_inter_event_time(traj):
    """Smallest time between two consecutive broadcasts of the same node [s];
    infinite if no node broadcast twice."""
    nodes = traj["event_node"].values
    times = traj["event_t"].values
    result = np.inf
    for node in np.unique(nodes):
        t = np.sort(times[nodes == node])
        if len(t) > 1:
            result = min(result, float(np.diff(t).min()))
    return result


def inter_event_grid_error(traj):
    """Largest deviation of broadcast instants from the sampling grid, in
    units of the sampling period."""
    ts = float(traj.attrs["ts"])
    times = traj["event_t"].values
    if ts <= 0. or not len(times):
        return 0.
    ratio = times / ts
    return float(np.abs(ratio - np.round(ratio)).max())


def primal_recovery(traj):
    """Recovered allocations :math:`x_i(t) = h_i(\\lambda_i(t))`."""
    return traj["x"]


def primal_feasibility(traj):
    """Terminal primal feasibility residual
    :math:`\\|\\sum_i x_i - \\sum_i d_i\\|`."""
    x = traj["x"].values[-1]
    return float(np.linalg.norm(x.sum(axis=0) - traj["demand"].values.sum(axis=0)))


def gamma_drift(traj):
    """Largest componentwise drift of :math:`\\sum_i \\gamma_i(t)` from its
    initial value over recorded times."""
    total = traj["gamma"].values.sum(axis=1)
    return float(np.abs(total - total[0]).max())


def positive_invariance_margin(traj):
    """Smallest distance from a recorded multiplier to the boundary of its
    dual domain (infinite if every domain is unbounded)."""
    lam = traj["lambda"].values
    lo = traj["domain_lo"].values[np.newaxis]
    hi = traj["domain_hi"].values[np.newaxis]
    return float(np.minimum(lam - lo, hi - lam).min())


def _sampling(traj):
    # Sampling instants of the recorded trajectory and their period; the
    # continuous regime samples every integrator step
    t = traj.t.values
    ts = float(traj.attrs.get("ts", 0.))
    if ts > 0.:
        return sample_indices(t, ts), ts
    return np.arange(len(t)), float(traj.attrs["dt"])


def sampled_storage_total(traj):
    """Network sampled storage :math:`\\sum_i \\bar V_i` at sampling
    instants.

    Returns → tuple[array[float], array[float]]:
        Sampling instants [s] and storage values.
    """
    idx, ts = _sampling(traj)
    v = traj["V"].values[idx]
    zz = np.sum(traj["z"].values[idx] ** 2, axis=-1)
    return traj.t.values[idx], ((v + 0.5 * ts * zz) / ts).sum(axis=1)


def lyapunov_increase(traj):
    """Largest increase of the network sampled storage between consecutive
    sampling instants (negative if it decreases everywhere).

    Raises → ValueError:
        If fewer than 2 sampling instants are recorded.
    """
    _, total = sampled_storage_total(traj)
    if len(total) < 2:
        raise ValueError("at least 2 sampling instants are required")
    return float(np.diff(total).max())


def step_level(traj):
    """``True`` if the trajectory records every integrator step."""
    return int(traj.attrs.get("record_every", 1)) == 1


def ifp_residual_max(traj):
    """Largest continuous dissipation residual over nodes; NaN if the
    trajectory does not record every step."""
    if not step_level(traj) or traj.sizes["t"] < 2:
        return np.nan
    return max(ifp_residual_continuous(traj, node)
               for node in traj.node.values)


def ifp_sampled_residual_max(traj):
    """Largest sampled dissipation residual over nodes; NaN in the continuous
    regime or with fewer than 2 sampling instants."""
    if float(traj.attrs.get("ts", 0.)) <= 0.:
        return np.nan
    idx, _ = _sampling(traj)
    if len(idx) < 2:
        return np.nan
    return max(ifp_residual_sampled(traj, node) for node in traj.node.values)


def z_gain_max(traj):
    """Largest rate gain residual over nodes; NaN if the trajectory does not
    record every step."""
    if not step_level(traj) or traj.sizes["t"] < 2:
        return np.nan
    return max(z_gain_check(traj, node) for node in traj.node.values)


def metrics(traj, oracle=None):
    """Summary of a trajectory.

    Parameter ``traj`` (:class:`~xarray.Dataset`):
        Recorded trajectory.

    Parameter ``oracle`` (:class:`.OracleSolution` or None):
        Centralised optimum. If unset, the one stored in the trajectory is
        used.

    Returns → dict:
        Ordered summary entries.
    """
    terminal = traj.ra.terminal()
    lam_star = (traj["lambda_star"] if oracle is None
                else xr.DataArray(oracle.lambda_star, dims="component"))
    dist = (terminal["lambda"] - lam_star).ra.norm()
    counts = trigger_counts(traj)

    if traj.sizes["t"] >= 2:
        try:
            lyapunov = lyapunov_increase(traj)
        except ValueError:
            lyapunov = np.nan
    else:
        lyapunov = np.nan

    return {
        "status": "aborted" if traj.attrs.get("aborted") else "completed",
        "abort_reason": traj.attrs.get("abort_reason", ""),
        "regime": traj.attrs["regime"],
        "alpha": float(traj.attrs["alpha"]),
        "beta": float(traj.attrs["beta"]),
        "ts": float(traj.attrs["ts"]),
        "c": float(traj.attrs["c"]),
        "certificate_valid": bool(traj.attrs["certificate_valid"]),
        "t_final": float(terminal.t),
        "lambda_star": [float(x) for x in lam_star.values],
        "terminal_consensus_err": float(terminal["consensus_err"]),
        "terminal_dual_residual": float(terminal["dual_residual"]),
        "terminal_dist_to_lstar": float(dist.max()),
        "primal_feasibility": primal_feasibility(traj),
        "optimality_gap": float(terminal["cost"]) - float(traj.attrs["optimal_cost"]),
        "gamma_drift": gamma_drift(traj),
        "positive_invariance_margin": positive_invariance_margin(traj),
        "trigger_counts": [int(x) for x in counts],
        "effective_trigger_counts": [int(x) for x in
                                     trigger_counts(traj, effective_only=True)],
        "trigger_total": int(counts.sum()),
        "min_inter_event_time": min_inter_event_time(traj),
        "ifp_residual_max": ifp_residual_max(traj),
        "ifp_sampled_residual_max": ifp_sampled_residual_max(traj),
        "z_gain_max": z_gain_max(traj),
        "lyapunov_increase": lyapunov,
    }
