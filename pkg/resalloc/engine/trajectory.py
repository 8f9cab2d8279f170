"""Trajectory recording and serialisation.

A trajectory is an :class:`xarray.Dataset` with dimensions ``t``, ``node``
and ``component`` holding the recorded states, held inputs and diagnostics,
the centralised optimum, per-node problem data and the broadcast records
(dimension ``event``).
"""

import os
from pathlib import Path

import numpy as np
import pandas as pd
import scipy.spatial.distance
import xarray as xr

from .. import __version__
from ..dynamics import storage_values
from ..util.xarray import trajectory_dataset_spec

#: Trajectory CSV float format (17 significant digits)
CSV_FLOAT_FORMAT = "%.17g"

#: Event record columns
EVENT_COLUMNS = ("node", "k", "t", "e_norm_sq", "threshold")


class TrajectoryRecorder:
    """Accumulate recorded points into preallocated arrays and assemble the
    trajectory dataset.

    Parameter ``cfg`` (:class:`.ScenarioConfig`):
        Simulated configuration.

    Parameter ``oracle`` (:class:`.OracleSolution`):
        Centralised optimum used for storage values and distances.
    """

    def __init__(self, cfg, oracle):
        self.cfg = cfg
        self.oracle = oracle
        self.stack = cfg.stack

        n_steps, every = cfg.n_steps, cfg.record_every
        capacity = n_steps // every + 1 + (1 if n_steps % every else 0)
        shape = (capacity, cfg.n, cfg.dim)
        self.size = 0
        self.t = np.empty(capacity)
        self.lam = np.empty(shape)
        self.gamma = np.empty(shape)
        self.u = np.empty(shape)
        self.x = np.empty(shape)
        self.z = np.empty(shape)
        self.v = np.empty((capacity, cfg.n))
        self.cost = np.empty(capacity)
        self.consensus_err = np.empty(capacity)
        self.dual_residual = np.empty(capacity)
        self.dist_to_lstar = np.empty(capacity)

    def record(self, t, lam, gamma, u):
        """Record the network state at time ``t``."""
        k = self.size
        stack, oracle = self.stack, self.oracle
        x = stack.inverse_gradient(lam)
        v, z = storage_values(lam, gamma, oracle.lambda_star, oracle.gamma_star,
                              stack, self.cfg.alpha, x=x)

        self.t[k] = t
        self.lam[k], self.gamma[k], self.u[k] = lam, gamma, u
        self.x[k], self.z[k], self.v[k] = x, z, v
        self.cost[k] = stack.value(x).sum()
        self.consensus_err[k] = (
            scipy.spatial.distance.pdist(lam).max() if stack.n > 1 else 0.
        )
        self.dual_residual[k] = np.linalg.norm((x - stack.demand).sum(axis=0))
        self.dist_to_lstar[k] = np.linalg.norm(lam - oracle.lambda_star,
                                               axis=1).max()
        self.size += 1

    def to_dataset(self, comm, certificate, abort_reason=None):
        """Assemble the recorded points into a trajectory dataset.

        Parameter ``comm`` (:class:`.CommState`):
            Final communication state; its broadcast records are stored.

        Parameter ``certificate`` (:class:`.GainCertificate`):
            Gain certificate of the simulated configuration.

        Parameter ``abort_reason`` (str or None):
            If set, the run stopped early for this reason.

        Returns → :class:`~xarray.Dataset`
        """
        cfg, stack, oracle = self.cfg, self.stack, self.oracle
        s = slice(0, self.size)
        tnc = ("t", "node", "component")
        nc = ("node", "component")
        events = comm.events

        ds = xr.Dataset(
            data_vars={
                "lambda": (tnc, self.lam[s]),
                "gamma": (tnc, self.gamma[s]),
                "u": (tnc, self.u[s]),
                "z": (tnc, self.z[s]),
                "x": (tnc, self.x[s]),
                "V": (("t", "node"), self.v[s]),
                "cost": (("t",), self.cost[s]),
                "consensus_err": (("t",), self.consensus_err[s]),
                "dual_residual": (("t",), self.dual_residual[s]),
                "dist_to_lstar": (("t",), self.dist_to_lstar[s]),
                "lambda_star": (("component",), oracle.lambda_star),
                "x_star": (nc, oracle.x_star),
                "gamma_star": (nc, oracle.gamma_star),
                "demand": (nc, stack.demand),
                "lipschitz": (("node",), stack.lipschitz),
                "domain_lo": (nc, stack.lo),
                "domain_hi": (nc, stack.hi),
                "margin": (("node",), certificate.per_node_margin),
                "event_node": (("event",),
                               np.array([e.node for e in events], dtype=int)),
                "event_k": (("event",),
                            np.array([e.k for e in events], dtype=int)),
                "event_t": (("event",), np.array([e.t for e in events])),
                "event_e_norm_sq": (("event",),
                                    np.array([e.e_norm_sq for e in events])),
                "event_threshold": (("event",),
                                    np.array([e.threshold for e in events])),
            },
            coords={
                "t": self.t[s].copy(),
                "node": np.arange(cfg.n),
                "component": np.arange(cfg.dim),
            },
            attrs={
                "convention": "CF-1.8",
                "title": "Resource allocation trajectory",
                "history": f"data creation - {__name__}",
                "source": f"resalloc, version {__version__}",
                "regime": cfg.regime.value,
                "alpha": cfg.alpha,
                "beta": cfg.beta,
                "ts": cfg.ts_s,
                "dt": cfg.dt_s,
                "horizon": cfg.horizon_s,
                "c": cfg.c,
                "seed": cfg.seed,
                "record_every": cfg.record_every,
                "certificate_valid": int(certificate.valid),
                "optimal_cost": oracle.optimal_cost(stack),
                "oracle_residual": oracle.residual,
                "aborted": int(abort_reason is not None),
            }
        )
        if abort_reason is not None:
            ds.attrs["abort_reason"] = abort_reason
        ds.ra.normalize_metadata(trajectory_dataset_spec)
        return ds


# -- Serialisation -------------------------------------------------------------

def _prepare(path):
    path = Path(path).absolute()
    os.makedirs(path.parent, exist_ok=True)
    return path


def write_csv(df, path):
    """Write a data frame with the fixed CSV formatting of output files."""
    df.to_csv(_prepare(path), index=False, float_format=CSV_FLOAT_FORMAT,
              lineterminator="\n")


def trajectory_frame(traj):
    """Flatten a trajectory to a :class:`~pandas.DataFrame` with one row per
    (time, node) pair and columns ``t``, ``node``, ``lambda_<j>``,
    ``gamma_<j>``, ``u_<j>``, ``V``, ``consensus_err``, ``dual_residual`` and
    ``dist_to_lstar``."""
    t = traj.t.values
    nodes = traj.node.values
    n_t, n_nodes = len(t), len(nodes)

    columns = {
        "t": np.repeat(t, n_nodes),
        "node": np.tile(nodes, n_t),
    }
    for var in ("lambda", "gamma", "u"):
        values = traj[var].values
        for j in traj.component.values:
            columns[f"{var}_{j}"] = values[:, :, j].reshape(-1)
    columns["V"] = traj["V"].values.reshape(-1)
    for var in ("consensus_err", "dual_residual", "dist_to_lstar"):
        columns[var] = np.repeat(traj[var].values, n_nodes)

    return pd.DataFrame(columns)


def events_frame(traj):
    """Broadcast records as a :class:`~pandas.DataFrame` with columns
    ``node``, ``k``, ``t``, ``e_norm_sq`` and ``threshold``."""
    return pd.DataFrame({
        column: traj[f"event_{column}"].values for column in EVENT_COLUMNS
    })


def write_trajectory_csv(traj, path):
    """Write the trajectory CSV file."""
    write_csv(trajectory_frame(traj), path)


def write_events_csv(traj, path):
    """Write the broadcast records CSV file."""
    write_csv(events_frame(traj), path)


def write_netcdf(traj, path):
    """Write the trajectory to a netCDF file. Event variables are dropped if
    the trajectory has no broadcast record."""
    if "event" in traj.dims and traj.sizes["event"] == 0:
        traj = traj.drop_dims("event")
    traj.to_netcdf(_prepare(path), engine="scipy")


def format_summary(summary):
    """Render a summary dictionary as ``key=value`` lines. Floats are written
    with 17 significant digits, sequences as comma-separated lists."""

    def fmt(value):
        if isinstance(value, (float, np.floating)):
            return f"{value:.17g}"
        if isinstance(value, (list, tuple, np.ndarray)):
            return ",".join(fmt(x) for x in value)
        return str(value)

    return "".join(f"{key}={fmt(value)}\n" for key, value in summary.items())


def write_summary(summary, path):
    """Write a summary dictionary as ``key=value`` lines."""
    with open(_prepare(path), "w", newline="\n") as f:
        f.write(format_summary(summary))
