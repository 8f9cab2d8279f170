"""Parameter sweeps: one simulation per value of a configuration parameter,
sharing everything else (seed included)."""

import logging

import dask
import numpy as np
import pandas as pd

from ..engine import metrics, run, write_csv
from ..util.exceptions import ResallocError, SimulationAbort

logger = logging.getLogger(__name__)

#: Sweepable parameters and their scenario document paths
SWEEP_PARAMETERS = {
    "beta": "gains.beta",
    "ts": "comm.ts",
    "c": "comm.c",
}

#: Sweep table columns
SWEEP_COLUMNS = (
    "param", "value", "status", "certificate_valid", "t_final",
    "terminal_consensus_err", "terminal_dual_residual",
    "terminal_dist_to_lstar", "primal_feasibility", "gamma_drift",
    "trigger_total", "effective_trigger_total", "trigger_max", "trigger_min",
    "error",
)


def _row(param, value, summary=None, status=None, error=""):
    row = dict.fromkeys(SWEEP_COLUMNS, np.nan)
    row.update(param=param, value=value, error=error)

    if summary is None:
        row["status"] = status
        return row

    counts = summary["trigger_counts"]
    row.update(
        status=status or summary["status"],
        certificate_valid=summary["certificate_valid"],
        t_final=summary["t_final"],
        terminal_consensus_err=summary["terminal_consensus_err"],
        terminal_dual_residual=summary["terminal_dual_residual"],
        terminal_dist_to_lstar=summary["terminal_dist_to_lstar"],
        primal_feasibility=summary["primal_feasibility"],
        gamma_drift=summary["gamma_drift"],
        trigger_total=summary["trigger_total"],
        effective_trigger_total=sum(summary["effective_trigger_counts"]),
        trigger_max=max(counts),
        trigger_min=min(counts),
    )
    return row


def sweep_point(scenario, param, value):
    """Run a scenario with one parameter overridden.

    Errors raised by resalloc do not propagate: they are recorded in the
    returned row, with ``status`` ``"invalid"`` for errors raised while
    building the configuration, ``"aborted"`` for simulation aborts and
    ``"failed"`` for other errors raised by the run.

    Parameter ``scenario`` (:class:`.Scenario`):
        Base scenario.

    Parameter ``param`` (str):
        Swept parameter (a key of :data:`SWEEP_PARAMETERS`).

    Parameter ``value`` (float):
        Parameter value.

    Returns → dict:
        Sweep table row.
    """
    value = float(value)
    try:
        cfg = scenario.with_overrides({SWEEP_PARAMETERS[param]: value}).config
    except ResallocError as e:
        logger.warning("sweep %s=%g: invalid configuration: %s",
                       param, value, e)
        return _row(param, value, status="invalid", error=str(e))

    try:
        traj = run(cfg)
    except SimulationAbort as e:
        logger.warning("sweep %s=%g: %s", param, value, e)
        return _row(param, value, summary=metrics(e.trajectory),
                    status="aborted", error=str(e))
    except ResallocError as e:
        logger.error("sweep %s=%g: run failed: %s", param, value, e)
        return _row(param, value, status="failed", error=str(e))

    return _row(param, value, summary=metrics(traj))


def sweep(scenario, param, values, workers=1):
    """Run one simulation per parameter value.

    Parameter ``scenario`` (:class:`.Scenario`):
        Base scenario.

    Parameter ``param`` (str):
        Swept parameter: one of ``"beta"``, ``"ts"``, ``"c"``.

    Parameter ``values`` (iterable[float]):
        Parameter values; rows keep their order.

    Parameter ``workers`` (int):
        Number of simulations run concurrently.

    Returns → :class:`~pandas.DataFrame`:
        One row per value, with columns :data:`SWEEP_COLUMNS`.

    Raises → ValueError:
        If ``param`` is not sweepable, ``values`` is empty or contains a
        non-finite number, or ``workers`` is not strictly positive.
    """
    if param not in SWEEP_PARAMETERS:
        raise ValueError(f"cannot sweep '{param}' (sweepable: "
                         f"{', '.join(SWEEP_PARAMETERS)})")
    values = [float(value) for value in values]
    if not values:
        raise ValueError("sweep values must not be empty")
    if not np.all(np.isfinite(values)):
        raise ValueError(f"sweep values must be finite, got {values}")
    if workers < 1:
        raise ValueError(f"workers must be strictly positive, got {workers}")

    logger.info("sweeping %s over %d values with %d worker(s)",
                param, len(values), workers)
    tasks = [dask.delayed(sweep_point)(scenario, param, value)
             for value in values]
    rows = dask.compute(
        *tasks,
        scheduler="threads" if workers > 1 else "synchronous",
        num_workers=workers,
    )
    return pd.DataFrame(list(rows), columns=list(SWEEP_COLUMNS))


def write_sweep_csv(df, path):
    """Write a sweep table with the fixed CSV formatting of output files."""
    write_csv(df, path)
