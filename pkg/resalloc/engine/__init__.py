"""Simulation engine: configuration, centralised oracle, fixed-step
integration, trajectory recording, metrics and property checks."""

from .config import ScenarioConfig
from .integrator import rk4_step
from .metrics import (
    gamma_drift, lyapunov_increase, metrics, positive_invariance_margin,
    primal_feasibility, primal_recovery, trigger_counts
)
from .oracle import ORACLE_TOL, OracleSolution, solve_oracle
from .simulation import initialize, run, step
from .trajectory import (
    TrajectoryRecorder, events_frame, format_summary, trajectory_frame,
    write_csv, write_events_csv, write_netcdf, write_summary,
    write_trajectory_csv
)
from .verify import (
    CheckStatus, PropertyCheck, VerifyThresholds, passed, verify_config,
    verify_trajectory
)
