"""Property checks on configurations and recorded trajectories."""

import enum

import attr
import numpy as np

from .metrics import (
    gamma_drift, ifp_residual_max, ifp_sampled_residual_max,
    inter_event_grid_error, lyapunov_increase, min_inter_event_time,
    positive_invariance_margin, sampled_storage_total, z_gain_max
)
from ..comms import Regime
from ..graphs import BALANCE_TOL
from ..util.attrs import validator_is_positive


class CheckStatus(enum.Enum):
    """Outcome of a property check."""
    PASS = "pass"
    FAIL = "fail"
    SKIP = "skip"
    WARN = "warn"


@attr.s(frozen=True)
class PropertyCheck:
    """Outcome of a property check.

    .. rubric:: Constructor arguments / instance attributes

    ``name`` (str):
        Property name.

    ``status`` (:class:`CheckStatus`):
        Outcome. Only failures make a verification fail.

    ``value`` (float):
        Measured value (NaN for skipped checks).

    ``threshold`` (float):
        Threshold the value is compared to.

    ``note`` (str):
        Free-form comment.
    """
    name = attr.ib()
    status = attr.ib(converter=CheckStatus)
    value = attr.ib(default=np.nan, converter=float)
    threshold = attr.ib(default=np.nan, converter=float)
    note = attr.ib(default="")

    @property
    def failed(self):
        return self.status is CheckStatus.FAIL

    def as_row(self):
        return [self.name, self.status.value, self.value, self.threshold,
                self.note]


def _upper(name, value, threshold, note=""):
    if np.isnan(value):
        return PropertyCheck(name, "skip", value, threshold,
                             note or "not evaluated")
    return PropertyCheck(name, "pass" if value <= threshold else "fail",
                         value, threshold, note)


def _lower(name, value, threshold, note=""):
    return PropertyCheck(name, "pass" if value >= threshold else "fail",
                         value, threshold, note)


@attr.s
class VerifyThresholds:
    """Thresholds used by :func:`verify_trajectory`.

    .. rubric:: Constructor arguments / instance attributes

    ``gamma_drift`` (float):
        Maximum drift of the integral state sum. Default: 1e-8.

    ``ifp_continuous`` (float):
        Maximum continuous dissipation residual. Default: 1e-6.

    ``ifp_sampled`` (float):
        Maximum sampled dissipation residual. Default: 1e-5.

    ``z_gain`` (float):
        Maximum rate gain residual. Default: 1e-6.

    ``convergence`` (float):
        Maximum terminal distance to the optimal multiplier. Default: 5e-2.

    ``lyapunov`` (float):
        Maximum relative increase of the network sampled storage between
        sampling instants. Default: 1e-8.
    """
    gamma_drift = attr.ib(default=1e-8, converter=float,
                          validator=validator_is_positive)
    ifp_continuous = attr.ib(default=1e-6, converter=float,
                             validator=validator_is_positive)
    ifp_sampled = attr.ib(default=1e-5, converter=float,
                          validator=validator_is_positive)
    z_gain = attr.ib(default=1e-6, converter=float,
                     validator=validator_is_positive)
    convergence = attr.ib(default=5e-2, converter=float,
                          validator=validator_is_positive)
    lyapunov = attr.ib(default=1e-8, converter=float,
                       validator=validator_is_positive)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def verify_config(cfg):
    """Checks run before any simulation: weight balance of every schedule
    segment and gain admissibility. An inadmissible design only produces a
    warning."""
    imbalance = max(float(np.abs(report.imbalance).max())
                    for report in cfg.schedule.is_weight_balanced())
    checks = [_upper("weight_balance", imbalance, BALANCE_TOL)]

    certificate = cfg.certificate()
    checks.append(PropertyCheck(
        "gain_certificate",
        "pass" if certificate.valid else "warn",
        float(certificate.per_node_margin.min()),
        0.,
        "" if certificate.valid else
        f"violating nodes {certificate.violating_nodes()}"
    ))
    return checks


def verify_trajectory(traj, thresholds=None):
    """Property checks on a recorded trajectory: integral state conservation,
    dissipation residuals, positive invariance of the dual domains,
    broadcast spacing, convergence and storage monotonicity.

    Storage monotonicity is only asserted for continuous and periodic runs
    with an admissible gain design.

    Parameter ``traj`` (:class:`~xarray.Dataset`):
        Recorded trajectory.

    Parameter ``thresholds`` (:class:`VerifyThresholds` or None):
        Thresholds. Defaults apply if unset.

    Returns → list[:class:`PropertyCheck`]
    """
    if thresholds is None:
        thresholds = VerifyThresholds()
    regime = Regime(traj.attrs["regime"])
    ts = float(traj.attrs["ts"])
    checks = []

    if traj.attrs.get("aborted"):
        checks.append(PropertyCheck("completion", "fail",
                                    note=traj.attrs.get("abort_reason", "")))

    checks.append(_upper("gamma_conservation", gamma_drift(traj),
                         thresholds.gamma_drift))

    if regime is Regime.CONTINUOUS:
        checks.append(_upper("ifp_continuous", ifp_residual_max(traj),
                             thresholds.ifp_continuous,
                             "" if traj.attrs["record_every"] == 1
                             else "requires record_every = 1"))
    else:
        checks.append(_upper("ifp_sampled", ifp_sampled_residual_max(traj),
                             thresholds.ifp_sampled))
    checks.append(_upper("z_gain", z_gain_max(traj), thresholds.z_gain))

    checks.append(_lower("positive_invariance",
                         positive_invariance_margin(traj), 0.))

    if regime is Regime.EVENT:
        # Broadcast instants lie on the sampling grid and are at least one
        # period apart
        grid_error = inter_event_grid_error(traj)
        spacing = min_inter_event_time(traj)
        checks.append(_lower(
            "inter_event_spacing",
            spacing if grid_error <= 1e-9 else -np.inf,
            ts * (1. - 1e-9)
        ))
    else:
        checks.append(PropertyCheck("inter_event_spacing", "skip",
                                    note="event regime only"))

    checks.append(_upper("convergence",
                         float(traj["dist_to_lstar"].values[-1]),
                         thresholds.convergence))

    if not traj.attrs["certificate_valid"]:
        checks.append(PropertyCheck("lyapunov_monotonicity", "skip",
                                    note="gain design not admissible"))
    elif regime is Regime.EVENT:
        checks.append(PropertyCheck("lyapunov_monotonicity", "skip",
                                    note="continuous and periodic regimes only"))
    else:
        try:
            increase = lyapunov_increase(traj)
        except ValueError:
            increase = np.nan
        _, total = sampled_storage_total(traj)
        scale = max(1., abs(float(total[0])))
        checks.append(_upper("lyapunov_monotonicity", increase / scale,
                             thresholds.lyapunov))

    return checks


def passed(checks):
    """``True`` if no check failed."""
    return not any(check.failed for check in checks)
