import numpy as np
import pytest

from resalloc.engine import (
    CheckStatus, PropertyCheck, ScenarioConfig, VerifyThresholds, gamma_drift,
    metrics, passed, primal_feasibility, run, trigger_counts, verify_config,
    verify_trajectory
)
from resalloc.engine.metrics import (
    ifp_residual_max, ifp_sampled_residual_max, lyapunov_increase,
    min_inter_event_time, sampled_storage_total, z_gain_max
)
from resalloc.graphs import GraphSchedule, WeightedDigraph


@pytest.fixture
def cfg(scalar_quadratics, ring3_schedule):
    return ScenarioConfig(costs=scalar_quadratics, schedule=ring3_schedule,
                          beta=0.02, horizon=2., dt=1e-2)


@pytest.fixture
def lenient():
    # Short runs do not converge
    return VerifyThresholds(convergence=100.)


def _by_name(checks):
    return {check.name: check for check in checks}


def test_metrics_continuous(cfg):
    traj = run(cfg)
    m = metrics(traj)
    assert m["status"] == "completed"
    assert m["regime"] == "continuous"
    assert m["certificate_valid"] is True
    assert m["t_final"] == 2.
    assert m["trigger_counts"] == [0, 0, 0]
    assert m["trigger_total"] == 0
    assert np.isinf(m["min_inter_event_time"])
    assert np.isinf(m["positive_invariance_margin"])
    assert m["gamma_drift"] <= 1e-12
    assert np.isclose(m["primal_feasibility"],
                      float(traj["dual_residual"].values[-1]))
    assert np.isclose(m["lambda_star"][0], 2.5 / 1.75)
    assert m["optimality_gap"] == pytest.approx(
        float(traj["cost"].values[-1]) - traj.attrs["optimal_cost"]
    )
    assert np.isnan(m["ifp_sampled_residual_max"])
    assert np.isfinite(m["ifp_residual_max"])
    assert np.isfinite(m["z_gain_max"])


def test_metrics_periodic(cfg):
    traj = run(cfg.evolve(regime="periodic", ts=0.5, record_every=10))
    assert np.array_equal(trigger_counts(traj), [4, 4, 4])
    # The first samples transmit unchanged values
    assert np.array_equal(trigger_counts(traj, effective_only=True), [3, 3, 3])
    assert np.isclose(min_inter_event_time(traj), 0.5)

    t, total = sampled_storage_total(traj)
    assert np.allclose(t, [0., 0.5, 1., 1.5, 2.])
    assert lyapunov_increase(traj) == float(np.diff(total).max())

    # Step-level checks need every integrator step
    assert np.isnan(ifp_residual_max(traj))
    assert np.isnan(z_gain_max(traj))
    assert np.isfinite(ifp_sampled_residual_max(traj))


def test_metrics_helpers(cfg):
    traj = run(cfg.evolve(record_every=100))
    assert gamma_drift(traj) <= 1e-12
    assert primal_feasibility(traj) >= 0.

    with pytest.raises(ValueError):
        lyapunov_increase(traj.isel(t=[0]))


def test_property_check():
    check = PropertyCheck("convergence", "fail", 1., 0.5)
    assert check.status is CheckStatus.FAIL
    assert check.failed
    assert check.as_row() == ["convergence", "fail", 1., 0.5, ""]
    assert not PropertyCheck("z_gain", "skip").failed
    assert np.isnan(PropertyCheck("z_gain", "skip").value)
    assert passed([PropertyCheck("a", "pass"), PropertyCheck("b", "warn")])
    assert not passed([PropertyCheck("a", "pass"), check])


def test_verify_thresholds():
    thresholds = VerifyThresholds.from_dict({"convergence": "0.1"})
    assert thresholds.convergence == 0.1
    assert thresholds.gamma_drift == 1e-8
    with pytest.raises(ValueError):
        VerifyThresholds(z_gain=-1.)


def test_verify_config(cfg, scalar_quadratics):
    checks = _by_name(verify_config(cfg))
    assert checks["weight_balance"].status is CheckStatus.PASS
    assert checks["gain_certificate"].status is CheckStatus.PASS

    unbalanced = WeightedDigraph([[0., 1., 0.], [0., 0., 0.], [0., 0., 0.]])
    with pytest.warns(UserWarning):
        cfg = ScenarioConfig(
            costs=scalar_quadratics, beta=0.6, horizon=2.,
            schedule=GraphSchedule.constant(unbalanced, horizon=2.)
        )
    checks = _by_name(verify_config(cfg))
    assert checks["weight_balance"].status is CheckStatus.FAIL
    assert checks["weight_balance"].value == 1.
    # Inadmissible gains only produce a warning
    assert checks["gain_certificate"].status is CheckStatus.WARN
    assert "[0]" in checks["gain_certificate"].note


def test_verify_continuous(cfg, lenient):
    checks = _by_name(verify_trajectory(run(cfg), lenient))
    assert "completion" not in checks
    assert checks["gamma_conservation"].status is CheckStatus.PASS
    assert checks["positive_invariance"].status is CheckStatus.PASS
    assert checks["inter_event_spacing"].status is CheckStatus.SKIP
    assert checks["convergence"].status is CheckStatus.PASS
    assert "ifp_sampled" not in checks
    assert "ifp_continuous" in checks

    # Default thresholds require convergence
    checks = _by_name(verify_trajectory(run(cfg)))
    assert checks["convergence"].status is CheckStatus.FAIL


def test_verify_event(cfg, lenient):
    traj = run(cfg.evolve(regime="event", ts=0.1, record_every=10))
    checks = _by_name(verify_trajectory(traj, lenient))
    assert checks["inter_event_spacing"].status is not CheckStatus.SKIP
    assert not checks["inter_event_spacing"].failed
    assert checks["lyapunov_monotonicity"].status is CheckStatus.SKIP
    assert checks["ifp_sampled"].status is not CheckStatus.SKIP
    assert checks["z_gain"].status is CheckStatus.SKIP


def test_verify_inadmissible_design(cfg, lenient):
    with pytest.warns(UserWarning):
        cfg = cfg.evolve(beta=0.1)
    checks = _by_name(verify_trajectory(run(cfg), lenient))
    assert checks["lyapunov_monotonicity"].status is CheckStatus.SKIP
    assert "not admissible" in checks["lyapunov_monotonicity"].note
