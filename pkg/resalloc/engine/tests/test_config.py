import numpy as np
import pytest

from resalloc.comms import Regime
from resalloc.engine import ScenarioConfig
from resalloc.graphs import GraphSchedule, WeightedDigraph
from resalloc.util.exceptions import ConfigError, ConfigWarning, UnitsError
from resalloc.util.units import ureg


@pytest.fixture
def make_config(scalar_quadratics, ring3_schedule):
    def make(**kwargs):
        params = dict(costs=scalar_quadratics, schedule=ring3_schedule,
                      beta=0.02, horizon=2., dt=1e-2)
        params.update(kwargs)
        return ScenarioConfig(**params)

    return make


def test_config_defaults(make_config):
    cfg = make_config()
    assert cfg.regime is Regime.CONTINUOUS
    assert cfg.alpha == 1.
    assert cfg.c == 0.5
    assert cfg.n == 3
    assert cfg.dim == 1
    assert cfg.horizon == ureg.Quantity(2., "s")
    assert cfg.horizon_s == 2.
    assert cfg.ts_s == 0.
    assert cfg.n_steps == 200
    assert cfg.steps_per_sample == 1
    assert np.allclose(cfg.stack.lipschitz, [1., 2., 4.])
    assert cfg.certificate().valid


def test_config_units(make_config):
    cfg = make_config(regime="periodic", ts=ureg.Quantity(100., "ms"),
                      dt=ureg.Quantity(10., "ms"))
    assert np.isclose(cfg.ts_s, 0.1)
    assert np.isclose(cfg.dt_s, 0.01)
    assert cfg.steps_per_sample == 10

    with pytest.raises(UnitsError):
        make_config(horizon=ureg.Quantity(2., "m"))

    # Unit fields in dictionaries
    cfg = ScenarioConfig.from_dict({
        "costs": cfg.costs, "schedule": cfg.schedule, "beta": 0.02,
        "regime": "periodic", "ts": 250., "ts_units": "ms",
        "horizon": 2., "dt": 0.05,
    })
    assert np.isclose(cfg.ts_s, 0.25)
    assert cfg.steps_per_sample == 5


def test_config_builtin_problem(ten_node_schedule):
    with pytest.raises(ConfigError, match="unknown built-in problem"):
        ScenarioConfig(costs="eleven_nodes", schedule=ten_node_schedule)


@pytest.mark.parametrize("kwargs, match", [
    ({"horizon": 25.}, "before the horizon"),
    ({"x0": [[0.], [1.]]}, "x0 must have shape"),
    ({"horizon": 2.005}, "integer multiple of dt"),
    ({"regime": "periodic"}, "requires ts"),
    ({"regime": "periodic", "ts": 0.015}, "integer multiple of dt"),
    ({"regime": "periodic", "ts": 0.1, "record_every": 3}, "must divide"),
    ({"dt": 0.3, "horizon": 3.}, "off the integration grid"),
    ({"regime": "event", "ts": 0.1, "beta": 0.1}, "admissible gain design"),
])
def test_config_errors(make_config, kwargs, match):
    with pytest.raises(ConfigError, match=match):
        make_config(**kwargs)


def test_config_sampling_across_switches(make_config):
    # Sampling instants need not coincide with graph switches
    cfg = make_config(regime="periodic", ts=0.3, horizon=3.)
    assert cfg.steps_per_sample == 30
    assert np.isclose(cfg.schedule.switch_times()[0], 1.)


def test_config_node_count(ring3_schedule, scalar_quadratics):
    with pytest.raises(ConfigError, match="schedule has 3 nodes"):
        ScenarioConfig(costs=scalar_quadratics[:2], schedule=ring3_schedule,
                       horizon=2.)

    with pytest.raises(ConfigError):
        ScenarioConfig(costs=[], schedule=ring3_schedule, horizon=2.)


def test_config_warnings(make_config, scalar_quadratics):
    # Inadmissible gains are only an error in the event regime without an
    # explicit trigger coefficient
    with pytest.warns(ConfigWarning, match="not admissible"):
        cfg = make_config(beta=0.1)
    assert not cfg.certificate().valid

    with pytest.warns(ConfigWarning, match="not admissible"):
        make_config(beta=0.1, regime="event", ts=0.1, trigger_coefficient=0.)

    unbalanced = WeightedDigraph([[0., 1., 0.], [0., 0., 0.], [0., 0., 0.]])
    with pytest.warns(ConfigWarning, match="not weight-balanced"):
        make_config(schedule=GraphSchedule.constant(unbalanced, horizon=5.))


def test_config_evolve(make_config):
    cfg = make_config()
    periodic = cfg.evolve(regime="periodic", ts=0.1)
    assert periodic.regime is Regime.PERIODIC
    assert periodic.steps_per_sample == 10
    assert periodic.stack is not cfg.stack
    assert cfg.regime is Regime.CONTINUOUS

    with pytest.raises(ConfigError):
        cfg.evolve(regime="periodic")
