"""Simulation configuration."""

import logging
import warnings

import attr
import numpy as np

from ..comms import Regime
from ..conditions import sampling_admissible
from ..costs import CostFactory, CostSpec, CostStack, builtin_problems
from ..graphs import GraphSchedule
from ..util.attrs import (
    attrib_quantity, unit_enabled, validator_in_open_interval,
    validator_is_positive, validator_is_strictly_positive, validator_quantity
)
from ..util.exceptions import ConfigError, ConfigWarning
from ..util.misc import is_grid_multiple
from ..util.units import to_seconds, ureg

logger = logging.getLogger(__name__)


def _convert_costs(value):
    if isinstance(value, str):
        try:
            return builtin_problems[value]()
        except KeyError:
            raise ConfigError(f"unknown built-in problem '{value}' (known: "
                              f"{', '.join(builtin_problems)})")
    return [CostFactory.convert(x) for x in value]


def _costs_validator(instance, attribute, value):
    if not value:
        raise ConfigError(f"{attribute.name} must not be empty")
    for cost in value:
        if not isinstance(cost, CostSpec):
            raise TypeError(f"{attribute.name} must be a list of CostSpec, "
                            f"got {type(cost)}")


def _optional_array(x):
    return None if x is None else np.array(x, dtype=float)


@unit_enabled
@attr.s
class ScenarioConfig:
    """Complete description of a simulation.

    .. rubric:: Constructor arguments / instance attributes

    ``costs`` (list[:class:`.CostSpec`] or list[dict] or str):
        Node costs. Dictionaries are interpreted by
        :meth:`CostFactory.convert() <.CostFactory.convert>`; a string selects
        a built-in problem.

    ``schedule`` (:class:`.GraphSchedule`):
        Communication digraph schedule. It must cover the simulation horizon.

    ``alpha`` (float):
        Dual gradient gain. Default: 1.

    ``beta`` (float):
        Coupling gain. Default: 0.05.

    ``regime`` (:class:`.Regime` or str):
        Communication regime. Default: continuous.

    ``ts`` (float or None):
        Sampling period. Required by the periodic and event regimes; must be an
        integer multiple of ``dt``.
        Unit-enabled field (default unit: s).

    ``c`` (float):
        Trigger constant of the event regime, in :math:`(0, 1)`.
        Default: 0.5.

    ``horizon`` (float):
        Simulated duration.
        Unit-enabled field (default unit: s). Default: 300 s.

    ``dt`` (float):
        Integrator step.
        Unit-enabled field (default unit: s). Default: 1 ms.

    ``seed`` (int):
        Seed of the initial condition generator. Default: 0.

    ``x0`` (array[float] or None):
        Initial allocations, shape ``(N, m)``. If unset, they are drawn
        uniformly on :math:`[-2, 2]^m` from ``seed``.

    ``record_every`` (int):
        Record one integrator step out of ``record_every``. In sampled regimes,
        it must divide ``ts / dt``. Default: 1.

    ``trigger_coefficient`` (float or None):
        If set, replaces the trigger coefficient of the event regime.
    """
    costs = attr.ib(converter=_convert_costs, validator=_costs_validator)
    schedule = attr.ib(validator=attr.validators.instance_of(GraphSchedule))
    alpha = attr.ib(default=1., converter=float,
                    validator=validator_is_strictly_positive)
    beta = attr.ib(default=0.05, converter=float,
                   validator=validator_is_strictly_positive)
    regime = attr.ib(default=Regime.CONTINUOUS, converter=Regime)
    ts = attrib_quantity(
        default=None,
        validator=attr.validators.optional(
            validator_quantity(validator_is_strictly_positive)
        ),
        units_compatible="s",
    )
    c = attr.ib(default=0.5, converter=float,
                validator=validator_in_open_interval(0., 1.))
    horizon = attrib_quantity(
        default=ureg.Quantity(300., "s"),
        validator=validator_quantity(validator_is_strictly_positive),
        units_compatible="s",
    )
    dt = attrib_quantity(
        default=ureg.Quantity(1e-3, "s"),
        validator=validator_quantity(validator_is_strictly_positive),
        units_compatible="s",
    )
    seed = attr.ib(default=0, converter=int, validator=validator_is_positive)
    x0 = attr.ib(default=None, converter=_optional_array)
    record_every = attr.ib(default=1, converter=int,
                           validator=validator_is_strictly_positive)
    trigger_coefficient = attr.ib(
        default=None,
        converter=attr.converters.optional(float),
        validator=attr.validators.optional(validator_is_positive)
    )
    _stack = attr.ib(default=None, init=False, repr=False)

    def __attrs_post_init__(self):
        try:
            self._stack = CostStack(self.costs)
        except ValueError as e:
            raise ConfigError(str(e))

        if self.schedule.n != self.n:
            raise ConfigError(f"schedule has {self.schedule.n} nodes, "
                              f"got {self.n} costs")
        if self.schedule.horizon < self.horizon_s * (1. - 1e-12):
            raise ConfigError(f"schedule ends at {self.schedule.horizon:g} s, "
                              f"before the horizon ({self.horizon_s:g} s)")
        if self.x0 is not None and self.x0.shape != (self.n, self.dim):
            raise ConfigError(f"x0 must have shape {(self.n, self.dim)}, "
                              f"got {self.x0.shape}")
        if is_grid_multiple(self.horizon_s, self.dt_s) is None:
            raise ConfigError(f"horizon ({self.horizon_s:g} s) must be an "
                              f"integer multiple of dt ({self.dt_s:g} s)")

        if self.regime.is_sampled:
            if self.ts is None:
                raise ConfigError(f"regime '{self.regime.value}' requires ts")
            steps = is_grid_multiple(self.ts_s, self.dt_s)
            if not steps:
                raise ConfigError(f"ts ({self.ts_s:g} s) must be an integer "
                                  f"multiple of dt ({self.dt_s:g} s)")
            if steps % self.record_every:
                raise ConfigError(f"record_every ({self.record_every}) must "
                                  f"divide ts / dt ({steps})")

        # Switches fall on integrator steps; sampled regimes pick them up at the
        # next sampling instant
        for t in self.schedule.switch_times():
            if t < self.horizon_s and is_grid_multiple(t, self.dt_s) is None:
                raise ConfigError(f"graph switch at t = {t:g} s is off the "
                                  f"integration grid (step {self.dt_s:g} s)")

        for k, report in enumerate(self.schedule.is_weight_balanced()):
            if not report:
                warnings.warn(f"segment {k} is not weight-balanced (nodes "
                              f"{report.offending_nodes()})", ConfigWarning)

        certificate = self.certificate()
        if not certificate:
            if self.regime is Regime.EVENT and self.trigger_coefficient is None:
                raise ConfigError(f"event regime requires an admissible gain "
                                  f"design; violating nodes: "
                                  f"{certificate.violating_nodes()}")
            warnings.warn(f"gain design is not admissible (violating nodes: "
                          f"{certificate.violating_nodes()})", ConfigWarning)

    @property
    def stack(self):
        """Node costs as a :class:`.CostStack`."""
        return self._stack

    @property
    def n(self):
        """Node count."""
        return len(self.costs)

    @property
    def dim(self):
        """Resource dimension."""
        return self._stack.dim

    @property
    def horizon_s(self):
        return to_seconds(self.horizon)

    @property
    def dt_s(self):
        return to_seconds(self.dt)

    @property
    def ts_s(self):
        """Sampling period [s]; 0 in the continuous regime."""
        if not self.regime.is_sampled:
            return 0.
        return to_seconds(self.ts)

    @property
    def n_steps(self):
        """Integrator step count."""
        return is_grid_multiple(self.horizon_s, self.dt_s)

    @property
    def steps_per_sample(self):
        """Integrator steps per sampling period (1 in the continuous
        regime)."""
        if not self.regime.is_sampled:
            return 1
        return is_grid_multiple(self.ts_s, self.dt_s)

    def certificate(self):
        """Gain certificate of the configuration at the schedule's in-degree
        suprema."""
        return sampling_admissible(
            self._stack.lipschitz, self.schedule.din_sup(),
            self.alpha, self.beta, self.ts_s
        )

    def evolve(self, **changes):
        """Return a copy of this configuration with ``changes`` applied."""
        return attr.evolve(self, **changes)
