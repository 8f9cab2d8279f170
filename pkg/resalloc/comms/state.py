"""Communication state shared by the communication regimes."""

import enum

import attr
import numpy as np

from ..util.attrs import validator_is_positive


class Regime(enum.Enum):
    """An enumeration defining known communication regimes."""

    CONTINUOUS = "continuous"
    PERIODIC = "periodic"
    EVENT = "event"

    @property
    def is_sampled(self):
        return self is not Regime.CONTINUOUS


@attr.s(frozen=True)
class TriggerRecord:
    """A broadcast decision of one node at one sampling instant.

    .. rubric:: Constructor arguments / instance attributes

    ``node`` (int):
        Broadcasting node.

    ``k`` (int):
        Sampling index.

    ``t`` (float):
        Sampling instant :math:`k T_s` [s].

    ``e_norm_sq`` (float):
        Squared measurement error :math:`\\|\\bar\\lambda_i(k) -
        \\hat\\lambda_i(k)\\|^2` before the broadcast.

    ``threshold`` (float):
        Right-hand side of the trigger condition (0 in the periodic regime).
    """
    node = attr.ib(converter=int)
    k = attr.ib(converter=int)
    t = attr.ib(converter=float)
    e_norm_sq = attr.ib(converter=float)
    threshold = attr.ib(converter=float)

    @property
    def effective(self):
        """``True`` if the broadcast changed the transmitted value."""
        return self.e_norm_sq > 0.


@attr.s
class CommState:
    """Communication state of the network.

    .. rubric:: Constructor arguments / instance attributes

    ``regime`` (:class:`Regime`):
        Communication regime.

    ``ts`` (float):
        Sampling period [s]; unused in the continuous regime.

    ``sampled`` (array[float]):
        Last sampled multipliers :math:`\\bar\\lambda_i(k)`, shape ``(N, m)``.

    ``broadcast`` (array[float]):
        Last broadcast multipliers :math:`\\hat\\lambda_i(k)` as held by their
        senders, shape ``(N, m)``.

    ``views`` (array[float]):
        Per-receiver copies of the broadcast multipliers, shape ``(N, N, m)``:
        ``views[i, j]`` is the last value of node ``j`` received by node ``i``.

    ``held_u`` (array[float]):
        Coupling inputs held until the next sampling instant, shape ``(N, m)``.

    ``trigger_log`` (list[list[int]]):
        Per-node sampling indices at which the node broadcast.

    ``events`` (list[:class:`TriggerRecord`]):
        Broadcast records in chronological order.
    """
    regime = attr.ib(converter=Regime)
    ts = attr.ib(converter=float, validator=validator_is_positive)
    sampled = attr.ib()
    broadcast = attr.ib()
    views = attr.ib()
    held_u = attr.ib()
    trigger_log = attr.ib()
    events = attr.ib(factory=list)

    @classmethod
    def initialize(cls, regime, ts, lam0):
        """Create the communication state at :math:`t = 0`: every node has
        sampled and broadcast its initial multiplier and every receiver knows
        every sender's initial value.

        Parameter ``lam0`` (array[float]):
            Initial multipliers, shape ``(N, m)``.
        """
        lam0 = np.array(lam0, dtype=float)
        n = lam0.shape[0]
        return cls(
            regime=regime,
            ts=ts,
            sampled=lam0.copy(),
            broadcast=lam0.copy(),
            views=np.broadcast_to(lam0, (n,) + lam0.shape).copy(),
            held_u=np.zeros_like(lam0),
            trigger_log=[[] for _ in range(n)],
        )

    @property
    def n(self):
        return self.sampled.shape[0]

    def log_trigger(self, record):
        self.trigger_log[record.node].append(record.k)
        self.events.append(record)

    def trigger_counts(self, effective_only=False):
        """Number of broadcasts per node.

        Parameter ``effective_only`` (bool):
            If ``True``, only count broadcasts which changed the transmitted
            value.
        """
        if not effective_only:
            return np.array([len(log) for log in self.trigger_log])
        counts = np.zeros(self.n, dtype=int)
        for record in self.events:
            if record.effective:
                counts[record.node] += 1
        return counts

    def trigger_times(self, node):
        """Broadcast instants of node ``node`` [s]."""
        return np.array(self.trigger_log[node], dtype=float) * self.ts
