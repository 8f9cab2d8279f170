"""Node dynamics and consensus coupling."""

import enum

import attr
import numpy as np

from ..util.attrs import validator_all_finite


class CouplingSource(enum.Enum):
    """Values a coupling input was computed from."""
    CONTINUOUS = "continuous"  #: current multipliers
    SAMPLED = "sampled"  #: multipliers sampled at the last sampling instant
    BROADCAST = "broadcast"  #: last broadcast multipliers


def _as_state_vector(x):
    return np.array(x, dtype=float).reshape(-1)


@attr.s
class NodeState:
    """State of a single node.

    .. rubric:: Constructor arguments / instance attributes

    ``lam`` (array[float]):
        Local multiplier estimate :math:`\\lambda_i`.

    ``gamma`` (array[float]):
        Integral state :math:`\\gamma_i`. Default: zero.
    """
    lam = attr.ib(converter=_as_state_vector, validator=validator_all_finite)
    gamma = attr.ib(default=None,
                    validator=attr.validators.optional(validator_all_finite))

    def __attrs_post_init__(self):
        if self.gamma is None:
            self.gamma = np.zeros_like(self.lam)
        else:
            self.gamma = _as_state_vector(self.gamma)
        if self.gamma.shape != self.lam.shape:
            raise ValueError(f"lam and gamma shapes differ: {self.lam.shape} "
                             f"and {self.gamma.shape}")

    @property
    def dim(self):
        return len(self.lam)


@attr.s(frozen=True)
class CouplingInput:
    """Consensus coupling input :math:`u_i` applied to a node.

    .. rubric:: Constructor arguments / instance attributes

    ``u`` (array[float]):
        Input value.

    ``source`` (:class:`CouplingSource`):
        Values the input was computed from. Default: continuous.
    """
    u = attr.ib(converter=_as_state_vector)
    source = attr.ib(default=CouplingSource.CONTINUOUS, converter=CouplingSource)

    @classmethod
    def zero(cls, m, source=CouplingSource.CONTINUOUS):
        return cls(np.zeros(m), source)


def _input_value(u):
    return u.u if isinstance(u, CouplingInput) else np.asarray(u, dtype=float)


def node_rhs(state, u, cost, alpha):
    """Right-hand side of the node dynamics

    .. math::

       \\dot\\lambda_i = -\\alpha (h_i(\\lambda_i) - d_i) - \\gamma_i, \\quad
       \\dot\\gamma_i = -u_i.

    Parameter ``state`` (:class:`NodeState`):
        Node state. ``state.lam`` must lie in the interior of the dual domain.

    Parameter ``u`` (:class:`CouplingInput` or array[float]):
        Coupling input.

    Parameter ``cost`` (:class:`.CostSpec`):
        Node cost.

    Parameter ``alpha`` (float):
        Dual gradient gain.

    Returns → tuple[array[float], array[float]]:
        Derivatives of :math:`\\lambda_i` and :math:`\\gamma_i`.

    Raises → :class:`.DomainError`:
        If ``state.lam`` lies outside the dual domain.
    """
    dlam = -alpha * (cost.inverse_gradient(state.lam) - cost.demand) - state.gamma
    dgamma = -_input_value(u)
    return dlam, dgamma


def network_rhs(lam, gamma, u, stack, alpha):
    """Vectorised :func:`node_rhs` on ``(N, m)`` arrays.

    Parameter ``stack`` (:class:`.CostStack`):
        Node costs.

    Returns → tuple[array[float], array[float]]:
        Derivatives of :math:`\\lambda` and :math:`\\gamma`.
    """
    dlam = -alpha * (stack.inverse_gradient(lam) - stack.demand) - gamma
    return dlam, -u


def coupling(values, g, i, beta, source=CouplingSource.CONTINUOUS):
    """Coupling input of node ``i``:
    :math:`u_i = \\beta \\sum_j a_{ij} (v_j - v_i)`.

    Parameter ``values`` (array[float]):
        Per-node vectors :math:`v`, shape ``(N, m)``.

    Parameter ``g`` (:class:`.WeightedDigraph`):
        Current communication digraph.

    Parameter ``i`` (int):
        Receiving node.

    Parameter ``beta`` (float):
        Coupling gain.

    Returns → :class:`CouplingInput`
    """
    values = np.asarray(values, dtype=float)
    u = beta * g.weights[i] @ (values - values[i])
    return CouplingInput(u, source)


def coupling_all(values, g, beta):
    """Coupling inputs of all nodes, :math:`-\\beta L v`, shape ``(N, m)``."""
    values = np.asarray(values, dtype=float)
    return beta * (g.weights @ values - g.in_degree()[:, np.newaxis] * values)


def coupling_from_views(views, own, g, beta):
    """Coupling inputs computed from per-receiver copies of the broadcast
    values: :math:`u_i = \\beta \\sum_j a_{ij} (\\hat v^{(i)}_j - \\hat v_i)`.

    Parameter ``views`` (array[float]):
        Received values, shape ``(N, N, m)``; ``views[i, j]`` is node ``i``'s
        copy of node ``j``'s last broadcast.

    Parameter ``own`` (array[float]):
        Broadcast values held by the nodes themselves, shape ``(N, m)``.
    """
    received = np.einsum("ij,ijk->ik", g.weights, views)
    return beta * (received - g.in_degree()[:, np.newaxis] * own)
