import numpy as np
import pytest

from resalloc.costs import CostStack, QuadraticCost, ten_node_costs
from resalloc.dynamics import (
    CouplingInput, CouplingSource, NodeState, coupling, coupling_all,
    coupling_from_views, network_rhs, node_rhs
)
from resalloc.graphs import WeightedDigraph, default_ten_node_schedule
from resalloc.util.exceptions import DomainError


@pytest.fixture
def half_square():
    # f(x) = x² / 2, d = 1
    return QuadraticCost(q=[[1.]], demand=[1.], lipschitz=1.)


def test_node_state():
    s = NodeState([1., 2.])
    assert np.allclose(s.gamma, [0., 0.])
    assert s.dim == 2
    with pytest.raises(ValueError):
        NodeState([1., 2.], gamma=[0.])
    with pytest.raises(ValueError):
        NodeState([np.nan])


def test_node_rhs(half_square):
    dlam, dgamma = node_rhs(NodeState([0.], [0.]), [0.], half_square, 1.)
    assert np.allclose(dlam, [1.])
    assert np.allclose(dgamma, [0.])

    # dγ/dt = -u regardless of the cost
    u = CouplingInput([0.3])
    _, dgamma = node_rhs(NodeState([5.], [2.]), u, half_square, 3.)
    assert np.allclose(dgamma, [-0.3])

    # Equilibrium: λ* arbitrary, γ* = -α (h(λ*) - d)
    alpha = 2.
    lam_star = np.array([0.7])
    gamma_star = -alpha * (half_square.inverse_gradient(lam_star) - 1.)
    dlam, dgamma = node_rhs(NodeState(lam_star, gamma_star), [0.], half_square, alpha)
    assert np.allclose(dlam, 0., atol=1e-15)
    assert np.allclose(dgamma, 0.)


def test_node_rhs_domain_error():
    from resalloc.costs import LogExpTerm, SeparableLogExpCost
    cost = SeparableLogExpCost(coordinates=[LogExpTerm([1., 0.])],
                               demand=[0.], lipschitz=0.25)
    with pytest.raises(DomainError):
        node_rhs(NodeState([1.5]), [0.], cost, 1.)


def test_network_rhs_matches_node_rhs():
    costs = ten_node_costs()
    stack = CostStack(costs)
    rng = np.random.default_rng(0)
    lam = rng.uniform(0.3, 0.8, size=(10, 2))
    gamma = rng.normal(size=(10, 2))
    u = rng.normal(size=(10, 2))
    dlam, dgamma = network_rhs(lam, gamma, u, stack, 1.)
    for i, cost in enumerate(costs):
        expected = node_rhs(NodeState(lam[i], gamma[i]), u[i], cost, 1.)
        assert np.allclose(dlam[i], expected[0], rtol=1e-12)
        assert np.allclose(dgamma[i], expected[1])


def test_coupling():
    g = WeightedDigraph([[0., 1.], [0., 0.]])
    u = coupling([[0.], [1.]], g, 0, beta=0.5)
    assert isinstance(u, CouplingInput)
    assert u.source is CouplingSource.CONTINUOUS
    assert np.allclose(u.u, [0.5])
    assert np.allclose(coupling([[0.], [1.]], g, 1, beta=0.5).u, [0.])

    # Consensus null
    v = np.ones((2, 3))
    assert np.allclose(coupling(v, g, 0, 1., source="sampled").u, 0.)


def test_coupling_balanced_sum():
    schedule = default_ten_node_schedule(horizon=2.)
    v = np.random.default_rng(1).normal(size=(10, 2))
    for g in schedule.graphs:
        u = coupling_all(v, g, 0.05)
        assert np.allclose(u.sum(axis=0), 0., atol=1e-14)
        for i in range(10):
            assert np.allclose(u[i], coupling(v, g, i, 0.05).u)


def test_coupling_from_views():
    g = default_ten_node_schedule(horizon=2.).graphs[1]
    v = np.random.default_rng(2).normal(size=(10, 2))
    views = np.broadcast_to(v, (10, 10, 2)).copy()
    assert np.allclose(coupling_from_views(views, v, g, 0.1),
                       coupling_all(v, g, 0.1), atol=1e-14)

    # A stale copy of a non-neighbour does not contribute
    receiver = 0
    senders = np.flatnonzero(g.weights[receiver])
    other = next(j for j in range(1, 10) if j not in senders)
    views[receiver, other] += 100.
    assert np.allclose(coupling_from_views(views, v, g, 0.1)[receiver],
                       coupling_all(v, g, 0.1)[receiver])
