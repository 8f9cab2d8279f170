import numpy as np
import pytest

from resalloc.costs import (
    CostStack, LogExpTerm, QuadraticCost, SeparableLogExpCost
)
from resalloc.engine import solve_oracle
from resalloc.engine.oracle import initial_iterate
from resalloc.util.exceptions import DomainError


def test_oracle_scalar_closed_form(scalar_quadratics):
    # Scalar quadratics a_i x^2 / 2: lambda* = sum(d) / sum(1 / a)
    sol = solve_oracle(scalar_quadratics)
    expected = 2.5 / 1.75
    assert np.isclose(sol.lambda_star[0], expected, rtol=0., atol=1e-10)
    assert np.allclose(sol.x_star[:, 0], expected / np.array([1., 2., 4.]))
    assert sol.residual <= 1e-12

    # Equilibrium integral states sum to zero
    assert np.allclose(sol.gamma_star.sum(axis=0), 0., atol=1e-12)
    assert np.allclose(sol.gamma_star[:, 0],
                       -(sol.x_star[:, 0] - np.array([1., -0.5, 2.])))


def test_oracle_single_node():
    cost = QuadraticCost(q=[[2., 0.5], [0.5, 1.]], c=1., demand=[1., 1.],
                         lipschitz=2.21)
    sol = solve_oracle([cost])
    assert np.allclose(sol.lambda_star, cost.gradient([1., 1.]), atol=1e-12)
    assert np.allclose(sol.lambda_star, [2.5, 1.5], atol=1e-12)
    assert np.allclose(sol.x_star, [[1., 1.]], atol=1e-12)
    assert np.isclose(sol.optimal_cost([cost]), cost.value([1., 1.]))

    logexp = SeparableLogExpCost(
        coordinates=[LogExpTerm([2., -0.2]), LogExpTerm([1., 0.])],
        demand=[1., 1.], lipschitz=1.21
    )
    sol = solve_oracle([logexp])
    assert np.allclose(sol.lambda_star, logexp.gradient([1., 1.]), atol=1e-12)


def test_oracle_ten_node(ten_node_problem):
    sol = solve_oracle(ten_node_problem)
    assert np.allclose(sol.lambda_star, [1.87, 0.992], atol=5e-3)
    stack = CostStack(ten_node_problem)
    assert np.allclose(sol.x_star.sum(axis=0), stack.demand.sum(axis=0),
                       atol=1e-10)
    # The optimum lies inside every dual domain
    lo, hi = stack.domain_intersection()
    assert np.all(sol.lambda_star > lo) and np.all(sol.lambda_star < hi)


def test_oracle_alpha_scales_integral_states(scalar_quadratics):
    ref = solve_oracle(scalar_quadratics)
    sol = solve_oracle(scalar_quadratics, alpha=3.)
    assert np.allclose(sol.lambda_star, ref.lambda_star)
    assert np.allclose(sol.gamma_star, 3. * ref.gamma_star)


def test_oracle_bisection_fallback(scalar_quadratics):
    # Without any Newton step, scalar problems are bisected
    sol = solve_oracle(scalar_quadratics, max_iter=0)
    assert np.isclose(sol.lambda_star[0], 2.5 / 1.75, rtol=0., atol=1e-10)
    assert sol.iterations > 0


def test_initial_iterate():
    costs = [
        SeparableLogExpCost(coordinates=[LogExpTerm([1., 0.])], demand=[30.],
                            lipschitz=0.25),
        SeparableLogExpCost(coordinates=[LogExpTerm([1., 0.])], demand=[40.],
                            lipschitz=0.25),
    ]
    # Gradients at the demands lie within 1e-12 of the upper domain bound:
    # the iterate is projected with a margin
    lam = initial_iterate(CostStack(costs))
    assert 0. < lam[0] < 1.
    assert lam[0] <= 1. - 1e-6

    lam = initial_iterate(CostStack(costs), x0=[[0.], [0.]])
    assert np.isclose(lam[0], 0.5)


def test_initial_iterate_empty_intersection():
    costs = [
        SeparableLogExpCost(coordinates=[LogExpTerm([1., 0.])], demand=[0.],
                            lipschitz=0.25),
        SeparableLogExpCost(coordinates=[LogExpTerm([3., 2.])], demand=[0.],
                            lipschitz=0.25),
    ]
    with pytest.raises(DomainError) as e:
        solve_oracle(costs)
    assert e.value.coordinate == 0
