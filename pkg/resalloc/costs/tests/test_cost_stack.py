import numpy as np
import pytest

from resalloc.costs import (
    CostStack, LogExpTerm, QuadraticCost, QuadraticTerm, SeparableLogExpCost,
    builtin_problems, ten_node_costs, validate_regularity
)
from resalloc.util.exceptions import DomainError


@pytest.fixture
def mixed_costs():
    return [
        QuadraticCost(q=[[2., 0.5], [0.5, 1.]], demand=[1., 1.], lipschitz=2.21),
        SeparableLogExpCost(
            coordinates=[LogExpTerm([2., 0.]), QuadraticTerm(q=2., p=0.5)],
            demand=[2., 2.], lipschitz=2.
        ),
        # Three exponents: iterative inverse
        SeparableLogExpCost(
            coordinates=[LogExpTerm([2., 1., -0.5]), LogExpTerm([1., 0.])],
            demand=[0., 1.], lipschitz=2.
        ),
        QuadraticCost(q=[[1., 0.], [0., 3.]], b=[0.1, -0.2], c=2., demand=[0., 0.],
                      lipschitz=3.),
    ]


def test_stack_matches_individual_costs(mixed_costs):
    stack = CostStack(mixed_costs)
    assert len(stack) == 4
    assert stack.dim == 2
    assert np.allclose(stack.lipschitz, [2.21, 2., 2., 3.])

    lam = np.array([[0.5, 0.4], [1.2, -3.], [0.7, 0.6], [-1., 2.]])
    x = stack.inverse_gradient(lam)
    for i, cost in enumerate(mixed_costs):
        assert np.allclose(x[i], cost.inverse_gradient(lam[i]), rtol=0., atol=1e-12)
        assert np.isclose(stack.value(x)[i], cost.value(x[i]))
        assert np.isclose(stack.dual_value(lam)[i], cost.dual().value(lam[i]))

    assert np.allclose(stack.dual_gradient(lam), x - stack.demand)
    assert np.allclose(stack.gradient(x), lam)


def test_stack_domain(mixed_costs):
    stack = CostStack(mixed_costs)
    lo, hi = stack.domain_intersection()
    assert np.allclose(lo, [0., 0.])
    assert np.allclose(hi, [2., 1.])

    lam = np.array([[0.5, 0.4], [1.2, -3.], [0.7, 1.], [-1., 2.]])
    with pytest.raises(DomainError) as e:
        stack.inverse_gradient(lam)
    assert e.value.node == 2
    assert e.value.coordinate == 1

    lam[2, 1] = 0.9
    assert np.allclose(stack.boundary_distance(lam)[[1, 2]], [0.8, 0.1])
    assert np.isinf(stack.boundary_distance(lam)[0])


def test_stack_construct():
    with pytest.raises(ValueError):
        CostStack([])
    with pytest.raises(ValueError):
        CostStack([
            QuadraticCost(q=[[1.]], demand=[0.], lipschitz=1.),
            QuadraticCost(q=np.eye(2), demand=[0., 0.], lipschitz=1.),
        ])


def test_ten_node_costs():
    costs = builtin_problems["ten_node_default"]()
    assert len(costs) == 10
    assert [c.lipschitz for c in costs] == [2.21, 2.21, 2., 2., 2.21, 2.21,
                                             2., 2., 1.21, 1.21]
    assert np.allclose([c.demand for c in costs[:5]], 1.)
    assert np.allclose([c.demand for c in costs[5:]], 2.)

    # Declared Lipschitz bounds hold
    for c in ten_node_costs():
        assert validate_regularity(c, ([-3., -3.], [3., 3.]), 400)

    # Closed-form inverse maps
    lam = np.array([1.5, 0.8])
    h = CostStack(costs).inverse_gradient(np.tile(lam, (10, 1)))
    assert np.allclose(h[0], [4. / 7. * lam[0] - 2. / 7. * lam[1],
                              8. / 7. * lam[1] - 2. / 7. * lam[0]])
    assert np.allclose(h[2], [2. * lam[0] - 2., 0.5 * lam[1]])
    assert np.allclose(h[4], [8. / 7. * lam[0] + 2. / 7. * lam[1],
                              2. / 7. * lam[0] + 4. / 7. * lam[1]])
    assert np.allclose(h[6], [0.5 * np.log(lam[0] / (2. - lam[0])), 0.5 * lam[1]])
    assert np.allclose(h[8], [5. / 11. * np.log((5. * lam[0] + 1.) / (10. - 5. * lam[0])),
                              np.log(lam[1] / (1. - lam[1]))])
