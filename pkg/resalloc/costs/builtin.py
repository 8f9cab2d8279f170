"""Built-in problems."""

from functools import partial

import numpy as np

from .logexp import LogExpTerm, QuadraticTerm, SeparableLogExpCost
from .quadratic import QuadraticCost


def ten_node_costs():
    """Ten-node, two-resource problem. Nodes come in pairs sharing the same
    cost function:

    * nodes 0, 1: :math:`x_1^2 + x_1 x_2 / 2 + x_2^2 / 2 + 1`, :math:`l = 2.21`;
    * nodes 2, 3: :math:`(x_1 + 2)^2 / 4 + x_2^2`, :math:`l = 2`;
    * nodes 4, 5: :math:`x_1^2 / 2 - x_1 x_2 / 2 + x_2^2`, :math:`l = 2.21`;
    * nodes 6, 7: :math:`\\ln(e^{2 x_1} + 1) + x_2^2`, :math:`l = 2`;
    * nodes 8, 9: :math:`\\ln(e^{2 x_1} + e^{-0.2 x_1}) + \\ln(e^{x_2} + 1)`,
      :math:`l = 1.21`.

    Nodes 0 to 4 demand (1, 1), nodes 5 to 9 demand (2, 2).

    Returns → list[:class:`.CostSpec`]:
        Node costs, in node order.
    """
    makers = 2 * [partial(QuadraticCost, q=[[2., 0.5], [0.5, 1.]], c=1.,
                          lipschitz=2.21)]
    makers += 2 * [partial(QuadraticCost, q=[[0.5, 0.], [0., 2.]], b=[1., 0.],
                           c=1., lipschitz=2.)]
    makers += 2 * [partial(QuadraticCost, q=[[1., -0.5], [-0.5, 2.]],
                           lipschitz=2.21)]
    makers += 2 * [partial(SeparableLogExpCost,
                           coordinates=[LogExpTerm([2., 0.]), QuadraticTerm(q=2.)],
                           lipschitz=2.)]
    makers += 2 * [partial(SeparableLogExpCost,
                           coordinates=[LogExpTerm([2., -0.2]), LogExpTerm([1., 0.])],
                           lipschitz=1.21)]
    demands = 5 * [np.full(2, 1.)] + 5 * [np.full(2, 2.)]

    return [make(demand=demand) for make, demand in zip(makers, demands)]


#: Built-in problem generators
builtin_problems = {
    "ten_node_default": ten_node_costs,
}
