import numpy as np
import pytest

from resalloc.costs import QuadraticCost, ten_node_costs
from resalloc.graphs import (
    GraphSchedule, WeightedDigraph, default_ten_node_schedule
)


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "slow: full-horizon reproduction runs (deselect with '-m \"not slow\"')"
    )


# -- Problems ------------------------------------------------------------------

#: Curvatures and demands of the 3-node scalar quadratic problem
SCALAR_CURVATURES = [1., 2., 4.]
SCALAR_DEMANDS = [1., -0.5, 2.]


@pytest.fixture
def scalar_quadratics():
    """Three scalar quadratics :math:`f_i = a_i x^2 / 2` with
    :math:`l_i = a_i`."""
    return [QuadraticCost(q=[[a]], demand=[d], lipschitz=a)
            for a, d in zip(SCALAR_CURVATURES, SCALAR_DEMANDS)]


@pytest.fixture
def ten_node_problem():
    return ten_node_costs()


# -- Graphs --------------------------------------------------------------------

@pytest.fixture
def pair_graph():
    return WeightedDigraph([[0., 1.], [1., 0.]])


@pytest.fixture
def ring3():
    return WeightedDigraph.directed_cycle([0, 1, 2])


@pytest.fixture
def ring3_schedule(ring3):
    """Three-node schedule alternating every second between both orientations
    of the directed ring, over 20 s."""
    reverse = WeightedDigraph.directed_cycle([0, 2, 1])
    return GraphSchedule.cycle([ring3, reverse], dwell=1., horizon=20.)


@pytest.fixture
def ten_node_schedule():
    return default_ten_node_schedule()


@pytest.fixture
def rng():
    return np.random.default_rng(20210504)
