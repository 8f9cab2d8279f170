import numpy as np
import pytest

from resalloc.graphs import WeightedDigraph, is_weight_balanced, laplacian
from resalloc.util.exceptions import GraphError


def test_digraph_construct():
    g = WeightedDigraph([[0, 1], [2, 0]])
    assert g.n == 2
    assert np.allclose(g.in_degree(), [1, 2])
    assert np.allclose(g.out_degree(), [2, 1])
    assert g.edges() == {(1, 0), (0, 1)}

    # Weights are read-only
    with pytest.raises(ValueError):
        g.weights[0, 1] = 3.

    # Invalid weights
    with pytest.raises(GraphError):
        WeightedDigraph([[0, -1], [1, 0]])
    with pytest.raises(GraphError):
        WeightedDigraph([[1, 1], [1, 0]])
    with pytest.raises(GraphError):
        WeightedDigraph([[0, 1, 0], [1, 0, 0]])

    # Dictionary interface
    g = WeightedDigraph.from_dict({"n": 2, "weights": [[0, 1], [1, 0]]})
    assert g.n == 2
    with pytest.raises(GraphError):
        WeightedDigraph.from_dict({"n": 3, "weights": [[0, 1], [1, 0]]})


def test_laplacian():
    # Directed 3-cycle 0 → 1 → 2 → 0 (node i receives from i - 1)
    g = WeightedDigraph([[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    l = laplacian(g)
    assert np.allclose(l, [[1, 0, -1], [-1, 1, 0], [0, -1, 1]])
    assert np.allclose(l.sum(axis=1), 0.)
    assert np.allclose(l.sum(axis=0), 0.)

    # The same cycle with the other orientation gives the rows of the
    # definition example
    g = WeightedDigraph([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    assert np.allclose(g.laplacian(), [[1, -1, 0], [0, 1, -1], [-1, 0, 1]])

    # Empty graph
    assert np.all(laplacian(WeightedDigraph.empty(4)) == 0.)


def test_is_weight_balanced():
    # Symmetric adjacency
    rng = np.random.default_rng(0)
    w = rng.uniform(0., 1., (5, 5))
    w = w + w.T
    np.fill_diagonal(w, 0.)
    assert is_weight_balanced(WeightedDigraph(w))

    # Directed cycle
    assert WeightedDigraph.directed_cycle([0, 1, 2]).is_weight_balanced()

    # Unbalanced pair
    report = is_weight_balanced(WeightedDigraph([[0, 2], [1, 0]]))
    assert not report
    assert np.allclose(np.abs(report.imbalance), [1, 1])
    assert report.offending_nodes() == [0, 1]

    with pytest.raises(ValueError):
        is_weight_balanced(WeightedDigraph.empty(2), tol=-1.)


@pytest.mark.parametrize("seed", range(5))
def test_balanced_laplacian_properties(seed):
    # Sums of random directed cycles with integer weights are balanced
    rng = np.random.default_rng(seed)
    n = 6
    w = np.zeros((n, n))
    for _ in range(3):
        w += WeightedDigraph.directed_cycle(rng.permutation(n),
                                            weight=int(rng.integers(1, 4))).weights
    g = WeightedDigraph(w)
    assert g.is_weight_balanced()

    l = g.laplacian()
    assert np.all(np.abs(l.sum(axis=0)) <= 1e-12)
    assert np.all(np.abs(l.sum(axis=1)) <= 1e-12)
    assert np.min(np.linalg.eigvalsh(l + l.T)) >= -1e-10


def test_to_networkx():
    g = WeightedDigraph([[0, 0.5], [0, 0]])
    nxg = g.to_networkx()
    # a_01 > 0: node 0 receives from node 1
    assert list(nxg.edges(data="weight")) == [(1, 0, 0.5)]
    assert not g.is_strongly_connected()
    assert WeightedDigraph.directed_cycle([0, 1]).is_strongly_connected()
