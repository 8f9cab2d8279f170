"""Weighted digraphs and their algebraic descriptors.

Edge weights follow the in-neighbour convention: ``weights[i, j] > 0`` means
that node ``i`` receives information from node ``j`` (edge ``j → i``).
"""

import attr
import networkx as nx
import numpy as np

from ..util.exceptions import GraphError
from ..util.misc import as_float_matrix

#: Default tolerance used to decide weight balance
BALANCE_TOL = 1e-9


def _weights_validator(instance, attribute, value):
    if value.shape[0] != value.shape[1]:
        raise GraphError(f"{attribute.name} must be a square matrix, "
                         f"got shape {value.shape}")
    if not np.all(np.isfinite(value)):
        raise GraphError(f"{attribute.name} must be finite")
    if np.any(value < 0.):
        i, j = np.argwhere(value < 0.)[0]
        raise GraphError(f"{attribute.name} must be nonnegative, "
                         f"got a[{i}, {j}] = {value[i, j]}")
    if np.any(np.diag(value) != 0.):
        i = int(np.flatnonzero(np.diag(value))[0])
        raise GraphError(f"{attribute.name} must have a zero diagonal, "
                         f"got a[{i}, {i}] = {value[i, i]}")


@attr.s(frozen=True)
class BalanceReport:
    """Outcome of a weight balance test.

    .. rubric:: Constructor arguments / instance attributes

    ``balanced`` (bool):
        ``True`` iff every node's imbalance is within tolerance.

    ``imbalance`` (array[float]):
        Per-node difference between in-degree and out-degree.

    ``tol`` (float):
        Tolerance used for the test.
    """
    balanced = attr.ib(converter=bool)
    imbalance = attr.ib(eq=False)
    tol = attr.ib(converter=float)

    def __bool__(self):
        return self.balanced

    def offending_nodes(self):
        """Return the indices of nodes whose imbalance exceeds tolerance."""
        return [int(i) for i in np.flatnonzero(np.abs(self.imbalance) > self.tol)]


@attr.s(frozen=True, eq=False)
class WeightedDigraph:
    """A weighted digraph on ``n`` nodes, stored as its dense adjacency matrix.

    .. rubric:: Constructor arguments / instance attributes

    ``weights`` (array[float]):
        ``n × n`` nonnegative adjacency matrix with zero diagonal. Stored as a
        read-only array.
    """
    weights = attr.ib(converter=as_float_matrix, validator=_weights_validator)

    @classmethod
    def from_dict(cls, d):
        """Create from a dictionary with a ``weights`` entry (row-major nested
        list) and an optional ``n`` entry checked against the matrix size."""
        d = dict(d)
        n = d.pop("n", None)
        result = cls(**d)
        if n is not None and int(n) != result.n:
            raise GraphError(f"declared node count n = {n} does not match "
                             f"weight matrix size {result.n}")
        return result

    @classmethod
    def empty(cls, n):
        """Edgeless digraph on ``n`` nodes."""
        return cls(np.zeros((n, n)))

    @classmethod
    def directed_cycle(cls, order, n=None, weight=1.):
        """Directed cycle visiting ``order`` (a sequence of node indices) and
        closing back to its first element.

        Parameter ``order`` (list[int]):
            Node visiting order. Edge ``order[k] → order[k+1]`` is created for
            every ``k``, plus the closing edge.

        Parameter ``n`` (int or None):
            Node count. Defaults to ``max(order) + 1``.

        Parameter ``weight`` (float):
            Weight applied to every edge.
        """
        order = [int(x) for x in order]
        if n is None:
            n = max(order) + 1
        weights = np.zeros((n, n))
        for sender, receiver in zip(order, order[1:] + order[:1]):
            weights[receiver, sender] = weight
        return cls(weights)

    @property
    def n(self):
        """Node count."""
        return self.weights.shape[0]

    def in_degree(self):
        """Weighted in-degrees :math:`d_{in}^i = \\sum_j a_{ij}`."""
        return self.weights.sum(axis=1)

    def out_degree(self):
        """Weighted out-degrees :math:`d_{out}^i = \\sum_j a_{ji}`."""
        return self.weights.sum(axis=0)

    def laplacian(self):
        """Return :math:`L = D_{in} - A`."""
        return laplacian(self)

    def is_weight_balanced(self, tol=BALANCE_TOL):
        """Wraps :func:`is_weight_balanced`."""
        return is_weight_balanced(self, tol=tol)

    def edges(self):
        """Return the set of edges ``(sender, receiver)``."""
        return {(int(j), int(i)) for i, j in np.argwhere(self.weights > 0.)}

    def to_networkx(self):
        """Convert to a :class:`networkx.DiGraph` with edges oriented from
        sender to receiver and a ``weight`` edge attribute."""
        g = nx.DiGraph()
        g.add_nodes_from(range(self.n))
        for i, j in np.argwhere(self.weights > 0.):
            g.add_edge(int(j), int(i), weight=float(self.weights[i, j]))
        return g

    def is_strongly_connected(self):
        """``True`` iff the digraph is strongly connected."""
        return nx.is_strongly_connected(self.to_networkx())

    def same_edges(self, other):
        """``True`` iff ``other`` has exactly the same weights."""
        return self.n == other.n and np.array_equal(self.weights, other.weights)


def laplacian(g):
    """Return the Laplacian matrix :math:`L = D_{in} - A` of ``g``.

    Parameter ``g`` (:class:`WeightedDigraph`):
        Digraph.

    Returns → array[float]:
        ``n × n`` Laplacian. Every row sums to zero.
    """
    return np.diag(g.in_degree()) - g.weights


def is_weight_balanced(g, tol=BALANCE_TOL):
    """Test weight balance: :math:`|d_{in}^i - d_{out}^i| \\le` ``tol`` for
    every node ``i``.

    Parameter ``g`` (:class:`WeightedDigraph`):
        Digraph.

    Parameter ``tol`` (float):
        Nonnegative tolerance.

    Returns → :class:`BalanceReport`:
        Verdict and per-node imbalance. The report evaluates to the verdict in
        a boolean context.
    """
    if tol < 0.:
        raise ValueError(f"tol must be positive or zero, got {tol}")
    imbalance = g.in_degree() - g.out_degree()
    imbalance.setflags(write=False)
    return BalanceReport(
        balanced=bool(np.all(np.abs(imbalance) <= tol)),
        imbalance=imbalance,
        tol=tol
    )
