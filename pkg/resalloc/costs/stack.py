"""Network-level evaluation of a collection of local costs."""

import numpy as np

from .core import CostSpec, _shrink
from ..util.exceptions import DomainError


class CostStack:
    """Evaluate the local costs of all nodes at once on ``(N, m)`` arrays.

    Costs are grouped by class and evaluated with the class batch evaluator
    (see :meth:`.CostSpec._batch`), so that the inverse gradient map of the
    whole network costs a handful of array operations.

    Parameter ``costs`` (list[:class:`.CostSpec`]):
        Node costs, in node order. All must share the same dimension.
    """

    def __init__(self, costs):
        costs = tuple(costs)
        if not costs:
            raise ValueError("a cost stack requires at least one cost")
        for cost in costs:
            if not isinstance(cost, CostSpec):
                raise TypeError(f"expected CostSpec objects, got {type(cost)}")
        dims = {cost.dim for cost in costs}
        if len(dims) != 1:
            raise ValueError(f"all costs must share the same dimension, "
                             f"got {sorted(dims)}")

        self.costs = costs
        self.n = len(costs)
        self.dim = dims.pop()
        self.demand = np.array([cost.demand for cost in costs])
        self.lipschitz = np.array([cost.lipschitz for cost in costs])

        bounds = [cost.dual_domain() for cost in costs]
        self.lo = np.array([lo for lo, _ in bounds])
        self.hi = np.array([hi for _, hi in bounds])
        self._lo_inner, self._hi_inner = _shrink(self.lo, self.hi)

        groups = {}
        for i, cost in enumerate(costs):
            groups.setdefault(type(cost), []).append(i)
        self._batches = [
            (np.array(idx), cls._batch([costs[i] for i in idx]))
            for cls, idx in groups.items()
        ]

    def __len__(self):
        return self.n

    def __getitem__(self, i):
        return self.costs[i]

    def check_domain(self, lam):
        """Check that every row of ``lam`` lies in the interior of its node's
        dual domain.

        Raises → :class:`.DomainError`:
            Naming the first offending node and coordinate.
        """
        bad = ~((lam > self._lo_inner) & (lam < self._hi_inner))
        if np.any(bad):
            i, j = (int(x) for x in np.argwhere(bad)[0])
            raise DomainError(
                f"multiplier coordinate {j} = {lam[i, j]:.17g} outside the "
                f"interior of the dual domain ({self.lo[i, j]:g}, "
                f"{self.hi[i, j]:g})",
                coordinate=j, node=i
            )

    def inverse_gradient(self, lam, check=True):
        """Stacked :math:`h_i(\\lambda_i)`."""
        if check:
            self.check_domain(lam)
        x = np.empty_like(lam)
        for idx, batch in self._batches:
            x[idx] = batch.inverse_gradient(lam[idx])
        return x

    def value(self, x):
        """Stacked :math:`f_i(x_i)`, shape ``(N,)``."""
        result = np.empty(self.n)
        for idx, batch in self._batches:
            result[idx] = batch.value(x[idx])
        return result

    def gradient(self, x):
        """Stacked :math:`\\nabla f_i(x_i)`."""
        return np.array([cost.gradient(row) for cost, row in zip(self.costs, x)])

    def dual_gradient(self, lam):
        """Stacked :math:`\\nabla J_i(\\lambda_i) = h_i(\\lambda_i) - d_i`."""
        return self.inverse_gradient(lam) - self.demand

    def dual_value(self, lam, x=None):
        """Stacked :math:`J_i(\\lambda_i)`, shape ``(N,)``. Pass ``x`` to reuse
        already computed :math:`h_i(\\lambda_i)` values."""
        if x is None:
            x = self.inverse_gradient(lam)
        return -self.value(x) - np.einsum("ij,ij->i", lam, self.demand - x)

    def boundary_distance(self, lam):
        """Per-node distance from :math:`\\lambda_i` to the boundary of
        :math:`\\Lambda_i` (infinite for unbounded domains)."""
        return np.min(np.minimum(lam - self.lo, self.hi - lam), axis=1)

    def domain_intersection(self):
        """Bounds ``(lo, hi)`` of :math:`\\cap_i \\Lambda_i`."""
        return self.lo.max(axis=0), self.hi.min(axis=0)
