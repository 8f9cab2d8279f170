"""Local cost abstractions, dual functions and the cost factory."""

import itertools
from abc import ABC, abstractmethod

import attr
import numpy as np

from ..util.attrs import validator_all_finite, validator_is_positive
from ..util.exceptions import DomainError
from ..util.factory import BaseFactory
from ..util.misc import as_float_vector

#: Relative width of the excluded band at each finite end of a dual domain
BOUNDARY_MARGIN = 1e-9

#: Absolute tolerance on the gradient residual of iterative inverse solves
INV_TOL = 1e-12

#: Iteration cap of iterative inverse solves
INV_MAX_ITER = 100


@attr.s(frozen=True, eq=False)
class CostSpec(ABC):
    """Abstract base class for local costs :math:`f_i`. Derived classes
    implement the cost value, its gradient and Hessian, the inverse gradient map
    :math:`h_i = (\\nabla f_i)^{-1}` and the dual domain
    :math:`\\Lambda_i = \\mathrm{range}(\\nabla f_i)`.

    .. rubric:: Constructor arguments / instance attributes

    ``demand`` (array[float]):
        Local resource demand :math:`d_i`. Keyword-only.

    ``lipschitz`` (float):
        Declared Lipschitz bound :math:`l_i` of :math:`\\nabla f_i`.
        Keyword-only.

    .. seealso::

       :class:`CostFactory`
    """
    demand = attr.ib(converter=as_float_vector, validator=validator_all_finite,
                     kw_only=True)
    lipschitz = attr.ib(converter=float, validator=validator_is_positive,
                        kw_only=True)

    def __attrs_post_init__(self):
        if self.demand.shape != (self.dim,):
            raise ValueError(f"demand must have length {self.dim}, "
                             f"got {len(self.demand)}")

    @classmethod
    def from_dict(cls, d):
        """Create from a dictionary."""
        return cls(**d)

    @property
    @abstractmethod
    def dim(self):
        """Decision dimension :math:`m`."""
        pass

    @abstractmethod
    def value(self, x):
        """Cost value :math:`f_i(x)`."""
        pass

    @abstractmethod
    def gradient(self, x):
        """Exact gradient :math:`\\nabla f_i(x)`."""
        pass

    @abstractmethod
    def hessian(self, x):
        """Exact Hessian :math:`\\nabla^2 f_i(x)`."""
        pass

    @abstractmethod
    def dual_domain(self):
        """Return the open box :math:`\\Lambda_i` as a pair of bound vectors
        ``(lo, hi)``. Infinite bounds are allowed."""
        pass

    @abstractmethod
    def _inverse_gradient(self, lam):
        # Unchecked inverse gradient
        pass

    def check_domain(self, lam):
        """Check that ``lam`` lies in the interior of the dual domain, away from
        finite bounds by more than :data:`BOUNDARY_MARGIN` times the domain
        width.

        Raises → :class:`.DomainError`:
            Naming the first offending coordinate.
        """
        lo, hi = self.dual_domain()
        lo_inner, hi_inner = _shrink(lo, hi)
        lam = np.asarray(lam, dtype=float)
        bad = ~((lam > lo_inner) & (lam < hi_inner))
        if np.any(bad):
            j = int(np.flatnonzero(bad)[0])
            raise DomainError(
                f"multiplier coordinate {j} = {lam[j]:.17g} outside the "
                f"interior of the dual domain ({lo[j]:g}, {hi[j]:g})",
                coordinate=j
            )

    def inverse_gradient(self, lam):
        """Inverse gradient map :math:`h_i(\\lambda)`, *i.e.* the :math:`x`
        such that :math:`\\nabla f_i(x) = \\lambda`.

        Raises → :class:`.DomainError`:
            If ``lam`` is not in the interior of the dual domain.

        Raises → :class:`.NumericError`:
            If an iterative solve fails to converge.
        """
        lam = as_float_vector(lam)
        self.check_domain(lam)
        return self._inverse_gradient(lam)

    def dual(self):
        """Return the associated :class:`DualFunction`."""
        return DualFunction(self)

    def hessian_bounds(self, x):
        """Smallest and largest Hessian eigenvalues at ``x``."""
        eigs = np.linalg.eigvalsh(self.hessian(x))
        return float(eigs[0]), float(eigs[-1])

    def validate_regularity(self, sample_box, n_samples):
        """Wraps :func:`validate_regularity`."""
        return validate_regularity(self, sample_box, n_samples)

    @classmethod
    def _batch(cls, costs):
        """Return a batch evaluator for a sequence of costs of this class.
        The default implementation loops over the costs; derived classes may
        override it with a vectorised evaluator."""
        return LoopBatch(costs)


class LoopBatch:
    """Batch evaluator looping over individual costs."""

    def __init__(self, costs):
        self.costs = tuple(costs)

    def inverse_gradient(self, lam):
        return np.array([c._inverse_gradient(row)
                         for c, row in zip(self.costs, lam)])

    def value(self, x):
        return np.array([c.value(row) for c, row in zip(self.costs, x)])


def _shrink(lo, hi):
    width = hi - lo
    margin = np.where(np.isfinite(width), BOUNDARY_MARGIN * width, 0.)
    return lo + margin, hi - margin


class CostFactory(BaseFactory):
    """This factory constructs objects whose classes are derived from
    :class:`CostSpec`.

    .. admonition:: Registered factory members
       :class: hint

       ``quadratic`` (:class:`.QuadraticCost`), ``separable_logexp``
       (:class:`.SeparableLogExpCost`)
    """
    _constructed_type = CostSpec
    registry = {}


@attr.s(frozen=True, eq=False)
class DualFunction:
    """Dual function :math:`J_i(\\lambda) = -g_i(\\lambda)` of a local cost,
    defined on :math:`\\Lambda_i`, with

    .. math::

       g_i(\\lambda) = f_i(h_i(\\lambda)) + \\lambda^T (d_i - h_i(\\lambda)).

    .. rubric:: Constructor arguments / instance attributes

    ``source`` (:class:`CostSpec`):
        Primal cost.
    """
    source = attr.ib(validator=attr.validators.instance_of(CostSpec))

    def domain(self):
        """Dual domain bounds ``(lo, hi)``."""
        return self.source.dual_domain()

    def gradient(self, lam):
        """:math:`\\nabla J_i(\\lambda) = h_i(\\lambda) - d_i`."""
        return self.source.inverse_gradient(lam) - self.source.demand

    def value(self, lam):
        """:math:`J_i(\\lambda)`."""
        lam = as_float_vector(lam)
        x = self.source.inverse_gradient(lam)
        return float(-self.source.value(x) - lam @ (self.source.demand - x))

    def hessian(self, lam):
        """:math:`\\nabla^2 J_i(\\lambda) = (\\nabla^2 f_i(h_i(\\lambda)))^{-1}`."""
        x = self.source.inverse_gradient(lam)
        return np.linalg.inv(self.source.hessian(x))


# -- Operations ----------------------------------------------------------------

def gradient(c, x):
    """Exact gradient :math:`\\nabla f_i(x)` of cost ``c``."""
    return c.gradient(as_float_vector(x))


def inverse_gradient(c, lam):
    """Inverse gradient map :math:`h_i(\\lambda)` of cost ``c``."""
    return c.inverse_gradient(lam)


def dual_gradient(dfn, lam):
    """Dual gradient :math:`\\nabla J_i(\\lambda) = h_i(\\lambda) - d_i`."""
    return dfn.gradient(lam)


def dual_value(dfn, lam):
    """Dual value :math:`J_i(\\lambda)`."""
    return dfn.value(lam)


@attr.s(frozen=True)
class RegularityReport:
    """Outcome of a sampled curvature check.

    .. rubric:: Constructor arguments / instance attributes

    ``passed`` (bool):
        ``True`` iff every sampled Hessian satisfies
        :math:`0 < \\nabla^2 f_i(x) \\le l_i I`.

    ``min_eig`` (float):
        Smallest sampled Hessian eigenvalue.

    ``max_eig`` (float):
        Largest sampled Hessian eigenvalue.

    ``lipschitz`` (float):
        Declared Lipschitz bound.

    ``n_evaluated`` (int):
        Number of evaluated sample points.

    ``violation`` (array[float] or None):
        First sample point violating the condition.

    ``reason`` (str or None):
        Description of the violation.
    """
    passed = attr.ib(converter=bool)
    min_eig = attr.ib(converter=float)
    max_eig = attr.ib(converter=float)
    lipschitz = attr.ib(converter=float)
    n_evaluated = attr.ib(converter=int)
    violation = attr.ib(default=None, eq=False)
    reason = attr.ib(default=None)

    def __bool__(self):
        return self.passed


def sample_grid(sample_box, n_samples):
    """Deterministic tensor grid covering ``sample_box = (lo, hi)`` with at
    least ``n_samples`` points (the box centre if ``n_samples`` is 1)."""
    lo, hi = (as_float_vector(x) for x in sample_box)
    if n_samples < 1:
        raise ValueError(f"n_samples must be at least 1, got {n_samples}")
    if n_samples == 1:
        return ((lo + hi) / 2.).reshape(1, -1)
    m = len(lo)
    k = max(2, int(np.ceil(n_samples ** (1. / m) - 1e-9)))
    axes = [np.linspace(a, b, k) for a, b in zip(lo, hi)]
    return np.array(list(itertools.product(*axes)))


def validate_regularity(c, sample_box, n_samples):
    """Sample Hessians of ``c`` on a deterministic grid of ``sample_box`` and
    check :math:`0 < \\nabla^2 f_i(x) \\le l_i I`. This function never raises
    on a violated condition: the outcome is reported.

    Parameter ``c`` (:class:`CostSpec`):
        Checked cost.

    Parameter ``sample_box`` (tuple[array, array]):
        Lower and upper corners of the sampled box.

    Parameter ``n_samples`` (int):
        Minimum number of sample points.

    Returns → :class:`RegularityReport`:
        Check outcome.
    """
    points = sample_grid(sample_box, n_samples)
    min_eig, max_eig = np.inf, -np.inf
    violation, reason = None, None
    upper = c.lipschitz * (1. + 1e-12)

    for x in points:
        lo, hi = c.hessian_bounds(x)
        min_eig, max_eig = min(min_eig, lo), max(max_eig, hi)
        if violation is None:
            if lo <= 0.:
                violation, reason = x, f"Hessian not positive definite " \
                                       f"(smallest eigenvalue {lo:g})"
            elif hi > upper:
                violation, reason = x, f"Hessian eigenvalue {hi:g} exceeds " \
                                       f"declared bound {c.lipschitz:g}"

    return RegularityReport(
        passed=violation is None,
        min_eig=min_eig,
        max_eig=max_eig,
        lipschitz=c.lipschitz,
        n_evaluated=len(points),
        violation=violation,
        reason=reason
    )
