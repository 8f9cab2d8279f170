"""Separable costs built from log-sum-exp and quadratic coordinate terms."""

from abc import ABC, abstractmethod

import attr
import numpy as np
from scipy.special import logsumexp, softmax

from .core import INV_MAX_ITER, INV_TOL, CostFactory, CostSpec
from ..util.attrs import validator_is_number, validator_is_strictly_positive
from ..util.exceptions import NumericError
from ..util.factory import BaseFactory
from ..util.misc import as_float_vector


# -- Coordinate terms ----------------------------------------------------------

@attr.s(frozen=True, eq=False)
class CoordinateTerm(ABC):
    """Abstract scalar term :math:`\\phi` acting on one decision coordinate.
    Methods accept scalars or arrays and evaluate elementwise."""

    @classmethod
    def from_dict(cls, d):
        """Create from a dictionary."""
        return cls(**d)

    @abstractmethod
    def value(self, x):
        pass

    @abstractmethod
    def derivative(self, x):
        pass

    @abstractmethod
    def second_derivative(self, x):
        pass

    @abstractmethod
    def inverse(self, y):
        """Solve :math:`\\phi'(x) = y` for :math:`x`."""
        pass

    @abstractmethod
    def domain(self):
        """Open range ``(lo, hi)`` of :math:`\\phi'`."""
        pass


class CoordinateTermFactory(BaseFactory):
    """This factory constructs :class:`CoordinateTerm` objects (``logexp``,
    ``quadratic``)."""
    _constructed_type = CoordinateTerm
    registry = {}


def _exponents_validator(instance, attribute, value):
    if not np.all(np.isfinite(value)):
        raise ValueError(f"{attribute.name} must be finite, got {value}")
    if len(np.unique(value)) < 2:
        raise ValueError(f"{attribute.name} must hold at least two distinct "
                         f"values (got {list(value)}), otherwise the term is "
                         f"not strictly convex")


@CoordinateTermFactory.register("logexp")
@attr.s(frozen=True, eq=False)
class LogExpTerm(CoordinateTerm):
    """Log-sum-exp term :math:`\\phi(x) = \\ln \\sum_k e^{a_k x}`.

    Its derivative is the softmax-weighted mean of the exponents and ranges
    over :math:`(\\min_k a_k, \\max_k a_k)`. With exactly two exponents
    :math:`a > b`, the inverse derivative has the closed form

    .. math::

       x = \\frac{1}{a - b} \\ln \\frac{y - b}{a - y};

    otherwise, it is computed with a safeguarded Newton iteration.

    .. rubric:: Constructor arguments / instance attributes

    ``exponents`` (array[float]):
        Exponents :math:`a_k`. At least two distinct values are required.
    """
    exponents = attr.ib(converter=as_float_vector, validator=_exponents_validator)

    @property
    def closed_form(self):
        """``True`` if the inverse derivative is evaluated in closed form."""
        return len(self.exponents) == 2

    def value(self, x):
        return logsumexp(np.multiply.outer(x, self.exponents), axis=-1)

    def derivative(self, x):
        return softmax(np.multiply.outer(x, self.exponents), axis=-1) @ self.exponents

    def second_derivative(self, x):
        s = softmax(np.multiply.outer(x, self.exponents), axis=-1)
        mean = s @ self.exponents
        return s @ self.exponents ** 2 - mean ** 2

    def domain(self):
        return float(self.exponents.min()), float(self.exponents.max())

    def sup_curvature(self):
        """Supremum of :math:`\\phi''` (exact for two exponents, an upper bound
        otherwise)."""
        lo, hi = self.domain()
        return (hi - lo) ** 2 / 4.

    def inverse(self, y):
        if self.closed_form:
            b, a = self.domain()
            return (np.log(y - b) - np.log(a - y)) / (a - b)
        return solve_increasing(self.derivative, self.second_derivative, float(y))


@CoordinateTermFactory.register("quadratic")
@attr.s(frozen=True, eq=False)
class QuadraticTerm(CoordinateTerm):
    """Scalar quadratic term :math:`\\phi(x) = \\frac{1}{2} q x^2 + p x`.

    .. rubric:: Constructor arguments / instance attributes

    ``q`` (float):
        Curvature. Must be strictly positive.

    ``p`` (float):
        Linear coefficient. Default: 0.
    """
    q = attr.ib(converter=float, validator=validator_is_strictly_positive)
    p = attr.ib(default=0., converter=float, validator=validator_is_number)

    def value(self, x):
        return 0.5 * self.q * np.square(x) + self.p * np.asarray(x)

    def derivative(self, x):
        return self.q * np.asarray(x) + self.p

    def second_derivative(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.q)

    def domain(self):
        return -np.inf, np.inf

    def sup_curvature(self):
        return self.q

    def inverse(self, y):
        return (y - self.p) / self.q


def solve_increasing(fun, dfun, y, x0=0., tol=INV_TOL, max_iter=INV_MAX_ITER):
    """Solve :math:`F(x) = y` for a smooth increasing scalar function :math:`F`
    with Newton steps safeguarded by bisection.

    Parameter ``fun`` (callable):
        Function :math:`F`.

    Parameter ``dfun`` (callable):
        Derivative of :math:`F`.

    Parameter ``y`` (float):
        Target value. Must lie in the open range of :math:`F`.

    Parameter ``x0`` (float):
        Starting point of the bracket search.

    Returns → float:
        Solution :math:`x` with :math:`|F(x) - y| \\le` ``tol``.

    Raises → :class:`.NumericError`:
        If no bracket can be found or the iteration does not converge within
        ``max_iter`` steps.
    """
    # Bracket search by step doubling
    lo = hi = x0
    step = 1.
    r0 = fun(x0) - y
    for _ in range(max_iter):
        if r0 < 0.:
            hi = x0 + step
            if fun(hi) - y >= 0.:
                break
            lo = hi
        elif r0 > 0.:
            lo = x0 - step
            if fun(lo) - y <= 0.:
                break
            hi = lo
        else:
            return x0
        step *= 2.
    else:
        raise NumericError(f"could not bracket the solution of F(x) = {y}")

    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        r = fun(x) - y
        if abs(r) <= tol:
            return x
        if r < 0.:
            lo = x
        else:
            hi = x
        slope = dfun(x)
        x_new = x - r / slope if slope > 0. else np.nan
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if x_new == x or hi - lo <= 4. * np.finfo(float).eps * max(1., abs(x)):
            return x_new
        x = x_new

    raise NumericError(f"Newton iteration for F(x) = {y} did not converge "
                       f"within {max_iter} iterations")


# -- Separable cost ------------------------------------------------------------

def _convert_terms(value):
    return tuple(CoordinateTermFactory.convert(term) for term in value)


def _terms_validator(instance, attribute, value):
    if not value:
        raise ValueError(f"{attribute.name} must not be empty")
    for term in value:
        if not isinstance(term, CoordinateTerm):
            raise TypeError(f"{attribute.name} must hold CoordinateTerm "
                            f"objects, got {type(term)}")


@CostFactory.register("separable_logexp")
@attr.s(frozen=True, eq=False)
class SeparableLogExpCost(CostSpec):
    """Separable cost :math:`f(x) = \\sum_j \\phi_j(x_j)` where each
    :math:`\\phi_j` is a :class:`LogExpTerm` or a :class:`QuadraticTerm`.
    The dual domain is the product of the coordinate derivative ranges.

    .. rubric:: Constructor arguments / instance attributes

    ``coordinates`` (list[:class:`CoordinateTerm` or dict]):
        One term per decision coordinate. Dictionaries are converted with
        :class:`CoordinateTermFactory`.

    ``demand``, ``lipschitz``:
        See :class:`.CostSpec`.
    """
    coordinates = attr.ib(converter=_convert_terms, validator=_terms_validator)

    @property
    def dim(self):
        return len(self.coordinates)

    def value(self, x):
        return float(sum(term.value(xj) for term, xj in zip(self.coordinates, x)))

    def gradient(self, x):
        return np.array([term.derivative(xj)
                         for term, xj in zip(self.coordinates, x)], dtype=float)

    def hessian(self, x):
        return np.diag([term.second_derivative(xj)
                        for term, xj in zip(self.coordinates, x)]).astype(float)

    def dual_domain(self):
        bounds = np.array([term.domain() for term in self.coordinates], dtype=float)
        return bounds[:, 0].copy(), bounds[:, 1].copy()

    def _inverse_gradient(self, lam):
        return np.array([term.inverse(y)
                         for term, y in zip(self.coordinates, lam)], dtype=float)

    @classmethod
    def _batch(cls, costs):
        return SeparableBatch(costs)


class SeparableBatch:
    """Vectorised evaluator for a group of :class:`SeparableLogExpCost`
    objects. Two-exponent log-sum-exp and quadratic entries are evaluated in
    closed form over flat index arrays; other entries are evaluated one by
    one."""

    def __init__(self, costs):
        costs = tuple(costs)
        self.shape = (len(costs), costs[0].dim)
        entries = [(k * self.shape[1] + j, term)
                   for k, cost in enumerate(costs)
                   for j, term in enumerate(cost.coordinates)]

        lse = [(i, t) for i, t in entries
               if isinstance(t, LogExpTerm) and t.closed_form]
        self.lse_idx = np.array([i for i, _ in lse], dtype=int)
        self.lse_hi = np.array([t.exponents.max() for _, t in lse])
        self.lse_lo = np.array([t.exponents.min() for _, t in lse])

        quad = [(i, t) for i, t in entries if isinstance(t, QuadraticTerm)]
        self.quad_idx = np.array([i for i, _ in quad], dtype=int)
        self.quad_q = np.array([t.q for _, t in quad])
        self.quad_p = np.array([t.p for _, t in quad])

        self.other = [(i, t) for i, t in entries
                      if not (isinstance(t, QuadraticTerm) or
                              (isinstance(t, LogExpTerm) and t.closed_form))]

    def inverse_gradient(self, lam):
        y = lam.reshape(-1)
        x = np.empty_like(y)
        ys = y[self.lse_idx]
        x[self.lse_idx] = ((np.log(ys - self.lse_lo) - np.log(self.lse_hi - ys))
                           / (self.lse_hi - self.lse_lo))
        x[self.quad_idx] = (y[self.quad_idx] - self.quad_p) / self.quad_q
        for i, term in self.other:
            x[i] = term.inverse(y[i])
        return x.reshape(self.shape)

    def value(self, x):
        xf = x.reshape(-1)
        phi = np.empty_like(xf)
        xs = xf[self.lse_idx]
        phi[self.lse_idx] = np.logaddexp(self.lse_hi * xs, self.lse_lo * xs)
        xq = xf[self.quad_idx]
        phi[self.quad_idx] = 0.5 * self.quad_q * xq ** 2 + self.quad_p * xq
        for i, term in self.other:
            phi[i] = term.value(xf[i])
        return phi.reshape(self.shape).sum(axis=1)
