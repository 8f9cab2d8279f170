"""Quadratic costs :math:`f(x) = \\frac{1}{2} x^T Q x + b^T x + c`."""

import attr
import numpy as np
import scipy.linalg

from .core import CostFactory, CostSpec
from ..util.attrs import validator_is_number
from ..util.misc import as_float_matrix, as_float_vector


def _q_validator(instance, attribute, value):
    if value.shape[0] != value.shape[1]:
        raise ValueError(f"{attribute.name} must be square, got shape {value.shape}")
    if not np.allclose(value, value.T, rtol=0., atol=1e-12):
        raise ValueError(f"{attribute.name} must be symmetric")
    try:
        scipy.linalg.cholesky(value)
    except np.linalg.LinAlgError:
        raise ValueError(f"{attribute.name} must be positive definite")


@CostFactory.register("quadratic")
@attr.s(frozen=True, eq=False)
class QuadraticCost(CostSpec):
    """Quadratic cost :math:`f(x) = \\frac{1}{2} x^T Q x + b^T x + c` with
    :math:`Q` symmetric positive definite. The dual domain is
    :math:`\\mathbb{R}^m` and :math:`h(\\lambda) = Q^{-1}(\\lambda - b)`.

    .. rubric:: Constructor arguments / instance attributes

    ``q`` (array[float]):
        Hessian :math:`Q`.

    ``b`` (array[float] or None):
        Linear coefficient. Default: zero.

    ``c`` (float):
        Constant term. Default: 0.

    ``demand``, ``lipschitz``:
        See :class:`.CostSpec`.
    """
    q = attr.ib(converter=as_float_matrix, validator=_q_validator)
    b = attr.ib(default=None,
                converter=attr.converters.optional(as_float_vector))
    c = attr.ib(default=0., converter=float, validator=validator_is_number)
    _q_inv = attr.ib(init=False, repr=False)

    def __attrs_post_init__(self):
        if self.b is None:
            object.__setattr__(self, "b", as_float_vector(np.zeros(self.dim)))
        if self.b.shape != (self.dim,):
            raise ValueError(f"b must have length {self.dim}, got {len(self.b)}")
        q_inv = np.linalg.inv(self.q)
        q_inv.setflags(write=False)
        object.__setattr__(self, "_q_inv", q_inv)
        super().__attrs_post_init__()

    @property
    def dim(self):
        return self.q.shape[0]

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return float(0.5 * x @ self.q @ x + self.b @ x + self.c)

    def gradient(self, x):
        return self.q @ np.asarray(x, dtype=float) + self.b

    def hessian(self, x):
        return np.array(self.q)

    def dual_domain(self):
        return np.full(self.dim, -np.inf), np.full(self.dim, np.inf)

    def _inverse_gradient(self, lam):
        return self._q_inv @ (lam - self.b)

    @classmethod
    def _batch(cls, costs):
        return QuadraticBatch(costs)


class QuadraticBatch:
    """Vectorised evaluator for a group of :class:`QuadraticCost` objects."""

    def __init__(self, costs):
        self.q = np.array([c.q for c in costs])
        self.q_inv = np.array([c._q_inv for c in costs])
        self.b = np.array([c.b for c in costs])
        self.c = np.array([c.c for c in costs])

    def inverse_gradient(self, lam):
        return np.einsum("kij,kj->ki", self.q_inv, lam - self.b)

    def value(self, x):
        return (0.5 * np.einsum("ki,kij,kj->k", x, self.q, x)
                + np.einsum("ki,ki->k", self.b, x) + self.c)
