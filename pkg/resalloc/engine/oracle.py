"""Centralised solution of the resource allocation problem.

The optimal multiplier :math:`\\lambda^*` is the root of the resource balance
map :math:`F(\\lambda) = \\sum_i (h_i(\\lambda) - d_i)` on
:math:`\\cap_i \\Lambda_i`. It is computed by a damped Newton iteration with
Jacobian :math:`\\sum_i (\\nabla^2 f_i(h_i(\\lambda)))^{-1}`, falling back to
bisection for scalar problems.
"""

import logging

import attr
import numpy as np

from ..costs import CostStack
from ..util.exceptions import DomainError, NumericError

logger = logging.getLogger(__name__)

#: Absolute tolerance on the resource balance residual
ORACLE_TOL = 1e-12

#: Newton iteration cap
ORACLE_MAX_ITER = 100

#: Absolute margin kept from the bounds of the dual domain intersection when
#: projecting the initial iterate
START_MARGIN = 1e-6


@attr.s(frozen=True, eq=False)
class OracleSolution:
    """Centralised optimum of the allocation problem.

    .. rubric:: Constructor arguments / instance attributes

    ``lambda_star`` (array[float]):
        Optimal multiplier, shape ``(m,)``.

    ``x_star`` (array[float]):
        Optimal allocations :math:`h_i(\\lambda^*)`, shape ``(N, m)``.

    ``gamma_star`` (array[float]):
        Equilibrium integral states :math:`-\\alpha (h_i(\\lambda^*) - d_i)`,
        shape ``(N, m)``.

    ``residual`` (float):
        Resource balance residual :math:`\\|F(\\lambda^*)\\|`.

    ``iterations`` (int):
        Iteration count.
    """
    lambda_star = attr.ib(converter=lambda x: np.array(x, dtype=float))
    x_star = attr.ib(converter=lambda x: np.array(x, dtype=float))
    gamma_star = attr.ib(converter=lambda x: np.array(x, dtype=float))
    residual = attr.ib(converter=float)
    iterations = attr.ib(default=0, converter=int)

    def optimal_cost(self, costs):
        """Total cost :math:`\\sum_i f_i(x_i^*)`."""
        stack = costs if isinstance(costs, CostStack) else CostStack(costs)
        return float(stack.value(self.x_star).sum())


def _as_stack(costs):
    return costs if isinstance(costs, CostStack) else CostStack(costs)


def _balance(stack, lam):
    lam_all = np.broadcast_to(lam, (stack.n, stack.dim))
    return (stack.inverse_gradient(lam_all) - stack.demand).sum(axis=0)


def _jacobian(stack, lam):
    lam_all = np.broadcast_to(lam, (stack.n, stack.dim))
    x = stack.inverse_gradient(lam_all)
    return sum(np.linalg.inv(cost.hessian(xi)) for cost, xi in zip(stack.costs, x))


def _inside(stack, lam):
    try:
        stack.check_domain(np.broadcast_to(lam, (stack.n, stack.dim)))
    except DomainError:
        return False
    return True


def initial_iterate(stack, x0=None):
    """Initial Newton iterate: mean of :math:`\\nabla f_i(x_i)` over nodes
    (``x_i = d_i`` if ``x0`` is unset), projected into the dual domain
    intersection with margin :data:`START_MARGIN`.

    Raises → :class:`.DomainError`:
        If the dual domains have an empty intersection.
    """
    lo, hi = stack.domain_intersection()
    if np.any(lo >= hi):
        j = int(np.flatnonzero(lo >= hi)[0])
        raise DomainError(f"dual domains have an empty intersection on "
                          f"coordinate {j}", coordinate=j)

    x0 = stack.demand if x0 is None else np.asarray(x0, dtype=float)
    lam = stack.gradient(x0).mean(axis=0)
    margin = np.minimum(START_MARGIN, 0.25 * (hi - lo))
    return np.clip(lam, lo + margin, hi - margin)


def _bisect(stack, lam, tol, max_iter):
    # F is increasing for scalar problems: bracket the root, then bisect
    lo, hi = (float(x[0]) for x in stack.domain_intersection())
    margin = max(START_MARGIN, 2e-9 * (hi - lo)) if np.isfinite(hi - lo) \
        else START_MARGIN
    lo_inner, hi_inner = lo + margin, hi - margin

    a = b = float(lam[0])
    width = 1.
    while _balance(stack, [a])[0] > 0. and a > lo_inner and width < 1e15:
        a = max(a - width, lo_inner)
        width *= 2.
    width = 1.
    while _balance(stack, [b])[0] < 0. and b < hi_inner and width < 1e15:
        b = min(b + width, hi_inner)
        width *= 2.
    fa, fb = _balance(stack, [a])[0], _balance(stack, [b])[0]
    if fa > 0. or fb < 0.:
        raise NumericError("oracle bisection failed to bracket the optimal "
                           "multiplier")

    for it in range(max_iter):
        mid = 0.5 * (a + b)
        f_mid = _balance(stack, [mid])[0]
        if abs(f_mid) <= tol or mid in (a, b):
            return np.array([mid]), abs(f_mid), it + 1
        if f_mid > 0.:
            b = mid
        else:
            a = mid
    mid = 0.5 * (a + b)
    return np.array([mid]), abs(_balance(stack, [mid])[0]), max_iter


def solve_oracle(costs, alpha=1., x0=None, tol=ORACLE_TOL,
                 max_iter=ORACLE_MAX_ITER):
    """Compute the optimal multiplier and allocations. The network topology
    plays no role.

    Parameter ``costs`` (list[:class:`.CostSpec`] or :class:`.CostStack`):
        Node costs.

    Parameter ``alpha`` (float):
        Dual gradient gain, used to compute the equilibrium integral states.

    Parameter ``x0`` (array[float] or None):
        Initial allocations used to build the initial iterate.

    Parameter ``tol`` (float):
        Absolute tolerance on the resource balance residual.

    Parameter ``max_iter`` (int):
        Newton iteration cap.

    Returns → :class:`OracleSolution`

    Raises → :class:`.NumericError`:
        If neither the Newton iteration nor its fallback converge.
    """
    stack = _as_stack(costs)
    lam = initial_iterate(stack, x0)
    f = _balance(stack, lam)
    norm_f = float(np.linalg.norm(f))
    iterations = 0

    while norm_f > tol and iterations < max_iter:
        iterations += 1
        try:
            step = -np.linalg.solve(_jacobian(stack, lam), f)
        except np.linalg.LinAlgError:
            break

        # Backtrack until the iterate stays inside the domain and the
        # residual decreases
        s = 1.
        for _ in range(60):
            candidate = lam + s * step
            if _inside(stack, candidate):
                f_new = _balance(stack, candidate)
                norm_new = float(np.linalg.norm(f_new))
                if norm_new <= (1. - 1e-4 * s) * norm_f:
                    break
            s *= 0.5
        else:
            logger.debug("oracle: line search stalled at iteration %d "
                         "(residual %.3e)", iterations, norm_f)
            break

        lam, f, norm_f = candidate, f_new, norm_new
        logger.debug("oracle: iteration %d, step %.3g, residual %.3e",
                     iterations, s, norm_f)

    if norm_f > tol:
        if stack.dim == 1:
            logger.debug("oracle: Newton iteration stalled, bisecting")
            lam, norm_f, extra = _bisect(stack, lam, tol, 200)
            iterations += extra
        # Roundoff floor of the balance sum
        floor = 64. * np.finfo(float).eps * max(
            1., float(np.abs(stack.demand).sum())
        )
        if norm_f > max(tol, floor):
            raise NumericError(f"oracle failed to converge after {iterations} "
                               f"iterations (residual {norm_f:.3e})")

    lam_all = np.broadcast_to(lam, (stack.n, stack.dim))
    x_star = stack.inverse_gradient(lam_all)
    logger.debug("oracle: converged in %d iterations, lambda* = %s",
                 iterations, lam)
    return OracleSolution(
        lambda_star=lam,
        x_star=x_star,
        gamma_star=-alpha * (x_star - stack.demand),
        residual=norm_f,
        iterations=iterations,
    )
