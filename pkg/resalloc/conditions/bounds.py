"""Admissible coupling gain bounds."""

import logging
import warnings

import numpy as np
import scipy.linalg

from ..util.exceptions import DesignWarning, GraphError, ParameterError
from ..util.misc import as_float_vector

logger = logging.getLogger(__name__)

#: Relative threshold under which a symmetric Laplacian eigenvalue counts as 0
EIG_ZERO_RTOL = 1e-9


def _check_alpha(alpha):
    if not alpha > 0.:
        raise ParameterError(f"alpha must be strictly positive, got {alpha}")


def _check_lipschitz(l):
    l = as_float_vector(l)
    if np.any(l <= 0.):
        raise ParameterError(f"Lipschitz bounds must be strictly positive, got {l}")
    return l


def _unique_graphs(schedule):
    seen = {}
    for graph in schedule.graphs:
        seen.setdefault(id(graph), graph)
    return list(seen.values())


def segment_beta_bound(graph, l, alpha):
    """Centralized bound for a single balanced digraph:

    .. math::

       \\frac{\\alpha^2 \\sigma_{\\min}^+(L + L^T)}
             {2 \\sigma_N(L^T \\mathrm{diag}(l_i^2) L)}

    where :math:`\\sigma_{\\min}^+` is the smallest eigenvalue of the symmetric
    part classified as nonzero (see :data:`EIG_ZERO_RTOL`) and :math:`\\sigma_N`
    the largest eigenvalue.

    Raises → :class:`.GraphError`:
        If the digraph is edgeless.
    """
    lap = graph.laplacian()
    sym = lap + lap.T
    eigs = scipy.linalg.eigh(sym, eigvals_only=True)
    if not eigs[-1] > 0.:
        raise GraphError("centralized condition undefined on an edgeless segment")
    sigma_min = eigs[eigs > EIG_ZERO_RTOL * eigs[-1]][0]
    weighted = lap.T @ np.diag(l ** 2) @ lap
    sigma_n = scipy.linalg.eigh(weighted, eigvals_only=True)[-1]
    return float(alpha ** 2 * sigma_min / (2. * sigma_n))


def beta_bound_centralized(schedule, l, alpha):
    """Supremum admissible coupling gain from the centralized spectral
    condition, minimised over schedule segments.

    Parameter ``schedule`` (:class:`.GraphSchedule`):
        Graph schedule. Every segment must be weight-balanced.

    Parameter ``l`` (array[float]):
        Per-node Lipschitz bounds.

    Parameter ``alpha`` (float):
        Dual gradient gain.

    Returns → float:
        Bound on :math:`\\beta`.

    Raises → :class:`.GraphError`:
        If a segment is unbalanced or edgeless.
    """
    _check_alpha(alpha)
    l = _check_lipschitz(l)
    if len(l) != schedule.n:
        raise ParameterError(f"expected {schedule.n} Lipschitz bounds, got {len(l)}")

    bounds = []
    for graph in _unique_graphs(schedule):
        report = graph.is_weight_balanced()
        if not report:
            raise GraphError(f"centralized condition requires balanced "
                             f"segments; unbalanced nodes: "
                             f"{report.offending_nodes()}")
        bounds.append(segment_beta_bound(graph, l, alpha))

    logger.debug("centralized bound over %d distinct segments: %g",
                 len(bounds), min(bounds))
    return min(bounds)


def beta_bound_distributed(l, din_sup, alpha):
    """Supremum admissible coupling gain from the per-node condition
    :math:`\\beta l_i^2 d_{in}^i / \\alpha^2 < 1/2`:

    .. math::

       \\min_{i : d_{in}^i > 0} \\frac{\\alpha^2}{2 l_i^2 d_{in}^i}

    Parameter ``l`` (array[float]):
        Per-node Lipschitz bounds.

    Parameter ``din_sup`` (array[float]):
        Per-node in-degree suprema over the schedule.

    Parameter ``alpha`` (float):
        Dual gradient gain.

    Raises → :class:`.GraphError`:
        If no node ever has a positive in-degree.
    """
    _check_alpha(alpha)
    l = _check_lipschitz(l)
    din_sup = as_float_vector(din_sup)
    receiving = din_sup > 0.
    if not np.any(receiving):
        raise GraphError("no node ever receives information (all in-degrees zero)")
    return float(np.min(alpha ** 2 / (2. * l[receiving] ** 2 * din_sup[receiving])))


def beta_bound_heuristic(l, n, alpha):
    """Quick coupling gain bound for weights at most 1:

    .. math::

       \\frac{\\alpha^2}{2 \\max_i l_i (N - 1)}

    .. warning::

       This expression does not square :math:`l_i` whereas the per-node
       condition does; it is evaluated as stated and a
       :class:`.DesignWarning` is issued. It is not guaranteed to lie below
       :func:`beta_bound_distributed`.
    """
    _check_alpha(alpha)
    l = _check_lipschitz(l)
    if n < 2:
        raise ParameterError(f"heuristic bound requires at least 2 nodes, got {n}")
    warnings.warn("heuristic bound uses max(l_i) unsquared, unlike the per-node "
                  "condition which squares l_i", DesignWarning)
    return float(alpha ** 2 / (2. * l.max() * (n - 1)))


def min_consensus_beta_design(schedule, l, alpha):
    """Offline distributed gain design: every node computes its own per-node
    bound :math:`\\alpha^2 / (2 l_i^2 \\sup_t d_{in}^i(t))`, then nodes
    repeatedly replace their value with the minimum over themselves and their
    in-neighbours in the union graph of the schedule until no node changes.

    Parameter ``schedule`` (:class:`.GraphSchedule`):
        Graph schedule.

    Parameter ``l`` (array[float]):
        Per-node Lipschitz bounds.

    Parameter ``alpha`` (float):
        Dual gradient gain.

    Returns → tuple[array[float], int]:
        Per-node gain values and number of exchange rounds. Nodes without
        in-neighbours keep an infinite value.
    """
    _check_alpha(alpha)
    l = _check_lipschitz(l)
    din_sup = schedule.din_sup()
    with np.errstate(divide="ignore"):
        beta = np.where(din_sup > 0., alpha ** 2 / (2. * l ** 2 * din_sup), np.inf)

    adjacency = schedule.union_graph((0., schedule.horizon)).weights > 0.
    rounds = 0
    while True:
        received = np.where(adjacency, beta[np.newaxis, :], np.inf).min(axis=1)
        updated = np.minimum(beta, received)
        if np.array_equal(updated, beta):
            break
        beta = updated
        rounds += 1

    logger.debug("min-consensus gain design converged in %d rounds", rounds)
    return beta, rounds
