"""Gain certificates, sampling bounds and event trigger coefficients."""

import enum

import attr
import numpy as np

from ..util.attrs import validator_is_positive, validator_is_strictly_positive
from ..util.exceptions import ParameterError
from ..util.misc import as_float_vector


class CertificateMethod(enum.Enum):
    """Condition used to produce a :class:`GainCertificate`."""
    CENTRALIZED = "centralized"
    DISTRIBUTED = "distributed"
    SAMPLED = "sampled"
    HEURISTIC = "heuristic"


@attr.s(frozen=True, eq=False)
class GainCertificate:
    """Per-node admissibility margins of a gain design.

    .. rubric:: Constructor arguments / instance attributes

    ``alpha`` (float):
        Dual gradient gain.

    ``beta`` (float):
        Coupling gain.

    ``ts`` (float):
        Sampling period [s]; 0 for the continuous regime.

    ``per_node_margin`` (array[float]):
        Per-node margin :math:`1/2 - \\beta (l_i^2/\\alpha^2 + T_s l_i/\\alpha)
        d_{in}^i`, evaluated at the in-degree supremum.

    ``method`` (:class:`CertificateMethod`):
        Condition used.

    ``ts_sup`` (float or None):
        Supremum admissible sampling period for ``alpha`` and ``beta``. May be
        negative, in which case no sampling period is admissible.
    """
    alpha = attr.ib(converter=float, validator=validator_is_strictly_positive)
    beta = attr.ib(converter=float, validator=validator_is_strictly_positive)
    ts = attr.ib(converter=float, validator=validator_is_positive)
    per_node_margin = attr.ib(converter=as_float_vector)
    method = attr.ib(converter=CertificateMethod)
    ts_sup = attr.ib(default=None, converter=attr.converters.optional(float))

    @property
    def valid(self):
        """``True`` iff every per-node margin is strictly positive."""
        return bool(np.all(self.per_node_margin > 0.))

    def __bool__(self):
        return self.valid

    def violating_nodes(self):
        """Indices of nodes with a nonpositive margin."""
        return [int(i) for i in np.flatnonzero(self.per_node_margin <= 0.)]


def _sampled_load(l, alpha, ts):
    return l ** 2 / alpha ** 2 + ts * l / alpha


def ifp_index(l, alpha, ts=0.):
    """Input feed-forward passivity index bound of the node subsystem from
    coupling input to multiplier error: :math:`-l_i^2/\\alpha^2` under
    continuous communication and :math:`-(l_i^2/\\alpha^2 + T_s l_i/\\alpha)`
    under sampled communication.

    Parameter ``l`` (float or array[float]):
        Lipschitz bound(s).

    Returns → float or array[float]:
        Index (negative: passivity shortage).
    """
    if not alpha > 0.:
        raise ParameterError(f"alpha must be strictly positive, got {alpha}")
    if ts < 0.:
        raise ParameterError(f"ts must be positive or zero, got {ts}")
    return -_sampled_load(np.asarray(l, dtype=float), alpha, ts)


def beta_sup_sampled(l, din_sup, alpha, ts):
    """Supremum admissible coupling gain under sampling period ``ts``:
    :math:`\\min_i 1 / (2 d_{in}^i (l_i^2/\\alpha^2 + T_s l_i/\\alpha))`."""
    l = as_float_vector(l)
    din_sup = as_float_vector(din_sup)
    receiving = din_sup > 0.
    if not np.any(receiving):
        return np.inf
    load = _sampled_load(l[receiving], alpha, ts) * din_sup[receiving]
    return float(np.min(1. / (2. * load)))


def sampling_admissible(l, din_sup, alpha, beta, ts):
    """Evaluate the sampled-communication gain condition

    .. math::

       \\beta \\left(\\frac{l_i^2}{\\alpha^2} + T_s \\frac{l_i}{\\alpha}\\right)
       d_{in}^i < \\frac{1}{2} \\quad \\forall i

    at the in-degree suprema. With ``ts = 0``, this reduces to the continuous
    per-node condition.

    Parameter ``l`` (array[float]):
        Per-node Lipschitz bounds.

    Parameter ``din_sup`` (array[float]):
        Per-node in-degree suprema over the schedule.

    Parameter ``alpha``, ``beta`` (float):
        Gains.

    Parameter ``ts`` (float):
        Sampling period [s].

    Returns → :class:`GainCertificate`:
        Certificate (possibly invalid: an invalid certificate is not an error).
    """
    l = as_float_vector(l)
    din_sup = as_float_vector(din_sup)
    if len(l) != len(din_sup):
        raise ParameterError(f"got {len(l)} Lipschitz bounds for "
                             f"{len(din_sup)} in-degrees")
    if not alpha > 0. or not beta > 0. or ts < 0.:
        raise ParameterError(f"invalid gains alpha = {alpha}, beta = {beta}, "
                             f"ts = {ts}")

    margin = 0.5 - beta * _sampled_load(l, alpha, ts) * din_sup

    receiving = din_sup > 0.
    if np.any(receiving):
        lr, dr = l[receiving], din_sup[receiving]
        ts_sup = float(np.min((1. / (2. * beta * dr) - lr ** 2 / alpha ** 2)
                              * alpha / lr))
    else:
        ts_sup = np.inf

    return GainCertificate(
        alpha=alpha,
        beta=beta,
        ts=ts,
        per_node_margin=margin,
        method=CertificateMethod.SAMPLED if ts > 0. else CertificateMethod.DISTRIBUTED,
        ts_sup=ts_sup
    )


def trigger_coefficient(l_i, din_i_k, alpha, beta, ts, c_i):
    """Multiplier of the neighbour disagreement in the event trigger rule:

    .. math::

       \\frac{c_i}{d_{in}^i(k)}
       \\left(\\frac{1}{2} - \\beta d_{in}^i(k)
       \\left(\\frac{l_i^2}{\\alpha^2} + T_s \\frac{l_i}{\\alpha}\\right)\\right)^2

    Nodes without in-neighbours at step ``k`` get a zero coefficient.

    Raises → :class:`.ParameterError`:
        If ``c_i`` is not in :math:`(0, 1)` or if the sampled gain condition
        fails at ``din_i_k``.
    """
    return float(trigger_coefficients(l_i, din_i_k, alpha, beta, ts, c_i))


def trigger_coefficients(l, din, alpha, beta, ts, c):
    """Vectorised :func:`trigger_coefficient` over nodes."""
    c = np.asarray(c, dtype=float)
    if np.any((c <= 0.) | (c >= 1.)):
        raise ParameterError(f"trigger constants must lie in (0, 1), got {c}")
    l = np.asarray(l, dtype=float)
    din = np.asarray(din, dtype=float)

    margin = 0.5 - beta * din * _sampled_load(l, alpha, ts)
    if np.any((margin < 0.) & (din > 0.)):
        raise ParameterError("sampled gain condition violated: trigger "
                             "coefficient undefined")
    with np.errstate(divide="ignore", invalid="ignore"):
        result = np.where(din > 0., c / din * margin ** 2, 0.)
    return result
