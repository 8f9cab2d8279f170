"""Gain design report gathering every bound and the per-node certificate of a
configuration."""

import logging
import warnings

import attr

from .bounds import (
    beta_bound_centralized, beta_bound_distributed, beta_bound_heuristic,
    min_consensus_beta_design
)
from .certificate import (
    GainCertificate, beta_sup_sampled, ifp_index, sampling_admissible
)
from ..util.exceptions import DesignWarning, GraphError
from ..util.misc import as_float_vector

logger = logging.getLogger(__name__)

#: Largest node count for which the centralized spectral bound is evaluated
CENTRALIZED_MAX_NODES = 500


@attr.s(frozen=True, eq=False)
class DesignReport:
    """Gain design summary.

    .. rubric:: Constructor arguments / instance attributes

    ``certificate`` (:class:`.GainCertificate`):
        Certificate of the evaluated gains.

    ``lipschitz``, ``din_sup`` (array[float]):
        Per-node Lipschitz bounds and in-degree suprema.

    ``beta_centralized`` (float or None):
        Centralized spectral bound; ``None`` if it could not be evaluated (see
        ``notes``).

    ``beta_distributed`` (float):
        Per-node bound in the continuous regime.

    ``beta_sampled`` (float):
        Supremum gain under the evaluated sampling period (equal to
        ``beta_distributed`` if the period is 0).

    ``beta_heuristic`` (float or None):
        Heuristic bound; ``None`` for single-node networks.

    ``consensus_beta`` (array[float]):
        Per-node outcome of the min-consensus gain design.

    ``consensus_rounds`` (int):
        Exchange rounds of the min-consensus gain design.

    ``notes`` (list[str]):
        Remarks collected during evaluation.
    """
    certificate = attr.ib(validator=attr.validators.instance_of(GainCertificate))
    lipschitz = attr.ib(converter=as_float_vector)
    din_sup = attr.ib(converter=as_float_vector)
    beta_centralized = attr.ib()
    beta_distributed = attr.ib(converter=float)
    beta_sampled = attr.ib(converter=float)
    beta_heuristic = attr.ib()
    consensus_beta = attr.ib(converter=as_float_vector)
    consensus_rounds = attr.ib(converter=int)
    notes = attr.ib(factory=list)

    @property
    def valid(self):
        return self.certificate.valid

    @property
    def ifp_index(self):
        """Per-node IFP index bound at the evaluated sampling period."""
        return ifp_index(self.lipschitz, self.certificate.alpha,
                         self.certificate.ts)

    def bound_rows(self):
        """Rows ``(name, value)`` of the gain bounds."""
        return [
            ("beta_centralized", self.beta_centralized),
            ("beta_distributed", self.beta_distributed),
            ("beta_sampled", self.beta_sampled),
            ("beta_heuristic", self.beta_heuristic),
            ("ts_sup", self.certificate.ts_sup),
        ]

    def node_rows(self):
        """Rows ``(node, l, din_sup, ifp_index, consensus_beta, margin)``."""
        return [
            (i, l, d, nu, b, margin)
            for i, (l, d, nu, b, margin) in enumerate(zip(
                self.lipschitz, self.din_sup, self.ifp_index,
                self.consensus_beta, self.certificate.per_node_margin
            ))
        ]


def design_report(schedule, l, alpha, beta, ts=0.):
    """Evaluate every gain bound on a schedule and the certificate of
    ``(alpha, beta, ts)``.

    Parameter ``schedule`` (:class:`.GraphSchedule`):
        Graph schedule.

    Parameter ``l`` (array[float]):
        Per-node Lipschitz bounds.

    Parameter ``alpha``, ``beta`` (float):
        Gains.

    Parameter ``ts`` (float):
        Sampling period [s]; 0 for the continuous regime.

    Returns → :class:`DesignReport`
    """
    l = as_float_vector(l)
    din_sup = schedule.din_sup()
    notes = []

    if schedule.n > CENTRALIZED_MAX_NODES:
        beta_centralized = None
        notes.append(f"centralized bound skipped above "
                     f"{CENTRALIZED_MAX_NODES} nodes")
    else:
        try:
            beta_centralized = beta_bound_centralized(schedule, l, alpha)
        except GraphError as e:
            beta_centralized = None
            notes.append(f"centralized bound unavailable: {e}")

    if schedule.n > 1:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", DesignWarning)
            beta_heuristic = beta_bound_heuristic(l, schedule.n, alpha)
        notes.extend(str(w.message) for w in caught)
    else:
        beta_heuristic = None

    consensus_beta, rounds = min_consensus_beta_design(schedule, l, alpha)
    certificate = sampling_admissible(l, din_sup, alpha, beta, ts)
    logger.debug("design report: certificate %s, margins %s",
                 "valid" if certificate else "invalid",
                 certificate.per_node_margin)

    return DesignReport(
        certificate=certificate,
        lipschitz=l,
        din_sup=din_sup,
        beta_centralized=beta_centralized,
        beta_distributed=beta_bound_distributed(l, din_sup, alpha),
        beta_sampled=beta_sup_sampled(l, din_sup, alpha, ts),
        beta_heuristic=beta_heuristic,
        consensus_beta=consensus_beta,
        consensus_rounds=rounds,
        notes=notes,
    )
