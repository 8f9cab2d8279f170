"""Gain design conditions, sampling bounds and event trigger coefficients."""

from .bounds import (
    EIG_ZERO_RTOL, beta_bound_centralized, beta_bound_distributed,
    beta_bound_heuristic, min_consensus_beta_design, segment_beta_bound
)
from .certificate import (
    CertificateMethod, GainCertificate, beta_sup_sampled, ifp_index,
    sampling_admissible, trigger_coefficient, trigger_coefficients
)
from .report import CENTRALIZED_MAX_NODES, DesignReport, design_report
