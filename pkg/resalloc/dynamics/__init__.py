"""Node dynamics, consensus coupling and passivity diagnostics."""

from .node import (
    CouplingInput, CouplingSource, NodeState, coupling, coupling_all,
    coupling_from_views, network_rhs, node_rhs
)
from .passivity import (
    PassivityProbe, ifp_residual_continuous, ifp_residual_sampled,
    optimal_eta, probe, sample_indices, storage_value, storage_values,
    z_gain_check
)
