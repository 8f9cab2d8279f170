"""Time-varying weighted digraphs: adjacency schedules, Laplacians, weight
balance and joint strong connectivity."""

from .digraph import (
    BALANCE_TOL, BalanceReport, WeightedDigraph, is_weight_balanced, laplacian
)
from .schedule import (
    GraphSchedule, builtin_schedules, default_ten_node_schedule,
    union_strongly_connected
)
