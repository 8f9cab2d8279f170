"""Communication regimes: continuous, periodic zero-order hold and
event-triggered broadcast."""

from .schedulers import (
    event_step, on_edge_change, refresh_continuous, sample_and_hold
)
from .state import CommState, Regime, TriggerRecord
