"""Scenario documents and parameter sweeps."""

from .loader import (
    Scenario, build_config, build_costs, build_schedule, line_of, load_design,
    load_scenario, parse_design, parse_scenario, read_document,
    validate_document
)
from .schema import SCENARIO_SCHEMA
from .sweep import SWEEP_COLUMNS, SWEEP_PARAMETERS, sweep, write_sweep_csv
